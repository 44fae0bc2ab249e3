#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "qsv/rng.hpp"
#include "qsv/types.hpp"

namespace qsv {

/// The 6^n projective measurements onto Pauli eigenstates. For n = 1 the six
/// rank-1 eigenprojectors of sigma_x, sigma_y, sigma_z ordered +1 then -1 per
/// axis ("x+", "x-", "y+", "y-", "z+", "z-"); for n = 2 all 36 tensor
/// products with index 6*(i-1)+j and labels like "x+⊗z-".
ObservableSet pauli_projector_set(int n_qubits);

/// True iff span({A_i} ∪ {I}) covers all d x d Hermitian matrices, decided by
/// the HS-Gram matrix rank (eigenvalues above 1e-9).
bool is_information_complete(const ObservableSet& set);

/// Haar-like random pure state: complex standard-normal ket, normalized.
DensityMatrix random_pure_target(std::uint64_t seed, int dim);

/// Mixing weight, rotation strength, and the 16 Hamiltonian coefficients for
/// the generated-state model. When `coefficients` is absent, perturb_state
/// draws them uniformly from (-1,1) using its seed argument.
struct PerturbationSpec {
  double lambda = 0.0;  // in [0,1]
  double eta = 0.0;     // >= 0
  std::optional<std::vector<double>> coefficients;  // 16 reals in (-1,1)

  void validate() const;
};

/// exp(i eta H) ((1-lambda) rho0 + lambda/4 I) exp(-i eta H) with
/// H = sum_j h_j Gamma_j over the SU(4) generator basis (Gamma_0 = I).
DensityMatrix perturb_state(const DensityMatrix& rho0, const PerturbationSpec& spec,
                            std::uint64_t seed);

/// The 15 generalized Gell-Mann matrices for d = 4, traceless and normalized
/// to Tr(Gamma_m Gamma_j) = 2 delta_mj.
const std::vector<HermitianOperator>& su4_generators();

}  // namespace qsv
