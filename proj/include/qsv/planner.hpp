#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qsv/sdp.hpp"
#include "qsv/types.hpp"

namespace qsv {

enum class PlanMethod { OS, IOS, IAS, Random };

std::string to_string(PlanMethod m);
PlanMethod plan_method_from_string(const std::string& s);

/// Ordered observable indices with per-step scores (alpha for IOS, omega for
/// IAS; empty for OS/Random plans).
struct SequencePlan {
  PlanMethod method = PlanMethod::Random;
  std::vector<int> indices;
  std::vector<double> scores;
  std::vector<double> norm_sq;  // IAS: Tr(varrho_K^2) trajectory
  std::string stop_reason;      // "epsilon" | "span" | "cap" | "complete"
  std::uint64_t seed = 0;
  double epsilon = 0.0;         // OS/IOS: the epsilon the plan was built for
  std::string target_digest;

  int length() const { return static_cast<int>(indices.size()); }
};

/// Running orthonormalization of the measured observables together with the
/// projection varrho_K of rho0 onto their span.
struct ProjectionState {
  std::vector<HermitianOperator> ortho_basis;  // Gamma_i, orthonormal in HS
  HermitianOperator projected;                 // varrho_K (may be non-PSD)
  double projected_norm_sq = 0.0;              // Tr(varrho_K^2)

  static ProjectionState empty(int dim);
};

/// Residual of `a` orthogonal to the accumulated basis (two-pass
/// Gram-Schmidt) and its HS norm.
struct OrthoResidual {
  HermitianOperator perp;
  double norm = 0.0;
};
OrthoResidual orthogonal_residual(const ProjectionState& state, const HermitianOperator& a);

/// Append one observable: Gamma = A_perp/||A_perp||, projection and norm
/// updated by the rank-one identities
///   varrho_{K+1} = varrho_K + Tr(rho0 A_perp)/Tr(A_perp^2) * A_perp,
///   ||varrho_{K+1}||^2 = ||varrho_K||^2 + Tr^2(rho0 A_perp)/||A_perp||^2.
/// Rejects operators with orthogonal residual below 1e-9.
ProjectionState project_update(const ProjectionState& state, const DensityMatrix& rho0,
                               const HermitianOperator& a_next);

/// Hilbert-Schmidt distance bound from the projection:
/// sqrt(1 - Tr(varrho_K^2)) + sqrt(Tr(rho0^2) - Tr(varrho_K^2)).
double hs_bound(const DensityMatrix& rho0, const ProjectionState& state);

/// Bures bound for pure targets, valid when Tr(varrho_K^2) >= 1/2:
/// sqrt(2 (1 - sqrt(2 Tr(varrho_K^2) - 1))).
double bures_bound_pure(double projected_norm_sq);

/// Score of adding `a`: Tr^2(rho0 A_perp)/||A_perp||^2, the norm-squared gain
/// of the projection. Returns 0 for dependent operators.
double ias_score(const ProjectionState& state, const Matrix& rho0, const HermitianOperator& a);

/// Exhaustive optimal sequence: smallest subset (searched in increasing size
/// up to max_subset) whose compatible set around rho0 fits in the epsilon
/// ball. Falls back to the best subset found with stop_reason "cap".
SequencePlan plan_os(const DensityMatrix& rho0, const ObservableSet& set, double epsilon,
                     int max_subset);

/// Greedy sequence minimizing the worst-case Bures distance of the compatible
/// set at each step; ties broken by the IAS score rule (random among
/// maximizers, seeded). When the minimum alpha hits zero the remaining
/// independent indices are absorbed in ascending order (stop_reason "span").
/// epsilon is recorded for downstream verification but does not stop the
/// construction.
SequencePlan plan_ios(const DensityMatrix& rho0, const ObservableSet& set, double epsilon,
                      std::uint64_t seed = 0);

/// Analytic sequence maximizing the projection-norm gain at each step.
SequencePlan plan_ias(const DensityMatrix& rho0, const ObservableSet& set,
                      std::uint64_t seed = 0);

/// Append seeded random linearly independent indices until d^2 are selected.
SequencePlan complete_sequence(const SequencePlan& plan, const ObservableSet& set,
                               std::uint64_t seed);

/// Seeded uniformly random order filtered to d^2 linearly independent
/// observables (control-group sequences).
SequencePlan plan_random(const ObservableSet& set, std::uint64_t seed);

/// Hash of the target state and observable set, stored in plans so a plan is
/// never verified against the wrong target.
std::string target_digest(const DensityMatrix& rho0, const ObservableSet& set);

}  // namespace qsv
