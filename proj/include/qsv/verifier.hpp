#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "qsv/planner.hpp"
#include "qsv/rng.hpp"
#include "qsv/types.hpp"

namespace qsv {

/// Source of sampled expectation values. Perfect mode returns Tr(rho_exp A)
/// exactly; FiniteShots returns the mean of `shots` Bernoulli draws with
/// success probability Tr(rho_exp A), valid only for projector-valued
/// observables (spectrum {0,1}).
class MeasurementOracle {
 public:
  static MeasurementOracle perfect(DensityMatrix rho_exp);
  static MeasurementOracle finite_shots(DensityMatrix rho_exp, std::uint64_t shots,
                                        std::uint64_t seed);

  double measure(const HermitianOperator& a);

  bool is_perfect() const { return shots_ == 0; }
  int dim() const { return rho_exp_.dim(); }
  const DensityMatrix& state() const { return rho_exp_; }

 private:
  MeasurementOracle(DensityMatrix rho_exp, std::uint64_t shots, std::uint64_t seed)
      : rho_exp_(std::move(rho_exp)), shots_(shots), seed_(seed) {}

  DensityMatrix rho_exp_;
  std::uint64_t shots_ = 0;  // 0 = perfect
  std::uint64_t seed_ = 0;
  std::uint64_t calls_ = 0;
};

enum class Verdict { Accurate, NotAccurate, Exhausted };

std::string to_string(Verdict v);

struct StepRecord {
  int index = -1;    // observable index measured at this step
  double y = 0.0;    // sampled average
  double gamma = 0.0;  // min distance over the compatible set
  double Gamma = 0.0;  // max distance over the compatible set
};

struct VerificationOutcome {
  Verdict verdict = Verdict::Exhausted;
  int steps_used = 0;
  std::vector<StepRecord> trace;
  std::optional<DensityMatrix> reconstructed;  // only on Exhausted
};

/// Algorithm VM: walk the plan, measure, and test C1 (min distance > eps =>
/// NotAccurate) and C2 (max distance <= eps => Accurate) at every step. On
/// finishing the plan without a verdict, returns Exhausted with the
/// tomographic reconstruction when the measured span allows one.
/// An infeasible intersection (possible only with finite shots) raises
/// RemeasureError.
VerificationOutcome run_vm(const SequencePlan& plan, const ObservableSet& set,
                           MeasurementOracle& oracle, const DensityMatrix& rho0,
                           double epsilon);

/// Solve the Gram system [Tr(A_i A_j)] c = y over the selected observables
/// (the unit-trace row is appended when independent) and return the unique
/// compatible Hermitian matrix. Dependent subsets and unphysical results
/// (eigenvalue below -1e-6) are errors.
DensityMatrix reconstruct_state(const ObservableSet& set, const std::vector<int>& subset,
                                const std::vector<double>& values);

}  // namespace qsv
