#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qsv/sdp.hpp"
#include "qsv/verifier.hpp"

namespace qsv {

struct CandidateScore {
  int index = -1;
  double delta = 0.0;  // min distance after hypothetically adding the candidate
  double Delta = 0.0;  // max distance after hypothetically adding the candidate
};

struct AdaptiveStep {
  int index = -1;  // observable measured at this step
  double y = 0.0;
  double omega = 0.0;  // min distance over the accumulated set
  double Omega = 0.0;  // max distance over the accumulated set
  std::string estimate_digest;            // empty when the step decided the run
  std::vector<CandidateScore> candidates; // scores used to choose the next index
  bool all_delta_zero = false;            // which selection branch fired
};

struct AdaptiveTrace {
  Verdict verdict = Verdict::Exhausted;
  int steps_used = 0;
  std::vector<AdaptiveStep> steps;
};

/// delta/Delta look-ahead for one candidate: distance extrema over the
/// accumulated constraints plus Tr(rho A_candidate) = Tr(estimate A_candidate).
/// The augmented set contains the estimate by construction; infeasibility here
/// signals a bug and raises SolverError.
std::pair<double, double> candidate_scores(const DensityMatrix& estimate,
                                           const CompatibleSetSpec& accumulated,
                                           const HermitianOperator& candidate,
                                           const DensityMatrix& rho0);

/// Algorithm AV: adaptive verification. Starts from the IOS initialization
/// (argmin of the single-constraint worst-case distance), then interleaves
/// measurement, the C1/C2 bracket, state estimation, and delta/Delta scoring
/// of the remaining independent candidates. Next index: argmin Delta when all
/// delta vanish, else argmin min{eps - delta, Delta - eps}; ties fall back to
/// the IAS score against the current estimate, random among maximizers.
AdaptiveTrace run_av(const ObservableSet& set, MeasurementOracle& oracle,
                     const DensityMatrix& rho0, double epsilon, std::uint64_t seed);

}  // namespace qsv
