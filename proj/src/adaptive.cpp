#include "qsv/adaptive.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "qsv/planner.hpp"
#include "qsv/rng.hpp"
#include "qsv/states.hpp"

namespace qsv {

namespace {

std::string matrix_digest(const Matrix& m) {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](std::int64_t v) {
    const unsigned char* p = reinterpret_cast<const unsigned char*>(&v);
    for (std::size_t i = 0; i < sizeof v; ++i) {
      h ^= p[i];
      h *= 1099511628211ULL;
    }
  };
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      mix(llround(m(i, j).real() * 1e12));
      mix(llround(m(i, j).imag() * 1e12));
    }
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace

std::pair<double, double> candidate_scores(const DensityMatrix& estimate,
                                           const CompatibleSetSpec& accumulated,
                                           const HermitianOperator& candidate,
                                           const DensityMatrix& rho0) {
  CompatibleSetSpec aug = accumulated;
  aug.add_from_state(candidate, estimate);
  try {
    return distance_extrema(rho0, aug);
  } catch (const InfeasibleError&) {
    // the estimate satisfies the accumulated constraints and its own
    // expectation value, so emptiness here can only be a solver bug
    throw SolverError("candidate_scores: augmented compatible set reported infeasible");
  }
}

AdaptiveTrace run_av(const ObservableSet& set, MeasurementOracle& oracle,
                     const DensityMatrix& rho0, double epsilon, std::uint64_t seed) {
  if (epsilon <= 0.0) throw Error("run_av: epsilon must be positive");
  if (!is_pure(rho0)) throw Error("run_av: target state is not pure");
  if (rho0.dim() != set.dim() || oracle.dim() != set.dim()) {
    throw Error("run_av: dimension mismatch");
  }
  if (!is_information_complete(set)) throw Error("run_av: set not information-complete");

  const int d = set.dim();
  const int d2 = d * d;
  RngStream rng(seed);

  // tie-break rule shared by the initialization and the per-step selection:
  // among argmin candidates keep the IAS-score maximizers, pick at random
  auto tie_break = [&](const std::vector<int>& cand, const std::vector<double>& key,
                       const ProjectionState& proj, const Matrix& score_state) -> int {
    const double best = *std::min_element(key.begin(), key.end());
    std::vector<int> tied;
    for (std::size_t i = 0; i < cand.size(); ++i) {
      if (key[i] <= best + kTieTol) tied.push_back(static_cast<int>(i));
    }
    if (tied.size() == 1) return cand[tied[0]];
    std::vector<double> gain(tied.size());
    double gmax = -1.0;
    for (std::size_t t = 0; t < tied.size(); ++t) {
      gain[t] = ias_score(proj, score_state, set[cand[tied[t]]]);
      gmax = std::max(gmax, gain[t]);
    }
    std::vector<int> keep;
    for (std::size_t t = 0; t < tied.size(); ++t) {
      if (gain[t] >= gmax - kTieTol) keep.push_back(tied[t]);
    }
    const int pick = keep[keep.size() == 1 ? 0 : static_cast<int>(rng.below(keep.size()))];
    return cand[pick];
  };

  AdaptiveTrace out;
  ProjectionState proj = ProjectionState::empty(d);
  CompatibleSetSpec acc(d);
  std::vector<int> pool(set.size());
  std::iota(pool.begin(), pool.end(), 0);

  // initialization: argmin over single-observable worst-case distances
  int next = -1;
  {
    std::vector<int> cand = pool;
    std::vector<double> alpha(cand.size());
    for (std::size_t c = 0; c < cand.size(); ++c) {
      CompatibleSetSpec spec(d);
      spec.add_from_state(set[cand[c]], rho0);
      SdpSolution lo = extremize_linear(rho0.as_operator(), spec, Sense::Min);
      if (lo.status != SdpStatus::Optimal) throw SolverError("run_av: init solve failed");
      alpha[c] = bures_from_fidelity(snap_fidelity(lo.value));
    }
    next = tie_break(cand, alpha, proj, rho0.entries());
  }

  for (int k = 1; k <= d2; ++k) {
    const int idx = next;
    pool.erase(std::find(pool.begin(), pool.end(), idx));
    proj = project_update(proj, rho0, set[idx]);

    const double y = oracle.measure(set[idx]);
    acc.add(set[idx], y);

    AdaptiveStep step;
    step.index = idx;
    step.y = y;

    DistanceExtrema ext{0.0, 0.0, rho0};
    try {
      ext = distance_extrema_full(rho0, acc);
    } catch (const InfeasibleError&) {
      if (oracle.is_perfect()) {
        throw SolverError("run_av: infeasible intersection with perfect measurements");
      }
      throw RemeasureError("run_av: sampled data mutually inconsistent; re-measure");
    }
    step.omega = ext.min_dist;
    step.Omega = ext.max_dist;
    out.steps_used = k;

    if (ext.min_dist > epsilon) {
      out.steps.push_back(std::move(step));
      out.verdict = Verdict::NotAccurate;
      return out;
    }
    if (ext.max_dist <= epsilon) {
      out.steps.push_back(std::move(step));
      out.verdict = Verdict::Accurate;
      return out;
    }
    if (k == d2) {
      out.steps.push_back(std::move(step));
      out.verdict = Verdict::Exhausted;
      return out;
    }

    // estimate rho_k: argmin of d_B(., rho0) over the accumulated set, which
    // is exactly the Max-fidelity optimizer of the bracket solve
    const DensityMatrix& estimate = ext.closest;
    step.estimate_digest = matrix_digest(estimate.entries());

    std::vector<int> cand;
    for (auto it = pool.begin(); it != pool.end();) {
      OrthoResidual res = orthogonal_residual(proj, set[*it]);
      if (res.norm <= kDependenceTol) {
        it = pool.erase(it);  // dependent observables are skipped permanently
        continue;
      }
      cand.push_back(*it);
      ++it;
    }
    if (cand.empty()) {
      out.steps.push_back(std::move(step));
      out.verdict = Verdict::Exhausted;
      return out;
    }

    std::vector<double> delta(cand.size()), Delta(cand.size());
    for (std::size_t c = 0; c < cand.size(); ++c) {
      std::tie(delta[c], Delta[c]) = candidate_scores(estimate, acc, set[cand[c]], rho0);
      step.candidates.push_back({cand[c], delta[c], Delta[c]});
    }

    // selection: with all delta ~ 0 only C2 carries information (argmin
    // Delta); otherwise head for the nearest decision margin
    const bool all_zero =
        std::all_of(delta.begin(), delta.end(), [](double v) { return v < kValueTol; });
    step.all_delta_zero = all_zero;
    std::vector<double> key(cand.size());
    for (std::size_t c = 0; c < cand.size(); ++c) {
      key[c] = all_zero ? Delta[c] : std::min(epsilon - delta[c], Delta[c] - epsilon);
    }
    next = tie_break(cand, key, proj, estimate.entries());
    out.steps.push_back(std::move(step));
  }
  return out;
}

}  // namespace qsv
