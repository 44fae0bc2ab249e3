#include "qsv/planner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "qsv/rng.hpp"
#include "qsv/states.hpp"

namespace qsv {

namespace {

// Worst-case Bures distance from rho0 over the set compatible with the
// rho0-values of the given constraint list (one Min-fidelity solve).
double max_distance(const DensityMatrix& rho0, const CompatibleSetSpec& spec) {
  SdpSolution lo = extremize_linear(rho0.as_operator(), spec, Sense::Min);
  if (lo.status == SdpStatus::Infeasible) {
    throw SolverError("compatible set of rho0-values infeasible (bug)");
  }
  if (lo.status != SdpStatus::Optimal) throw SolverError("min-fidelity solve failed");
  return bures_from_fidelity(snap_fidelity(lo.value));
}

std::uint64_t fnv1a(std::uint64_t h, const void* data, std::size_t n) {
  const unsigned char* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 1099511628211ULL;
  }
  return h;
}

std::uint64_t hash_matrix(std::uint64_t h, const Matrix& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      // quantize at 1e-12 so equal-within-tolerance operators hash equal
      const std::int64_t re = llround(m(i, j).real() * 1e12);
      const std::int64_t im = llround(m(i, j).imag() * 1e12);
      h = fnv1a(h, &re, sizeof re);
      h = fnv1a(h, &im, sizeof im);
    }
  }
  return h;
}

// positions of the minimal (within tol) entries of key
std::vector<int> argmin_set(const std::vector<double>& key, double tol) {
  double best = *std::min_element(key.begin(), key.end());
  std::vector<int> out;
  for (std::size_t i = 0; i < key.size(); ++i) {
    if (key[i] <= best + tol) out.push_back(static_cast<int>(i));
  }
  return out;
}

}  // namespace

std::string to_string(PlanMethod m) {
  switch (m) {
    case PlanMethod::OS: return "os";
    case PlanMethod::IOS: return "ios";
    case PlanMethod::IAS: return "ias";
    case PlanMethod::Random: return "random";
  }
  return "random";
}

PlanMethod plan_method_from_string(const std::string& s) {
  if (s == "os") return PlanMethod::OS;
  if (s == "ios") return PlanMethod::IOS;
  if (s == "ias") return PlanMethod::IAS;
  if (s == "random") return PlanMethod::Random;
  throw Error("unknown plan method: " + s);
}

ProjectionState ProjectionState::empty(int dim) {
  ProjectionState st{{}, HermitianOperator::zero(dim), 0.0};
  return st;
}

OrthoResidual orthogonal_residual(const ProjectionState& state, const HermitianOperator& a) {
  Matrix perp = a.entries();
  for (int pass = 0; pass < 2; ++pass) {
    for (const auto& g : state.ortho_basis) {
      perp -= hs_inner_raw(g.entries(), perp) * g.entries();
    }
  }
  perp = 0.5 * (perp + perp.adjoint().eval());
  const double norm = std::sqrt(std::max(0.0, hs_inner_raw(perp, perp)));
  return {HermitianOperator(std::move(perp)), norm};
}

ProjectionState project_update(const ProjectionState& state, const DensityMatrix& rho0,
                               const HermitianOperator& a_next) {
  OrthoResidual r = orthogonal_residual(state, a_next);
  if (r.norm <= kDependenceTol) {
    throw Error("project_update: operator is dependent on the accumulated span");
  }
  const Matrix& perp = r.perp.entries();
  const double norm_sq = r.norm * r.norm;
  const double coeff = hs_inner_raw(rho0.entries(), perp);

  ProjectionState next{state.ortho_basis,
                       HermitianOperator(state.projected.entries() + (coeff / norm_sq) * perp),
                       state.projected_norm_sq + coeff * coeff / norm_sq};
  next.ortho_basis.emplace_back(perp / r.norm);
  return next;
}

double hs_bound(const DensityMatrix& rho0, const ProjectionState& state) {
  const double p2 = purity(rho0.entries());
  const double k2 = state.projected_norm_sq;
  if (k2 > p2 + 1e-9) throw Error("hs_bound: projection norm exceeds state purity");
  return std::sqrt(std::max(0.0, 1.0 - k2)) + std::sqrt(std::max(p2 - k2, 0.0));
}

double bures_bound_pure(double projected_norm_sq) {
  if (projected_norm_sq < 0.5) {
    throw Error("bures_bound_pure: requires Tr(varrho_K^2) >= 1/2");
  }
  const double inner = std::sqrt(std::min(1.0, 2.0 * projected_norm_sq - 1.0));
  return std::sqrt(std::max(0.0, 2.0 * (1.0 - inner)));
}

double ias_score(const ProjectionState& state, const Matrix& rho0, const HermitianOperator& a) {
  OrthoResidual r = orthogonal_residual(state, a);
  if (r.norm <= kDependenceTol) return 0.0;
  const double t = hs_inner_raw(rho0, r.perp.entries());
  return t * t / (r.norm * r.norm);
}

std::string target_digest(const DensityMatrix& rho0, const ObservableSet& set) {
  std::uint64_t h = 1469598103934665603ULL;
  const std::int32_t d = rho0.dim();
  h = fnv1a(h, &d, sizeof d);
  h = hash_matrix(h, rho0.entries());
  for (int i = 0; i < set.size(); ++i) {
    h = hash_matrix(h, set[i].entries());
    h = fnv1a(h, set.label(i).data(), set.label(i).size());
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

SequencePlan plan_os(const DensityMatrix& rho0, const ObservableSet& set, double epsilon,
                     int max_subset) {
  if (!is_pure(rho0)) throw Error("plan_os: target state is not pure");
  if (rho0.dim() != set.dim()) throw Error("plan_os: dimension mismatch");
  const int r = set.size();
  const int d2 = set.dim() * set.dim();
  max_subset = std::min(max_subset, r);

  SequencePlan plan;
  plan.method = PlanMethod::OS;
  plan.epsilon = epsilon;
  plan.target_digest = target_digest(rho0, set);

  auto eval_subset = [&](const std::vector<int>& subset) {
    CompatibleSetSpec spec(set.dim());
    for (int i : subset) spec.add_from_state(set[i], rho0);
    return max_distance(rho0, spec);
  };

  // the empty set first: within the diameter any state qualifies
  double best_value = eval_subset({});
  std::vector<int> best_subset;
  if (best_value <= epsilon) {
    plan.stop_reason = "epsilon";
    return plan;
  }

  for (int k = 1; k <= max_subset; ++k) {
    std::vector<int> subset(k);
    std::iota(subset.begin(), subset.end(), 0);
    while (true) {
      const double v = eval_subset(subset);
      if (v < best_value - 1e-12) {
        best_value = v;
        best_subset = subset;
      }
      if (v <= epsilon) {
        plan.indices = subset;
        plan.stop_reason = "epsilon";
        return plan;
      }
      // next k-combination in lexicographic order
      int i = k - 1;
      while (i >= 0 && subset[i] == r - k + i) --i;
      if (i < 0) break;
      ++subset[i];
      for (int j = i + 1; j < k; ++j) subset[j] = subset[j - 1] + 1;
    }
    if (k >= d2) break;  // larger subsets cannot be needed
  }
  plan.indices = best_subset;
  plan.stop_reason = "cap";
  return plan;
}

SequencePlan plan_ios(const DensityMatrix& rho0, const ObservableSet& set, double epsilon,
                      std::uint64_t seed) {
  if (!is_pure(rho0)) throw Error("plan_ios: target state is not pure");
  if (rho0.dim() != set.dim()) throw Error("plan_ios: dimension mismatch");
  if (!is_information_complete(set)) throw Error("plan_ios: set not information-complete");

  const int d = set.dim();
  const int d2 = d * d;
  RngStream rng(seed);

  SequencePlan plan;
  plan.method = PlanMethod::IOS;
  plan.epsilon = epsilon;
  plan.seed = seed;
  plan.target_digest = target_digest(rho0, set);
  plan.stop_reason = "complete";

  ProjectionState proj = ProjectionState::empty(d);
  CompatibleSetSpec acc(d);
  std::vector<int> pool(set.size());
  std::iota(pool.begin(), pool.end(), 0);

  while (plan.length() < d2) {
    // independent candidates; dependent indices leave the pool permanently
    std::vector<int> cand;
    std::vector<double> omega;
    for (auto it = pool.begin(); it != pool.end();) {
      OrthoResidual res = orthogonal_residual(proj, set[*it]);
      if (res.norm <= kDependenceTol) {
        it = pool.erase(it);
        continue;
      }
      const double t = hs_inner_raw(rho0.entries(), res.perp.entries());
      cand.push_back(*it);
      omega.push_back(t * t / (res.norm * res.norm));
      ++it;
    }
    if (cand.empty()) break;

    std::vector<double> alpha(cand.size());
    for (std::size_t c = 0; c < cand.size(); ++c) {
      CompatibleSetSpec spec = acc;
      spec.add_from_state(set[cand[c]], rho0);
      alpha[c] = max_distance(rho0, spec);
    }

    const double min_alpha = *std::min_element(alpha.begin(), alpha.end());
    std::vector<int> tied = argmin_set(alpha, kTieTol);
    if (tied.size() > 1) {
      // IAS score rule: keep the maximizers of the projection-norm gain
      double best_omega = -1.0;
      for (int t : tied) best_omega = std::max(best_omega, omega[t]);
      std::vector<int> keep;
      for (int t : tied) {
        if (omega[t] >= best_omega - kTieTol) keep.push_back(t);
      }
      tied = std::move(keep);
    }
    const int pick = tied[tied.size() == 1 ? 0 : static_cast<int>(rng.below(tied.size()))];
    const int chosen = cand[pick];

    proj = project_update(proj, rho0, set[chosen]);
    acc.add_from_state(set[chosen], rho0);
    plan.indices.push_back(chosen);
    plan.scores.push_back(alpha[pick]);
    pool.erase(std::find(pool.begin(), pool.end(), chosen));

    if (min_alpha <= kZeroDistanceTol) {
      // rho0 lies in the span of the selected measurements: absorb the
      // remaining independent indices in ascending order and stop
      std::sort(pool.begin(), pool.end());
      for (int i : pool) {
        OrthoResidual res = orthogonal_residual(proj, set[i]);
        if (res.norm <= kDependenceTol) continue;
        proj = project_update(proj, rho0, set[i]);
        plan.indices.push_back(i);
      }
      plan.stop_reason = "span";
      return plan;
    }
  }
  return plan;
}

SequencePlan plan_ias(const DensityMatrix& rho0, const ObservableSet& set,
                      std::uint64_t seed) {
  if (rho0.dim() != set.dim()) throw Error("plan_ias: dimension mismatch");
  if (!is_information_complete(set)) throw Error("plan_ias: set not information-complete");

  const int d = set.dim();
  const int d2 = d * d;
  RngStream rng(seed);

  SequencePlan plan;
  plan.method = PlanMethod::IAS;
  plan.seed = seed;
  plan.target_digest = target_digest(rho0, set);
  plan.stop_reason = "complete";

  ProjectionState proj = ProjectionState::empty(d);
  std::vector<int> pool(set.size());
  std::iota(pool.begin(), pool.end(), 0);

  while (plan.length() < d2) {
    std::vector<int> cand;
    std::vector<double> omega;
    for (auto it = pool.begin(); it != pool.end();) {
      OrthoResidual res = orthogonal_residual(proj, set[*it]);
      if (res.norm <= kDependenceTol) {
        it = pool.erase(it);
        continue;
      }
      const double t = hs_inner_raw(rho0.entries(), res.perp.entries());
      cand.push_back(*it);
      omega.push_back(t * t / (res.norm * res.norm));
      ++it;
    }
    if (cand.empty()) break;

    double best = *std::max_element(omega.begin(), omega.end());
    if (best <= 1e-12 && plan.stop_reason == "complete") {
      plan.stop_reason = "span";  // rho0 already in span; rest is random fill
    }
    std::vector<int> tied;
    for (std::size_t c = 0; c < cand.size(); ++c) {
      if (omega[c] >= best - kTieTol) tied.push_back(static_cast<int>(c));
    }
    const int pick = tied[tied.size() == 1 ? 0 : static_cast<int>(rng.below(tied.size()))];
    const int chosen = cand[pick];

    proj = project_update(proj, rho0, set[chosen]);
    plan.indices.push_back(chosen);
    plan.scores.push_back(omega[pick]);
    plan.norm_sq.push_back(proj.projected_norm_sq);
    pool.erase(std::find(pool.begin(), pool.end(), chosen));
  }
  return plan;
}

SequencePlan complete_sequence(const SequencePlan& plan, const ObservableSet& set,
                               std::uint64_t seed) {
  const int d2 = set.dim() * set.dim();
  if (plan.length() > d2) throw Error("complete_sequence: plan longer than d^2");
  if (plan.length() == d2) return plan;

  // rho0 is irrelevant for completion; only the span matters
  ProjectionState proj = ProjectionState::empty(set.dim());
  SequencePlan out = plan;
  for (int i : plan.indices) {
    OrthoResidual res = orthogonal_residual(proj, set[i]);
    if (res.norm <= kDependenceTol) throw Error("complete_sequence: plan indices dependent");
    proj.ortho_basis.emplace_back(res.perp.entries() / res.norm);
  }

  RngStream rng(seed);
  out.seed = seed;
  std::vector<int> pool;
  for (int i = 0; i < set.size(); ++i) {
    if (std::find(plan.indices.begin(), plan.indices.end(), i) == plan.indices.end()) {
      pool.push_back(i);
    }
  }
  while (out.length() < d2) {
    if (pool.empty()) {
      throw Error("complete_sequence: set cannot furnish d^2 independent observables");
    }
    const std::size_t at = rng.below(pool.size());
    const int i = pool[at];
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(at));
    OrthoResidual res = orthogonal_residual(proj, set[i]);
    if (res.norm <= kDependenceTol) continue;
    proj.ortho_basis.emplace_back(res.perp.entries() / res.norm);
    out.indices.push_back(i);
  }
  return out;
}

SequencePlan plan_random(const ObservableSet& set, std::uint64_t seed) {
  if (!is_information_complete(set)) throw Error("plan_random: set not information-complete");
  const int d2 = set.dim() * set.dim();
  RngStream rng(seed);
  std::vector<int> order(set.size());
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(order);

  SequencePlan plan;
  plan.method = PlanMethod::Random;
  plan.seed = seed;
  plan.stop_reason = "complete";
  ProjectionState proj = ProjectionState::empty(set.dim());
  for (int i : order) {
    if (plan.length() == d2) break;
    OrthoResidual res = orthogonal_residual(proj, set[i]);
    if (res.norm <= kDependenceTol) continue;
    proj.ortho_basis.emplace_back(res.perp.entries() / res.norm);
    plan.indices.push_back(i);
  }
  return plan;
}

}  // namespace qsv
