#include "qsv/verifier.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <set>

#include "qsv/linalg.hpp"
#include "qsv/sdp.hpp"

namespace qsv {

namespace {

bool is_projector_spectrum(const Matrix& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(a, Eigen::EigenvaluesOnly);
  for (int i = 0; i < es.eigenvalues().size(); ++i) {
    const double v = es.eigenvalues()(i);
    if (std::abs(v) > 1e-9 && std::abs(v - 1.0) > 1e-9) return false;
  }
  return true;
}

// Euclidean projection of the eigenvalue vector onto the probability simplex.
Eigen::VectorXd project_simplex(Eigen::VectorXd v) {
  Eigen::VectorXd u = v;
  std::sort(u.data(), u.data() + u.size(), std::greater<double>());
  double cum = 0.0;
  double theta = (u.sum() - 1.0) / static_cast<double>(u.size());
  for (int i = 0; i < u.size(); ++i) {
    cum += u(i);
    const double t = (cum - 1.0) / (i + 1);
    if (u(i) - t <= 0.0) break;  // entries from here on are clipped to zero
    theta = t;
  }
  for (int i = 0; i < v.size(); ++i) v(i) = std::max(0.0, v(i) - theta);
  return v;
}

}  // namespace

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Accurate: return "Accurate";
    case Verdict::NotAccurate: return "NotAccurate";
    case Verdict::Exhausted: return "Exhausted";
  }
  return "Exhausted";
}

MeasurementOracle MeasurementOracle::perfect(DensityMatrix rho_exp) {
  return MeasurementOracle(std::move(rho_exp), 0, 0);
}

MeasurementOracle MeasurementOracle::finite_shots(DensityMatrix rho_exp, std::uint64_t shots,
                                                  std::uint64_t seed) {
  if (shots == 0) throw Error("MeasurementOracle: shots must be positive");
  return MeasurementOracle(std::move(rho_exp), shots, seed);
}

double MeasurementOracle::measure(const HermitianOperator& a) {
  if (a.dim() != rho_exp_.dim()) throw Error("MeasurementOracle: dimension mismatch");
  const double expectation = hs_inner_raw(rho_exp_.entries(), a.entries());
  if (shots_ == 0) return expectation;
  if (!is_projector_spectrum(a.entries())) {
    throw Error("finite-shot sampling requires a projector (spectrum {0,1})");
  }
  const double p = std::clamp(expectation, 0.0, 1.0);
  RngStream rng = RngStream::substream(seed_, calls_++);
  std::uint64_t hits = 0;
  for (std::uint64_t s = 0; s < shots_; ++s) {
    if (rng.bernoulli(p)) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(shots_);
}

VerificationOutcome run_vm(const SequencePlan& plan, const ObservableSet& set,
                           MeasurementOracle& oracle, const DensityMatrix& rho0,
                           double epsilon) {
  if (epsilon <= 0.0) throw Error("run_vm: epsilon must be positive");
  if (!is_pure(rho0)) throw Error("run_vm: target state is not pure");
  if (rho0.dim() != set.dim() || oracle.dim() != set.dim()) {
    throw Error("run_vm: dimension mismatch");
  }
  std::set<int> seen;
  for (int i : plan.indices) {
    if (i < 0 || i >= set.size()) throw Error("run_vm: plan index out of range");
    if (!seen.insert(i).second) throw Error("run_vm: duplicate plan index");
  }

  VerificationOutcome out;
  CompatibleSetSpec acc(set.dim());
  std::vector<double> values;
  for (int k = 0; k < plan.length(); ++k) {
    const int idx = plan.indices[k];
    const double y = oracle.measure(set[idx]);
    values.push_back(y);
    acc.add(set[idx], y);

    double gamma = 0.0, Gamma = 0.0;
    try {
      std::tie(gamma, Gamma) = distance_extrema(rho0, acc);
    } catch (const InfeasibleError&) {
      if (oracle.is_perfect()) {
        throw SolverError("run_vm: infeasible intersection with perfect measurements");
      }
      throw RemeasureError("run_vm: sampled data mutually inconsistent; re-measure");
    }
    out.trace.push_back({idx, y, gamma, Gamma});
    out.steps_used = k + 1;
    if (gamma > epsilon) {
      out.verdict = Verdict::NotAccurate;
      return out;
    }
    if (Gamma <= epsilon) {
      out.verdict = Verdict::Accurate;
      return out;
    }
  }

  out.verdict = Verdict::Exhausted;
  try {
    out.reconstructed = reconstruct_state(set, plan.indices, values);
  } catch (const Error&) {
    // reconstruction unavailable (span deficient or unphysical data)
  }
  return out;
}

DensityMatrix reconstruct_state(const ObservableSet& set, const std::vector<int>& subset,
                                const std::vector<double>& values) {
  if (subset.size() != values.size()) throw Error("reconstruct_state: size mismatch");
  if (subset.empty()) throw Error("reconstruct_state: empty subset");
  const int d = set.dim();
  const int n = d * d;

  // Orthonormalize the subset rows. A dependent row with a conflicting value
  // means the Gram system is singular and unsolvable; a consistent dependent
  // row is redundant and dropped (the 36-observable set is overcomplete).
  std::vector<Eigen::VectorXd> basis;
  std::vector<double> coeff;
  auto push_row = [&](const Matrix& a, double v) {
    Eigen::VectorXd r = hvec(a);
    double vr = v;
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t k = 0; k < basis.size(); ++k) {
        const double c = basis[k].dot(r);
        r -= c * basis[k];
        vr -= c * coeff[k];
      }
    }
    const double norm = r.norm();
    if (norm <= kDependenceTol) {
      if (std::abs(vr) > kValueTol) {
        throw Error("reconstruct_state: singular Gram system with conflicting values");
      }
      return;
    }
    basis.push_back(r / norm);
    coeff.push_back(vr / norm);
  };

  for (std::size_t i = 0; i < subset.size(); ++i) {
    const int idx = subset[i];
    if (idx < 0 || idx >= set.size()) throw Error("reconstruct_state: index out of range");
    push_row(set[idx].entries(), values[i]);
  }
  push_row(Matrix::Identity(d, d), 1.0);

  if (static_cast<int>(basis.size()) != n) {
    throw Error("reconstruct_state: observables plus identity do not span dimension d^2");
  }

  Eigen::VectorXd xv = Eigen::VectorXd::Zero(n);
  for (std::size_t k = 0; k < basis.size(); ++k) xv += coeff[k] * basis[k];
  Matrix x = unhvec(xv, d);

  Eigen::SelfAdjointEigenSolver<Matrix> es(x);
  const double lo = es.eigenvalues().minCoeff();
  if (lo < -1e-6) throw Error("reconstruct_state: unphysical values (negative eigenvalue)");
  if (lo < 0.0) {
    // only rounding-level negativity: project the spectrum onto the simplex
    const Eigen::VectorXd lam = project_simplex(es.eigenvalues());
    x = es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().adjoint();
    x = 0.5 * (x + x.adjoint().eval());
  }
  return DensityMatrix(std::move(x));
}

}  // namespace qsv
