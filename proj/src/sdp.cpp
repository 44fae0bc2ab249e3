#include "qsv/sdp.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

namespace qsv {

namespace {

std::ostream* g_debug = nullptr;

constexpr double kFeasTol = 1e-10;     // scaled primal/dual residual target
constexpr double kGapTol = 1e-9;       // relative duality-gap target
constexpr double kFallbackTol = 1e-8;  // accepted from the best iterate on stall
constexpr int kMaxIter = 100;

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

Matrix hsym(const Matrix& m) { return 0.5 * (m + m.adjoint().eval()); }

double min_eig(const Matrix& h) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

double max_eig(const Matrix& h) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

// Largest step a with m + a*dm >= 0 (m Hermitian positive definite).
double step_to_boundary(const Matrix& m, const Matrix& dm) {
  Eigen::LLT<Matrix> llt(m);
  if (llt.info() != Eigen::Success) return 0.0;
  const Matrix l = llt.matrixL();
  const Matrix t1 = l.triangularView<Eigen::Lower>().solve(dm);
  const Matrix t2 = l.triangularView<Eigen::Lower>().solve(t1.adjoint().eval());
  const double lmin = min_eig(hsym(t2.adjoint()));
  if (lmin >= -1e-14) return std::numeric_limits<double>::infinity();
  return -1.0 / lmin;
}

double step_to_zero(double v, double dv) {
  if (dv >= 0.0) return std::numeric_limits<double>::infinity();
  return -v / dv;
}

// Constraint system after deduplication: rows orthonormal under the HS inner
// product (the unit-trace row first), stored both as matrices and hvec rows.
struct ReducedSystem {
  int dim = 0;
  std::vector<Matrix> rows;
  Eigen::MatrixXd hv;   // m x d^2, orthonormal
  Eigen::VectorXd rhs;  // m
  bool inconsistent = false;  // dependent row with conflicting value
};

// Incremental orthonormalization of (observable, value) rows with the
// implied-value consistency check for dependent rows.
class RowBuilder {
 public:
  explicit RowBuilder(int dim) : dim_(dim) {}

  // false: the row is dependent with a conflicting value (empty set)
  bool push(const Matrix& a, double v) {
    Eigen::VectorXd r = hvec(a);
    double vr = v;
    // two-pass Gram-Schmidt for orthogonality at working precision
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t k = 0; k < basis_.size(); ++k) {
        const double c = basis_[k].dot(r);
        r -= c * basis_[k];
        vr -= c * values_[k];
      }
    }
    const double norm = r.norm();
    if (norm <= kDependenceTol) {
      return std::abs(vr) <= kValueTol;  // redundant rows are dropped
    }
    basis_.push_back(r / norm);
    values_.push_back(vr / norm);
    return true;
  }

  ReducedSystem finish() const {
    ReducedSystem sys;
    sys.dim = dim_;
    const int m = static_cast<int>(basis_.size());
    sys.hv.resize(m, dim_ * dim_);
    sys.rhs.resize(m);
    sys.rows.reserve(m);
    for (int i = 0; i < m; ++i) {
      sys.hv.row(i) = basis_[i];
      sys.rhs(i) = values_[i];
      sys.rows.push_back(unhvec(basis_[i], dim_));
    }
    return sys;
  }

 private:
  int dim_;
  std::vector<Eigen::VectorXd> basis_;
  std::vector<double> values_;
};

ReducedSystem reduce_constraints(const CompatibleSetSpec& spec) {
  const int d = spec.dim;
  RowBuilder builder(d);
  ReducedSystem bad;
  bad.dim = d;
  bad.inconsistent = true;

  if (!builder.push(Matrix::Identity(d, d), 1.0)) return bad;
  for (const auto& c : spec.constraints) {
    if (!std::isfinite(c.value)) throw Error("constraint value not finite");
    if (c.observable.dim() != d) throw Error("constraint dimension mismatch");
    if (!builder.push(c.observable.entries(), c.value)) return bad;
  }
  return builder.finish();
}

struct IpmResult {
  SdpStatus status = SdpStatus::NumericalFailure;
  Matrix x;       // scaled primal solution (when Optimal)
  double pobj = 0.0;
  SdpDiagnostics diag;
};

// Gauss-Newton refinement of a rank-1 feasible point sigma = w w^dag. The
// residuals w^dag A_i w - b_i are quadratic in w, so two steps reach machine
// precision from an eigenvector-accurate start.
bool refine_rank_one(const ReducedSystem& sys, Eigen::VectorXcd w, Matrix* x_out) {
  const int d = sys.dim;
  const int m = static_cast<int>(sys.rows.size());
  for (int it = 0; it < 3; ++it) {
    Eigen::VectorXd g(m);
    Eigen::MatrixXd jac(m, 2 * d);
    for (int i = 0; i < m; ++i) {
      const Eigen::VectorXcd aw = sys.rows[i] * w;
      g(i) = w.dot(aw).real() - sys.rhs(i);
      for (int k = 0; k < d; ++k) {
        jac(i, k) = 2.0 * aw(k).real();
        jac(i, d + k) = 2.0 * aw(k).imag();
      }
    }
    if (g.cwiseAbs().maxCoeff() < 1e-14) break;
    const Eigen::VectorXd step =
        jac.completeOrthogonalDecomposition().solve(-g);
    for (int k = 0; k < d; ++k) w(k) += Complex(step(k), step(d + k));
  }
  Eigen::VectorXd g(m);
  for (int i = 0; i < m; ++i) {
    g(i) = w.dot(sys.rows[i] * w).real() - sys.rhs(i);
  }
  if (g.cwiseAbs().maxCoeff() > 1e-11) return false;
  *x_out = w * w.adjoint();
  return true;
}

// Try to replace x_hat by a point of the optimal face identified by the dual
// slack spectrum: least-norm correction of the face-restricted affine system.
// Returns true when the polished point is feasible to 1e-10 and PSD to -1e-11
// and does not worsen the objective beyond solver noise.
bool polish_on_face(const ReducedSystem& sys, const Matrix& c_obj, const Matrix& s_hat,
                    double gap, Matrix* x_hat, double* pobj) {
  const int d = sys.dim;
  // face dimension from the dual slack spectrum (clean eigengap), face basis
  // from the primal iterate whose face eigenvectors are gap-accurate
  Eigen::SelfAdjointEigenSolver<Matrix> es_s(s_hat, Eigen::EigenvaluesOnly);
  if (es_s.info() != Eigen::Success) return false;
  const double smax = es_s.eigenvalues().maxCoeff();
  const double theta = std::max(1e-7, std::sqrt(std::max(gap, 0.0))) * std::max(1.0, smax);

  int r = 0;
  while (r < d && es_s.eigenvalues()(r) <= theta) ++r;
  if (g_debug) {
    *g_debug << "polish: theta=" << theta << " r=" << r << " seig=";
    for (int i = 0; i < d; ++i) *g_debug << es_s.eigenvalues()(i) << " ";
    *g_debug << "\n";
  }
  if (r == 0 || r == d) return false;

  Eigen::SelfAdjointEigenSolver<Matrix> es_x(*x_hat);
  if (es_x.info() != Eigen::Success) return false;

  if (r == 1) {
    // single-point face: refine the vertex to machine precision so pinned
    // compatible sets report an exactly reconstructed state
    Eigen::VectorXcd w =
        es_x.eigenvectors().col(d - 1) * std::sqrt(std::max(es_x.eigenvalues()(d - 1), 0.0));
    Matrix x_new;
    if (refine_rank_one(sys, std::move(w), &x_new)) {
      const double v_new = hs_inner_raw(c_obj, x_new);
      if (v_new <= *pobj + 1e-7 && min_eig(x_new) >= -1e-11) {
        if (g_debug) *g_debug << "polish: rank-1 refine vnew=" << v_new << "\n";
        *x_hat = std::move(x_new);
        *pobj = v_new;
        return true;
      }
    }
  }

  const Matrix p = es_x.eigenvectors().rightCols(r);  // ascending order: top-r
  const int m = static_cast<int>(sys.rows.size());
  Eigen::MatrixXd g(m, r * r);
  for (int i = 0; i < m; ++i) {
    g.row(i) = hvec(hsym(p.adjoint() * sys.rows[i] * p));
  }
  const Eigen::VectorXd y0 = hvec(hsym(p.adjoint() * (*x_hat) * p));
  const Eigen::VectorXd resid = sys.rhs - g * y0;
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(g);
  const Eigen::VectorXd yv = y0 + cod.solve(resid);

  Matrix x_new = hsym(p * unhvec(yv, r) * p.adjoint());
  const double feas = (sys.hv * hvec(x_new) - sys.rhs).cwiseAbs().maxCoeff();
  const double psd = min_eig(x_new);
  const double v_new = hs_inner_raw(c_obj, x_new);
  if (g_debug) {
    *g_debug << "polish: feas=" << feas << " psd=" << psd << " vnew=" << v_new
             << " pobj=" << *pobj << "\n";
  }
  if (feas > 1e-10) return false;
  if (psd < -1e-11) return false;
  if (v_new > *pobj + 1e-7) return false;

  *x_hat = std::move(x_new);
  *pobj = v_new;
  return true;
}

// Homogeneous self-dual interior-point method (Mehrotra predictor-corrector,
// XS symmetrized direction) minimizing <C,X> over the reduced system.
//
//   A(X) - b tau            = 0
//   A*(y) + S - C tau       = 0
//   <C,X> - b.y + kappa     = 0,   X,S >= 0, tau,kappa >= 0
//
// tau > 0 at convergence gives the optimum; kappa > 0 gives a Farkas dual ray
// (A*(y) <= 0, b.y > 0), certifying the compatible set empty.
//
// The conservative mode keeps the iterates strongly centered (sigma floor,
// shorter steps); it is the retry path for degenerate instances on which the
// aggressive iteration drifts to a non-maximal face of the homogeneous model.
IpmResult ipm_minimize(const Matrix& c_obj, const ReducedSystem& sys, bool conservative) {
  const int d = sys.dim;
  const int m = static_cast<int>(sys.rows.size());
  const Eigen::VectorXd& b = sys.rhs;
  const double nu = d + 1;

  Matrix x = Matrix::Identity(d, d);
  Matrix s = Matrix::Identity(d, d);
  Eigen::VectorXd y = Eigen::VectorXd::Zero(m);
  double tau = 1.0, kappa = 1.0;
  const double step_frac = conservative ? 0.90 : 0.98;
  const double sigma_floor = conservative ? 0.2 : 1e-8;
  const int max_iter = conservative ? 2 * kMaxIter : kMaxIter;

  IpmResult res;
  double best_merit = std::numeric_limits<double>::infinity();
  Matrix best_x, best_s;
  SdpDiagnostics best_diag;
  double best_pobj = 0.0;

  auto apply_a = [&](const Matrix& w) -> Eigen::VectorXd { return sys.hv * hvec(w); };
  auto apply_at = [&](const Eigen::VectorXd& v) -> Matrix {
    return unhvec(sys.hv.transpose() * v, d);
  };

  const double c_scale = 1.0 + max_abs(c_obj);
  const double b_scale = 1.0 + b.cwiseAbs().maxCoeff();

  for (int iter = 0; iter < max_iter; ++iter) {
    const double mu = (hs_inner_raw(x, s) + tau * kappa) / nu;

    // scaled (divided by tau) optimality measures
    const Matrix x_hat = x / tau;
    const Matrix s_hat = s / tau;
    const Eigen::VectorXd y_hat = y / tau;
    const double pobj = hs_inner_raw(c_obj, x_hat);
    const double dobj = b.dot(y_hat);
    const double pinf = (apply_a(x_hat) - b).cwiseAbs().maxCoeff() / b_scale;
    const double dinf = max_abs(apply_at(y_hat) + s_hat - c_obj) / c_scale;
    const double gap = hs_inner_raw(x_hat, s_hat);
    const double relgap = gap / (1.0 + std::abs(pobj) + std::abs(dobj));

    if (g_debug) {
      *g_debug << "ipm iter=" << iter << " mu=" << mu << " pinf=" << pinf
               << " dinf=" << dinf << " gap=" << gap << " tau=" << tau
               << " kappa=" << kappa << "\n";
    }

    const double merit = std::max({pinf, dinf, relgap});
    if (merit < best_merit) {
      best_merit = merit;
      best_x = x_hat;
      best_s = s_hat;
      best_pobj = pobj;
      best_diag = {pinf, dinf, gap, iter};
    } else if (iter - best_diag.iterations >= 25) {
      break;  // ground to the numerical floor; the best iterate decides
    }

    if (pinf <= kFeasTol && dinf <= kFeasTol && relgap <= kGapTol) {
      res.status = SdpStatus::Optimal;
      res.x = x_hat;
      res.pobj = pobj;
      res.diag = {pinf, dinf, gap, iter};
      Matrix xp = res.x;
      double vp = res.pobj;
      if (polish_on_face(sys, c_obj, s_hat, gap, &xp, &vp)) {
        res.x = xp;
        res.pobj = vp;
      }
      return res;
    }

    // Farkas certificate for an empty compatible set
    const double bty = b.dot(y);
    if (bty > 1e-10) {
      const double viol = max_eig(apply_at(y / bty));
      if (viol <= 1e-9) {
        res.status = SdpStatus::Infeasible;
        res.diag = {pinf, dinf, gap, iter};
        return res;
      }
    }
    if (tau < 1e-10 * std::max(1.0, kappa) && mu < 1e-10) {
      if (bty > 0.0 && max_eig(apply_at(y / bty)) <= 1e-7) {
        res.status = SdpStatus::Infeasible;
        res.diag = {pinf, dinf, gap, iter};
        return res;
      }
      break;  // diverged without certificate
    }

    // residuals (driven to zero along the central path)
    const Eigen::VectorXd res_p = apply_a(x) - b * tau;
    const Matrix res_d = apply_at(y) + s - c_obj * tau;
    const double res_g = hs_inner_raw(c_obj, x) - b.dot(y) + kappa;

    Eigen::LLT<Matrix> llt_s(s);
    if (llt_s.info() != Eigen::Success) { if (g_debug) *g_debug << "break: llt_s\n"; break; }
    const Matrix s_inv = llt_s.solve(Matrix::Identity(d, d));

    // Schur complement M_jk = <A_j, Hsym(X A_k Sinv)>
    Eigen::MatrixXd hv_t(m, d * d);
    for (int j = 0; j < m; ++j) {
      hv_t.row(j) = hvec(hsym(x * sys.rows[j] * s_inv));
    }
    Eigen::MatrixXd schur = sys.hv * hv_t.transpose();
    schur = 0.5 * (schur + schur.transpose().eval());
    // static regularization; the Schur complement conditioning degrades like
    // 1/mu^2 near degenerate optima
    double ridge = 1e-13 * (1.0 + schur.diagonal().cwiseAbs().maxCoeff());
    Eigen::LDLT<Eigen::MatrixXd> ldlt(schur);
    for (int tries = 0; ldlt.info() != Eigen::Success && tries < 3; ++tries) {
      schur.diagonal().array() += ridge;
      ridge *= 1e3;
      ldlt.compute(schur);
    }
    if (ldlt.info() != Eigen::Success) { if (g_debug) *g_debug << "break: ldlt\n"; break; }

    const Matrix k_c = hsym(x * c_obj * s_inv);
    const Eigen::VectorXd a_kc = apply_a(k_c);
    const Eigen::VectorXd u = a_kc + b;
    const double vtt = hs_inner_raw(c_obj, k_c) + kappa / tau;
    const Eigen::VectorXd k_rd = apply_a(hsym(x * res_d * s_inv));
    const double rd_kc = hs_inner_raw(res_d, k_c);

    const Eigen::VectorXd q = ldlt.solve(u);
    const Eigen::VectorXd u2b = u - 2.0 * b;
    const double denom = u2b.dot(q) - vtt;
    // near optimality of strictly dual-feasible problems tau is pinned and the
    // tau pivot cancels to rounding noise; freeze tau and take the fixed-tau
    // primal-dual step instead
    const double denom_scale = std::abs(u2b.dot(q)) + std::abs(vtt) + 1.0;
    const bool tau_pivot_lost = std::abs(denom) <= 1e-9 * denom_scale;

    auto solve_direction = [&](const Matrix& w, double cc, Matrix* dx, Eigen::VectorXd* dy,
                               Matrix* ds, double* dtau, double* dkappa) {
      const Eigen::VectorXd rhs1 = -res_p - apply_a(w) - k_rd;
      const double rhs2 = -res_g - hs_inner_raw(c_obj, w) - rd_kc - cc;
      const Eigen::VectorXd p = ldlt.solve(rhs1);
      *dtau = tau_pivot_lost ? 0.0 : (rhs2 - u2b.dot(p)) / denom;
      *dy = p + q * (*dtau);
      *ds = -res_d - apply_at(*dy) + c_obj * (*dtau);
      *dx = w - hsym(x * (*ds) * s_inv);
      *dkappa = cc - (kappa / tau) * (*dtau);
    };

    // predictor (affine scaling)
    Matrix dx_a, ds_a;
    Eigen::VectorXd dy_a;
    double dtau_a = 0.0, dkappa_a = 0.0;
    solve_direction(-x, -kappa, &dx_a, &dy_a, &ds_a, &dtau_a, &dkappa_a);

    double alpha_a = 1.0;
    alpha_a = std::min(alpha_a, step_to_boundary(x, dx_a));
    alpha_a = std::min(alpha_a, step_to_boundary(s, ds_a));
    alpha_a = std::min(alpha_a, step_to_zero(tau, dtau_a));
    alpha_a = std::min(alpha_a, step_to_zero(kappa, dkappa_a));

    const double mu_aff =
        (hs_inner_raw(x + alpha_a * dx_a, s + alpha_a * ds_a) +
         (tau + alpha_a * dtau_a) * (kappa + alpha_a * dkappa_a)) /
        nu;
    double sigma = std::pow(std::max(0.0, mu_aff / mu), 3);
    sigma = std::min(1.0, std::max(sigma, sigma_floor));

    // corrector with Mehrotra second-order terms
    const Matrix w = sigma * mu * s_inv - x - hsym(dx_a * ds_a * s_inv);
    const double cc = (sigma * mu - tau * kappa - dtau_a * dkappa_a) / tau;
    Matrix dx, ds;
    Eigen::VectorXd dy;
    double dtau = 0.0, dkappa = 0.0;
    solve_direction(w, cc, &dx, &dy, &ds, &dtau, &dkappa);

    double alpha = 1.0;
    alpha = std::min(alpha, step_to_boundary(x, dx));
    alpha = std::min(alpha, step_to_boundary(s, ds));
    alpha = std::min(alpha, step_to_zero(tau, dtau));
    alpha = std::min(alpha, step_to_zero(kappa, dkappa));
    alpha = std::min(1.0, step_frac * alpha);

    bool stepped = false;
    for (int half = 0; half < 40 && alpha > 1e-13; ++half) {
      Matrix x_n = hsym(x + alpha * dx);
      Matrix s_n = hsym(s + alpha * ds);
      const double tau_n = tau + alpha * dtau;
      const double kappa_n = kappa + alpha * dkappa;
      if (tau_n > 0.0 && kappa_n > 0.0 && Eigen::LLT<Matrix>(x_n).info() == Eigen::Success &&
          Eigen::LLT<Matrix>(s_n).info() == Eigen::Success) {
        x = std::move(x_n);
        s = std::move(s_n);
        y += alpha * dy;
        tau = tau_n;
        kappa = kappa_n;
        stepped = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!stepped) { if (g_debug) *g_debug << "break: no step alpha\n"; break; }
  }

  // Stalled. A successful polish re-certifies feasibility from scratch, so it
  // rescues near-converged iterates; otherwise accept only within the
  // documented 1e-8 bars.
  if (best_merit < std::numeric_limits<double>::infinity() &&
      best_diag.primal_infeas <= 1e-7 && best_diag.dual_infeas <= 1e-7 &&
      best_diag.gap <= 1e-6) {
    Matrix xp = best_x;
    double vp = best_pobj;
    const bool polished = polish_on_face(sys, c_obj, best_s, best_diag.gap, &xp, &vp);
    if (polished || (best_diag.primal_infeas <= kFallbackTol &&
                     best_diag.dual_infeas <= kFallbackTol &&
                     best_diag.gap <= kFallbackTol)) {
      res.status = SdpStatus::Optimal;
      res.x = polished ? xp : best_x;
      res.pobj = polished ? vp : best_pobj;
      res.diag = best_diag;
      return res;
    }
  }
  res.status = SdpStatus::NumericalFailure;
  res.diag = best_diag;
  return res;
}

// Feasibility probe for instances where the main iteration could not decide:
// maximize s such that the interpolated targets (1-s) c + s b are achievable,
// where c are the values of the maximally mixed state. The probe is strictly
// feasible by construction (s = 0 with X = I/d), so it solves reliably; an
// optimum below 1 - 1e-6 certifies the original set empty via the probe's own
// dual bound. Modeled as one SDP over diag(X, s, 1-s) in dimension d + 2.
SdpStatus feasibility_probe(const ReducedSystem& sys) {
  const int d = sys.dim;
  const int dx = d + 2;
  const int m = static_cast<int>(sys.rows.size());

  auto extend = [&](const Matrix& block, double s_coeff, double t_coeff) {
    Matrix out = Matrix::Zero(dx, dx);
    out.topLeftCorner(d, d) = block;
    out(d, d) = s_coeff;
    out(d + 1, d + 1) = t_coeff;
    return out;
  };

  RowBuilder builder(dx);
  bool consistent = true;
  // <Q_i, X> - (v_i - c_i) s = c_i  with  c_i = <Q_i, I/d>
  for (int i = 0; i < m; ++i) {
    const double c_i = sys.rows[i].trace().real() / d;
    consistent =
        consistent && builder.push(extend(sys.rows[i], -(sys.rhs(i) - c_i), 0.0), c_i);
  }
  consistent = consistent && builder.push(extend(Matrix::Identity(d, d), 0.0, 0.0), 1.0);
  consistent = consistent && builder.push(extend(Matrix::Zero(d, d), 1.0, 1.0), 1.0);
  if (!consistent) return SdpStatus::Infeasible;

  const ReducedSystem probe = builder.finish();
  Matrix c_obj = Matrix::Zero(dx, dx);
  c_obj(d, d) = -1.0;  // maximize s
  IpmResult res = ipm_minimize(c_obj, probe, false);
  if (res.status != SdpStatus::Optimal) res = ipm_minimize(c_obj, probe, true);
  if (res.status != SdpStatus::Optimal) return SdpStatus::NumericalFailure;
  const double s_star = -res.pobj;
  if (s_star <= 1.0 - 1e-6) return SdpStatus::Infeasible;
  return SdpStatus::NumericalFailure;  // looks feasible; the main solve must decide
}

// Exact re-projection onto the affine rows (orthonormal) followed by a
// spectrum clip; keeps the optimizer inside DensityMatrix tolerances even
// when the iteration stalled at ~1e-9 feasibility.
Matrix cleanup_optimizer(const ReducedSystem& sys, Matrix x) {
  const Eigen::VectorXd resid = sys.rhs - sys.hv * hvec(x);
  if (resid.cwiseAbs().maxCoeff() > 0.0) {
    x += unhvec(sys.hv.transpose() * resid, sys.dim);
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(x);
  if (es.eigenvalues().minCoeff() < 0.0) {
    Eigen::VectorXd lam = es.eigenvalues().cwiseMax(0.0);
    const double tr = lam.sum();
    if (tr > 0.5) lam /= tr;
    x = es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().adjoint();
    x = hsym(x);
  }
  return x;
}

}  // namespace

void set_sdp_debug_stream(std::ostream* os) { g_debug = os; }

double snap_fidelity(double f) {
  if (f < 1e-9) return 0.0;
  if (f > 1.0 - 1e-9) return 1.0;
  return f;
}

void CompatibleSetSpec::add(const HermitianOperator& observable, double value) {
  if (observable.dim() != dim) throw Error("CompatibleSetSpec: dimension mismatch");
  if (!std::isfinite(value)) throw Error("CompatibleSetSpec: value not finite");
  constraints.push_back({observable, value});
}

void CompatibleSetSpec::add_from_state(const HermitianOperator& observable,
                                       const DensityMatrix& state) {
  add(observable, hs_inner_raw(observable.entries(), state.entries()));
}

SdpSolution extremize_linear(const HermitianOperator& objective,
                             const CompatibleSetSpec& spec, Sense sense) {
  if (objective.dim() != spec.dim) throw Error("extremize_linear: dimension mismatch");

  SdpSolution out;
  const ReducedSystem sys = reduce_constraints(spec);
  if (sys.inconsistent) {
    out.status = SdpStatus::Infeasible;
    return out;
  }

  const double sign = (sense == Sense::Max) ? -1.0 : 1.0;
  const Matrix c_obj = sign * objective.entries();
  IpmResult ipm = ipm_minimize(c_obj, sys, false);
  if (ipm.status == SdpStatus::NumericalFailure) {
    ipm = ipm_minimize(c_obj, sys, true);
  }
  if (ipm.status == SdpStatus::NumericalFailure) {
    // tiny-margin infeasible instances exhaust the iteration budget before
    // the dual ray is accurate enough; the probe settles them
    ipm.status = feasibility_probe(sys);
  }
  out.residuals = ipm.diag;
  out.status = ipm.status;
  if (ipm.status != SdpStatus::Optimal) return out;

  const Matrix x = cleanup_optimizer(sys, std::move(ipm.x));
  // report the objective at the returned point so value and optimizer agree
  out.value = sign * hs_inner_raw(c_obj, x);
  for (const auto& c : spec.constraints) {
    if (std::abs(hs_inner_raw(c.observable.entries(), x) - c.value) > kValueTol) {
      out.status = SdpStatus::NumericalFailure;
      return out;
    }
  }
  try {
    out.optimizer = DensityMatrix(x);
  } catch (const Error&) {
    out.status = SdpStatus::NumericalFailure;
  }
  return out;
}

DistanceExtrema distance_extrema_full(const DensityMatrix& rho0,
                                      const CompatibleSetSpec& spec) {
  if (!is_pure(rho0)) throw Error("distance_extrema: target state is not pure");
  const HermitianOperator obj = rho0.as_operator();

  SdpSolution hi = extremize_linear(obj, spec, Sense::Max);
  if (hi.status == SdpStatus::Infeasible) throw InfeasibleError("compatible set is empty");
  if (hi.status != SdpStatus::Optimal) throw SolverError("max-fidelity solve failed");
  SdpSolution lo = extremize_linear(obj, spec, Sense::Min);
  if (lo.status == SdpStatus::Infeasible) throw InfeasibleError("compatible set is empty");
  if (lo.status != SdpStatus::Optimal) throw SolverError("min-fidelity solve failed");

  DistanceExtrema ext{bures_from_fidelity(snap_fidelity(hi.value)),
                      bures_from_fidelity(snap_fidelity(lo.value)), *hi.optimizer};
  if (ext.min_dist > ext.max_dist) {
    if (ext.min_dist - ext.max_dist > 1e-6) throw SolverError("distance bracket inverted");
    ext.max_dist = ext.min_dist;
  }
  return ext;
}

std::pair<double, double> distance_extrema(const DensityMatrix& rho0,
                                           const CompatibleSetSpec& spec) {
  const DistanceExtrema ext = distance_extrema_full(rho0, spec);
  return {ext.min_dist, ext.max_dist};
}

DensityMatrix estimate_state(const DensityMatrix& rho0, const CompatibleSetSpec& spec) {
  if (!is_pure(rho0)) throw Error("estimate_state: target state is not pure");
  SdpSolution sol = extremize_linear(rho0.as_operator(), spec, Sense::Max);
  if (sol.status == SdpStatus::Infeasible) throw InfeasibleError("compatible set is empty");
  if (sol.status != SdpStatus::Optimal) throw SolverError("estimate solve failed");
  return *sol.optimizer;
}

}  // namespace qsv
