// Test-only oracles, deliberately independent of the library's solve paths.
#pragma once

#include <Eigen/Dense>
#include <Eigen/QR>
#include <cmath>
#include <vector>

#include "qsv/linalg.hpp"
#include "qsv/rng.hpp"
#include "qsv/types.hpp"

namespace qsv::testing {

inline Matrix random_hermitian(RngStream& rng, int d, double scale = 1.0) {
  Matrix m(d, d);
  for (int i = 0; i < d; ++i) {
    m(i, i) = scale * rng.normal();
    for (int j = i + 1; j < d; ++j) {
      m(i, j) = scale * Complex(rng.normal(), rng.normal());
      m(j, i) = std::conj(m(i, j));
    }
  }
  return 0.5 * (m + m.adjoint().eval());
}

inline DensityMatrix random_mixed_state(RngStream& rng, int d) {
  Matrix g(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) g(i, j) = Complex(rng.normal(), rng.normal());
  }
  Matrix rho = g * g.adjoint();
  rho /= rho.trace();
  return DensityMatrix(0.5 * (rho + rho.adjoint().eval()));
}

// Direct Gram-Schmidt projection oracle: orthonormalize the chain in hvec
// coordinates with Householder QR and project rho0 onto the span.
struct ProjectionOracle {
  Matrix projected;
  double norm_sq;
};

inline ProjectionOracle project_via_qr(const Matrix& rho0, const std::vector<Matrix>& chain) {
  const int d = static_cast<int>(rho0.rows());
  const int n = d * d;
  ProjectionOracle out{Matrix::Zero(d, d), 0.0};
  if (chain.empty()) return out;
  Eigen::MatrixXd a(n, static_cast<int>(chain.size()));
  for (std::size_t k = 0; k < chain.size(); ++k) a.col(static_cast<int>(k)) = hvec(chain[k]);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, static_cast<int>(chain.size()));
  const Eigen::VectorXd r = hvec(rho0);
  const Eigen::VectorXd proj = q * (q.transpose() * r);
  out.projected = unhvec(proj, d);
  out.norm_sq = proj.squaredNorm();
  return out;
}

// span rank of a set of Hermitian operators (optionally with the identity)
inline int span_rank(const std::vector<Matrix>& ops, bool with_identity) {
  if (ops.empty()) return with_identity ? 1 : 0;
  const int d = static_cast<int>(ops.front().rows());
  const int n = d * d;
  const int cols = static_cast<int>(ops.size()) + (with_identity ? 1 : 0);
  Eigen::MatrixXd a(n, cols);
  for (std::size_t k = 0; k < ops.size(); ++k) a.col(static_cast<int>(k)) = hvec(ops[k]);
  if (with_identity) a.col(cols - 1) = hvec(Matrix::Identity(d, d));
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
  int rank = 0;
  for (int i = 0; i < svd.singularValues().size(); ++i) {
    if (svd.singularValues()(i) > 1e-9) ++rank;
  }
  return rank;
}

// Brute-force extremization of Tr(rho C) over the qubit states satisfying
// Tr(rho P_axis) = value: a 2-d grid over the constrained disk of the Bloch
// ball at the given resolution.
struct BlochExtrema {
  double min_value;
  double max_value;
};

inline BlochExtrema bloch_grid_extrema(const Matrix& c_obj, const Eigen::Vector3d& axis,
                                       double value, double resolution) {
  // Tr(rho C) = c0 + g.r  with c0 = Tr(C)/2, g_a = Tr(C sigma_a)/2
  Matrix sx(2, 2), sy(2, 2), sz(2, 2);
  sx << 0, 1, 1, 0;
  sy << Complex(0, 0), Complex(0, -1), Complex(0, 1), Complex(0, 0);
  sz << 1, 0, 0, -1;
  const double c0 = 0.5 * c_obj.trace().real();
  const Eigen::Vector3d g(0.5 * hs_inner_raw(c_obj, sx), 0.5 * hs_inner_raw(c_obj, sy),
                          0.5 * hs_inner_raw(c_obj, sz));

  // constraint plane: axis.r = 2*value - 1
  const Eigen::Vector3d n = axis.normalized();
  const double h = 2.0 * value - 1.0;
  BlochExtrema out{1e300, -1e300};
  if (std::abs(h) > 1.0) return out;  // empty
  Eigen::Vector3d u = n.unitOrthogonal();
  Eigen::Vector3d v = n.cross(u);
  const double radius = std::sqrt(std::max(0.0, 1.0 - h * h));
  const Eigen::Vector3d center = h * n;
  const int steps = static_cast<int>(radius / resolution) + 1;
  for (int i = -steps; i <= steps; ++i) {
    for (int j = -steps; j <= steps; ++j) {
      const Eigen::Vector3d r = center + (i * resolution) * u + (j * resolution) * v;
      if (r.squaredNorm() > 1.0) continue;
      const double val = c0 + g.dot(r);
      out.min_value = std::min(out.min_value, val);
      out.max_value = std::max(out.max_value, val);
    }
  }
  return out;
}

}  // namespace qsv::testing
