#include "qsv/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace qsv {

double hs_inner_raw(const Matrix& a, const Matrix& b) {
  // Tr(ab) is real for Hermitian a, b; the imaginary residue is rounding noise.
  return (a * b).trace().real();
}

double hs_distance_raw(const Matrix& a, const Matrix& b) {
  const Matrix d = a - b;
  return std::sqrt(std::max(0.0, hs_inner_raw(d, d)));
}

double hs_inner(const HermitianOperator& a, const HermitianOperator& b) {
  if (a.dim() != b.dim()) throw Error("hs_inner: dimension mismatch");
  return hs_inner_raw(a.entries(), b.entries());
}

double hs_distance(const HermitianOperator& a, const HermitianOperator& b) {
  if (a.dim() != b.dim()) throw Error("hs_distance: dimension mismatch");
  return hs_distance_raw(a.entries(), b.entries());
}

double bures_from_fidelity(double fidelity) {
  const double f = std::clamp(fidelity, 0.0, 1.0);
  return std::sqrt(2.0 * (1.0 - std::sqrt(f)));
}

double purity(const Matrix& m) { return hs_inner_raw(m, m); }

bool is_pure(const DensityMatrix& rho, double tol) {
  return std::abs(purity(rho.entries()) - 1.0) <= tol;
}

double bures_pure(const DensityMatrix& rho, const DensityMatrix& rho0) {
  if (rho.dim() != rho0.dim()) throw Error("bures_pure: dimension mismatch");
  if (!is_pure(rho0)) throw Error("bures_pure: target state is not pure");
  return bures_from_fidelity(hs_inner_raw(rho.entries(), rho0.entries()));
}

Eigen::VectorXd hvec(const Matrix& a) {
  const int d = static_cast<int>(a.rows());
  Eigen::VectorXd v(d * d);
  int k = 0;
  for (int i = 0; i < d; ++i) v(k++) = a(i, i).real();
  const double s = std::sqrt(2.0);
  for (int i = 0; i < d; ++i) {
    for (int j = i + 1; j < d; ++j) {
      v(k++) = s * a(i, j).real();
      v(k++) = s * a(i, j).imag();
    }
  }
  return v;
}

Matrix unhvec(const Eigen::VectorXd& v, int dim) {
  Matrix a = Matrix::Zero(dim, dim);
  int k = 0;
  for (int i = 0; i < dim; ++i) a(i, i) = v(k++);
  const double s = 1.0 / std::sqrt(2.0);
  for (int i = 0; i < dim; ++i) {
    for (int j = i + 1; j < dim; ++j) {
      const double re = v(k++) * s;
      const double im = v(k++) * s;
      a(i, j) = Complex(re, im);
      a(j, i) = Complex(re, -im);
    }
  }
  return a;
}

}  // namespace qsv
