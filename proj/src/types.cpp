#include "qsv/types.hpp"

#include <Eigen/Eigenvalues>
#include <set>
#include <sstream>

namespace qsv {

namespace {

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

HermitianOperator::HermitianOperator(Matrix entries) {
  if (entries.rows() == 0 || entries.rows() != entries.cols()) {
    throw Error("HermitianOperator: matrix must be square and non-empty");
  }
  const double dev = max_abs(entries - entries.adjoint().eval());
  if (dev > kHermitianTol) {
    std::ostringstream os;
    os << "HermitianOperator: not Hermitian (max deviation " << dev << ")";
    throw Error(os.str());
  }
  // store the exact Hermitian part so downstream algebra cannot drift
  entries_ = 0.5 * (entries + entries.adjoint().eval());
}

HermitianOperator HermitianOperator::identity(int dim) {
  return HermitianOperator(Matrix::Identity(dim, dim));
}

HermitianOperator HermitianOperator::zero(int dim) {
  return HermitianOperator(Matrix::Zero(dim, dim));
}

DensityMatrix::DensityMatrix(Matrix entries) {
  HermitianOperator herm(std::move(entries));  // hermiticity check
  entries_ = herm.entries();
  const double tr = entries_.trace().real();
  if (std::abs(tr - 1.0) > kTraceTol) {
    std::ostringstream os;
    os << "DensityMatrix: trace " << tr << " != 1";
    throw Error(os.str());
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(entries_, Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff();
  if (lo < kEigenvalueFloor) {
    std::ostringstream os;
    os << "DensityMatrix: negative eigenvalue " << lo;
    throw Error(os.str());
  }
}

ObservableSet::ObservableSet(std::vector<HermitianOperator> observables,
                             std::vector<std::string> labels)
    : observables_(std::move(observables)), labels_(std::move(labels)) {
  if (observables_.empty()) throw Error("ObservableSet: empty");
  if (labels_.size() != observables_.size()) {
    throw Error("ObservableSet: labels/observables size mismatch");
  }
  const int d = observables_.front().dim();
  for (const auto& a : observables_) {
    if (a.dim() != d) throw Error("ObservableSet: mixed dimensions");
  }
  std::set<std::string> uniq(labels_.begin(), labels_.end());
  if (uniq.size() != labels_.size()) throw Error("ObservableSet: duplicate labels");
}

}  // namespace qsv
