#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace qsv {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;

// Tolerances used across the library. Operator entries are O(1) throughout,
// so absolute thresholds are meaningful.
inline constexpr double kHermitianTol = 1e-12;   // max-entry deviation from A = A^dag
inline constexpr double kEigenvalueFloor = -1e-9; // PSD floor for density matrices
inline constexpr double kTraceTol = 1e-9;
inline constexpr double kPurityTol = 1e-9;
inline constexpr double kDependenceTol = 1e-9;   // orthogonal-residual norm below which
                                                 // an operator counts as dependent
inline constexpr double kValueTol = 1e-7;        // constraint consistency / feasibility
inline constexpr double kTieTol = 1e-7;          // two scores within this are tied
inline constexpr double kZeroDistanceTol = 1e-3; // a max-distance below this counts as 0:
                                                 // squared Bures distance at machine-level
                                                 // 1e-6, the reconstruction criterion

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// The accumulated measurement constraints admit no physical state. Raised by
// operations that cannot return a meaningful result on an empty set.
class InfeasibleError : public Error {
 public:
  explicit InfeasibleError(const std::string& what) : Error(what) {}
};

// The interior-point iteration stalled; never silently downgraded to a value.
class SolverError : public Error {
 public:
  explicit SolverError(const std::string& what) : Error(what) {}
};

// Finite-shot data turned out mutually inconsistent; the run must be redone.
class RemeasureError : public Error {
 public:
  explicit RemeasureError(const std::string& what) : Error(what) {}
};

/// Dense complex Hermitian matrix. Validates hermiticity on construction and
/// stores the exactly symmetrized entries.
class HermitianOperator {
 public:
  explicit HermitianOperator(Matrix entries);

  int dim() const { return static_cast<int>(entries_.rows()); }
  const Matrix& entries() const { return entries_; }

  static HermitianOperator identity(int dim);
  static HermitianOperator zero(int dim);

 private:
  Matrix entries_;
};

/// Physical state: Hermitian, unit trace, eigenvalues above the PSD floor.
class DensityMatrix {
 public:
  explicit DensityMatrix(Matrix entries);

  int dim() const { return static_cast<int>(entries_.rows()); }
  const Matrix& entries() const { return entries_; }
  HermitianOperator as_operator() const { return HermitianOperator(entries_); }

 private:
  Matrix entries_;
};

/// A finite, fixed set of observables sharing one dimension, with unique
/// display labels (Pauli-projector strings for the generated sets).
class ObservableSet {
 public:
  ObservableSet(std::vector<HermitianOperator> observables,
                std::vector<std::string> labels);

  int size() const { return static_cast<int>(observables_.size()); }
  int dim() const { return observables_.front().dim(); }
  const HermitianOperator& operator[](int i) const { return observables_.at(i); }
  const std::vector<HermitianOperator>& observables() const { return observables_; }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::string& label(int i) const { return labels_.at(i); }

 private:
  std::vector<HermitianOperator> observables_;
  std::vector<std::string> labels_;
};

}  // namespace qsv
