#include "qsv/states.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <sstream>

#include "qsv/linalg.hpp"

namespace qsv {

namespace {

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

struct PauliAxis {
  const char* name;
  Matrix sigma;
};

std::vector<PauliAxis> pauli_axes() {
  Matrix sx(2, 2), sy(2, 2), sz(2, 2);
  sx << 0, 1, 1, 0;
  sy << Complex(0, 0), Complex(0, -1), Complex(0, 1), Complex(0, 0);
  sz << 1, 0, 0, -1;
  return {{"x", sx}, {"y", sy}, {"z", sz}};
}

}  // namespace

ObservableSet pauli_projector_set(int n_qubits) {
  if (n_qubits < 1) throw Error("pauli_projector_set: n_qubits must be positive");
  const Matrix eye = Matrix::Identity(2, 2);
  std::vector<Matrix> single;
  std::vector<std::string> single_labels;
  for (const auto& ax : pauli_axes()) {
    single.push_back(0.5 * (eye + ax.sigma));
    single_labels.push_back(std::string(ax.name) + "+");
    single.push_back(0.5 * (eye - ax.sigma));
    single_labels.push_back(std::string(ax.name) + "-");
  }

  std::vector<Matrix> ops = single;
  std::vector<std::string> labels = single_labels;
  for (int q = 1; q < n_qubits; ++q) {
    std::vector<Matrix> next;
    std::vector<std::string> next_labels;
    next.reserve(ops.size() * 6);
    for (std::size_t i = 0; i < ops.size(); ++i) {
      for (std::size_t j = 0; j < single.size(); ++j) {
        next.push_back(kron(ops[i], single[j]));
        next_labels.push_back(labels[i] + "⊗" + single_labels[j]);
      }
    }
    ops = std::move(next);
    labels = std::move(next_labels);
  }

  std::vector<HermitianOperator> out;
  out.reserve(ops.size());
  for (auto& m : ops) out.emplace_back(std::move(m));
  return ObservableSet(std::move(out), std::move(labels));
}

bool is_information_complete(const ObservableSet& set) {
  const int d = set.dim();
  const int r = set.size();
  // Gram matrix of the observables plus the identity; its rank is the span
  // dimension, decided by eigenvalues above 1e-9.
  std::vector<const Matrix*> ops;
  ops.reserve(r + 1);
  for (const auto& a : set.observables()) ops.push_back(&a.entries());
  const Matrix eye = Matrix::Identity(d, d);
  ops.push_back(&eye);

  Eigen::MatrixXd gram(r + 1, r + 1);
  for (int i = 0; i <= r; ++i) {
    for (int j = i; j <= r; ++j) {
      gram(i, j) = gram(j, i) = hs_inner_raw(*ops[i], *ops[j]);
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram, Eigen::EigenvaluesOnly);
  int rank = 0;
  for (int i = 0; i <= r; ++i) {
    if (es.eigenvalues()(i) > 1e-9) ++rank;
  }
  return rank == d * d;
}

DensityMatrix random_pure_target(std::uint64_t seed, int dim) {
  if (dim < 2) throw Error("random_pure_target: dim must be >= 2");
  RngStream rng(seed);
  Eigen::VectorXcd psi(dim);
  for (int i = 0; i < dim; ++i) {
    const double re = rng.normal();
    const double im = rng.normal();
    psi(i) = Complex(re, im);
  }
  psi /= psi.norm();
  return DensityMatrix(psi * psi.adjoint());
}

void PerturbationSpec::validate() const {
  // the published experiment uses lambda in (0,1); the closed endpoints are
  // well-defined limits (exact preparation / maximally mixed) and accepted
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw Error("PerturbationSpec: lambda outside [0,1]");
  if (!(eta >= 0.0)) throw Error("PerturbationSpec: eta must be >= 0");
  if (coefficients) {
    if (coefficients->size() != 16) throw Error("PerturbationSpec: need 16 coefficients");
    for (double h : *coefficients) {
      if (!(h > -1.0 && h < 1.0)) throw Error("PerturbationSpec: coefficient outside (-1,1)");
    }
  }
}

const std::vector<HermitianOperator>& su4_generators() {
  static const std::vector<HermitianOperator> gens = [] {
    const int d = 4;
    std::vector<Matrix> out;
    // symmetric and antisymmetric off-diagonal generators
    for (int j = 0; j < d; ++j) {
      for (int k = j + 1; k < d; ++k) {
        Matrix s = Matrix::Zero(d, d);
        s(j, k) = 1.0;
        s(k, j) = 1.0;
        out.push_back(s);
        Matrix a = Matrix::Zero(d, d);
        a(j, k) = Complex(0, -1);
        a(k, j) = Complex(0, 1);
        out.push_back(a);
      }
    }
    // diagonal generators, Tr(Gamma^2) = 2
    for (int l = 1; l < d; ++l) {
      Matrix g = Matrix::Zero(d, d);
      const double c = std::sqrt(2.0 / (l * (l + 1.0)));
      for (int i = 0; i < l; ++i) g(i, i) = c;
      g(l, l) = -c * l;
      out.push_back(g);
    }
    std::vector<HermitianOperator> res;
    res.reserve(out.size());
    for (auto& m : out) res.emplace_back(std::move(m));
    return res;
  }();
  return gens;
}

DensityMatrix perturb_state(const DensityMatrix& rho0, const PerturbationSpec& spec,
                            std::uint64_t seed) {
  if (rho0.dim() != 4) throw Error("perturb_state: requires dim 4 (SU(4) generators)");
  spec.validate();

  std::vector<double> h;
  if (spec.coefficients) {
    h = *spec.coefficients;
  } else {
    RngStream rng(seed);
    h.resize(16);
    for (double& v : h) v = rng.uniform(-1.0, 1.0);
  }

  Matrix ham = h[0] * Matrix::Identity(4, 4);
  const auto& gens = su4_generators();
  for (int j = 0; j < 15; ++j) ham += h[j + 1] * gens[j].entries();

  // exp(i eta H) via eigendecomposition (H Hermitian)
  Eigen::SelfAdjointEigenSolver<Matrix> es(ham);
  Eigen::VectorXcd phases(4);
  for (int i = 0; i < 4; ++i) {
    phases(i) = std::exp(Complex(0, spec.eta * es.eigenvalues()(i)));
  }
  const Matrix u = es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();

  const Matrix mixed =
      (1.0 - spec.lambda) * rho0.entries() + (spec.lambda / 4.0) * Matrix::Identity(4, 4);
  Matrix rho = u * mixed * u.adjoint();
  rho = 0.5 * (rho + rho.adjoint().eval());
  return DensityMatrix(std::move(rho));
}

}  // namespace qsv
