#include <doctest.h>

#include <set>

#include "oracles.hpp"
#include "qsv/linalg.hpp"
#include "qsv/states.hpp"

using namespace qsv;

TEST_SUITE("states") {

TEST_CASE("single-qubit projector set") {
  const ObservableSet p1 = pauli_projector_set(1);
  REQUIRE(p1.size() == 6);
  for (int i = 0; i < 6; ++i) {
    const Matrix& p = p1[i].entries();
    CHECK((p * p - p).cwiseAbs().maxCoeff() < 1e-12);  // idempotent
    CHECK(p.trace().real() == doctest::Approx(1.0).epsilon(1e-12));
  }
  // first element is the +1 eigenprojector of sigma_x
  Matrix sx(2, 2);
  sx << 0, 1, 1, 0;
  const Matrix px = 0.5 * (Matrix::Identity(2, 2) + sx);
  CHECK((p1[0].entries() - px).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(p1.label(0) == "x+");
  CHECK(p1.label(5) == "z-");
}

TEST_CASE("two-qubit projector set: 36 observables, information-complete") {
  const ObservableSet p2 = pauli_projector_set(2);
  REQUIRE(p2.size() == 36);
  for (int i = 0; i < 36; ++i) {
    const Matrix& p = p2[i].entries();
    CHECK((p * p - p).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(p.trace().real() == doctest::Approx(1.0).epsilon(1e-12));
  }
  CHECK(p2.label(0) == "x+⊗x+");
  // A_{6(i-1)+j} = Pi_i (x) Pi_j: index 28 (0-based) is z+ (x) z+
  CHECK(p2.label(28) == "z+⊗z+");

  // span rank with identity = 16, via the independent SVD oracle
  std::vector<Matrix> ops;
  for (const auto& a : p2.observables()) ops.push_back(a.entries());
  CHECK(testing::span_rank(ops, true) == 16);
  CHECK(is_information_complete(p2));
}

TEST_CASE("information completeness fails for deficient sets") {
  const ObservableSet p1 = pauli_projector_set(1);
  ObservableSet zonly({p1[4], p1[5]}, {"z+", "z-"});
  CHECK_FALSE(is_information_complete(zonly));

  // remove the 12 projectors with z on the first factor
  const ObservableSet p2 = pauli_projector_set(2);
  std::vector<HermitianOperator> kept;
  std::vector<std::string> labels;
  std::vector<Matrix> raw;
  for (int i = 0; i < 36; ++i) {
    if (p2.label(i).rfind("z", 0) == 0) continue;
    kept.push_back(p2[i]);
    labels.push_back(p2.label(i));
    raw.push_back(p2[i].entries());
  }
  REQUIRE(kept.size() == 24);
  CHECK(testing::span_rank(raw, true) < 16);
  CHECK_FALSE(is_information_complete(ObservableSet(kept, labels)));
}

TEST_CASE("observable set validation") {
  const ObservableSet p1 = pauli_projector_set(1);
  CHECK_THROWS_AS(ObservableSet({}, {}), Error);  // empty
  CHECK_THROWS_AS(ObservableSet({p1[0], p1[1]}, {"a", "a"}), Error);  // dup labels
  CHECK_THROWS_AS(ObservableSet({p1[0]}, {"a", "b"}), Error);  // size mismatch
  CHECK_THROWS_AS(ObservableSet({p1[0], HermitianOperator::identity(4)}, {"a", "b"}),
                  Error);  // mixed dims
  CHECK_THROWS_AS(pauli_projector_set(0), Error);
}

TEST_CASE("random_pure_target determinism, purity and ensemble mean") {
  const DensityMatrix a = random_pure_target(123, 4);
  const DensityMatrix b = random_pure_target(123, 4);
  CHECK((a.entries() - b.entries()).cwiseAbs().maxCoeff() == 0.0);
  CHECK(a.entries().trace().real() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(purity(a.entries()) == doctest::Approx(1.0).epsilon(1e-10));

  // Monte-Carlo: the ensemble mean approaches I/dim (unitary invariance)
  Matrix mean = Matrix::Zero(4, 4);
  const int n = 10000;
  for (int s = 0; s < n; ++s) mean += random_pure_target(40000 + s, 4).entries();
  mean /= n;
  CHECK((mean - Matrix::Identity(4, 4) / 4.0).cwiseAbs().maxCoeff() < 0.02);
}

TEST_CASE("su4 generators: traceless, Tr(Gm Gj) = 2 delta") {
  const auto& gens = su4_generators();
  REQUIRE(gens.size() == 15);
  for (std::size_t m = 0; m < 15; ++m) {
    CHECK(std::abs(gens[m].entries().trace()) < 1e-12);
    for (std::size_t j = 0; j < 15; ++j) {
      const double want = m == j ? 2.0 : 0.0;
      CHECK(hs_inner(gens[m], gens[j]) == doctest::Approx(want).epsilon(1e-12));
    }
  }
}

TEST_CASE("perturb_state limits") {
  const DensityMatrix rho0 = random_pure_target(9, 4);

  PerturbationSpec none{0.0, 0.0, std::nullopt};
  const DensityMatrix same = perturb_state(rho0, none, 5);
  CHECK((same.entries() - rho0.entries()).cwiseAbs().maxCoeff() < 1e-12);

  PerturbationSpec full{1.0, 0.7, std::nullopt};
  const DensityMatrix mixed = perturb_state(rho0, full, 5);
  CHECK((mixed.entries() - Matrix::Identity(4, 4) / 4.0).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("perturb_state non-accurate ensemble stays below fidelity 0.95") {
  const DensityMatrix rho0 = random_pure_target(10, 4);
  PerturbationSpec spec{0.1, 0.1, std::nullopt};
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const DensityMatrix rho = perturb_state(rho0, spec, seed);
    CHECK(hs_inner_raw(rho.entries(), rho0.entries()) < 0.95);
  }
}

TEST_CASE("perturb_state output is a valid state for random specs") {
  RngStream rng(11);
  const DensityMatrix rho0 = random_pure_target(11, 4);
  for (int trial = 0; trial < 10000; ++trial) {
    std::vector<double> h(16);
    for (double& v : h) v = rng.uniform(-1.0, 1.0);
    PerturbationSpec spec{rng.uniform01(), rng.uniform(0.0, 2.0), h};
    CHECK_NOTHROW(perturb_state(rho0, spec, 0));  // ctor enforces invariants
  }
}

TEST_CASE("perturbation spec validation") {
  const PerturbationSpec neg_lambda{-0.1, 0.0, std::nullopt};
  CHECK_THROWS_AS(neg_lambda.validate(), Error);
  const PerturbationSpec neg_eta{0.5, -1.0, std::nullopt};
  CHECK_THROWS_AS(neg_eta.validate(), Error);
  std::vector<double> coeffs(16, 0.0);
  coeffs[3] = 1.5;
  const PerturbationSpec bad_coeff{0.5, 0.1, coeffs};
  CHECK_THROWS_AS(bad_coeff.validate(), Error);
  const PerturbationSpec ok{0.1, 0.1, std::nullopt};
  const DensityMatrix qubit = random_pure_target(1, 2);
  CHECK_THROWS_AS(perturb_state(qubit, ok, 0), Error);  // needs dim 4
}

}  // TEST_SUITE
