#include <doctest.h>

#include "oracles.hpp"
#include "qsv/planner.hpp"
#include "qsv/states.hpp"
#include "qsv/verifier.hpp"

using namespace qsv;

namespace {

DensityMatrix ket(int dim, int k) {
  Matrix m = Matrix::Zero(dim, dim);
  m(k, k) = 1.0;
  return DensityMatrix(std::move(m));
}

const double kEps = bures_from_fidelity(0.95);

}  // namespace

TEST_SUITE("verifier") {

TEST_CASE("oracle modes") {
  const DensityMatrix rho = random_pure_target(61, 4);
  const ObservableSet p2 = pauli_projector_set(2);
  MeasurementOracle perfect = MeasurementOracle::perfect(rho);
  CHECK(perfect.measure(p2[5]) ==
        doctest::Approx(hs_inner_raw(rho.entries(), p2[5].entries())).epsilon(1e-12));

  MeasurementOracle shots = MeasurementOracle::finite_shots(rho, 100000, 7);
  const double sampled = shots.measure(p2[5]);
  CHECK(std::abs(sampled - perfect.measure(p2[5])) < 0.01);

  // non-projector observables cannot be sampled
  RngStream rng(61);
  MeasurementOracle shots2 = MeasurementOracle::finite_shots(rho, 10, 7);
  CHECK_THROWS_AS(shots2.measure(HermitianOperator(testing::random_hermitian(rng, 4))),
                  Error);

  // identical seeds give identical sampled sequences
  MeasurementOracle a = MeasurementOracle::finite_shots(rho, 1000, 42);
  MeasurementOracle b = MeasurementOracle::finite_shots(rho, 1000, 42);
  for (int i = 0; i < 5; ++i) CHECK(a.measure(p2[i]) == b.measure(p2[i]));
}

TEST_CASE("run_vm accepts an exact preparation at the first step") {
  const ObservableSet p2 = pauli_projector_set(2);
  const DensityMatrix rho0 = ket(4, 0);
  const SequencePlan plan =
      complete_sequence(plan_ios(rho0, p2, kEps, 1), p2, 1);
  MeasurementOracle oracle = MeasurementOracle::perfect(rho0);
  const VerificationOutcome out = run_vm(plan, p2, oracle, rho0, kEps);
  CHECK(out.verdict == Verdict::Accurate);
  CHECK(out.steps_used == 1);
  CHECK(out.trace[0].Gamma < 1e-6);
}

TEST_CASE("run_vm rejects an orthogonal preparation at the first step") {
  const ObservableSet p2 = pauli_projector_set(2);
  const DensityMatrix rho0 = ket(4, 0);   // |00>
  const DensityMatrix rho_exp = ket(4, 3);  // |11>
  SequencePlan plan;
  plan.indices = {28};  // z+ (x) z+
  plan = complete_sequence(plan, p2, 2);
  MeasurementOracle oracle = MeasurementOracle::perfect(rho_exp);
  const VerificationOutcome out = run_vm(plan, p2, oracle, rho0, kEps);
  CHECK(out.verdict == Verdict::NotAccurate);
  CHECK(out.steps_used == 1);
  CHECK(out.trace[0].gamma == doctest::Approx(std::sqrt(2.0)).epsilon(1e-6));
}

TEST_CASE("perfect-mode bracket contains the true distance at every step") {
  const ObservableSet p2 = pauli_projector_set(2);
  RngStream rng(62);
  for (int trial = 0; trial < 12; ++trial) {
    const DensityMatrix rho0 = random_pure_target(6200 + trial, 4);
    PerturbationSpec pert{0.3 * rng.uniform01(), 0.3 * rng.uniform01(), std::nullopt};
    const DensityMatrix rho_exp = perturb_state(rho0, pert, 620 + trial);
    const double truth = bures_pure(rho_exp, rho0);
    const SequencePlan plan = plan_random(p2, 6200 + trial);
    MeasurementOracle oracle = MeasurementOracle::perfect(rho_exp);
    const VerificationOutcome out = run_vm(plan, p2, oracle, rho0, kEps);
    double prev_gamma = -1e300, prev_Gamma = 1e300;
    for (const StepRecord& s : out.trace) {
      CHECK(s.gamma <= truth + 1e-6);
      CHECK(s.Gamma >= truth - 1e-6);
      CHECK(s.gamma >= prev_gamma - 1e-6);
      CHECK(s.Gamma <= prev_Gamma + 1e-6);
      prev_gamma = s.gamma;
      prev_Gamma = s.Gamma;
    }
    // perfect oracle + complete plan always decides
    CHECK(out.verdict != Verdict::Exhausted);
    CHECK((out.verdict == Verdict::Accurate) == (truth <= kEps));
  }
}

TEST_CASE("finite-shot verdicts match perfect verdicts away from the threshold") {
  // Both classes need full-rank states with boundary clearance well above the
  // 1/sqrt(shots) noise floor, otherwise the sampled data is legitimately
  // inconsistent and every run ends in the re-measure abort.
  const ObservableSet p2 = pauli_projector_set(2);
  int agree = 0, total = 0;
  for (int trial = 0; trial < 40; ++trial) {
    const DensityMatrix rho0 = random_pure_target(6300 + trial, 4);
    PerturbationSpec pert{trial % 2 == 0 ? 0.05 : 0.1, trial % 2 == 0 ? 0.05 : 0.15,
                          std::nullopt};
    const DensityMatrix rho_exp = perturb_state(rho0, pert, 630 + trial);
    const double truth = bures_pure(rho_exp, rho0);
    if (std::abs(truth - kEps) <= 0.05) continue;
    const SequencePlan plan = plan_random(p2, trial);
    MeasurementOracle perfect = MeasurementOracle::perfect(rho_exp);
    const VerificationOutcome ground = run_vm(plan, p2, perfect, rho0, kEps);
    ++total;
    // inconsistent samples abort with re-measure; honor it with fresh draws
    for (std::uint64_t attempt = 0; attempt < 8; ++attempt) {
      MeasurementOracle sampled =
          MeasurementOracle::finite_shots(rho_exp, 1000000, 1000 * trial + attempt);
      try {
        if (run_vm(plan, p2, sampled, rho0, kEps).verdict == ground.verdict) ++agree;
        break;
      } catch (const RemeasureError&) {
        continue;
      }
    }
  }
  REQUIRE(total >= 20);
  CHECK(static_cast<double>(agree) / total >= 0.95);
}

TEST_CASE("reconstruct_state round trips") {
  const ObservableSet p2 = pauli_projector_set(2);
  RngStream rng(64);
  const DensityMatrix rho_exp = testing::random_mixed_state(rng, 4);

  SUBCASE("full 36-observable data") {
    std::vector<int> subset(36);
    std::iota(subset.begin(), subset.end(), 0);
    std::vector<double> values;
    for (int i : subset) values.push_back(hs_inner_raw(p2[i].entries(), rho_exp.entries()));
    const DensityMatrix rec = reconstruct_state(p2, subset, values);
    CHECK(hs_distance_raw(rec.entries(), rho_exp.entries()) < 1e-8);
  }

  SUBCASE("16 independent observables") {
    const SequencePlan plan = plan_random(p2, 17);
    std::vector<double> values;
    for (int i : plan.indices) {
      values.push_back(hs_inner_raw(p2[i].entries(), rho_exp.entries()));
    }
    const DensityMatrix rec = reconstruct_state(p2, plan.indices, values);
    CHECK(hs_distance_raw(rec.entries(), rho_exp.entries()) < 1e-8);
    for (std::size_t k = 0; k < values.size(); ++k) {
      CHECK(std::abs(hs_inner_raw(rec.entries(), p2[plan.indices[k]].entries()) - values[k]) <
            1e-7);
    }
  }

  SUBCASE("orthonormal basis: coefficients are the values themselves") {
    // normalized two-qubit Pauli basis (sigma_a (x) sigma_b)/2, orthonormal
    Matrix paulis[4];
    paulis[0] = Matrix::Identity(2, 2);
    paulis[1] = Matrix(2, 2);
    paulis[1] << 0, 1, 1, 0;
    paulis[2] = Matrix(2, 2);
    paulis[2] << Complex(0, 0), Complex(0, -1), Complex(0, 1), Complex(0, 0);
    paulis[3] = Matrix(2, 2);
    paulis[3] << 1, 0, 0, -1;
    std::vector<HermitianOperator> ops;
    std::vector<std::string> labels;
    for (int a = 0; a < 4; ++a) {
      for (int b = 0; b < 4; ++b) {
        Matrix m(4, 4);
        for (int i = 0; i < 2; ++i) {
          for (int j = 0; j < 2; ++j) {
            m.block(2 * i, 2 * j, 2, 2) = paulis[a](i, j) * paulis[b];
          }
        }
        ops.emplace_back(0.5 * m);
        labels.push_back("P" + std::to_string(a) + std::to_string(b));
      }
    }
    const ObservableSet basis(ops, labels);
    std::vector<int> subset(16);
    std::iota(subset.begin(), subset.end(), 0);
    std::vector<double> values;
    for (int i : subset) {
      values.push_back(hs_inner_raw(basis[i].entries(), rho_exp.entries()));
    }
    const DensityMatrix rec = reconstruct_state(basis, subset, values);
    // Gram = identity, so the expansion sum_i y_i B_i is the state itself
    Matrix direct = Matrix::Zero(4, 4);
    for (int i = 0; i < 16; ++i) direct += values[i] * basis[i].entries();
    CHECK(hs_distance_raw(rec.entries(), direct) < 1e-10);
    CHECK(hs_distance_raw(rec.entries(), rho_exp.entries()) < 1e-10);
  }
}

TEST_CASE("reconstruct_state error paths") {
  const ObservableSet p2 = pauli_projector_set(2);
  // dependent subset: z+z+ together with the other three z projectors plus
  // their complement is linearly dependent? use a guaranteed dependency:
  // the four z(x)z projectors sum to the identity, and adding all six
  // z(x){x,y,z}-style projectors creates one
  std::vector<int> subset = {28, 29, 34, 35};  // z+z+, z+z-, z-z+, z-z-
  std::vector<double> values = {0.25, 0.25, 0.25, 0.25};
  // these four are linearly independent; appending their sum (the identity)
  // comes via the trace row, consistent -> spans only 4+... not d^2
  CHECK_THROWS_AS(reconstruct_state(p2, subset, values), Error);  // span deficient

  // unphysical values
  const SequencePlan plan = plan_random(p2, 18);
  std::vector<double> bad(16, 0.0);
  for (std::size_t i = 0; i < 16; ++i) bad[i] = i % 2 == 0 ? 1.0 : 0.0;
  CHECK_THROWS_AS(reconstruct_state(p2, plan.indices, bad), Error);
}

TEST_CASE("run_vm validates inputs") {
  const ObservableSet p2 = pauli_projector_set(2);
  const DensityMatrix rho0 = random_pure_target(65, 4);
  SequencePlan plan = plan_random(p2, 1);
  MeasurementOracle oracle = MeasurementOracle::perfect(rho0);
  CHECK_THROWS_AS(run_vm(plan, p2, oracle, rho0, 0.0), Error);
  plan.indices[0] = 99;
  CHECK_THROWS_AS(run_vm(plan, p2, oracle, rho0, kEps), Error);
}

}  // TEST_SUITE
