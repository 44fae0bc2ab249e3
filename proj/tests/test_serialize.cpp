#include <doctest.h>

#include "oracles.hpp"
#include "qsv/adaptive.hpp"
#include "qsv/planner.hpp"
#include "qsv/serialize.hpp"
#include "qsv/states.hpp"
#include "qsv/verifier.hpp"

using namespace qsv;

TEST_SUITE("serialize") {

TEST_CASE("state json round trip preserves entries") {
  RngStream rng(101);
  for (int trial = 0; trial < 20; ++trial) {
    const DensityMatrix rho = testing::random_mixed_state(rng, 4);
    const DensityMatrix back = state_from_json(state_to_json(rho));
    CHECK((back.entries() - rho.entries()).cwiseAbs().maxCoeff() < 1e-15);
  }
  // malformed input is rejected
  CHECK_THROWS_AS(state_from_json(Json{{"dim", 2}, {"re", {{1.0}}}, {"im", {{0.0}}}}), Error);
}

TEST_CASE("plan json round trip") {
  const ObservableSet p2 = pauli_projector_set(2);
  const DensityMatrix rho0 = random_pure_target(102, 4);
  const SequencePlan plan = plan_ios(rho0, p2, bures_from_fidelity(0.95), 13);
  const SequencePlan back = plan_from_json(plan_to_json(plan));
  CHECK(back.method == plan.method);
  CHECK(back.indices == plan.indices);
  CHECK(back.scores == plan.scores);
  CHECK(back.stop_reason == plan.stop_reason);
  CHECK(back.seed == plan.seed);
  CHECK(back.epsilon == plan.epsilon);
  CHECK(back.target_digest == plan.target_digest);
}

TEST_CASE("observable set serialization and pauli expansion") {
  const ObservableSet p1 = pauli_projector_set(1);
  const ObservableSet back = observable_set_from_json(observable_set_to_json(p1));
  REQUIRE(back.size() == p1.size());
  for (int i = 0; i < p1.size(); ++i) {
    CHECK((back[i].entries() - p1[i].entries()).cwiseAbs().maxCoeff() < 1e-15);
    CHECK(back.label(i) == p1.label(i));
  }
  const ObservableSet expanded = observable_set_from_json(Json{{"pauli_qubits", 2}});
  CHECK(expanded.size() == 36);

  // Pauli-string labels expand to the matching projectors
  const ObservableSet labeled = observable_set_from_json(
      Json{{"pauli_labels", {"x+⊗z-", "z+⊗z+", "y-⊗x+"}}});
  REQUIRE(labeled.size() == 3);
  const ObservableSet p2 = pauli_projector_set(2);
  CHECK((labeled[0].entries() - p2[5].entries()).cwiseAbs().maxCoeff() < 1e-15);
  CHECK((labeled[1].entries() - p2[28].entries()).cwiseAbs().maxCoeff() < 1e-15);
  CHECK((labeled[2].entries() - p2[18].entries()).cwiseAbs().maxCoeff() < 1e-15);
  CHECK_THROWS_AS(observable_set_from_json(Json{{"pauli_labels", {"w+"}}}), Error);
}

TEST_CASE("outcome and trace serialization") {
  const ObservableSet p2 = pauli_projector_set(2);
  const DensityMatrix rho0 = random_pure_target(103, 4);
  MeasurementOracle oracle = MeasurementOracle::perfect(rho0);
  const SequencePlan plan = plan_random(p2, 3);
  const VerificationOutcome out =
      run_vm(plan, p2, oracle, rho0, bures_from_fidelity(0.95));
  const Json j = outcome_to_json(out);
  CHECK(j.at("verdict").get<std::string>() == to_string(out.verdict));
  CHECK(j.at("trace").size() == out.trace.size());
  const std::string csv = outcome_trace_csv(out);
  CHECK(csv.rfind("step,observable,y,gamma,Gamma\n", 0) == 0);

  MeasurementOracle oracle2 = MeasurementOracle::perfect(rho0);
  const AdaptiveTrace trace = run_av(p2, oracle2, rho0, bures_from_fidelity(0.95), 1);
  const Json aj = adaptive_trace_to_json(trace);
  CHECK(aj.at("steps").size() == trace.steps.size());
  CHECK(adaptive_trace_csv(trace).rfind("step,observable,y,omega,Omega\n", 0) == 0);
}

TEST_CASE("format_double is stable") {
  CHECK(format_double(0.5) == "0.5");
  CHECK(format_double(1.0 / 3.0) == format_double(1.0 / 3.0));
}

}  // TEST_SUITE
