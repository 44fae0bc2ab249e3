// Python bindings for the verification toolkit: matrices cross the boundary
// as numpy complex arrays; enum-like results cross as strings.
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>

#include "qsv/adaptive.hpp"
#include "qsv/experiment.hpp"
#include "qsv/linalg.hpp"
#include "qsv/planner.hpp"
#include "qsv/sdp.hpp"
#include "qsv/serialize.hpp"
#include "qsv/states.hpp"
#include "qsv/verifier.hpp"

namespace py = pybind11;
using namespace qsv;

namespace {

MeasurementOracle make_oracle(const Matrix& rho_exp, std::optional<std::uint64_t> shots,
                              std::uint64_t seed) {
  DensityMatrix state(rho_exp);
  if (shots) return MeasurementOracle::finite_shots(std::move(state), *shots, seed);
  return MeasurementOracle::perfect(std::move(state));
}

std::string status_name(SdpStatus s) {
  switch (s) {
    case SdpStatus::Optimal: return "optimal";
    case SdpStatus::Infeasible: return "infeasible";
    case SdpStatus::NumericalFailure: return "numerical_failure";
  }
  return "numerical_failure";
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Measurement-sequence planning and quantum state verification";

  py::register_exception<InfeasibleError>(m, "InfeasibleError");
  py::register_exception<RemeasureError>(m, "RemeasureError");
  py::register_exception<SolverError>(m, "SolverError");
  py::register_exception<Error>(m, "QsvError");

  py::class_<ObservableSet>(m, "ObservableSet")
      .def(py::init([](const std::vector<Matrix>& mats, std::vector<std::string> labels) {
             std::vector<HermitianOperator> ops;
             ops.reserve(mats.size());
             for (const Matrix& a : mats) ops.emplace_back(a);
             return ObservableSet(std::move(ops), std::move(labels));
           }),
           py::arg("observables"), py::arg("labels"))
      .def("__len__", &ObservableSet::size)
      .def_property_readonly("dim", &ObservableSet::dim)
      .def_property_readonly("labels", &ObservableSet::labels)
      .def("matrix", [](const ObservableSet& s, int i) { return s[i].entries(); });

  py::class_<CompatibleSetSpec>(m, "CompatibleSetSpec")
      .def(py::init<int>(), py::arg("dim"))
      .def("add",
           [](CompatibleSetSpec& s, const Matrix& observable, double value) {
             s.add(HermitianOperator(observable), value);
           },
           py::arg("observable"), py::arg("value"))
      .def("__len__", [](const CompatibleSetSpec& s) { return s.constraints.size(); });

  py::class_<SequencePlan>(m, "SequencePlan")
      .def_property_readonly("method",
                             [](const SequencePlan& p) { return to_string(p.method); })
      .def_readonly("indices", &SequencePlan::indices)
      .def_readonly("scores", &SequencePlan::scores)
      .def_readonly("norm_sq", &SequencePlan::norm_sq)
      .def_readonly("stop_reason", &SequencePlan::stop_reason)
      .def_readonly("seed", &SequencePlan::seed)
      .def_readonly("epsilon", &SequencePlan::epsilon)
      .def_readonly("target_digest", &SequencePlan::target_digest)
      .def("__len__", &SequencePlan::length)
      .def("to_json", [](const SequencePlan& p) { return plan_to_json(p).dump(); });

  m.def("hs_inner", [](const Matrix& a, const Matrix& b) {
    return hs_inner(HermitianOperator(a), HermitianOperator(b));
  });
  m.def("hs_distance", [](const Matrix& a, const Matrix& b) {
    return hs_distance(HermitianOperator(a), HermitianOperator(b));
  });
  m.def("bures_pure", [](const Matrix& rho, const Matrix& rho0) {
    return bures_pure(DensityMatrix(rho), DensityMatrix(rho0));
  });
  m.def("bures_from_fidelity", &bures_from_fidelity);
  m.def("pauli_projector_set", &pauli_projector_set, py::arg("n_qubits"));
  m.def("is_information_complete", &is_information_complete);
  m.def("random_pure_target",
        [](std::uint64_t seed, int dim) { return random_pure_target(seed, dim).entries(); },
        py::arg("seed"), py::arg("dim") = 4);
  m.def("perturb_state",
        [](const Matrix& rho0, double lambda, double eta,
           std::optional<std::vector<double>> coefficients, std::uint64_t seed) {
          PerturbationSpec spec{lambda, eta, std::move(coefficients)};
          return perturb_state(DensityMatrix(rho0), spec, seed).entries();
        },
        py::arg("rho0"), py::arg("lambda_"), py::arg("eta"),
        py::arg("coefficients") = std::nullopt, py::arg("seed") = 0);

  m.def("extremize_linear",
        [](const Matrix& objective, const CompatibleSetSpec& spec, const std::string& sense) {
          const SdpSolution s = extremize_linear(
              HermitianOperator(objective), spec, sense == "max" ? Sense::Max : Sense::Min);
          py::dict out;
          out["status"] = status_name(s.status);
          if (s.status == SdpStatus::Optimal) {
            out["value"] = s.value;
            out["optimizer"] = s.optimizer->entries();
          }
          out["iterations"] = s.residuals.iterations;
          out["gap"] = s.residuals.gap;
          return out;
        },
        py::arg("objective"), py::arg("spec"), py::arg("sense") = "min");
  m.def("distance_extrema", [](const Matrix& rho0, const CompatibleSetSpec& spec) {
    return distance_extrema(DensityMatrix(rho0), spec);
  });
  m.def("estimate_state", [](const Matrix& rho0, const CompatibleSetSpec& spec) {
    return estimate_state(DensityMatrix(rho0), spec).entries();
  });

  m.def("plan_os",
        [](const Matrix& rho0, const ObservableSet& set, double epsilon, int max_subset) {
          return plan_os(DensityMatrix(rho0), set, epsilon, max_subset);
        },
        py::arg("rho0"), py::arg("set"), py::arg("epsilon"), py::arg("max_subset") = 3);
  m.def("plan_ios",
        [](const Matrix& rho0, const ObservableSet& set, double epsilon, std::uint64_t seed) {
          return plan_ios(DensityMatrix(rho0), set, epsilon, seed);
        },
        py::arg("rho0"), py::arg("set"), py::arg("epsilon"), py::arg("seed") = 0);
  m.def("plan_ias",
        [](const Matrix& rho0, const ObservableSet& set, std::uint64_t seed) {
          return plan_ias(DensityMatrix(rho0), set, seed);
        },
        py::arg("rho0"), py::arg("set"), py::arg("seed") = 0);
  m.def("plan_random", &plan_random, py::arg("set"), py::arg("seed"));
  m.def("complete_sequence", &complete_sequence, py::arg("plan"), py::arg("set"),
        py::arg("seed"));
  m.def("cross_evaluate_beta",
        [](const Matrix& rho0, const SequencePlan& plan, const ObservableSet& set) {
          return cross_evaluate_beta(DensityMatrix(rho0), plan, set);
        });

  m.def("run_vm",
        [](const SequencePlan& plan, const ObservableSet& set, const Matrix& rho_exp,
           const Matrix& rho0, double epsilon, std::optional<std::uint64_t> shots,
           std::uint64_t seed) {
          MeasurementOracle oracle = make_oracle(rho_exp, shots, seed);
          const VerificationOutcome out =
              run_vm(plan, set, oracle, DensityMatrix(rho0), epsilon);
          py::dict d;
          d["verdict"] = to_string(out.verdict);
          d["steps_used"] = out.steps_used;
          py::list trace;
          for (const StepRecord& s : out.trace) {
            trace.append(py::make_tuple(s.index, s.y, s.gamma, s.Gamma));
          }
          d["trace"] = trace;
          if (out.reconstructed) d["reconstructed"] = out.reconstructed->entries();
          return d;
        },
        py::arg("plan"), py::arg("set"), py::arg("rho_exp"), py::arg("rho0"),
        py::arg("epsilon"), py::arg("shots") = std::nullopt, py::arg("seed") = 0);

  m.def("run_av",
        [](const ObservableSet& set, const Matrix& rho_exp, const Matrix& rho0,
           double epsilon, std::uint64_t seed, std::optional<std::uint64_t> shots,
           std::uint64_t oracle_seed) {
          MeasurementOracle oracle = make_oracle(rho_exp, shots, oracle_seed);
          const AdaptiveTrace trace = run_av(set, oracle, DensityMatrix(rho0), epsilon, seed);
          py::dict d;
          d["verdict"] = to_string(trace.verdict);
          d["steps_used"] = trace.steps_used;
          py::list steps;
          for (const AdaptiveStep& s : trace.steps) {
            py::dict step;
            step["index"] = s.index;
            step["y"] = s.y;
            step["omega"] = s.omega;
            step["Omega"] = s.Omega;
            step["all_delta_zero"] = s.all_delta_zero;
            steps.append(step);
          }
          d["steps"] = steps;
          return d;
        },
        py::arg("set"), py::arg("rho_exp"), py::arg("rho0"), py::arg("epsilon"),
        py::arg("seed") = 0, py::arg("shots") = std::nullopt, py::arg("oracle_seed") = 0);

  m.def("reconstruct_state",
        [](const ObservableSet& set, const std::vector<int>& subset,
           const std::vector<double>& values) {
          return reconstruct_state(set, subset, values).entries();
        });

  py::class_<ExperimentConfig>(m, "ExperimentConfig")
      .def(py::init<>())
      .def_readwrite("seed", &ExperimentConfig::seed)
      .def_readwrite("n_targets", &ExperimentConfig::n_targets)
      .def_readwrite("epsilon_fidelity", &ExperimentConfig::epsilon_fidelity)
      .def_readwrite("lambda_accurate", &ExperimentConfig::lambda_accurate)
      .def_readwrite("lambda_nonaccurate", &ExperimentConfig::lambda_nonaccurate)
      .def_readwrite("eta", &ExperimentConfig::eta)
      .def_readwrite("n_control_sequences", &ExperimentConfig::n_control_sequences)
      .def_readwrite("shots", &ExperimentConfig::shots)
      .def_readwrite("algorithms", &ExperimentConfig::algorithms)
      .def_readwrite("os_cap", &ExperimentConfig::os_cap)
      .def_property_readonly("epsilon", &ExperimentConfig::epsilon);

  m.def("run_experiment",
        [](const ExperimentConfig& cfg, std::optional<std::string> out_dir) {
          const ExperimentReport rep = run_experiment(cfg);
          if (out_dir) write_report(rep, *out_dir);
          py::dict d;
          d["completed_targets"] = rep.completed_targets;
          d["completion_rate"] = rep.completion_rate();
          py::dict stats;
          for (const auto& [cls, algos] : rep.stats) {
            py::dict cls_d;
            for (const auto& [algo, st] : algos) {
              cls_d[algo.c_str()] = py::make_tuple(st.mean, st.stddev, st.count);
            }
            stats[cls.c_str()] = cls_d;
          }
          d["stats"] = stats;
          d["ios_recon_steps"] = rep.ios_recon_steps;
          d["ias_recon_steps"] = rep.ias_recon_steps;
          return d;
        },
        py::arg("config"), py::arg("out_dir") = std::nullopt);
}
