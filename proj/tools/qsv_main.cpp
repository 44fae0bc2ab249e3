// qsv: plan, verify, adapt and reproduce the two-qubit verification study.
#include <CLI11.hpp>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <optional>
#include <string>

#include "qsv/sdp.hpp"

#include "qsv/adaptive.hpp"
#include "qsv/experiment.hpp"
#include "qsv/planner.hpp"
#include "qsv/serialize.hpp"
#include "qsv/states.hpp"
#include "qsv/verifier.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitSolver = 3;

qsv::MeasurementOracle make_oracle(const qsv::DensityMatrix& state,
                                   std::optional<std::uint64_t> shots, std::uint64_t seed) {
  if (shots) return qsv::MeasurementOracle::finite_shots(state, *shots, seed);
  return qsv::MeasurementOracle::perfect(state);
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(std::string v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

// Flat `key = value` configuration (TOML-style scalars, # comments). Applies
// only the keys whose command-line flags were not passed, so flags override
// the file.
void apply_experiment_config(const std::string& path, const CLI::App& cmd,
                             qsv::ExperimentConfig& config, std::string& out_dir,
                             std::optional<std::uint64_t>& shots) {
  std::ifstream is(path);
  if (!is) throw qsv::Error("cannot open config file: " + path);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty() || line.front() == '[') continue;  // sections are ignored
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw qsv::Error("config line " + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && (value.front() == '"' || value.front() == '\'') &&
        value.back() == value.front()) {
      value = value.substr(1, value.size() - 2);
    }
    const auto passed = [&](const char* flag) { return cmd.count(flag) > 0; };
    try {
      if (key == "seed") {
        if (!passed("--seed")) config.seed = std::stoull(value);
      } else if (key == "n-targets" || key == "n_targets") {
        if (!passed("--n-targets")) config.n_targets = std::stoi(value);
      } else if (key == "epsilon-fidelity" || key == "epsilon_fidelity") {
        if (!passed("--epsilon-fidelity")) config.epsilon_fidelity = std::stod(value);
      } else if (key == "lambda-accurate" || key == "lambda_accurate") {
        if (!passed("--lambda-accurate")) config.lambda_accurate = std::stod(value);
      } else if (key == "lambda-nonaccurate" || key == "lambda_nonaccurate") {
        if (!passed("--lambda-nonaccurate")) config.lambda_nonaccurate = std::stod(value);
      } else if (key == "eta") {
        if (!passed("--eta")) config.eta = std::stod(value);
      } else if (key == "n-controls" || key == "n_control_sequences") {
        if (!passed("--n-controls")) config.n_control_sequences = std::stoi(value);
      } else if (key == "shots") {
        if (!passed("--shots")) shots = std::stoull(value);
      } else if (key == "algorithms") {
        if (!passed("--algorithms")) config.algorithms = split_list(value);
      } else if (key == "os-cap" || key == "os_cap") {
        if (!passed("--os-cap")) config.os_cap = std::stoi(value);
      } else if (key == "out-dir" || key == "out_dir") {
        if (!passed("--out-dir")) out_dir = value;
      } else {
        throw qsv::Error("unknown config key '" + key + "'");
      }
    } catch (const std::invalid_argument&) {
      throw qsv::Error("config line " + std::to_string(lineno) + ": bad value for " + key);
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Measurement-sequence planning and quantum state verification"};
  app.require_subcommand(1);

  std::string sdp_debug_path;
  app.add_option("--sdp-debug", sdp_debug_path,
                 "dump per-iterate solver diagnostics to this file");

  // ---- plan ----
  auto* plan_cmd = app.add_subcommand("plan", "Build a measurement sequence off-line");
  std::string plan_algo = "ios", plan_target, plan_obs = "pauli2q", plan_out = "plan.json";
  double plan_ef = 0.95;
  std::uint64_t plan_seed = 0;
  int plan_os_cap = 3;
  bool plan_complete = false;
  plan_cmd->add_option("--algo", plan_algo, "os|ios|ias|random")
      ->check(CLI::IsMember({"os", "ios", "ias", "random"}));
  plan_cmd->add_option("--target", plan_target, "target state JSON file");
  plan_cmd->add_option("--observables", plan_obs, "pauli2q or observable-set JSON file");
  plan_cmd->add_option("--epsilon-fidelity", plan_ef, "fidelity threshold (default 0.95)");
  plan_cmd->add_option("--seed", plan_seed, "seed for randomized choices");
  plan_cmd->add_option("--os-cap", plan_os_cap, "subset-size cap for the exhaustive search");
  plan_cmd->add_flag("--complete", plan_complete,
                     "append random independent indices up to d^2");
  plan_cmd->add_option("--out", plan_out, "output plan file");

  // ---- verify ----
  auto* verify_cmd = app.add_subcommand("verify", "Run the verification protocol on a plan");
  std::string verify_plan, verify_state, verify_target, verify_obs = "pauli2q";
  std::string verify_out, verify_csv;
  double verify_ef = 0.95;
  std::optional<std::uint64_t> verify_shots;
  std::uint64_t verify_seed = 0;
  verify_cmd->add_option("--plan", verify_plan, "plan JSON file")->required();
  verify_cmd->add_option("--state", verify_state, "prepared state JSON file")->required();
  verify_cmd->add_option("--target", verify_target, "target state JSON file")->required();
  verify_cmd->add_option("--observables", verify_obs, "pauli2q or observable-set JSON file");
  verify_cmd->add_option("--epsilon-fidelity", verify_ef, "fidelity threshold");
  verify_cmd->add_option("--shots", verify_shots, "finite-shot sampling (absent = perfect)");
  verify_cmd->add_option("--seed", verify_seed, "sampling seed");
  verify_cmd->add_option("--out", verify_out, "write the outcome JSON here");
  verify_cmd->add_option("--csv", verify_csv, "write the per-step trace CSV here");

  // ---- adapt ----
  auto* adapt_cmd = app.add_subcommand("adapt", "Run the adaptive verification protocol");
  std::string adapt_target, adapt_state, adapt_obs = "pauli2q", adapt_out, adapt_csv;
  double adapt_ef = 0.95;
  std::optional<std::uint64_t> adapt_shots;
  std::uint64_t adapt_seed = 0;
  adapt_cmd->add_option("--target", adapt_target, "target state JSON file")->required();
  adapt_cmd->add_option("--state", adapt_state, "prepared state JSON file")->required();
  adapt_cmd->add_option("--observables", adapt_obs, "pauli2q or observable-set JSON file");
  adapt_cmd->add_option("--epsilon-fidelity", adapt_ef, "fidelity threshold");
  adapt_cmd->add_option("--shots", adapt_shots, "finite-shot sampling (absent = perfect)");
  adapt_cmd->add_option("--seed", adapt_seed, "selection and sampling seed");
  adapt_cmd->add_option("--out", adapt_out, "write the trace JSON here");
  adapt_cmd->add_option("--csv", adapt_csv, "write the per-step summary CSV here");

  // ---- experiment ----
  auto* exp_cmd = app.add_subcommand("experiment", "Reproduce the two-qubit study");
  qsv::ExperimentConfig config;
  std::string exp_out_dir = "experiment_out";
  std::optional<std::uint64_t> exp_shots;
  std::string exp_config_path;
  exp_cmd->add_option("--config", exp_config_path, "flat key = value configuration file");
  exp_cmd->add_option("--seed", config.seed, "master seed");
  exp_cmd->add_option("--n-targets", config.n_targets, "number of random targets");
  exp_cmd->add_option("--epsilon-fidelity", config.epsilon_fidelity, "fidelity threshold");
  exp_cmd->add_option("--lambda-accurate", config.lambda_accurate,
                      "mixing weight for accurate preparations");
  exp_cmd->add_option("--lambda-nonaccurate", config.lambda_nonaccurate,
                      "mixing weight for non-accurate preparations");
  exp_cmd->add_option("--eta", config.eta, "rotation strength");
  exp_cmd->add_option("--n-controls", config.n_control_sequences,
                      "random control sequences per target");
  exp_cmd->add_option("--shots", exp_shots, "finite-shot sampling (absent = perfect)");
  exp_cmd->add_option("--algorithms", config.algorithms,
                      "subset of os,ios,ias,av,random")
      ->delimiter(',');
  exp_cmd->add_option("--os-cap", config.os_cap, "subset-size cap for the exhaustive search");
  exp_cmd->add_option("--out-dir", exp_out_dir, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return kExitConfig;
  }

  std::ofstream sdp_debug;
  if (!sdp_debug_path.empty()) {
    sdp_debug.open(sdp_debug_path);
    if (sdp_debug) qsv::set_sdp_debug_stream(&sdp_debug);
  }

  try {
    if (*plan_cmd) {
      const qsv::ObservableSet set = qsv::load_observables(plan_obs);
      const double eps = qsv::bures_from_fidelity(plan_ef);
      qsv::SequencePlan plan;
      if (plan_algo == "random") {
        plan = qsv::plan_random(set, plan_seed);
      } else {
        if (plan_target.empty()) {
          std::cerr << "error: --target is required for --algo " << plan_algo << "\n";
          return kExitConfig;
        }
        const qsv::DensityMatrix rho0 = qsv::load_state(plan_target);
        if (plan_algo == "os") {
          plan = qsv::plan_os(rho0, set, eps, plan_os_cap);
        } else if (plan_algo == "ios") {
          plan = qsv::plan_ios(rho0, set, eps, plan_seed);
        } else {
          plan = qsv::plan_ias(rho0, set, plan_seed);
        }
      }
      if (plan_complete) plan = qsv::complete_sequence(plan, set, plan_seed);
      qsv::save_plan(plan, plan_out);
      std::cout << "plan: method=" << qsv::to_string(plan.method)
                << " length=" << plan.length() << " stop=" << plan.stop_reason << " -> "
                << plan_out << "\n";
      return kExitOk;
    }

    if (*verify_cmd) {
      const qsv::ObservableSet set = qsv::load_observables(verify_obs);
      const qsv::SequencePlan plan = qsv::load_plan(verify_plan);
      const qsv::DensityMatrix rho0 = qsv::load_state(verify_target);
      const qsv::DensityMatrix rho_exp = qsv::load_state(verify_state);
      if (!plan.target_digest.empty() &&
          plan.target_digest != qsv::target_digest(rho0, set)) {
        std::cerr << "error: plan was built for a different target/observable set\n";
        return kExitConfig;
      }
      const double eps =
          verify_cmd->count("--epsilon-fidelity") || plan.epsilon <= 0.0
              ? qsv::bures_from_fidelity(verify_ef)
              : plan.epsilon;
      qsv::MeasurementOracle oracle = make_oracle(rho_exp, verify_shots, verify_seed);
      const qsv::VerificationOutcome outcome = qsv::run_vm(plan, set, oracle, rho0, eps);
      if (!verify_out.empty()) {
        qsv::write_text_file(verify_out, qsv::outcome_to_json(outcome).dump(2) + "\n");
      }
      if (!verify_csv.empty()) {
        qsv::write_text_file(verify_csv, qsv::outcome_trace_csv(outcome));
      }
      std::cout << "verdict: " << qsv::to_string(outcome.verdict)
                << " steps: " << outcome.steps_used << "\n";
      return kExitOk;
    }

    if (*adapt_cmd) {
      const qsv::ObservableSet set = qsv::load_observables(adapt_obs);
      const qsv::DensityMatrix rho0 = qsv::load_state(adapt_target);
      const qsv::DensityMatrix rho_exp = qsv::load_state(adapt_state);
      const double eps = qsv::bures_from_fidelity(adapt_ef);
      qsv::MeasurementOracle oracle = make_oracle(rho_exp, adapt_shots, adapt_seed);
      const qsv::AdaptiveTrace trace = qsv::run_av(set, oracle, rho0, eps, adapt_seed);
      if (!adapt_out.empty()) {
        qsv::write_text_file(adapt_out, qsv::adaptive_trace_to_json(trace).dump(2) + "\n");
      }
      if (!adapt_csv.empty()) {
        qsv::write_text_file(adapt_csv, qsv::adaptive_trace_csv(trace));
      }
      std::cout << "verdict: " << qsv::to_string(trace.verdict)
                << " steps: " << trace.steps_used << "\n";
      return kExitOk;
    }

    if (*exp_cmd) {
      if (!exp_config_path.empty()) {
        apply_experiment_config(exp_config_path, *exp_cmd, config, exp_out_dir, exp_shots);
      }
      if (exp_shots) config.shots = *exp_shots;
      config.validate();
      const qsv::ExperimentReport report = qsv::run_experiment(config);
      qsv::write_report(report, exp_out_dir);
      std::cout << "experiment: " << report.completed_targets << "/" << config.n_targets
                << " targets completed -> " << exp_out_dir << "\n";
      for (const auto& [cls, algos] : report.stats) {
        for (const auto& [algo, st] : algos) {
          std::cout << "  " << cls << " " << algo << ": mean=" << st.mean
                    << " std=" << st.stddev << "\n";
        }
      }
      if (report.completion_rate() < 0.99) {
        std::cerr << "error: completion rate " << report.completion_rate()
                  << " below the 99% exclusion budget\n";
        return kExitSolver;
      }
      return kExitOk;
    }
  } catch (const qsv::RemeasureError& e) {
    std::cerr << "re-measure: " << e.what() << "\n";
    return kExitSolver;
  } catch (const qsv::SolverError& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return kExitSolver;
  } catch (const qsv::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitConfig;
}
