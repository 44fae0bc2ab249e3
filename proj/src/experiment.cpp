#include "qsv/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "qsv/adaptive.hpp"
#include "qsv/rng.hpp"
#include "qsv/sdp.hpp"
#include "qsv/serialize.hpp"
#include "qsv/states.hpp"

namespace qsv {

namespace {

constexpr int kSubTarget = 0;
constexpr int kSubAccurate = 1;
constexpr int kSubNonAccurate = 2;
constexpr int kSubIos = 3;
constexpr int kSubIas = 4;
constexpr int kSubOs = 5;
constexpr int kSubControl = 10;   // +c
constexpr int kSubAv = 30;        // +0 accurate, +1 nonaccurate
constexpr int kSubOracle = 40;    // +slot*attempts+attempt
constexpr int kStreamsPerTarget = 1000;

double max_distance_prefix(const DensityMatrix& rho0, const CompatibleSetSpec& spec) {
  SdpSolution lo = extremize_linear(rho0.as_operator(), spec, Sense::Min);
  if (lo.status != SdpStatus::Optimal) throw SolverError("prefix max-distance solve failed");
  return bures_from_fidelity(snap_fidelity(lo.value));
}

// Reconstruction count: the number of prefixes whose worst-case distance
// still exceeds the reconstruction tolerance (for a monotone trajectory, one
// less than the first reconstructed prefix).
int recon_count(const std::vector<double>& vals, int cap) {
  int n = 0;
  for (double v : vals) {
    if (v > kZeroDistanceTol) ++n;
  }
  return std::clamp(n, 1, cap);
}

}  // namespace

double ExperimentConfig::epsilon() const { return bures_from_fidelity(epsilon_fidelity); }

bool ExperimentConfig::has_algorithm(const std::string& name) const {
  return std::find(algorithms.begin(), algorithms.end(), name) != algorithms.end();
}

void ExperimentConfig::validate() const {
  if (n_targets < 1) throw Error("config: n_targets must be >= 1");
  if (!(epsilon_fidelity > 0.0 && epsilon_fidelity < 1.0)) {
    throw Error("config: epsilon_fidelity must be in (0,1)");
  }
  for (double l : {lambda_accurate, lambda_nonaccurate}) {
    if (!(l >= 0.0 && l <= 1.0)) throw Error("config: lambda outside [0,1]");
  }
  if (!(eta >= 0.0)) throw Error("config: eta must be >= 0");
  if (n_control_sequences < 0) throw Error("config: n_control_sequences must be >= 0");
  if (shots && *shots == 0) throw Error("config: shots must be positive");
  if (os_cap < 1) throw Error("config: os_cap must be >= 1");
  if (algorithms.empty()) throw Error("config: no algorithms selected");
  for (const auto& a : algorithms) {
    if (a != "os" && a != "ios" && a != "ias" && a != "av" && a != "random") {
      throw Error("config: unknown algorithm '" + a + "'");
    }
  }
}

double ExperimentReport::completion_rate() const {
  return config.n_targets == 0
             ? 0.0
             : static_cast<double>(completed_targets) / config.n_targets;
}

AlgoStats compute_stats(const std::vector<int>& counts) {
  AlgoStats st;
  st.count = static_cast<int>(counts.size());
  if (counts.empty()) return st;
  double sum = 0.0;
  for (int c : counts) sum += c;
  st.mean = sum / st.count;
  if (st.count > 1) {
    double ss = 0.0;
    for (int c : counts) ss += (c - st.mean) * (c - st.mean);
    st.stddev = std::sqrt(ss / (st.count - 1));
  }
  return st;
}

std::vector<double> cross_evaluate_beta(const DensityMatrix& rho0, const SequencePlan& plan,
                                        const ObservableSet& set) {
  if (!plan.target_digest.empty() && plan.target_digest != target_digest(rho0, set)) {
    throw Error("cross_evaluate_beta: plan digest does not match the target/set");
  }
  std::vector<double> beta;
  CompatibleSetSpec spec(set.dim());
  for (int idx : plan.indices) {
    spec.add_from_state(set[idx], rho0);
    beta.push_back(max_distance_prefix(rho0, spec));
  }
  return beta;
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
  config.validate();
  const ObservableSet set = pauli_projector_set(2);
  const double eps = config.epsilon();

  ExperimentReport report;
  report.config = config;
  report.epsilon = eps;

  auto prepare = [&](const DensityMatrix& rho0, double lambda, bool want_accurate,
                     std::uint64_t stream_seed) -> DensityMatrix {
    RngStream rng(stream_seed);
    for (int attempt = 0; attempt < 200; ++attempt) {
      std::vector<double> h(16);
      for (double& v : h) v = rng.uniform(-1.0, 1.0);
      PerturbationSpec spec{lambda, config.eta, h};
      DensityMatrix rho = perturb_state(rho0, spec, 0);
      const double db = bures_pure(rho, rho0);
      if (want_accurate ? (db <= eps) : (db > eps)) return rho;
    }
    throw Error("class resampling exhausted (200 attempts)");
  };

  for (int t = 0; t < config.n_targets; ++t) {
    const std::uint64_t base = static_cast<std::uint64_t>(t) * kStreamsPerTarget;
    auto sub = [&](int offset) { return RngStream::derive(config.seed, base + offset); };

    std::vector<TrialRow> rows;
    std::map<std::string, std::map<std::string, int>> trial_steps;
    std::vector<double> alpha_row, beta_row;
    int ios_recon = 0, ias_recon = 0;

    try {
      const DensityMatrix rho0 = random_pure_target(sub(kSubTarget), 4);
      const DensityMatrix rho_acc =
          prepare(rho0, config.lambda_accurate, true, sub(kSubAccurate));
      const DensityMatrix rho_nacc =
          prepare(rho0, config.lambda_nonaccurate, false, sub(kSubNonAccurate));

      // off-line plans (deterministic per-target substreams)
      std::vector<std::pair<std::string, SequencePlan>> plans;
      SequencePlan ios_plan = plan_ios(rho0, set, eps, sub(kSubIos));
      SequencePlan ias_plan = plan_ias(rho0, set, sub(kSubIas));
      if (config.has_algorithm("ios")) plans.emplace_back("ios", ios_plan);
      if (config.has_algorithm("ias")) plans.emplace_back("ias", ias_plan);
      if (config.has_algorithm("os")) {
        SequencePlan os_plan = plan_os(rho0, set, eps, config.os_cap);
        plans.emplace_back("os", complete_sequence(os_plan, set, sub(kSubOs)));
      }
      if (config.has_algorithm("random")) {
        for (int c = 0; c < config.n_control_sequences; ++c) {
          plans.emplace_back("ctrl" + std::to_string(c + 1),
                             plan_random(set, sub(kSubControl + c)));
        }
      }

      // planning study: prefix worst-case distances and reconstruction counts.
      // IOS reconstruction is read off the greedy alpha trajectory (the
      // span-absorbed tail is reordered); IAS from its prefix distances.
      alpha_row = cross_evaluate_beta(rho0, ios_plan, set);
      beta_row = cross_evaluate_beta(rho0, ias_plan, set);
      ios_recon = recon_count(ios_plan.scores, set.dim() * set.dim());
      ias_recon = recon_count(beta_row, set.dim() * set.dim());

      const std::vector<std::pair<std::string, const DensityMatrix*>> classes = {
          {"accurate", &rho_acc}, {"nonaccurate", &rho_nacc}};

      // finite-shot runs that hit an inconsistent intersection are re-measured
      // with fresh samples; only exhausted retries exclude the trial
      constexpr int kRemeasureAttempts = 5;
      auto with_remeasure = [&](auto&& run) {
        for (int attempt = 0;; ++attempt) {
          try {
            return run(attempt);
          } catch (const RemeasureError&) {
            if (attempt + 1 >= kRemeasureAttempts) throw;
          }
        }
      };

      int oracle_slot = 0;
      for (const auto& [cls, rho_exp] : classes) {
        for (const auto& [algo, plan] : plans) {
          const int slot = oracle_slot++;
          VerificationOutcome outcome = with_remeasure([&](int attempt) {
            MeasurementOracle oracle =
                config.shots
                    ? MeasurementOracle::finite_shots(
                          *rho_exp, *config.shots,
                          sub(kSubOracle + slot * kRemeasureAttempts + attempt))
                    : MeasurementOracle::perfect(*rho_exp);
            return run_vm(plan, set, oracle, rho0, eps);
          });
          for (std::size_t k = 0; k < outcome.trace.size(); ++k) {
            const StepRecord& sr = outcome.trace[k];
            rows.push_back({t, cls, algo, static_cast<int>(k) + 1, sr.index, sr.y, sr.gamma,
                            sr.Gamma,
                            k + 1 == outcome.trace.size() ? to_string(outcome.verdict) : ""});
          }
          trial_steps[cls][algo] = outcome.steps_used;
        }
        if (config.has_algorithm("av")) {
          const int slot = oracle_slot++;
          AdaptiveTrace trace = with_remeasure([&](int attempt) {
            MeasurementOracle oracle =
                config.shots
                    ? MeasurementOracle::finite_shots(
                          *rho_exp, *config.shots,
                          sub(kSubOracle + slot * kRemeasureAttempts + attempt))
                    : MeasurementOracle::perfect(*rho_exp);
            return run_av(set, oracle, rho0, eps, sub(kSubAv + (cls == "accurate" ? 0 : 1)));
          });
          for (std::size_t k = 0; k < trace.steps.size(); ++k) {
            const AdaptiveStep& as = trace.steps[k];
            rows.push_back({t, cls, "av", static_cast<int>(k) + 1, as.index, as.y, as.omega,
                            as.Omega,
                            k + 1 == trace.steps.size() ? to_string(trace.verdict) : ""});
          }
          trial_steps[cls]["av"] = trace.steps_used;
        }
      }
    } catch (const Error& e) {
      report.exclusions.push_back({t, "trial", e.what()});
      continue;
    }

    // commit the trial only after every stage succeeded
    report.rows.insert(report.rows.end(), rows.begin(), rows.end());
    for (const auto& [cls, algos] : trial_steps) {
      for (const auto& [algo, steps] : algos) {
        report.steps[cls][algo].push_back(steps);
      }
    }
    report.alpha_rows.push_back(alpha_row);
    report.beta_rows.push_back(beta_row);
    report.ios_recon_steps.push_back(ios_recon);
    report.ias_recon_steps.push_back(ias_recon);
    ++report.completed_targets;
  }

  for (const auto& [cls, algos] : report.steps) {
    for (const auto& [algo, counts] : algos) {
      report.stats[cls][algo] = compute_stats(counts);
    }
  }
  return report;
}

namespace {

void append_histogram(std::ostringstream& os, const std::string& name,
                      const std::vector<int>& values, int lo, int hi) {
  std::map<int, int> freq;
  for (int b = lo; b <= hi; ++b) freq[b] = 0;
  for (int v : values) {
    if (v >= lo && v <= hi) ++freq[v];
  }
  for (const auto& [bin, count] : freq) {
    os << name << "," << bin << "," << count << "\n";
  }
}

std::vector<int> paired_diff(const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<int> out;
  const std::size_t n = std::min(a.size(), b.size());
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(a[i] - b[i]);
  return out;
}

}  // namespace

void write_report(const ExperimentReport& report, const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);

  // raw.csv: one row per trial-step
  {
    std::ostringstream os;
    os << "target,class,algorithm,step,observable,y,gamma,Gamma,verdict\n";
    for (const TrialRow& r : report.rows) {
      os << r.target << "," << r.cls << "," << r.algorithm << "," << r.step << ","
         << r.observable << "," << format_double(r.y) << "," << format_double(r.gamma) << ","
         << format_double(r.Gamma) << "," << r.verdict << "\n";
    }
    write_text_file((fs::path(out_dir) / "raw.csv").string(), os.str());
  }

  // summary.json
  {
    Json j;
    const ExperimentConfig& c = report.config;
    j["config"] = {{"seed", c.seed},
                   {"n_targets", c.n_targets},
                   {"epsilon_fidelity", c.epsilon_fidelity},
                   {"lambda_accurate", c.lambda_accurate},
                   {"lambda_nonaccurate", c.lambda_nonaccurate},
                   {"eta", c.eta},
                   {"n_control_sequences", c.n_control_sequences},
                   {"os_cap", c.os_cap},
                   {"algorithms", c.algorithms}};
    if (c.shots) j["config"]["shots"] = *c.shots;
    j["epsilon"] = report.epsilon;
    j["completed_targets"] = report.completed_targets;
    j["completion_rate"] = report.completion_rate();

    for (const auto& [cls, algos] : report.stats) {
      for (const auto& [algo, st] : algos) {
        j["stats"][cls][algo] = {{"mean", st.mean}, {"stddev", st.stddev}, {"n", st.count}};
      }
    }
    auto recon_json = [](const std::vector<int>& v) {
      const AlgoStats st = compute_stats(v);
      return Json{{"mean", st.mean}, {"stddev", st.stddev}, {"n", st.count}};
    };
    j["reconstruction"]["ios"] = recon_json(report.ios_recon_steps);
    j["reconstruction"]["ias"] = recon_json(report.ias_recon_steps);

    // mean/std of beta_l - alpha_l for matched prefix lengths (Fig. 3 upper)
    {
      std::size_t max_l = 0;
      for (const auto& row : report.alpha_rows) max_l = std::max(max_l, row.size());
      Json diffs = Json::array();
      for (std::size_t l = 0; l < max_l; ++l) {
        double sum = 0.0, sum2 = 0.0;
        int n = 0;
        for (std::size_t t = 0; t < report.alpha_rows.size(); ++t) {
          if (l < report.alpha_rows[t].size() && l < report.beta_rows[t].size()) {
            const double d = report.beta_rows[t][l] - report.alpha_rows[t][l];
            sum += d;
            sum2 += d * d;
            ++n;
          }
        }
        if (n == 0) continue;
        const double mean = sum / n;
        const double var = n > 1 ? std::max(0.0, (sum2 - n * mean * mean) / (n - 1)) : 0.0;
        diffs.push_back({{"l", l + 1}, {"mean", mean}, {"stddev", std::sqrt(var)}, {"n", n}});
      }
      j["beta_minus_alpha"] = diffs;
    }

    j["exclusions"] = Json::array();
    for (const auto& e : report.exclusions) {
      j["exclusions"].push_back({{"target", e.target}, {"stage", e.stage}, {"reason", e.reason}});
    }
    write_text_file((fs::path(out_dir) / "summary.json").string(), j.dump(2) + "\n");
  }

  // histograms.csv: step counts 1..16, pairwise differences -15..15
  {
    std::ostringstream os;
    os << "histogram,bin,count\n";
    for (const auto& [cls, algos] : report.steps) {
      for (const auto& [algo, counts] : algos) {
        append_histogram(os, "steps_" + cls + "_" + algo, counts, 1, 16);
      }
    }
    const std::vector<std::pair<std::string, std::string>> pairs = {
        {"ias", "ios"}, {"av", "ios"}, {"av", "ias"}};
    for (const auto& [cls, algos] : report.steps) {
      for (const auto& [a, b] : pairs) {
        if (algos.count(a) && algos.count(b)) {
          append_histogram(os, "diff_" + cls + "_" + a + "_minus_" + b,
                           paired_diff(algos.at(a), algos.at(b)), -15, 15);
        }
      }
    }
    append_histogram(os, "recon_steps_ios", report.ios_recon_steps, 1, 16);
    append_histogram(os, "recon_steps_ias", report.ias_recon_steps, 1, 16);
    append_histogram(os, "recon_diff_ias_minus_ios",
                     paired_diff(report.ias_recon_steps, report.ios_recon_steps), -15, 15);
    write_text_file((fs::path(out_dir) / "histograms.csv").string(), os.str());
  }
}

}  // namespace qsv
