#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qsv/planner.hpp"
#include "qsv/verifier.hpp"

namespace qsv {

/// Configuration of the two-qubit verification study. Defaults reproduce the
/// published experiment at desk scale.
struct ExperimentConfig {
  std::uint64_t seed = 1;
  int n_targets = 100;
  double epsilon_fidelity = 0.95;     // epsilon = sqrt(2 (1 - sqrt(ef)))
  double lambda_accurate = 0.0001;
  double lambda_nonaccurate = 0.1;
  double eta = 0.1;
  int n_control_sequences = 5;
  std::optional<std::uint64_t> shots; // absent = perfect measurements
  std::vector<std::string> algorithms = {"ios", "ias", "av", "random"};
  int os_cap = 3;

  double epsilon() const;
  void validate() const;  // throws Error on bad ranges
  bool has_algorithm(const std::string& name) const;
};

/// One verification step of one trial; raw.csv rows.
struct TrialRow {
  int target = 0;
  std::string cls;        // "accurate" | "nonaccurate"
  std::string algorithm;  // "ios" | "ias" | "av" | "os" | "ctrl1".."ctrlN"
  int step = 0;
  int observable = -1;
  double y = 0.0;
  double gamma = 0.0;
  double Gamma = 0.0;
  std::string verdict;    // final step only, else empty
};

struct AlgoStats {
  double mean = 0.0;
  double stddev = 0.0;
  int count = 0;
};

struct Exclusion {
  int target = 0;
  std::string stage;
  std::string reason;
};

struct ExperimentReport {
  ExperimentConfig config;
  double epsilon = 0.0;
  std::vector<TrialRow> rows;
  // steps[class][algorithm] -> per-target verification step counts
  std::map<std::string, std::map<std::string, std::vector<int>>> steps;
  std::map<std::string, std::map<std::string, AlgoStats>> stats;
  // Planning study (no measurements): reconstruction step counts and the
  // beta/alpha prefix-distance trajectories per target.
  std::vector<int> ios_recon_steps;
  std::vector<int> ias_recon_steps;
  std::vector<std::vector<double>> alpha_rows;  // IOS-prefix max distances
  std::vector<std::vector<double>> beta_rows;   // IAS-prefix max distances
  std::vector<Exclusion> exclusions;
  int completed_targets = 0;

  double completion_rate() const;
};

/// Worst-case Bures distance over the compatible set of every plan prefix:
/// beta_l for l = 1..length. The canonical argument is an IAS plan (the
/// cross-evaluation of how well IAS approximates IOS), but any plan of
/// distinct indices for the same target works.
std::vector<double> cross_evaluate_beta(const DensityMatrix& rho0,
                                        const SequencePlan& plan,
                                        const ObservableSet& set);

/// Run the full study: targets, accurate/non-accurate preparations, planning,
/// verification, adaptive runs, and the aggregate statistics. Deterministic
/// under config.seed. Per-trial module errors exclude the trial with a
/// recorded reason; they never abort the run.
ExperimentReport run_experiment(const ExperimentConfig& config);

/// Write raw.csv, summary.json and histograms.csv under out_dir.
void write_report(const ExperimentReport& report, const std::string& out_dir);

AlgoStats compute_stats(const std::vector<int>& counts);

}  // namespace qsv
