// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Criterion 9 drives the real CLI binary (path via --qsv).
#include <chrono>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <numeric>
#include <string>
#include <vector>

#include "../oracles.hpp"
#include "qsv/adaptive.hpp"
#include "qsv/experiment.hpp"
#include "qsv/planner.hpp"
#include "qsv/sdp.hpp"
#include "qsv/serialize.hpp"
#include "qsv/states.hpp"
#include "qsv/verifier.hpp"

using namespace qsv;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

int g_failures = 0;

void report(int criterion, bool pass, const std::string& detail) {
  std::printf("[%s] criterion %d: %s\n", pass ? "PASS" : "FAIL", criterion, detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list args;
  va_start(args, f);
  std::vsnprintf(buf, sizeof buf, f, args);
  va_end(args);
  return buf;
}

double elapsed(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

bool in_band(double v, double lo, double hi) { return v >= lo && v <= hi; }

// ---- criteria 1-3 and 7 share one experiment run (paper-default config) ----
void criteria_1_2_3_7(const ExperimentConfig& cfg) {
  auto t0 = Clock::now();
  const ExperimentReport rep = run_experiment(cfg);
  const double secs = elapsed(t0);

  // criterion 1: reconstruction step counts
  {
    const AlgoStats ios = compute_stats(rep.ios_recon_steps);
    const AlgoStats ias = compute_stats(rep.ias_recon_steps);
    const double diff = ias.mean - ios.mean;
    const bool pass = in_band(ios.mean, 5.2, 6.2) && in_band(ias.mean, 6.0, 7.0) &&
                      in_band(diff, 0.3, 1.3) && secs < 600.0;
    report(1, pass,
           fmt("reconstruction means ios=%.2f (std %.2f, want 5.2-6.2) ias=%.2f (std %.2f, "
               "want 6.0-7.0) diff=%.2f (want 0.3-1.3), %.0f s",
               ios.mean, ios.stddev, ias.mean, ias.stddev, diff, secs));
  }

  auto stats_of = [&](const std::string& cls) { return rep.stats.at(cls); };

  // criterion 2: accurate-class regression (Table 1)
  {
    const auto& st = stats_of("accurate");
    double ctrl_lo = 1e300, ctrl_hi = -1e300, algo_hi = -1e300;
    bool ctrl_band = true;
    for (const auto& [algo, s] : st) {
      if (algo.rfind("ctrl", 0) == 0) {
        ctrl_lo = std::min(ctrl_lo, s.mean);
        ctrl_hi = std::max(ctrl_hi, s.mean);
        ctrl_band = ctrl_band && in_band(s.mean, 8.0, 9.5);
      } else {
        algo_hi = std::max(algo_hi, s.mean);
      }
    }
    const bool pass = in_band(st.at("ios").mean, 4.2, 5.4) &&
                      in_band(st.at("ias").mean, 5.1, 6.4) &&
                      in_band(st.at("av").mean, 4.3, 5.4) && ctrl_band &&
                      ctrl_lo - algo_hi >= 2.0 && rep.completion_rate() >= 0.99;
    report(2, pass,
           fmt("accurate means ios=%.2f ias=%.2f av=%.2f controls=[%.2f,%.2f] "
               "margin=%.2f (want >=2.0)",
               st.at("ios").mean, st.at("ias").mean, st.at("av").mean, ctrl_lo, ctrl_hi,
               ctrl_lo - algo_hi));
  }

  // criterion 3: non-accurate-class regression (Table 2)
  {
    const auto& st = stats_of("nonaccurate");
    bool ctrl_band = true;
    double ctrl_lo = 1e300, ctrl_hi = -1e300;
    for (const auto& [algo, s] : st) {
      if (algo.rfind("ctrl", 0) == 0) {
        ctrl_lo = std::min(ctrl_lo, s.mean);
        ctrl_hi = std::max(ctrl_hi, s.mean);
        ctrl_band = ctrl_band && in_band(s.mean, 7.7, 9.4);
      }
    }
    const bool pass = in_band(st.at("ios").mean, 4.5, 5.8) &&
                      in_band(st.at("ias").mean, 4.7, 5.9) &&
                      in_band(st.at("av").mean, 4.4, 5.7) && ctrl_band;
    report(3, pass,
           fmt("non-accurate means ios=%.2f ias=%.2f av=%.2f controls=[%.2f,%.2f]",
               st.at("ios").mean, st.at("ias").mean, st.at("av").mean, ctrl_lo, ctrl_hi));
  }

  // paired beta/alpha evaluation over the ensemble (spec invariant tied to
  // the criterion-1 study): the mean of beta_l - alpha_l is never negative
  // beyond solver noise for any matched prefix length
  {
    std::size_t max_l = 0;
    for (const auto& row : rep.alpha_rows) max_l = std::max(max_l, row.size());
    double worst_mean = 1e300;
    for (std::size_t l = 0; l < max_l; ++l) {
      double sum = 0.0;
      int n = 0;
      for (std::size_t t = 0; t < rep.alpha_rows.size(); ++t) {
        if (l < rep.alpha_rows[t].size() && l < rep.beta_rows[t].size()) {
          sum += rep.beta_rows[t][l] - rep.alpha_rows[t][l];
          ++n;
        }
      }
      if (n > 0) worst_mean = std::min(worst_mean, sum / n);
    }
    report(1, worst_mean >= -1e-6,
           fmt("supplement: ensemble mean of beta_l - alpha_l >= -1e-6 for all matched l "
               "(worst %.2e)",
               worst_mean));
  }

  // criterion 7: bracket monotonicity on every logged trace
  {
    int violations = 0;
    std::string prev_key;
    double prev_gamma = -1e300, prev_Gamma = 1e300;
    for (const TrialRow& r : rep.rows) {
      const std::string key =
          std::to_string(r.target) + "|" + r.cls + "|" + r.algorithm;
      if (key != prev_key) {
        prev_key = key;
        prev_gamma = -1e300;
        prev_Gamma = 1e300;
      }
      if (r.gamma < prev_gamma - 1e-6 || r.Gamma > prev_Gamma + 1e-6) ++violations;
      prev_gamma = r.gamma;
      prev_Gamma = r.Gamma;
    }
    report(7, violations == 0,
           fmt("bracket monotonicity over %zu trace rows, %d violations (1e-6 slack)",
               rep.rows.size(), violations));
  }
}

// ---- criterion 4: Proposition 1 bound, Monte-Carlo over 10^3 triples ----
void criterion_4() {
  const ObservableSet p2 = pauli_projector_set(2);
  RngStream rng(4004);
  int violations = 0, bures_checked = 0;
  const int n = 1000;
  for (int trial = 0; trial < n; ++trial) {
    const DensityMatrix rho0 = random_pure_target(400000 + trial, 4);
    ProjectionState st = ProjectionState::empty(4);
    CompatibleSetSpec spec(4);
    const int n_ops = 1 + static_cast<int>(rng.below(12));
    for (int k = 0; k < n_ops; ++k) {
      const int idx = static_cast<int>(rng.below(36));
      if (orthogonal_residual(st, p2[idx]).norm <= kDependenceTol) continue;
      st = project_update(st, rho0, p2[idx]);
      spec.add_from_state(p2[idx], rho0);
    }
    const SdpSolution s = extremize_linear(
        HermitianOperator(testing::random_hermitian(rng, 4)), spec, Sense::Max);
    if (s.status != SdpStatus::Optimal) {
      ++violations;
      continue;
    }
    const double hs = hs_distance_raw(rho0.entries(), s.optimizer->entries());
    const double bound = hs_bound(rho0, st);
    if (hs > bound + 1e-7) ++violations;
    // pure-state specialization is the same bound evaluated in closed form
    const double pure_bound = 2.0 * std::sqrt(std::max(0.0, 1.0 - st.projected_norm_sq));
    if (std::abs(bound - pure_bound) > 1e-9) ++violations;
    if (st.projected_norm_sq >= 0.5) {
      ++bures_checked;
      if (bures_pure(*s.optimizer, rho0) > bures_bound_pure(st.projected_norm_sq) + 1e-7) {
        ++violations;
      }
    }
  }
  report(4, violations == 0,
         fmt("HS/pure/Bures projection bounds on %d sampled triples (%d with norm^2 >= "
             "1/2), %d violations",
             n, bures_checked, violations));
}

// ---- criterion 5: Proposition 2 vs direct Gram-Schmidt, 10^3 chains ----
void criterion_5() {
  RngStream rng(5005);
  int violations = 0;
  const int n = 1000;
  for (int trial = 0; trial < n; ++trial) {
    const DensityMatrix rho0 = random_pure_target(500000 + trial, 4);
    ProjectionState st = ProjectionState::empty(4);
    std::vector<Matrix> chain;
    const int len = 2 + static_cast<int>(rng.below(13));
    for (int k = 0; k < len; ++k) {
      const Matrix a = testing::random_hermitian(rng, 4);
      chain.push_back(a);
      st = project_update(st, rho0, HermitianOperator(a));
    }
    const auto oracle = testing::project_via_qr(rho0.entries(), chain);
    if (hs_distance_raw(st.projected.entries(), oracle.projected) >= 1e-9) ++violations;
    if (std::abs(st.projected_norm_sq - oracle.norm_sq) >= 1e-9) ++violations;
    if (std::abs(st.projected_norm_sq -
                 hs_inner_raw(st.projected.entries(), st.projected.entries())) >= 1e-9) {
      ++violations;
    }
  }
  report(5, violations == 0,
         fmt("iterative projection vs Gram-Schmidt oracle on %d chains, %d violations", n,
             violations));
}

// ---- criterion 6: verdict soundness on 200 margin-filtered pairs ----
void criterion_6() {
  const ObservableSet p2 = pauli_projector_set(2);
  const double eps = bures_from_fidelity(0.95);
  RngStream rng(6006);
  int kept = 0, mismatches = 0, attempts = 0;
  while (kept < 200 && attempts < 4000) {
    ++attempts;
    const DensityMatrix rho0 = random_pure_target(600000 + attempts, 4);
    const double lambda = attempts % 2 == 0 ? 0.0001 : 0.1;
    PerturbationSpec pert{lambda, 0.1, std::nullopt};
    const DensityMatrix rho_exp = perturb_state(rho0, pert, 60000 + attempts);
    const double truth = bures_pure(rho_exp, rho0);
    if (std::abs(truth - eps) <= 0.02) continue;
    ++kept;
    const bool accurate = truth <= eps;

    MeasurementOracle o1 = MeasurementOracle::perfect(rho_exp);
    const VerificationOutcome vm =
        run_vm(plan_random(p2, 600 + kept), p2, o1, rho0, eps);
    if (vm.verdict != (accurate ? Verdict::Accurate : Verdict::NotAccurate)) ++mismatches;

    MeasurementOracle o2 = MeasurementOracle::perfect(rho_exp);
    const AdaptiveTrace av = run_av(p2, o2, rho0, eps, 600 + kept);
    if (av.verdict != (accurate ? Verdict::Accurate : Verdict::NotAccurate)) ++mismatches;
  }
  report(6, kept == 200 && mismatches == 0,
         fmt("run_vm and run_av verdicts vs ground truth on %d pairs (|d_B - eps| > 0.02), "
             "%d mismatches",
             kept, mismatches));
}

// ---- criterion 8: Bloch-ball brute force vs the SDP on 100 instances ----
void criterion_8() {
  const ObservableSet p1 = pauli_projector_set(1);
  RngStream rng(8008);
  int violations = 0;
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const Matrix c_obj = testing::random_hermitian(rng, 2, 0.5);
    const DensityMatrix source = testing::random_mixed_state(rng, 2);
    const int axis_pick = static_cast<int>(rng.below(3));
    const HermitianOperator& proj = p1[2 * axis_pick + (rng.bernoulli(0.5) ? 1 : 0)];
    const double value = hs_inner_raw(proj.entries(), source.entries());
    CompatibleSetSpec spec(2);
    spec.add(proj, value);

    // the projector is (I + axis.sigma)/2 with axis = +/- a Pauli direction
    Matrix sx(2, 2), sy(2, 2), sz(2, 2);
    sx << 0, 1, 1, 0;
    sy << Complex(0, 0), Complex(0, -1), Complex(0, 1), Complex(0, 0);
    sz << 1, 0, 0, -1;
    const Matrix sigma = 2.0 * proj.entries() - Matrix::Identity(2, 2);
    const Eigen::Vector3d axis(0.5 * hs_inner_raw(sigma, sx), 0.5 * hs_inner_raw(sigma, sy),
                               0.5 * hs_inner_raw(sigma, sz));

    const auto grid = testing::bloch_grid_extrema(c_obj, axis, value, 1e-3);
    const SdpSolution lo = extremize_linear(HermitianOperator(c_obj), spec, Sense::Min);
    const SdpSolution hi = extremize_linear(HermitianOperator(c_obj), spec, Sense::Max);
    if (lo.status != SdpStatus::Optimal || hi.status != SdpStatus::Optimal) {
      ++violations;
      continue;
    }
    const double dev =
        std::max(std::abs(lo.value - grid.min_value), std::abs(hi.value - grid.max_value));
    worst = std::max(worst, dev);
    if (dev >= 2e-3) ++violations;
  }
  report(8, violations == 0,
         fmt("SDP vs Bloch-ball grid (1e-3 resolution) on 100 instances, worst deviation "
             "%.2e (want < 2e-3), %d violations",
             worst, violations));
}

// ---- criterion 9: byte-identical raw.csv from two CLI runs ----
void criterion_9(const std::string& qsv_path) {
  const fs::path base = fs::temp_directory_path() / "qsv_acceptance_det";
  fs::remove_all(base);
  fs::create_directories(base);
  const std::string cfg = " --seed 20250808 --n-targets 6";
  const std::string cmd1 = qsv_path + " experiment" + cfg + " --out-dir " +
                           (base / "run1").string() + " > /dev/null 2>&1";
  const std::string cmd2 = qsv_path + " experiment" + cfg + " --out-dir " +
                           (base / "run2").string() + " > /dev/null 2>&1";
  const int rc1 = std::system(cmd1.c_str());
  const int rc2 = std::system(cmd2.c_str());
  bool pass = rc1 == 0 && rc2 == 0;
  std::string detail;
  if (!pass) {
    detail = fmt("qsv experiment exited with %d / %d", rc1, rc2);
  } else {
    for (const char* name : {"raw.csv", "summary.json", "histograms.csv"}) {
      const std::string a = read_text_file((base / "run1" / name).string());
      const std::string b = read_text_file((base / "run2" / name).string());
      if (a != b) {
        pass = false;
        detail = fmt("%s differs between runs", name);
        break;
      }
    }
    if (pass) detail = "two qsv experiment runs produced byte-identical raw.csv/summary.json/histograms.csv";
  }
  report(9, pass, detail);
  fs::remove_all(base);
}

}  // namespace

int main(int argc, char** argv) {
  std::string qsv_path = "qsv";
  ExperimentConfig cfg;  // paper defaults
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--qsv" && i + 1 < argc) {
      qsv_path = argv[++i];
    } else if (arg == "--fast") {
      cfg.n_targets = 10;  // development mode only; the gate runs the full 100
    }
  }

  const auto t0 = Clock::now();
  criteria_1_2_3_7(cfg);
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_8();
  criterion_9(qsv_path);
  std::printf("acceptance: %d failure(s), %.0f s total\n", g_failures, elapsed(t0));
  return g_failures == 0 ? 0 : 1;
}
