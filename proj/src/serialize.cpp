#include "qsv/serialize.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "qsv/states.hpp"

namespace qsv {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

void write_text_file(const std::string& path, const std::string& contents) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open for writing: " + path);
  os << contents;
  if (!os) throw Error("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open: " + path);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

Json matrix_to_json(const Matrix& m) {
  Json re = Json::array(), im = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json re_row = Json::array(), im_row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      re_row.push_back(m(i, j).real());
      im_row.push_back(m(i, j).imag());
    }
    re.push_back(std::move(re_row));
    im.push_back(std::move(im_row));
  }
  return Json{{"dim", m.rows()}, {"re", std::move(re)}, {"im", std::move(im)}};
}

Matrix matrix_from_json(const Json& j) {
  const int d = j.at("dim").get<int>();
  if (d < 1) throw Error("matrix json: dim must be positive");
  const Json& re = j.at("re");
  const Json& im = j.at("im");
  if (static_cast<int>(re.size()) != d || static_cast<int>(im.size()) != d) {
    throw Error("matrix json: row count does not match dim");
  }
  Matrix m(d, d);
  for (int i = 0; i < d; ++i) {
    if (static_cast<int>(re[i].size()) != d || static_cast<int>(im[i].size()) != d) {
      throw Error("matrix json: column count does not match dim");
    }
    for (int k = 0; k < d; ++k) {
      m(i, k) = Complex(re[i][k].get<double>(), im[i][k].get<double>());
    }
  }
  return m;
}

Json state_to_json(const DensityMatrix& rho) { return matrix_to_json(rho.entries()); }

DensityMatrix state_from_json(const Json& j) { return DensityMatrix(matrix_from_json(j)); }

DensityMatrix load_state(const std::string& path) {
  return state_from_json(Json::parse(read_text_file(path)));
}

void save_state(const DensityMatrix& rho, const std::string& path) {
  write_text_file(path, state_to_json(rho).dump(2) + "\n");
}

Json observable_set_to_json(const ObservableSet& set) {
  Json obs = Json::array();
  for (const auto& a : set.observables()) obs.push_back(matrix_to_json(a.entries()));
  return Json{{"labels", set.labels()}, {"observables", std::move(obs)}};
}

namespace {

// Expand a Pauli-projector label like "x+" or "x+⊗z-" by the
// pauli_projector_set conventions: one projector per ⊗-separated factor.
HermitianOperator projector_from_label(const std::string& label) {
  static const std::string sep = "⊗";
  const ObservableSet single = pauli_projector_set(1);
  std::vector<int> factors;
  std::size_t pos = 0;
  while (pos <= label.size()) {
    const std::size_t next = label.find(sep, pos);
    const std::string part = label.substr(pos, next == std::string::npos ? next : next - pos);
    int found = -1;
    for (int i = 0; i < single.size(); ++i) {
      if (single.label(i) == part) found = i;
    }
    if (found < 0) throw Error("unknown Pauli-projector label: '" + part + "'");
    factors.push_back(found);
    if (next == std::string::npos) break;
    pos = next + sep.size();
  }
  Matrix out = single[factors.front()].entries();
  for (std::size_t k = 1; k < factors.size(); ++k) {
    const Matrix& f = single[factors[k]].entries();
    Matrix next(out.rows() * 2, out.cols() * 2);
    for (Eigen::Index i = 0; i < out.rows(); ++i) {
      for (Eigen::Index jj = 0; jj < out.cols(); ++jj) {
        next.block(i * 2, jj * 2, 2, 2) = out(i, jj) * f;
      }
    }
    out = std::move(next);
  }
  return HermitianOperator(std::move(out));
}

}  // namespace

ObservableSet observable_set_from_json(const Json& j) {
  if (j.contains("pauli_qubits")) {
    return pauli_projector_set(j.at("pauli_qubits").get<int>());
  }
  if (j.contains("pauli_labels")) {
    std::vector<std::string> labels = j.at("pauli_labels").get<std::vector<std::string>>();
    std::vector<HermitianOperator> obs;
    obs.reserve(labels.size());
    for (const std::string& l : labels) obs.push_back(projector_from_label(l));
    return ObservableSet(std::move(obs), std::move(labels));
  }
  std::vector<HermitianOperator> obs;
  std::vector<std::string> labels;
  for (const Json& m : j.at("observables")) obs.emplace_back(matrix_from_json(m));
  if (j.contains("labels")) {
    labels = j.at("labels").get<std::vector<std::string>>();
  } else {
    for (std::size_t i = 0; i < obs.size(); ++i) labels.push_back("A" + std::to_string(i));
  }
  return ObservableSet(std::move(obs), std::move(labels));
}

ObservableSet load_observables(const std::string& spec_or_path) {
  if (spec_or_path == "pauli2q") return pauli_projector_set(2);
  if (spec_or_path == "pauli1q") return pauli_projector_set(1);
  return observable_set_from_json(Json::parse(read_text_file(spec_or_path)));
}

Json plan_to_json(const SequencePlan& plan) {
  Json j{{"method", to_string(plan.method)},
         {"indices", plan.indices},
         {"scores", plan.scores},
         {"stop_reason", plan.stop_reason},
         {"target_digest", plan.target_digest},
         {"seed", plan.seed}};
  if (plan.epsilon > 0.0) j["epsilon"] = plan.epsilon;
  if (!plan.norm_sq.empty()) j["norm_sq"] = plan.norm_sq;
  return j;
}

SequencePlan plan_from_json(const Json& j) {
  SequencePlan plan;
  plan.method = plan_method_from_string(j.at("method").get<std::string>());
  plan.indices = j.at("indices").get<std::vector<int>>();
  if (j.contains("scores")) plan.scores = j.at("scores").get<std::vector<double>>();
  if (j.contains("norm_sq")) plan.norm_sq = j.at("norm_sq").get<std::vector<double>>();
  if (j.contains("stop_reason")) plan.stop_reason = j.at("stop_reason").get<std::string>();
  if (j.contains("target_digest")) {
    plan.target_digest = j.at("target_digest").get<std::string>();
  }
  if (j.contains("seed")) plan.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("epsilon")) plan.epsilon = j.at("epsilon").get<double>();
  return plan;
}

SequencePlan load_plan(const std::string& path) {
  return plan_from_json(Json::parse(read_text_file(path)));
}

void save_plan(const SequencePlan& plan, const std::string& path) {
  write_text_file(path, plan_to_json(plan).dump(2) + "\n");
}

Json outcome_to_json(const VerificationOutcome& outcome) {
  Json steps = Json::array();
  for (const StepRecord& s : outcome.trace) {
    steps.push_back({{"index", s.index}, {"y", s.y}, {"gamma", s.gamma}, {"Gamma", s.Gamma}});
  }
  Json j{{"verdict", to_string(outcome.verdict)},
         {"steps_used", outcome.steps_used},
         {"trace", std::move(steps)}};
  if (outcome.reconstructed) j["reconstructed"] = state_to_json(*outcome.reconstructed);
  return j;
}

std::string outcome_trace_csv(const VerificationOutcome& outcome) {
  std::ostringstream os;
  os << "step,observable,y,gamma,Gamma\n";
  for (std::size_t k = 0; k < outcome.trace.size(); ++k) {
    const StepRecord& s = outcome.trace[k];
    os << k + 1 << "," << s.index << "," << format_double(s.y) << ","
       << format_double(s.gamma) << "," << format_double(s.Gamma) << "\n";
  }
  return os.str();
}

Json adaptive_trace_to_json(const AdaptiveTrace& trace) {
  Json steps = Json::array();
  for (const AdaptiveStep& s : trace.steps) {
    Json cands = Json::array();
    for (const CandidateScore& c : s.candidates) {
      cands.push_back({{"index", c.index}, {"delta", c.delta}, {"Delta", c.Delta}});
    }
    steps.push_back({{"index", s.index},
                     {"y", s.y},
                     {"omega", s.omega},
                     {"Omega", s.Omega},
                     {"estimate_digest", s.estimate_digest},
                     {"all_delta_zero", s.all_delta_zero},
                     {"candidates", std::move(cands)}});
  }
  return Json{{"verdict", to_string(trace.verdict)},
              {"steps_used", trace.steps_used},
              {"steps", std::move(steps)}};
}

std::string adaptive_trace_csv(const AdaptiveTrace& trace) {
  std::ostringstream os;
  os << "step,observable,y,omega,Omega\n";
  for (std::size_t k = 0; k < trace.steps.size(); ++k) {
    const AdaptiveStep& s = trace.steps[k];
    os << k + 1 << "," << s.index << "," << format_double(s.y) << ","
       << format_double(s.omega) << "," << format_double(s.Omega) << "\n";
  }
  return os.str();
}

}  // namespace qsv
