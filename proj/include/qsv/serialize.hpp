#pragma once

#include <string>

#include "json.hpp"
#include "qsv/adaptive.hpp"
#include "qsv/planner.hpp"
#include "qsv/types.hpp"
#include "qsv/verifier.hpp"

namespace qsv {

using Json = nlohmann::json;

// State/operator files: {"dim": d, "re": [[...]], "im": [[...]]}.
Json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const Json& j);

Json state_to_json(const DensityMatrix& rho);
DensityMatrix state_from_json(const Json& j);
DensityMatrix load_state(const std::string& path);
void save_state(const DensityMatrix& rho, const std::string& path);

// Observable sets: explicit matrices with labels, or Pauli-string labels
// ("x+⊗z-") expanded by pauli_projector_set conventions.
Json observable_set_to_json(const ObservableSet& set);
ObservableSet observable_set_from_json(const Json& j);
ObservableSet load_observables(const std::string& spec_or_path);

Json plan_to_json(const SequencePlan& plan);
SequencePlan plan_from_json(const Json& j);
SequencePlan load_plan(const std::string& path);
void save_plan(const SequencePlan& plan, const std::string& path);

Json outcome_to_json(const VerificationOutcome& outcome);
std::string outcome_trace_csv(const VerificationOutcome& outcome);

Json adaptive_trace_to_json(const AdaptiveTrace& trace);
std::string adaptive_trace_csv(const AdaptiveTrace& trace);

/// Fixed-format float used in all CSV output (deterministic across runs).
std::string format_double(double v);

void write_text_file(const std::string& path, const std::string& contents);
std::string read_text_file(const std::string& path);

}  // namespace qsv
