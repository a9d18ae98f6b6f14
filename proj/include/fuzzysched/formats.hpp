#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fuzzysched/aggregate.hpp"
#include "fuzzysched/fit.hpp"
#include "fuzzysched/model.hpp"
#include "fuzzysched/nlparse.hpp"
#include "fuzzysched/sched.hpp"

namespace fuzzysched {

// -- JSON ---------------------------------------------------------------

nlohmann::json grid_to_json(const SamplingGrid& grid);
/// Accepts {start_s, end_s, rate_hz} or {start_s, rate_hz, count}.
SamplingGrid grid_from_json(const nlohmann::json& j);

nlohmann::json satisfaction_to_json(const SatisfactionFunction& fn);
/// Accepts {type: trapezoid|bell|sampled|transformed, ...}.
SatisfactionFunction satisfaction_from_json(const nlohmann::json& j);

nlohmann::json schedule_to_json(const Schedule& schedule);
nlohmann::json fit_result_to_json(const FitResult& fit);

/// Defaults overridden by whichever keys are present; unknown keys rejected.
LookupConfig lookup_config_from_json(const nlohmann::json& j);

/// One skill entry of a task file: an instruction to parse or an explicit
/// satisfaction function, never both.
struct TaskSkillRecord {
  std::string id;
  std::optional<std::string> instruction;
  double duration_s = 0.0;
  std::optional<SatisfactionFunction> satisfaction;
};

struct TaskDocument {
  std::vector<TaskSkillRecord> skills;
  SolverConfig solver;
  bool has_grid = false;  // grid present in the file (flags may still override)
};

/// Task file layout: {skills: [{id, instruction? | satisfaction?, duration_s}],
/// solver?: {grid?, epsilon?, seed?, restarts?, sa_*?, exhaustive_guard?}}.
TaskDocument task_document_from_json(const nlohmann::json& j);

/// Resolves instructions into satisfaction functions and returns the runnable
/// task. Explicit functions pass through untouched.
FuzzyTask resolve_task(const TaskDocument& doc, const LookupConfig& lookup);

// -- Ensemble CSV ---------------------------------------------------------

struct EnsembleRow {
  std::string participant_id;
  std::string instruction_tag;
  std::string group;  // "robot" or "person"
  double time_s = 0.0;
  double satisfaction = 0.0;
};

inline constexpr const char* kEnsembleCsvHeader =
    "participant_id,instruction_tag,group,time_s,satisfaction";

void write_ensemble_csv(std::ostream& out, const std::vector<EnsembleRow>& rows);
std::vector<EnsembleRow> read_ensemble_csv(std::istream& in);

/// Ensemble for one instruction tag with aligned per-member metadata.
struct EnsembleSlice {
  SatisfactionEnsemble ensemble;
  std::vector<std::string> participant_ids;  // one per member, sorted
  std::vector<std::string> groups;           // one per member
};

/// Collects the members for `instruction_tag` (restricted to `group` when
/// non-empty) and validates every series against the grid implied by the
/// first one. Throws NotFound when nothing matches.
EnsembleSlice slice_ensemble(const std::vector<EnsembleRow>& rows,
                             const std::string& instruction_tag, const std::string& group = "");

}  // namespace fuzzysched
