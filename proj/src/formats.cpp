#include "fuzzysched/formats.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "fuzzysched/errors.hpp"

namespace fuzzysched {

using nlohmann::json;

namespace {

void check_keys(const json& j, std::initializer_list<const char*> allowed,
                const char* where) {
  if (!j.is_object()) throw ValidationError(std::string(where) + " must be a JSON object");
  for (const auto& item : j.items()) {
    if (std::find_if(allowed.begin(), allowed.end(), [&](const char* k) {
          return item.key() == k;
        }) == allowed.end()) {
      throw ValidationError("unknown key \"" + item.key() + "\" in " + where);
    }
  }
}

double number_at(const json& j, const char* key, const char* where) {
  if (!j.contains(key)) {
    throw ValidationError(std::string(where) + " is missing \"" + key + "\"");
  }
  if (!j.at(key).is_number()) {
    throw ValidationError(std::string("\"") + key + "\" in " + where + " must be a number");
  }
  return j.at(key).get<double>();
}

std::string string_at(const json& j, const char* key, const char* where) {
  if (!j.contains(key) || !j.at(key).is_string()) {
    throw ValidationError(std::string(where) + " needs a string \"" + key + "\"");
  }
  return j.at(key).get<std::string>();
}

}  // namespace

json grid_to_json(const SamplingGrid& grid) {
  return json{{"start_s", grid.start_s},
              {"end_s", grid.end_s},
              {"rate_hz", grid.rate_hz},
              {"count", grid.step_count}};
}

SamplingGrid grid_from_json(const json& j) {
  check_keys(j, {"start_s", "end_s", "rate_hz", "count"}, "grid");
  const double start = number_at(j, "start_s", "grid");
  const double rate = number_at(j, "rate_hz", "grid");
  if (j.contains("end_s")) {
    const auto grid = SamplingGrid::over(start, number_at(j, "end_s", "grid"), rate);
    if (j.contains("count") && j.at("count").get<std::size_t>() != grid.step_count) {
      throw ValidationError("grid count does not match the interval and rate");
    }
    return grid;
  }
  if (!j.contains("count")) {
    throw ValidationError("grid needs either end_s or count");
  }
  return SamplingGrid::with_count(start, rate, j.at("count").get<std::size_t>());
}

json satisfaction_to_json(const SatisfactionFunction& fn) {
  if (const auto* t = fn.get_if<Trapezoid>()) {
    return json{{"type", "trapezoid"}, {"a", t->a}, {"b", t->b}, {"c", t->c}, {"d", t->d}};
  }
  if (const auto* b = fn.get_if<Bell>()) {
    return json{{"type", "bell"}, {"mu", b->mu}, {"sigma", b->sigma}};
  }
  if (const auto* s = fn.get_if<SampledFunction>()) {
    return json{{"type", "sampled"}, {"grid", grid_to_json(s->grid)}, {"values", s->values}};
  }
  const auto* w = fn.get_if<TransformedFunction>();
  return json{{"type", "transformed"},
              {"time_scale", w->time_scale},
              {"time_shift_s", w->time_shift_s},
              {"pivot_s", w->pivot_s},
              {"inner", satisfaction_to_json(*w->inner)}};
}

SatisfactionFunction satisfaction_from_json(const json& j) {
  const std::string type = string_at(j, "type", "satisfaction");
  if (type == "trapezoid") {
    check_keys(j, {"type", "a", "b", "c", "d"}, "trapezoid");
    return SatisfactionFunction{Trapezoid(number_at(j, "a", "trapezoid"),
                                          number_at(j, "b", "trapezoid"),
                                          number_at(j, "c", "trapezoid"),
                                          number_at(j, "d", "trapezoid"))};
  }
  if (type == "bell") {
    check_keys(j, {"type", "mu", "sigma"}, "bell");
    return SatisfactionFunction{Bell(number_at(j, "mu", "bell"), number_at(j, "sigma", "bell"))};
  }
  if (type == "sampled") {
    check_keys(j, {"type", "grid", "values"}, "sampled function");
    if (!j.contains("grid") || !j.contains("values") || !j.at("values").is_array()) {
      throw ValidationError("sampled function needs a grid and a values array");
    }
    return SatisfactionFunction{SampledFunction(grid_from_json(j.at("grid")),
                                                j.at("values").get<std::vector<double>>())};
  }
  if (type == "transformed") {
    check_keys(j, {"type", "time_scale", "time_shift_s", "pivot_s", "inner"}, "transformed");
    if (!j.contains("inner")) throw ValidationError("transformed function needs an inner shape");
    return transform(satisfaction_from_json(j.at("inner")),
                     number_at(j, "time_scale", "transformed"),
                     number_at(j, "time_shift_s", "transformed"),
                     number_at(j, "pivot_s", "transformed"));
  }
  throw ValidationError("unknown satisfaction type \"" + type + "\"");
}

json schedule_to_json(const Schedule& schedule) {
  json starts = json::array();
  for (const auto& s : schedule.starts) {
    starts.push_back(json{{"id", s.id}, {"start_s", s.start_s}});
  }
  return json{{"starts", std::move(starts)},   {"objective", schedule.objective},
              {"feasible", schedule.feasible}, {"below_threshold", schedule.below_threshold},
              {"solver", schedule.solver},     {"seed", schedule.seed}};
}

json fit_result_to_json(const FitResult& fit) {
  return json{{"model", satisfaction_to_json(fit.model)},
              {"error", fit.error},
              {"iterations", fit.iterations},
              {"converged", fit.converged}};
}

LookupConfig lookup_config_from_json(const json& j) {
  check_keys(j,
             {"plateau_frac", "shoulder_frac", "min_plateau_s", "min_shoulder_s", "fuzzy_widen",
              "after_left_slope_window_s", "after_plateau_frac", "horizon_s"},
             "lookup config");
  LookupConfig cfg;
  auto maybe = [&](const char* key, double& field) {
    if (j.contains(key)) field = number_at(j, key, "lookup config");
  };
  maybe("plateau_frac", cfg.plateau_frac);
  maybe("shoulder_frac", cfg.shoulder_frac);
  maybe("min_plateau_s", cfg.min_plateau_s);
  maybe("min_shoulder_s", cfg.min_shoulder_s);
  maybe("fuzzy_widen", cfg.fuzzy_widen);
  maybe("after_left_slope_window_s", cfg.after_left_slope_window_s);
  maybe("after_plateau_frac", cfg.after_plateau_frac);
  maybe("horizon_s", cfg.horizon_s);
  return cfg;
}

TaskDocument task_document_from_json(const json& j) {
  check_keys(j, {"skills", "solver"}, "task document");
  if (!j.contains("skills") || !j.at("skills").is_array() || j.at("skills").empty()) {
    throw ValidationError("task document needs a non-empty skills array");
  }
  TaskDocument doc;
  for (const auto& entry : j.at("skills")) {
    check_keys(entry, {"id", "instruction", "duration_s", "satisfaction"}, "skill");
    TaskSkillRecord rec;
    rec.id = string_at(entry, "id", "skill");
    if (rec.id.empty()) throw ValidationError("skill id must not be empty");
    rec.duration_s = number_at(entry, "duration_s", "skill");
    const bool has_instruction = entry.contains("instruction");
    const bool has_function = entry.contains("satisfaction");
    if (has_instruction == has_function) {
      throw ValidationError("skill \"" + rec.id +
                            "\" needs exactly one of instruction or satisfaction");
    }
    if (has_instruction) rec.instruction = string_at(entry, "instruction", "skill");
    if (has_function) rec.satisfaction = satisfaction_from_json(entry.at("satisfaction"));
    doc.skills.push_back(std::move(rec));
  }
  if (j.contains("solver")) {
    const auto& s = j.at("solver");
    check_keys(s,
               {"grid", "epsilon", "seed", "restarts", "sa_initial_temp", "sa_cooling",
                "sa_iters_per_temp", "sa_min_temp", "sa_step_window", "exhaustive_guard"},
               "solver config");
    if (s.contains("grid")) {
      doc.solver.grid = grid_from_json(s.at("grid"));
      doc.has_grid = true;
    }
    if (s.contains("epsilon")) doc.solver.epsilon = number_at(s, "epsilon", "solver config");
    if (s.contains("seed")) doc.solver.seed = s.at("seed").get<std::uint64_t>();
    if (s.contains("restarts")) doc.solver.restarts = s.at("restarts").get<int>();
    if (s.contains("sa_initial_temp")) {
      doc.solver.sa_initial_temp = number_at(s, "sa_initial_temp", "solver config");
    }
    if (s.contains("sa_cooling")) doc.solver.sa_cooling = number_at(s, "sa_cooling", "solver config");
    if (s.contains("sa_iters_per_temp")) {
      doc.solver.sa_iters_per_temp = s.at("sa_iters_per_temp").get<int>();
    }
    if (s.contains("sa_min_temp")) doc.solver.sa_min_temp = number_at(s, "sa_min_temp", "solver config");
    if (s.contains("sa_step_window")) doc.solver.sa_step_window = s.at("sa_step_window").get<int>();
    if (s.contains("exhaustive_guard")) {
      doc.solver.exhaustive_guard = number_at(s, "exhaustive_guard", "solver config");
    }
  }
  return doc;
}

FuzzyTask resolve_task(const TaskDocument& doc, const LookupConfig& lookup) {
  std::vector<FuzzySkill> skills;
  skills.reserve(doc.skills.size());
  for (const auto& rec : doc.skills) {
    SatisfactionFunction fn =
        rec.satisfaction ? *rec.satisfaction
                         : lookup_satisfaction(extract_time_spec(*rec.instruction), lookup);
    skills.push_back(FuzzySkill{rec.id, std::move(fn), rec.duration_s, {}, {}});
  }
  return FuzzyTask{std::move(skills)};
}

void write_ensemble_csv(std::ostream& out, const std::vector<EnsembleRow>& rows) {
  out << kEnsembleCsvHeader << '\n';
  out << std::setprecision(17);
  for (const auto& r : rows) {
    out << r.participant_id << ',' << r.instruction_tag << ',' << r.group << ',' << r.time_s
        << ',' << r.satisfaction << '\n';
  }
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

double parse_double(const std::string& text, const char* what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw ValidationError("");
    return v;
  } catch (const std::exception&) {
    throw ValidationError(std::string("cannot parse ") + what + " value \"" + text + "\"");
  }
}

}  // namespace

std::vector<EnsembleRow> read_ensemble_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("ensemble file is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kEnsembleCsvHeader) {
    throw ValidationError("ensemble file must start with the header \"" +
                          std::string(kEnsembleCsvHeader) + "\"");
  }
  std::vector<EnsembleRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != 5) {
      throw ValidationError("line " + std::to_string(line_no) + ": expected 5 fields, got " +
                            std::to_string(fields.size()));
    }
    EnsembleRow row;
    row.participant_id = fields[0];
    row.instruction_tag = fields[1];
    row.group = fields[2];
    row.time_s = parse_double(fields[3], "time_s");
    row.satisfaction = parse_double(fields[4], "satisfaction");
    if (row.participant_id.empty() || row.instruction_tag.empty()) {
      throw ValidationError("line " + std::to_string(line_no) + ": empty id or tag");
    }
    if (row.group != "robot" && row.group != "person") {
      throw ValidationError("line " + std::to_string(line_no) + ": group must be robot or person");
    }
    if (!(row.satisfaction >= 0.0 && row.satisfaction <= 1.0)) {
      throw ValidationError("line " + std::to_string(line_no) +
                            ": satisfaction must lie in [0, 1]");
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

EnsembleSlice slice_ensemble(const std::vector<EnsembleRow>& rows,
                             const std::string& instruction_tag, const std::string& group) {
  struct Series {
    std::string group;
    std::vector<double> times;
    std::vector<double> values;
  };
  std::map<std::string, Series> by_participant;
  for (const auto& row : rows) {
    if (row.instruction_tag != instruction_tag) continue;
    if (!group.empty() && row.group != group) continue;
    auto [it, inserted] = by_participant.try_emplace(row.participant_id);
    if (inserted) {
      it->second.group = row.group;
    } else if (it->second.group != row.group) {
      throw ValidationError("participant " + row.participant_id + " appears in two groups");
    }
    it->second.times.push_back(row.time_s);
    it->second.values.push_back(row.satisfaction);
  }
  if (by_participant.empty()) {
    throw NotFound("no rows for instruction tag \"" + instruction_tag + "\"" +
                   (group.empty() ? "" : " and group \"" + group + "\""));
  }

  const auto& first = by_participant.begin()->second;
  const std::size_t n = first.times.size();
  SamplingGrid grid = [&] {
    if (n < 2) return SamplingGrid::with_count(first.times.front(), 1.0, 1);
    const double step = first.times[1] - first.times[0];
    if (!(step > 0.0)) throw ValidationError("sample times must be strictly increasing");
    return SamplingGrid::with_count(first.times.front(), 1.0 / step, n);
  }();

  std::vector<SampledFunction> members;
  std::vector<std::string> ids;
  std::vector<std::string> groups;
  for (const auto& [id, series] : by_participant) {
    if (series.times.size() != n) {
      throw ValidationError("participant " + id + " has " +
                            std::to_string(series.times.size()) + " samples, expected " +
                            std::to_string(n));
    }
    for (std::size_t j = 0; j < n; ++j) {
      const double expected = grid.time_at(j);
      if (std::abs(series.times[j] - expected) > 1e-9 * std::max(1.0, std::abs(expected))) {
        throw ValidationError("participant " + id + " sample times do not sit on the grid");
      }
    }
    members.push_back(SampledFunction(grid, series.values));
    ids.push_back(id);
    groups.push_back(series.group);
  }
  return EnsembleSlice{SatisfactionEnsemble(grid, std::move(members), instruction_tag),
                       std::move(ids), std::move(groups)};
}

}  // namespace fuzzysched
