#include <array>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "fuzzysched/aggregate.hpp"
#include "fuzzysched/errors.hpp"
#include "fuzzysched/fit.hpp"
#include "fuzzysched/formats.hpp"
#include "fuzzysched/nlparse.hpp"
#include "fuzzysched/sched.hpp"
#include "fuzzysched/svg.hpp"
#include "fuzzysched/synth.hpp"

using nlohmann::json;
using namespace fuzzysched;

namespace {

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError("bad JSON in " + path + ": " + e.what());
  }
}

// --config wins over the FS_CONFIG environment variable; both optional.
LookupConfig load_lookup(const std::string& config_path) {
  std::string path = config_path;
  if (path.empty()) {
    if (const char* env = std::getenv("FS_CONFIG")) path = env;
  }
  if (path.empty()) return LookupConfig{};
  return lookup_config_from_json(load_json_file(path));
}

std::vector<EnsembleRow> load_ensemble(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path);
  return read_ensemble_csv(in);
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write " + path);
  out << text;
}

void emit(const json& j) { std::cout << j.dump(2) << '\n'; }

json sampled_json(const SampledFunction& fn) {
  return satisfaction_to_json(SatisfactionFunction{fn});
}

int cmd_parse(const std::string& text, const std::string& config_path) {
  const LookupConfig lookup = load_lookup(config_path);
  const TimeSpec spec = extract_time_spec(text);
  emit(json{{"preposition", std::string(to_string(spec.preposition))},
            {"fuzzy", spec.fuzzy},
            {"t_spec_s", spec.t_spec_s},
            {"raw_tokens", spec.raw_tokens},
            {"satisfaction", satisfaction_to_json(lookup_satisfaction(spec, lookup))}});
  return 0;
}

int cmd_schedule(const std::string& task_path, const std::string& solver_name,
                 const std::string& config_path, bool seed_given, std::uint64_t seed,
                 int grid_flags, double grid_start, double grid_end, double rate) {
  if (grid_flags != 0 && grid_flags != 3) {
    throw ValidationError("--grid-start, --grid-end and --rate must be given together");
  }
  TaskDocument doc = task_document_from_json(load_json_file(task_path));
  SolverConfig cfg = doc.solver;
  if (grid_flags == 3) {
    cfg.grid = SamplingGrid::over(grid_start, grid_end, rate);
  } else if (!doc.has_grid) {
    cfg.grid = SamplingGrid::over(0.0, 3600.0, 1.0 / 60.0);  // one-hour default, minute steps
  }
  if (seed_given) cfg.seed = seed;

  const FuzzyTask task = resolve_task(doc, load_lookup(config_path));
  Schedule schedule = solver_name == "exhaustive" ? solve_exhaustive(task, cfg)
                      : solver_name == "hc"       ? solve_hill_climb(task, cfg)
                                                  : solve_sim_anneal(task, cfg);
  emit(schedule_to_json(schedule));
  return schedule.feasible ? 0 : 3;
}

json group_block(const EnsembleSlice& slice) {
  // Split per-participant density variances by group; the group-level spread
  // is reported as the density variance of each group's median curve.
  std::vector<SampledFunction> robot_members, person_members;
  std::vector<double> robot_var, person_var;
  std::vector<std::string> robot_ids, person_ids;
  for (std::size_t i = 0; i < slice.participant_ids.size(); ++i) {
    const auto& member = slice.ensemble.members[i];
    const bool robot = slice.groups[i] == "robot";
    (robot ? robot_members : person_members).push_back(member);
    (robot ? robot_ids : person_ids).push_back(slice.participant_ids[i]);
    try {
      (robot ? robot_var : person_var).push_back(density_variance(member));
    } catch (const ZeroMass&) {
      // an all-zero report carries no timing information; leave it out
    }
  }
  if (robot_members.empty() || person_members.empty()) return nullptr;

  const auto& tag = slice.ensemble.instruction_tag;
  const double robot_v = density_variance(
      pointwise_median(SatisfactionEnsemble(slice.ensemble.grid, robot_members, tag)));
  const double person_v = density_variance(
      pointwise_median(SatisfactionEnsemble(slice.ensemble.grid, person_members, tag)));
  const MannWhitneyResult mw = mann_whitney_u(robot_var, person_var);
  return json{{"robot", json{{"participants", robot_ids}, {"density_variance_median", robot_v}}},
              {"person", json{{"participants", person_ids}, {"density_variance_median", person_v}}},
              // person minus robot: negative values indicate a larger variance
              // in the robot group
              {"variance_difference", person_v - robot_v},
              {"variance_mann_whitney", json{{"u", mw.u}, {"p", mw.p}}}};
}

int cmd_aggregate(const std::string& csv_path, const std::string& tag, const std::string& group,
                  const std::string& svg_path) {
  const EnsembleSlice slice = slice_ensemble(load_ensemble(csv_path), tag, group);
  const std::array<double, 2> levels{0.25, 0.75};
  const EnsembleSummary summary = summarize(slice.ensemble, levels);

  json out{{"instruction_tag", tag},
           {"participants", slice.participant_ids},
           {"mean", sampled_json(summary.mean)},
           {"median", sampled_json(summary.median)},
           {"mode", sampled_json(summary.mode)},
           {"q25", sampled_json(summary.quantiles.at(0.25))},
           {"q75", sampled_json(summary.quantiles.at(0.75))},
           {"min", sampled_json(pointwise_min(slice.ensemble))},
           {"max", sampled_json(pointwise_max(slice.ensemble))},
           {"density_variance_median", density_variance(summary.median)}};
  if (!group.empty()) {
    out["group"] = group;
  } else if (json groups = group_block(slice); !groups.is_null()) {
    out["groups"] = std::move(groups);
  }

  if (!svg_path.empty()) write_text_file(svg_path, render_summary_svg(slice.ensemble));
  emit(out);
  return 0;
}

int cmd_fit(const std::string& csv_path, const std::string& tag, const std::string& target_name,
            const std::string& model_name) {
  const EnsembleSlice slice = slice_ensemble(load_ensemble(csv_path), tag, "");
  const SampledFunction target = target_name == "mean"   ? pointwise_mean(slice.ensemble)
                                 : target_name == "mode" ? pointwise_mode(slice.ensemble)
                                                         : pointwise_median(slice.ensemble);
  const FitResult fit = model_name == "trapezoid" ? fit_trapezoid(target)
                        : model_name == "bell"    ? fit_bell(target)
                                                  : best_fit(target);
  json out = fit_result_to_json(fit);
  out["instruction_tag"] = tag;
  out["target"] = target_name;
  emit(out);
  return 0;
}

int cmd_synth(int participants, std::uint64_t seed, const std::string& out_path,
              const std::string& config_path) {
  SynthConfig cfg;
  cfg.participants = participants;
  cfg.seed = seed;
  cfg.lookup = load_lookup(config_path);
  const std::vector<EnsembleRow> rows = synthesize_study(cfg);

  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw ValidationError("cannot write " + out_path);
  write_ensemble_csv(out, rows);
  emit(json{{"participants", participants}, {"seed", seed}, {"rows", rows.size()},
            {"out", out_path}});
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fuzzy-time instruction parsing, scheduling, and satisfaction analysis"};
  app.require_subcommand(1);
  int rc = 0;

  std::string parse_text, parse_config;
  auto* parse = app.add_subcommand("parse", "extract a time spec from an instruction");
  parse->add_option("text", parse_text, "instruction sentence")->required();
  parse->add_option("--config", parse_config, "shape constants JSON (overrides FS_CONFIG)");
  parse->callback([&] { rc = cmd_parse(parse_text, parse_config); });

  std::string sched_task, sched_solver = "exhaustive", sched_config;
  std::uint64_t sched_seed = 0;
  double grid_start = 0.0, grid_end = 0.0, grid_rate = 0.0;
  auto* schedule = app.add_subcommand("schedule", "solve a task file for start times");
  schedule->add_option("task", sched_task, "task document JSON")->required();
  schedule->add_option("--solver", sched_solver, "exhaustive, hc, or sa")
      ->check(CLI::IsMember({"exhaustive", "hc", "sa"}));
  auto* seed_opt = schedule->add_option("--seed", sched_seed, "solver RNG seed");
  auto* gs = schedule->add_option("--grid-start", grid_start, "grid start (s)");
  auto* ge = schedule->add_option("--grid-end", grid_end, "grid end (s)");
  auto* gr = schedule->add_option("--rate", grid_rate, "grid rate (samples/s)");
  schedule->add_option("--config", sched_config, "shape constants JSON (overrides FS_CONFIG)");
  schedule->callback([&] {
    const int grid_flags =
        static_cast<int>(gs->count() + ge->count() + gr->count());
    rc = cmd_schedule(sched_task, sched_solver, sched_config, seed_opt->count() > 0, sched_seed,
                      grid_flags, grid_start, grid_end, grid_rate);
  });

  std::string agg_csv, agg_tag, agg_group, agg_svg;
  auto* aggregate = app.add_subcommand("aggregate", "summarize an ensemble table");
  aggregate->add_option("ensemble", agg_csv, "ensemble CSV")->required();
  aggregate->add_option("--instruction", agg_tag, "instruction tag")->required();
  aggregate->add_option("--group", agg_group, "restrict to one group")
      ->check(CLI::IsMember({"robot", "person"}));
  aggregate->add_option("--svg", agg_svg, "also render a plot to this file");
  aggregate->callback([&] { rc = cmd_aggregate(agg_csv, agg_tag, agg_group, agg_svg); });

  std::string fit_csv, fit_tag, fit_target = "median", fit_model = "best";
  auto* fit = app.add_subcommand("fit", "fit a parametric model to an aggregate curve");
  fit->add_option("ensemble", fit_csv, "ensemble CSV")->required();
  fit->add_option("--instruction", fit_tag, "instruction tag")->required();
  fit->add_option("--target", fit_target, "aggregate curve to fit")
      ->check(CLI::IsMember({"median", "mean", "mode"}));
  fit->add_option("--model", fit_model, "model family")
      ->check(CLI::IsMember({"trapezoid", "bell", "best"}));
  fit->callback([&] { rc = cmd_fit(fit_csv, fit_tag, fit_target, fit_model); });

  int synth_participants = 32;
  std::uint64_t synth_seed = 0;
  std::string synth_out, synth_config;
  auto* synth = app.add_subcommand("synth", "generate a synthetic study ensemble");
  synth->add_option("--participants", synth_participants, "participant count")
      ->check(CLI::PositiveNumber);
  synth->add_option("--seed", synth_seed, "generator seed");
  synth->add_option("--out", synth_out, "output CSV path")->required();
  synth->add_option("--config", synth_config, "shape constants JSON (overrides FS_CONFIG)");
  synth->callback([&] { rc = cmd_synth(synth_participants, synth_seed, synth_out, synth_config); });

  try {
    app.parse(argc, argv);
    return rc;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const NoTemporalModifier& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const AmbiguousTime& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const NotFound& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const NoFeasibleSchedule& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const SearchSpaceTooLarge& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
