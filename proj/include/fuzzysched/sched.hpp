#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fuzzysched/model.hpp"

namespace fuzzysched {

struct ScheduledStart {
  std::string id;
  double start_s = 0.0;

  bool operator==(const ScheduledStart&) const = default;
};

/// Solver output. `starts` lists one entry per skill in canonical (id-sorted)
/// order. `below_threshold` names the skills whose raw satisfaction at the
/// chosen start fell under the epsilon floor.
struct Schedule {
  std::vector<ScheduledStart> starts;
  double objective = 0.0;
  bool feasible = false;
  std::vector<std::string> below_threshold;
  std::string solver;
  std::uint64_t seed = 0;
};

struct SolverConfig {
  SamplingGrid grid;
  double epsilon = 1e-6;       // floor for individual satisfaction factors
  std::uint64_t seed = 0;
  int restarts = 20;           // hill climbing: greedy init + (restarts-1) random inits
  double sa_initial_temp = 1.0;
  double sa_cooling = 0.95;    // geometric temperature decay
  int sa_iters_per_temp = 50;
  double sa_min_temp = 1e-4;
  int sa_step_window = 5;      // annealing proposals move up to this many grid steps
  double exhaustive_guard = 1e7;  // max candidate count for exhaustive search
};

/// True iff the intervals [start, start + duration) can run without overlap:
/// sorted by start, each end must not exceed the next start (touching is fine).
bool check_no_overlap(std::span<const double> starts, std::span<const double> durations);

/// Satisfaction product for a start vector given in the task's canonical
/// order: product of max(psi_i(t_i), epsilon) when the starts are
/// overlap-free, 0 otherwise. Skills whose raw value fell below epsilon are
/// appended to `below_threshold` when given.
double objective(const FuzzyTask& task, std::span<const double> starts, double epsilon,
                 std::vector<std::string>* below_threshold = nullptr);

/// Global grid optimum by enumerating all k^n start vectors. Ties go to the
/// lexicographically smallest start vector in canonical order. Throws
/// SearchSpaceTooLarge when k^n exceeds cfg.exhaustive_guard.
Schedule solve_exhaustive(const FuzzyTask& task, const SolverConfig& cfg);

/// Steepest-ascent hill climbing over single-skill one-step moves, restarted
/// from a greedy packing and seeded random feasible vectors. Deterministic
/// given cfg.seed. Throws NoFeasibleSchedule when the durations cannot fit
/// into the grid span.
Schedule solve_hill_climb(const FuzzyTask& task, const SolverConfig& cfg);

/// Simulated annealing with log-space acceptance and geometric cooling,
/// returning the best feasible state seen. Deterministic given cfg.seed. When
/// `accepted_objectives` is given, the objective of every accepted state is
/// appended in acceptance order. Throws NoFeasibleSchedule as above.
Schedule solve_sim_anneal(const FuzzyTask& task, const SolverConfig& cfg,
                          std::vector<double>* accepted_objectives = nullptr);

/// Projects a feasible schedule back onto executable skills: start and
/// duration become explicit, fuzzy parameters are merged into the parameter
/// map under a "fuzzy:" key prefix since they stay unresolved here.
std::vector<SpecificSkill> to_specific(const FuzzyTask& task, const Schedule& schedule);

}  // namespace fuzzysched
