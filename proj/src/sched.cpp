#include "fuzzysched/sched.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <utility>

#include "fuzzysched/errors.hpp"

namespace fuzzysched {

namespace {

using IndexVector = std::vector<std::size_t>;

void check_epsilon(double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw ValidationError("epsilon must lie in (0, 1)");
  }
}

void check_config(const SolverConfig& cfg) {
  check_epsilon(cfg.epsilon);
  if (cfg.grid.step_count == 0) throw ValidationError("solver grid has no steps");
  if (cfg.restarts < 1) throw ValidationError("restarts must be at least 1");
  if (!(cfg.sa_initial_temp > 0.0)) throw ValidationError("sa_initial_temp must be positive");
  if (!(cfg.sa_cooling > 0.0 && cfg.sa_cooling < 1.0)) {
    throw ValidationError("sa_cooling must lie in (0, 1)");
  }
  if (cfg.sa_iters_per_temp < 1) throw ValidationError("sa_iters_per_temp must be at least 1");
  if (!(cfg.sa_min_temp > 0.0 && cfg.sa_min_temp <= cfg.sa_initial_temp)) {
    throw ValidationError("sa_min_temp must lie in (0, sa_initial_temp]");
  }
  if (cfg.sa_step_window < 1) throw ValidationError("sa_step_window must be at least 1");
  if (!(cfg.exhaustive_guard >= 1.0)) throw ValidationError("exhaustive_guard must be at least 1");
}

std::vector<double> durations_of(const FuzzyTask& task) {
  std::vector<double> out;
  out.reserve(task.size());
  for (const auto& s : task.skills()) out.push_back(s.duration_s);
  return out;
}

std::vector<double> times_of(const SamplingGrid& grid, const IndexVector& idx) {
  std::vector<double> out;
  out.reserve(idx.size());
  for (std::size_t i : idx) out.push_back(grid.time_at(i));
  return out;
}

double objective_at(const FuzzyTask& task, const SamplingGrid& grid, const IndexVector& idx,
                    double epsilon) {
  return objective(task, times_of(grid, idx), epsilon);
}

/// Smallest grid index whose time is >= t, or step_count when none is.
std::size_t ceil_index(const SamplingGrid& grid, double t) {
  if (t <= grid.start_s) return 0;
  const double x = (t - grid.start_s) * grid.rate_hz;
  auto i = static_cast<std::size_t>(std::ceil(x));
  // Guard against t sitting a hair above a grid point due to rounding.
  if (i > 0 && grid.time_at(i - 1) >= t) --i;
  return i;
}

/// First grid index attaining the maximum satisfaction of the skill.
std::size_t grid_argmax(const SatisfactionFunction& fn, const SamplingGrid& grid) {
  std::size_t best = 0;
  double best_value = -1.0;
  for (std::size_t i = 0; i < grid.step_count; ++i) {
    const double v = fn.eval(grid.time_at(i));
    if (v > best_value) {
      best_value = v;
      best = i;
    }
  }
  return best;
}

/// Packs skills in the given visit order, pushing each start to the later of
/// its preferred index and the first grid point clear of the previous skill.
/// Returns false when the packing runs off the grid.
bool pack(const FuzzyTask& task, const SamplingGrid& grid,
          const std::vector<std::size_t>& order, const std::vector<std::size_t>& preferred,
          IndexVector& out) {
  out.assign(task.size(), 0);
  double prev_end = -std::numeric_limits<double>::infinity();
  for (std::size_t rank = 0; rank < order.size(); ++rank) {
    const std::size_t skill = order[rank];
    std::size_t i = std::max(preferred[skill], ceil_index(grid, prev_end));
    if (i >= grid.step_count) return false;
    out[skill] = i;
    prev_end = grid.time_at(i) + task.skills()[skill].duration_s;
  }
  return true;
}

/// Greedy feasible start vector: skills visited by preferred (argmax) time,
/// each packed behind the previous one. Falls back to packing from the grid
/// origin when the preferred placements run off the end.
IndexVector greedy_init(const FuzzyTask& task, const SamplingGrid& grid) {
  const std::size_t n = task.size();
  double total = 0.0;
  for (const auto& s : task.skills()) total += s.duration_s;
  if (total > grid.span_seconds()) {
    throw NoFeasibleSchedule("total duration exceeds the scheduling window");
  }

  std::vector<std::size_t> preferred(n);
  for (std::size_t i = 0; i < n; ++i) {
    preferred[i] = grid_argmax(task.skills()[i].satisfaction, grid);
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) {
    if (preferred[l] != preferred[r]) return preferred[l] < preferred[r];
    return task.skills()[l].id < task.skills()[r].id;
  });

  IndexVector idx;
  if (pack(task, grid, order, preferred, idx)) return idx;
  const std::vector<std::size_t> origin(n, 0);
  if (pack(task, grid, order, origin, idx)) return idx;
  throw NoFeasibleSchedule("skills do not fit on the grid without overlap");
}

Schedule make_schedule(const FuzzyTask& task, const SamplingGrid& grid, const IndexVector& idx,
                       double epsilon, std::string solver, std::uint64_t seed) {
  Schedule s;
  const auto starts = times_of(grid, idx);
  s.objective = objective(task, starts, epsilon, &s.below_threshold);
  s.feasible = s.objective > 0.0;
  for (std::size_t i = 0; i < idx.size(); ++i) {
    s.starts.push_back({task.skills()[i].id, starts[i]});
  }
  s.solver = std::move(solver);
  s.seed = seed;
  return s;
}

struct BestTracker {
  double objective = -1.0;
  IndexVector idx;

  // Strict improvement wins; equal objectives go to the lexicographically
  // smallest start vector so solver output is deterministic.
  void offer(double value, const IndexVector& candidate) {
    if (value > objective || (value == objective && candidate < idx)) {
      objective = value;
      idx = candidate;
    }
  }
};

}  // namespace

bool check_no_overlap(std::span<const double> starts, std::span<const double> durations) {
  if (starts.size() != durations.size()) {
    throw ValidationError("starts and durations differ in length");
  }
  std::vector<std::pair<double, double>> intervals;
  intervals.reserve(starts.size());
  for (std::size_t i = 0; i < starts.size(); ++i) {
    intervals.emplace_back(starts[i], durations[i]);
  }
  std::sort(intervals.begin(), intervals.end());
  for (std::size_t i = 1; i < intervals.size(); ++i) {
    if (intervals[i - 1].first + intervals[i - 1].second > intervals[i].first) return false;
  }
  return true;
}

double objective(const FuzzyTask& task, std::span<const double> starts, double epsilon,
                 std::vector<std::string>* below_threshold) {
  check_epsilon(epsilon);
  if (starts.size() != task.size()) {
    throw ValidationError("start vector length does not match the task");
  }
  if (!check_no_overlap(starts, durations_of(task))) return 0.0;
  double product = 1.0;
  for (std::size_t i = 0; i < starts.size(); ++i) {
    const double raw = task.skills()[i].satisfaction.eval(starts[i]);
    if (raw < epsilon && below_threshold != nullptr) {
      below_threshold->push_back(task.skills()[i].id);
    }
    product *= std::max(raw, epsilon);
  }
  return product;
}

Schedule solve_exhaustive(const FuzzyTask& task, const SolverConfig& cfg) {
  check_config(cfg);
  const std::size_t n = task.size();
  const std::size_t k = cfg.grid.step_count;
  if (std::pow(static_cast<double>(k), static_cast<double>(n)) > cfg.exhaustive_guard) {
    throw SearchSpaceTooLarge("grid^skills exceeds the exhaustive search guard");
  }

  IndexVector idx(n, 0);
  BestTracker best;
  best.offer(0.0, idx);  // all-origin vector is the tie-break default
  for (;;) {
    const double f = objective_at(task, cfg.grid, idx, cfg.epsilon);
    // Enumeration is lexicographic, so keeping only strict improvements
    // leaves the smallest maximizer in place.
    if (f > best.objective) {
      best.objective = f;
      best.idx = idx;
    }
    std::size_t pos = n;
    while (pos > 0) {
      --pos;
      if (++idx[pos] < k) break;
      idx[pos] = 0;
      if (pos == 0) return make_schedule(task, cfg.grid, best.idx, cfg.epsilon, "exhaustive",
                                         cfg.seed);
    }
  }
}

Schedule solve_hill_climb(const FuzzyTask& task, const SolverConfig& cfg) {
  check_config(cfg);
  const std::size_t n = task.size();
  const std::size_t k = cfg.grid.step_count;
  const auto durations = durations_of(task);
  const IndexVector greedy = greedy_init(task, cfg.grid);

  std::mt19937_64 rng(cfg.seed);
  std::uniform_int_distribution<std::size_t> index_dist(0, k - 1);

  auto random_init = [&]() {
    IndexVector idx(n);
    for (int attempt = 0; attempt < 200; ++attempt) {
      for (auto& i : idx) i = index_dist(rng);
      if (check_no_overlap(times_of(cfg.grid, idx), durations)) return idx;
    }
    return greedy;  // tight instances: keep the restart useful
  };

  BestTracker best;
  for (int restart = 0; restart < cfg.restarts; ++restart) {
    IndexVector current = restart == 0 ? greedy : random_init();
    double f = objective_at(task, cfg.grid, current, cfg.epsilon);
    for (;;) {
      BestTracker step;
      for (std::size_t skill = 0; skill < n; ++skill) {
        for (int dir : {-1, +1}) {
          if (dir < 0 && current[skill] == 0) continue;
          if (dir > 0 && current[skill] + 1 >= k) continue;
          IndexVector neighbor = current;
          neighbor[skill] += dir;
          step.offer(objective_at(task, cfg.grid, neighbor, cfg.epsilon), neighbor);
        }
      }
      if (step.objective <= f) break;
      current = step.idx;
      f = step.objective;
    }
    best.offer(f, current);
  }
  return make_schedule(task, cfg.grid, best.idx, cfg.epsilon, "hill_climb", cfg.seed);
}

Schedule solve_sim_anneal(const FuzzyTask& task, const SolverConfig& cfg,
                          std::vector<double>* accepted_objectives) {
  check_config(cfg);
  const std::size_t n = task.size();
  const std::size_t k = cfg.grid.step_count;
  const auto durations = durations_of(task);

  IndexVector current = greedy_init(task, cfg.grid);
  double f = objective_at(task, cfg.grid, current, cfg.epsilon);
  BestTracker best;
  best.offer(f, current);
  if (accepted_objectives != nullptr) accepted_objectives->push_back(f);

  std::mt19937_64 rng(cfg.seed);
  std::uniform_int_distribution<std::size_t> skill_dist(0, n - 1);
  std::uniform_int_distribution<int> magnitude_dist(1, cfg.sa_step_window);
  std::uniform_int_distribution<int> direction_dist(0, 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  for (double temp = cfg.sa_initial_temp; temp >= cfg.sa_min_temp; temp *= cfg.sa_cooling) {
    for (int iter = 0; iter < cfg.sa_iters_per_temp; ++iter) {
      const std::size_t skill = skill_dist(rng);
      const int step = magnitude_dist(rng) * (direction_dist(rng) == 0 ? -1 : 1);
      const auto moved = static_cast<long long>(current[skill]) + step;
      if (moved < 0 || moved >= static_cast<long long>(k)) continue;
      IndexVector proposal = current;
      proposal[skill] = static_cast<std::size_t>(moved);
      if (!check_no_overlap(times_of(cfg.grid, proposal), durations)) continue;

      const double f_new = objective_at(task, cfg.grid, proposal, cfg.epsilon);
      // Feasible objectives are epsilon-floored products, so the logs exist.
      const bool accept =
          f_new >= f || unit(rng) < std::exp((std::log(f_new) - std::log(f)) / temp);
      if (!accept) continue;
      current = std::move(proposal);
      f = f_new;
      best.offer(f, current);
      if (accepted_objectives != nullptr) accepted_objectives->push_back(f);
    }
  }
  return make_schedule(task, cfg.grid, best.idx, cfg.epsilon, "sim_anneal", cfg.seed);
}

std::vector<SpecificSkill> to_specific(const FuzzyTask& task, const Schedule& schedule) {
  if (!schedule.feasible) {
    throw ValidationError("cannot project an infeasible schedule onto specific skills");
  }
  if (schedule.starts.size() != task.size()) {
    throw ValidationError("schedule and task disagree on skill count");
  }
  std::vector<SpecificSkill> out;
  out.reserve(task.size());
  for (std::size_t i = 0; i < task.size(); ++i) {
    const auto& skill = task.skills()[i];
    const auto& start = schedule.starts[i];
    if (start.id != skill.id) {
      throw ValidationError("schedule skill ids do not match the task");
    }
    SpecificSkill s;
    s.id = skill.id;
    s.start_s = start.start_s;
    s.duration_s = skill.duration_s;
    s.params = skill.specific_params;
    for (const auto& [key, value] : skill.fuzzy_params) {
      s.params["fuzzy:" + key] = value;
    }
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace fuzzysched
