#include "fuzzysched/synth.hpp"

#include <algorithm>
#include <array>
#include <random>
#include <sstream>

#include "fuzzysched/errors.hpp"

namespace fuzzysched {

const std::vector<StudyInstruction>& study_instructions() {
  static const std::vector<StudyInstruction> table = {
      {"in_now", "The assignment should start now!"},
      {"in_approx_now", "The assignment should start soon!"},
      {"in_1min", "The assignment should start in one minute!"},
      {"in_10min", "The assignment should start in 10 minutes!"},
      {"in_30min", "The assignment should start in 30 minutes!"},
      {"in_approx_10min", "The assignment should start in approximately 10 minutes!"},
      {"after_1min", "The assignment should start after one minute!"},
      {"after_10min", "The assignment should start after 10 minutes!"},
      {"after_30min", "The assignment should start after 30 minutes!"},
      {"after_approx_10min", "The assignment should start after approximately 10 minutes!"},
      {"before_1min", "The assignment should start before the next minute!"},
      {"before_10min", "The assignment should start before the next 10 minutes!"},
      {"before_30min", "The assignment should start before the next 30 minutes!"},
      {"before_approx_10min",
       "The assignment should start before approximately the next ten minutes!"},
  };
  return table;
}

namespace {

// Corner times of the looked-up shape in instruction time. Fuzzy In-shapes
// come back as a warp around a trapezoid; undo the warp so the corners live
// on the same axis as everything else.
std::array<double, 4> shape_corners(const SatisfactionFunction& fn) {
  if (const auto* t = fn.get_if<Trapezoid>()) {
    return {t->a, t->b, t->c, t->d};
  }
  if (const auto* w = fn.get_if<TransformedFunction>()) {
    const auto* t = w->inner->get_if<Trapezoid>();
    if (t != nullptr && w->time_shift_s == 0.0) {
      auto undo = [&](double corner) {
        return w->pivot_s + (corner - w->pivot_s) / w->time_scale;
      };
      return {undo(t->a), undo(t->b), undo(t->c), undo(t->d)};
    }
  }
  throw ValidationError("synthesis expects trapezoid-backed satisfaction shapes");
}

std::string participant_name(int index) {
  std::ostringstream out;
  out << 'p';
  out.width(3);
  out.fill('0');
  out << index;
  return out.str();
}

}  // namespace

std::vector<EnsembleRow> synthesize_study(const SynthConfig& cfg) {
  if (cfg.participants <= 0) throw ValidationError("participant count must be positive");

  struct Target {
    std::string tag;
    std::array<double, 4> corners;
    double sigma;
  };
  std::vector<Target> targets;
  for (const auto& instr : study_instructions()) {
    const TimeSpec spec = extract_time_spec(instr.text);
    const auto corners = shape_corners(lookup_satisfaction(spec, cfg.lookup));
    const double sigma =
        std::max(cfg.corner_sigma_floor_s, cfg.corner_sigma_frac * spec.t_spec_s);
    targets.push_back({instr.tag, corners, sigma});
  }

  const SamplingGrid grid = SamplingGrid::with_count(0.0, 1.0 / 4.5, 800);
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> unit_normal(0.0, 1.0);

  std::vector<EnsembleRow> rows;
  rows.reserve(static_cast<std::size_t>(cfg.participants) * targets.size() * grid.step_count);
  for (int p = 0; p < cfg.participants; ++p) {
    const std::string pid = participant_name(p);
    const bool robot = (p % 2 == 0);
    const std::string group = robot ? "robot" : "person";
    for (const auto& target : targets) {
      std::array<double, 4> corners = target.corners;
      if (robot) {
        const double center = 0.5 * (corners[1] + corners[2]);
        for (double& c : corners) c = center + (c - center) * cfg.robot_width_factor;
      }
      for (double& c : corners) c += target.sigma * unit_normal(rng);
      std::sort(corners.begin(), corners.end());
      for (double& c : corners) c = std::max(c, 0.0);
      const Trapezoid shape(corners[0], corners[1], corners[2], corners[3]);

      for (std::size_t j = 0; j < grid.step_count; ++j) {
        const double t = grid.time_at(j);
        double v = shape.eval(t);
        if (v > 0.0) {
          v = std::clamp(v + cfg.value_noise_sigma * unit_normal(rng), 0.0, 1.0);
        }
        rows.push_back(EnsembleRow{pid, target.tag, group, t, v});
      }
    }
  }
  return rows;
}

}  // namespace fuzzysched
