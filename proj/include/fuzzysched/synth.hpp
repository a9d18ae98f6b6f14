#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fuzzysched/formats.hpp"
#include "fuzzysched/nlparse.hpp"

namespace fuzzysched {

/// One instruction from the study battery: a short tag used in data files and
/// the sentence handed to the parser.
struct StudyInstruction {
  std::string tag;
  std::string text;
};

/// The fourteen-instruction battery: now/soon plus {in, after, before} x
/// {1, 10, 30 minutes} x {crisp, approximate}.
const std::vector<StudyInstruction>& study_instructions();

struct SynthConfig {
  int participants = 32;
  std::uint64_t seed = 0;
  double corner_sigma_floor_s = 15.0;  // corner jitter floor
  double corner_sigma_frac = 0.10;     // corner jitter as a fraction of t_spec
  double robot_width_factor = 1.15;    // robot-group widening about the shape center
  double value_noise_sigma = 0.02;     // per-sample noise on the support
  LookupConfig lookup;
};

/// Simulate per-participant satisfaction reports for the instruction battery.
///
/// Every participant answers every instruction on a shared 800-step grid
/// (4.5 s period from t = 0). A participant's answer is the instruction's
/// looked-up trapezoid with corners jittered by a Gaussian whose spread grows
/// with the specified time, evaluated on the grid, plus small value noise on
/// the shape's support. Participants alternate between the robot and person
/// groups; robot answers are widened about the shape center first. One RNG
/// stream drives everything, so equal seeds give identical tables.
std::vector<EnsembleRow> synthesize_study(const SynthConfig& cfg);

}  // namespace fuzzysched
