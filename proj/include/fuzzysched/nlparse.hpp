#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "fuzzysched/model.hpp"

namespace fuzzysched {

enum class Preposition { In, Before, After };

std::string_view to_string(Preposition p);

/// Fuzzy time specification extracted from an instruction.
struct TimeSpec {
  Preposition preposition = Preposition::In;
  bool fuzzy = false;       // fuzziness modifier present
  double t_spec_s = 0.0;    // specified time; 0 for "now"/"soon"
  std::vector<std::string> raw_tokens;
};

/// Find the first temporal clause in `instruction`:
///   [in|after|before [the next]] [about|approximately|roughly|around]
///   (now | soon | <number> second(s)|minute(s)|hour(s))
/// Number words zero through sixty and digit forms are accepted;
/// matching is case-insensitive. "now"/"soon" always map to the
/// In-preposition at t_spec = 0, "soon" with the fuzziness flag set.
///
/// Throws NoTemporalModifier when nothing matches and AmbiguousTime when two
/// clauses match.
TimeSpec extract_time_spec(std::string_view instruction);

/// Shape constants for deriving satisfaction functions from time specs. The
/// defaults are tunable; they are not prescribed by any single data source.
struct LookupConfig {
  double plateau_frac = 0.10;          // plateau half-width as fraction of t_spec
  double shoulder_frac = 0.15;         // shoulder width as fraction of t_spec
  double min_plateau_s = 15.0;         // plateau half-width floor
  double min_shoulder_s = 30.0;        // shoulder width floor
  double fuzzy_widen = 0.5;            // time-scale applied for fuzziness modifiers
  double after_left_slope_window_s = 12.0;  // rise width left of t_spec for "after"
  double after_plateau_frac = 0.25;    // "after" plateau reach into the remaining horizon
  double horizon_s = 3600.0;           // t_max
};

/// Derive a satisfaction function for a time spec by looking up the base
/// shape for its preposition and adapting it for fuzziness.
///
/// In:     trapezoid centered at t_spec.
/// Before: maximal on [0, t_spec], falling shoulder after t_spec.
/// After:  short steep rise ending at t_spec, plateau into the horizon, slow
///         fall to zero at the horizon.
///
/// Fuzzy specs widen the shape: In-results are time-scaled about t_spec by
/// fuzzy_widen; Before/After widen the shoulder carrying the deadline edge by
/// 1/fuzzy_widen. Rejects t_spec beyond the horizon.
SatisfactionFunction lookup_satisfaction(const TimeSpec& spec, const LookupConfig& cfg = {});

}  // namespace fuzzysched
