#pragma once

#include <string>

#include "fuzzysched/aggregate.hpp"

namespace fuzzysched {

/// Standalone SVG plot of an ensemble: interquartile band, median line,
/// dotted min/max envelope, instruction tag as the title.
std::string render_summary_svg(const SatisfactionEnsemble& e, int width = 800, int height = 400);

}  // namespace fuzzysched
