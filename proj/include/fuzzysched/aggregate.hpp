#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "fuzzysched/model.hpp"

namespace fuzzysched {

/// Per-user sampled satisfaction functions for one instruction, all on a
/// shared grid.
struct SatisfactionEnsemble {
  SamplingGrid grid;
  std::vector<SampledFunction> members;
  std::string instruction_tag;

  SatisfactionEnsemble(SamplingGrid grid, std::vector<SampledFunction> members,
                       std::string instruction_tag);
};

/// Point-wise descriptive statistics of an ensemble.
struct EnsembleSummary {
  SampledFunction mean;
  SampledFunction median;
  SampledFunction mode;
  std::map<double, SampledFunction> quantiles;
  std::vector<double> pointwise_variance;
  // Steps at which the mode bin count was tied (the lower bin was used).
  std::vector<std::size_t> mode_tie_steps;
};

SampledFunction pointwise_mean(const SatisfactionEnsemble& e);
SampledFunction pointwise_median(const SatisfactionEnsemble& e);

/// Per-step order statistic at level q in (0, 1), linearly interpolated
/// between order statistics (position (n-1)*q).
SampledFunction pointwise_quantile(const SatisfactionEnsemble& e, double q);

/// Per-step mode over values binned into ceil(1/bin_width) bins on [0, 1];
/// returns the center of the fullest bin, ties resolved to the lower bin.
/// `tie_steps`, when given, collects the steps where a tie occurred.
SampledFunction pointwise_mode(const SatisfactionEnsemble& e, double bin_width = 0.05,
                               std::vector<std::size_t>* tie_steps = nullptr);

SampledFunction pointwise_min(const SatisfactionEnsemble& e);
SampledFunction pointwise_max(const SatisfactionEnsemble& e);

EnsembleSummary summarize(const SatisfactionEnsemble& e,
                          std::span<const double> quantile_levels,
                          double bin_width = 0.05);

/// Mean of time under the density proportional to the function values.
double density_mean(const SampledFunction& fn);

/// Variance (seconds^2) of time under the density proportional to the
/// function values. Throws ZeroMass when all values are 0.
double density_variance(const SampledFunction& fn);

struct MannWhitneyResult {
  double u;  // U statistic of the first sample, midrank tie handling
  double p;  // two-sided p-value
};

/// Mann-Whitney U test. Exact permutation p-value when |a| + |b| <= 12,
/// otherwise a normal approximation with tie-corrected variance and
/// continuity correction.
MannWhitneyResult mann_whitney_u(std::span<const double> a, std::span<const double> b);

}  // namespace fuzzysched
