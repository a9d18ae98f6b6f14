#include "fuzzysched/aggregate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>

#include "fuzzysched/errors.hpp"

namespace fuzzysched {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw ValidationError(what);
}

std::vector<double> step_values(const SatisfactionEnsemble& e, std::size_t step) {
  std::vector<double> vals;
  vals.reserve(e.members.size());
  for (const auto& m : e.members) vals.push_back(m.values[step]);
  return vals;
}

double quantile_of_sorted(const std::vector<double>& sorted, double q) {
  const double h = static_cast<double>(sorted.size() - 1) * q;
  const auto lo = static_cast<std::size_t>(h);
  const double frac = h - static_cast<double>(lo);
  if (lo + 1 >= sorted.size()) return sorted.back();
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

}  // namespace

SatisfactionEnsemble::SatisfactionEnsemble(SamplingGrid grid,
                                           std::vector<SampledFunction> members,
                                           std::string instruction_tag)
    : grid(grid), members(std::move(members)), instruction_tag(std::move(instruction_tag)) {
  require(!this->members.empty(), "ensemble needs at least one member");
  for (const auto& m : this->members) {
    require(m.grid == grid, "all ensemble members must share the grid");
  }
}

SampledFunction pointwise_mean(const SatisfactionEnsemble& e) {
  std::vector<double> out(e.grid.step_count, 0.0);
  for (std::size_t j = 0; j < e.grid.step_count; ++j) {
    double sum = 0.0;
    for (const auto& m : e.members) sum += m.values[j];
    out[j] = sum / static_cast<double>(e.members.size());
  }
  return SampledFunction(e.grid, std::move(out));
}

SampledFunction pointwise_quantile(const SatisfactionEnsemble& e, double q) {
  require(q > 0.0 && q < 1.0, "quantile level must lie in (0, 1)");
  std::vector<double> out(e.grid.step_count, 0.0);
  for (std::size_t j = 0; j < e.grid.step_count; ++j) {
    auto vals = step_values(e, j);
    std::sort(vals.begin(), vals.end());
    out[j] = quantile_of_sorted(vals, q);
  }
  return SampledFunction(e.grid, std::move(out));
}

SampledFunction pointwise_median(const SatisfactionEnsemble& e) {
  return pointwise_quantile(e, 0.5);
}

SampledFunction pointwise_mode(const SatisfactionEnsemble& e, double bin_width,
                               std::vector<std::size_t>* tie_steps) {
  require(bin_width > 0.0 && bin_width <= 1.0, "bin width must lie in (0, 1]");
  const auto nbins = static_cast<std::size_t>(std::ceil(1.0 / bin_width));
  std::vector<double> out(e.grid.step_count, 0.0);
  std::vector<std::size_t> counts(nbins);
  for (std::size_t j = 0; j < e.grid.step_count; ++j) {
    std::fill(counts.begin(), counts.end(), 0);
    for (const auto& m : e.members) {
      auto bin = static_cast<std::size_t>(m.values[j] / bin_width);
      bin = std::min(bin, nbins - 1);
      ++counts[bin];
    }
    std::size_t best = 0;
    bool tied = false;
    for (std::size_t b = 1; b < nbins; ++b) {
      if (counts[b] > counts[best]) {
        best = b;
        tied = false;
      } else if (counts[b] == counts[best] && counts[b] > 0) {
        tied = true;  // lower bin wins
      }
    }
    if (tied && tie_steps != nullptr) tie_steps->push_back(j);
    out[j] = std::min((static_cast<double>(best) + 0.5) * bin_width, 1.0);
  }
  return SampledFunction(e.grid, std::move(out));
}

SampledFunction pointwise_min(const SatisfactionEnsemble& e) {
  std::vector<double> out(e.grid.step_count, 0.0);
  for (std::size_t j = 0; j < e.grid.step_count; ++j) {
    double v = e.members.front().values[j];
    for (const auto& m : e.members) v = std::min(v, m.values[j]);
    out[j] = v;
  }
  return SampledFunction(e.grid, std::move(out));
}

SampledFunction pointwise_max(const SatisfactionEnsemble& e) {
  std::vector<double> out(e.grid.step_count, 0.0);
  for (std::size_t j = 0; j < e.grid.step_count; ++j) {
    double v = e.members.front().values[j];
    for (const auto& m : e.members) v = std::max(v, m.values[j]);
    out[j] = v;
  }
  return SampledFunction(e.grid, std::move(out));
}

EnsembleSummary summarize(const SatisfactionEnsemble& e,
                          std::span<const double> quantile_levels, double bin_width) {
  std::vector<std::size_t> ties;
  EnsembleSummary s{
      pointwise_mean(e),      pointwise_median(e), pointwise_mode(e, bin_width, &ties),
      {},                     {},                  {},
  };
  s.mode_tie_steps = std::move(ties);
  for (double q : quantile_levels) {
    s.quantiles.emplace(q, pointwise_quantile(e, q));
  }
  s.pointwise_variance.resize(e.grid.step_count);
  for (std::size_t j = 0; j < e.grid.step_count; ++j) {
    const double mean = s.mean.values[j];
    double acc = 0.0;
    for (const auto& m : e.members) {
      const double d = m.values[j] - mean;
      acc += d * d;
    }
    s.pointwise_variance[j] = acc / static_cast<double>(e.members.size());
  }
  return s;
}

double density_mean(const SampledFunction& fn) {
  const double total = std::accumulate(fn.values.begin(), fn.values.end(), 0.0);
  if (total <= 0.0) throw ZeroMass("function has zero mass, cannot form a density");
  double mean = 0.0;
  for (std::size_t j = 0; j < fn.values.size(); ++j) {
    mean += fn.grid.time_at(j) * fn.values[j];
  }
  return mean / total;
}

double density_variance(const SampledFunction& fn) {
  const double total = std::accumulate(fn.values.begin(), fn.values.end(), 0.0);
  if (total <= 0.0) throw ZeroMass("function has zero mass, cannot form a density");
  double m1 = 0.0, m2 = 0.0;
  for (std::size_t j = 0; j < fn.values.size(); ++j) {
    const double t = fn.grid.time_at(j);
    const double p = fn.values[j] / total;
    m1 += t * p;
    m2 += t * t * p;
  }
  return m2 - m1 * m1;
}

namespace {

struct RankedPool {
  std::vector<double> ranks;   // midranks aligned with the sorted pool
  std::vector<double> sorted;  // pooled values, ascending
  double tie_term = 0.0;       // sum of t^3 - t over tie groups
};

RankedPool rank_pool(std::span<const double> a, std::span<const double> b) {
  RankedPool pool;
  pool.sorted.reserve(a.size() + b.size());
  pool.sorted.insert(pool.sorted.end(), a.begin(), a.end());
  pool.sorted.insert(pool.sorted.end(), b.begin(), b.end());
  std::sort(pool.sorted.begin(), pool.sorted.end());
  pool.ranks.resize(pool.sorted.size());
  std::size_t i = 0;
  while (i < pool.sorted.size()) {
    std::size_t j = i;
    while (j < pool.sorted.size() && pool.sorted[j] == pool.sorted[i]) ++j;
    const double tie = static_cast<double>(j - i);
    const double midrank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k) pool.ranks[k] = midrank;
    if (j - i > 1) pool.tie_term += tie * tie * tie - tie;
    i = j;
  }
  return pool;
}

double rank_of_value(const RankedPool& pool, double v) {
  const auto it = std::lower_bound(pool.sorted.begin(), pool.sorted.end(), v);
  return pool.ranks[static_cast<std::size_t>(it - pool.sorted.begin())];
}

double exact_two_sided_p(const RankedPool& pool, std::size_t n1, double u_obs) {
  const std::size_t n = pool.ranks.size();
  const double mu = static_cast<double>(n1) * static_cast<double>(n - n1) / 2.0;
  const double dist = std::abs(u_obs - mu);
  const double rank_offset = static_cast<double>(n1) * static_cast<double>(n1 + 1) / 2.0;

  // Walk all size-n1 subsets of the pooled ranks.
  std::vector<std::size_t> idx(n1);
  for (std::size_t i = 0; i < n1; ++i) idx[i] = i;
  std::size_t total = 0, extreme = 0;
  while (true) {
    double rank_sum = 0.0;
    for (std::size_t i : idx) rank_sum += pool.ranks[i];
    const double u = rank_sum - rank_offset;
    ++total;
    if (std::abs(u - mu) >= dist) ++extreme;

    std::size_t k = n1;
    while (k > 0 && idx[k - 1] == n - n1 + (k - 1)) --k;
    if (k == 0) break;
    ++idx[k - 1];
    for (std::size_t i = k; i < n1; ++i) idx[i] = idx[i - 1] + 1;
  }
  return static_cast<double>(extreme) / static_cast<double>(total);
}

}  // namespace

MannWhitneyResult mann_whitney_u(std::span<const double> a, std::span<const double> b) {
  require(!a.empty() && !b.empty(), "both samples must be non-empty");
  const auto n1 = a.size();
  const auto n2 = b.size();
  const auto n = n1 + n2;
  const RankedPool pool = rank_pool(a, b);

  double r1 = 0.0;
  for (double v : a) r1 += rank_of_value(pool, v);
  const double u1 = r1 - static_cast<double>(n1) * static_cast<double>(n1 + 1) / 2.0;

  double p;
  if (n <= 12) {
    p = exact_two_sided_p(pool, n1, u1);
  } else {
    const double mu = static_cast<double>(n1) * static_cast<double>(n2) / 2.0;
    const double nn = static_cast<double>(n);
    const double var = static_cast<double>(n1) * static_cast<double>(n2) / 12.0 *
                       ((nn + 1.0) - pool.tie_term / (nn * (nn - 1.0)));
    if (var <= 0.0) {
      p = 1.0;
    } else {
      const double shift = std::max(std::abs(u1 - mu) - 0.5, 0.0);  // continuity correction
      const double z = shift / std::sqrt(var);
      p = std::erfc(z / std::sqrt(2.0));
    }
  }
  return {u1, std::clamp(p, 0.0, 1.0)};
}

}  // namespace fuzzysched
