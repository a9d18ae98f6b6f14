#include "fuzzysched/model.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <utility>

#include "fuzzysched/errors.hpp"

namespace fuzzysched {

namespace {

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

void require(bool ok, const std::string& what) {
  if (!ok) throw ValidationError(what);
}

}  // namespace

SamplingGrid SamplingGrid::over(double start_s, double end_s, double rate_hz) {
  require(rate_hz > 0.0, "sampling rate must be positive");
  require(end_s > start_s, "grid end must be after start");
  const auto k = static_cast<std::size_t>(std::floor(rate_hz * (end_s - start_s)));
  require(k >= 1, "grid must contain at least one time step");
  SamplingGrid g;
  g.start_s = start_s;
  g.end_s = end_s;
  g.rate_hz = rate_hz;
  g.step_count = k;
  return g;
}

SamplingGrid SamplingGrid::with_count(double start_s, double rate_hz, std::size_t count) {
  require(rate_hz > 0.0, "sampling rate must be positive");
  require(count >= 1, "grid must contain at least one time step");
  SamplingGrid g;
  g.start_s = start_s;
  // Half a step of headroom keeps floor(rate * span) == count under rounding.
  g.end_s = start_s + (static_cast<double>(count) + 0.5) / rate_hz;
  g.rate_hz = rate_hz;
  g.step_count = count;
  return g;
}

Trapezoid::Trapezoid(double a, double b, double c, double d) : a(a), b(b), c(c), d(d) {
  require(a >= 0.0, "trapezoid corners must be non-negative times");
  require(a <= b && b <= c && c <= d, "trapezoid corners must be ordered a <= b <= c <= d");
}

double Trapezoid::eval(double t_s) const {
  if (t_s < a || t_s > d) return 0.0;
  if (t_s < b) return (t_s - a) / (b - a);
  if (t_s <= c) return 1.0;
  if (c == d) return 1.0;
  return (d - t_s) / (d - c);
}

Bell::Bell(double mu, double sigma) : mu(mu), sigma(sigma) {
  require(mu >= 0.0, "bell mean must be a non-negative time");
  require(sigma > 0.0, "bell sigma must be positive");
}

double Bell::eval(double t_s) const {
  const double z = (t_s - mu) / sigma;
  return std::exp(-0.5 * z * z);
}

SampledFunction::SampledFunction(SamplingGrid grid, std::vector<double> values)
    : grid(grid), values(std::move(values)) {
  require(this->values.size() == grid.step_count,
          "sampled function must hold one value per grid step");
  for (double v : this->values) {
    require(v >= 0.0 && v <= 1.0, "sampled satisfaction values must lie in [0, 1]");
  }
}

double SampledFunction::eval(double t_s) const {
  const double x = (t_s - grid.start_s) * grid.rate_hz;  // fractional step index
  const double last = static_cast<double>(grid.step_count - 1);
  // Snap to the nearest index when within rounding noise of it, so grid-point
  // evaluation reproduces stored values exactly.
  const double nearest = std::round(x);
  const double tol = 1e-12 * std::max(1.0, std::abs(x));
  if (std::abs(x - nearest) <= tol) {
    if (nearest < 0.0 || nearest > last) return 0.0;
    return values[static_cast<std::size_t>(nearest)];
  }
  if (x < 0.0 || x > last) return 0.0;
  const auto j = static_cast<std::size_t>(x);
  const double frac = x - static_cast<double>(j);
  return values[j] * (1.0 - frac) + values[j + 1] * frac;
}

double TransformedFunction::eval(double t_s) const {
  const double warped = pivot_s + (t_s + time_shift_s - pivot_s) * time_scale;
  return clamp01(inner->eval(warped));
}

double SatisfactionFunction::eval(double t_s) const {
  return std::visit([t_s](const auto& f) { return f.eval(t_s); }, fn_);
}

SatisfactionFunction transform(SatisfactionFunction fn, double time_scale,
                               double time_shift_s, double pivot_s) {
  require(time_scale != 0.0, "time_scale must be non-zero");
  require(time_shift_s >= 0.0, "time_shift must be non-negative");
  require(pivot_s >= 0.0, "pivot must be a non-negative time");
  TransformedFunction t;
  t.inner = std::make_shared<const SatisfactionFunction>(std::move(fn));
  t.time_scale = time_scale;
  t.time_shift_s = time_shift_s;
  t.pivot_s = pivot_s;
  return SatisfactionFunction(std::move(t));
}

SampledFunction to_sampled(const SatisfactionFunction& fn, const SamplingGrid& grid) {
  std::vector<double> values(grid.step_count);
  for (std::size_t j = 0; j < grid.step_count; ++j) {
    values[j] = fn.eval(grid.time_at(j));
  }
  return SampledFunction(grid, std::move(values));
}

FuzzyTask::FuzzyTask(std::vector<FuzzySkill> skills) : skills_(std::move(skills)) {
  require(!skills_.empty(), "a fuzzy task needs at least one skill");
  std::sort(skills_.begin(), skills_.end(),
            [](const FuzzySkill& l, const FuzzySkill& r) { return l.id < r.id; });
  std::set<std::string> ids;
  for (const auto& s : skills_) {
    require(s.duration_s > 0.0, "skill duration must be positive: " + s.id);
    require(ids.insert(s.id).second, "duplicate skill id: " + s.id);
  }
}

}  // namespace fuzzysched
