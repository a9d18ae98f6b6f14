#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <string>
#include <variant>
#include <vector>

namespace fuzzysched {

// All times are seconds since the instruction was issued; minutes appear only
// at I/O boundaries.

/// Uniform sampling grid over a time interval [start, end] at `rate` samples
/// per second. The number of time steps obeys k = floor(rate * (end - start));
/// step j sits at start + j / rate for j in {0, ..., k-1}.
struct SamplingGrid {
  double start_s = 0.0;
  double end_s = 0.0;
  double rate_hz = 0.0;
  std::size_t step_count = 0;

  /// Grid over [start, end]; k derived via the floor law. end must exceed
  /// start and the interval must hold at least one step.
  static SamplingGrid over(double start_s, double end_s, double rate_hz);

  /// Grid with an explicit step count; the interval end is placed half a step
  /// past the last sample so the floor law still yields `count`.
  static SamplingGrid with_count(double start_s, double rate_hz, std::size_t count);

  double time_at(std::size_t j) const { return start_s + static_cast<double>(j) / rate_hz; }
  double step_seconds() const { return 1.0 / rate_hz; }
  double span_seconds() const { return end_s - start_s; }
  double last_time() const { return time_at(step_count - 1); }

  bool operator==(const SamplingGrid&) const = default;
};

/// Piecewise-linear membership shape: 0 outside [a, d], linear rise on [a, b],
/// 1 on [b, c], linear fall on [c, d]. Degenerate edges (a == b or c == d)
/// evaluate to 1 at the shared point.
struct Trapezoid {
  double a = 0.0, b = 0.0, c = 0.0, d = 0.0;

  Trapezoid(double a, double b, double c, double d);
  double eval(double t_s) const;
};

/// Unit-amplitude Gaussian exp(-(t - mu)^2 / (2 sigma^2)).
struct Bell {
  double mu = 0.0;
  double sigma = 1.0;

  Bell(double mu, double sigma);
  double eval(double t_s) const;
};

/// Satisfaction values on a sampling grid. Evaluation interpolates linearly
/// between grid points and returns 0 outside the sampled span.
struct SampledFunction {
  SamplingGrid grid;
  std::vector<double> values;

  SampledFunction(SamplingGrid grid, std::vector<double> values);
  double eval(double t_s) const;
};

class SatisfactionFunction;

/// Time-warped view of an inner function:
///   eval(t) = inner(pivot + (t + time_shift - pivot) * time_scale)
/// clamped into [0, 1]. time_scale != 0; a scale in (0, 1) widens the shape
/// around the pivot.
struct TransformedFunction {
  std::shared_ptr<const SatisfactionFunction> inner;
  double time_scale = 1.0;
  double time_shift_s = 0.0;
  double pivot_s = 0.0;

  double eval(double t_s) const;
};

/// Mapping from non-negative time to a satisfaction value in [0, 1].
class SatisfactionFunction {
 public:
  using Variant = std::variant<Trapezoid, Bell, SampledFunction, TransformedFunction>;

  SatisfactionFunction(Trapezoid f) : fn_(std::move(f)) {}
  SatisfactionFunction(Bell f) : fn_(std::move(f)) {}
  SatisfactionFunction(SampledFunction f) : fn_(std::move(f)) {}
  SatisfactionFunction(TransformedFunction f) : fn_(std::move(f)) {}

  double eval(double t_s) const;
  const Variant& variant() const { return fn_; }

  template <typename T>
  const T* get_if() const {
    return std::get_if<T>(&fn_);
  }

 private:
  Variant fn_;
};

/// Wrap `fn` in a time warp about `pivot_s`. Rejects time_scale == 0 and
/// negative time_shift.
SatisfactionFunction transform(SatisfactionFunction fn, double time_scale,
                               double time_shift_s, double pivot_s);

/// Evaluate `fn` at every grid step.
SampledFunction to_sampled(const SatisfactionFunction& fn, const SamplingGrid& grid);

using ParamMap = std::map<std::string, std::string>;

/// Fully parameterized executable operation: explicit start, duration, and
/// non-temporal parameters.
struct SpecificSkill {
  std::string id;
  double start_s = 0.0;
  double duration_s = 0.0;
  ParamMap params;
};

/// Operation with a vague time requirement: the satisfaction function stands
/// in for an explicit start time.
struct FuzzySkill {
  std::string id;
  SatisfactionFunction satisfaction;
  double duration_s = 0.0;
  ParamMap fuzzy_params;
  ParamMap specific_params;
};

/// Unordered set of fuzzy skills scheduled jointly. Skills are held sorted by
/// id; that order is the canonical order used for start vectors and
/// tie-breaking throughout the scheduler.
class FuzzyTask {
 public:
  explicit FuzzyTask(std::vector<FuzzySkill> skills);

  const std::vector<FuzzySkill>& skills() const { return skills_; }
  std::size_t size() const { return skills_.size(); }

 private:
  std::vector<FuzzySkill> skills_;
};

}  // namespace fuzzysched
