#include "fuzzysched/fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <utility>

#include "fuzzysched/errors.hpp"

namespace fuzzysched {

namespace {

bool all_finite(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

double half_squared_norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return 0.5 * s;
}

double norm2(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

using Matrix = std::vector<std::vector<double>>;

/// Solves the symmetric positive system M x = rhs in place by Gaussian
/// elimination with partial pivoting. Returns false on a vanishing pivot.
bool solve_linear(Matrix m, std::vector<double> rhs, std::vector<double>& out) {
  const std::size_t p = rhs.size();
  for (std::size_t col = 0; col < p; ++col) {
    std::size_t pivot = col;
    for (std::size_t row = col + 1; row < p; ++row) {
      if (std::abs(m[row][col]) > std::abs(m[pivot][col])) pivot = row;
    }
    if (std::abs(m[pivot][col]) < 1e-300) return false;
    std::swap(m[pivot], m[col]);
    std::swap(rhs[pivot], rhs[col]);
    for (std::size_t row = col + 1; row < p; ++row) {
      const double f = m[row][col] / m[col][col];
      for (std::size_t k = col; k < p; ++k) m[row][k] -= f * m[col][k];
      rhs[row] -= f * rhs[col];
    }
  }
  out.assign(p, 0.0);
  for (std::size_t i = p; i-- > 0;) {
    double s = rhs[i];
    for (std::size_t k = i + 1; k < p; ++k) s -= m[i][k] * out[k];
    out[i] = s / m[i][i];
  }
  return true;
}

Matrix fd_jacobian(const ResidualFn& residual, const std::vector<double>& x,
                   const std::vector<double>& r_at_x, const std::vector<double>& lower,
                   const std::vector<double>& upper, double fd_step) {
  const std::size_t m = r_at_x.size();
  const std::size_t p = x.size();
  Matrix jac(m, std::vector<double>(p, 0.0));
  for (std::size_t i = 0; i < p; ++i) {
    const double h = std::min(fd_step, (upper[i] - lower[i]) / 2.0);
    if (h <= 0.0) continue;
    const bool up = x[i] + h <= upper[i];
    const bool down = x[i] - h >= lower[i];
    std::vector<double> hi_r, lo_r;
    double width = 0.0;
    auto probe = [&](double xi) {
      auto probe_x = x;
      probe_x[i] = xi;
      return residual(probe_x);
    };
    if (up && down) {  // central difference away from the bounds
      hi_r = probe(x[i] + h);
      lo_r = probe(x[i] - h);
      width = 2.0 * h;
    } else if (up) {  // one-sided at the active bound
      hi_r = probe(x[i] + h);
      lo_r = r_at_x;
      width = h;
    } else {
      hi_r = r_at_x;
      lo_r = probe(x[i] - h);
      width = h;
    }
    for (std::size_t j = 0; j < m; ++j) jac[j][i] = (hi_r[j] - lo_r[j]) / width;
  }
  return jac;
}

double projected_gradient_inf(const std::vector<double>& x, const std::vector<double>& g,
                              const std::vector<double>& lower,
                              const std::vector<double>& upper) {
  double worst = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double gi = g[i];
    if (x[i] <= lower[i] && gi > 0.0) gi = 0.0;  // pushing out of the box
    if (x[i] >= upper[i] && gi < 0.0) gi = 0.0;
    worst = std::max(worst, std::abs(gi));
  }
  return worst;
}

}  // namespace

NllsResult solve_bounded_nlls(const ResidualFn& residual, std::vector<double> x0,
                              std::vector<double> lower, std::vector<double> upper,
                              const NllsOptions& opts, const JacobianFn& jacobian) {
  const std::size_t p = x0.size();
  if (p == 0) throw ValidationError("empty parameter vector");
  if (lower.size() != p || upper.size() != p) {
    throw ValidationError("bound vectors must match the parameter count");
  }
  for (std::size_t i = 0; i < p; ++i) {
    if (!(lower[i] <= upper[i])) throw ValidationError("lower bound exceeds upper bound");
    if (x0[i] < lower[i] || x0[i] > upper[i]) {
      throw ValidationError("initial point lies outside the bounds");
    }
  }
  if (opts.max_iterations < 1) throw ValidationError("max_iterations must be positive");

  std::vector<double> x = std::move(x0);
  std::vector<double> r = residual(x);
  if (!all_finite(r)) throw NonFiniteResidual("residual is not finite at the initial point");
  double cost = half_squared_norm(r);

  auto jacobian_at = [&](const std::vector<double>& point, const std::vector<double>& r_point) {
    return jacobian ? jacobian(point)
                    : fd_jacobian(residual, point, r_point, lower, upper, opts.fd_step);
  };

  Matrix jac = jacobian_at(x, r);
  auto normal_equations = [&](std::vector<std::vector<double>>& a, std::vector<double>& g) {
    a.assign(p, std::vector<double>(p, 0.0));
    g.assign(p, 0.0);
    for (std::size_t row = 0; row < jac.size(); ++row) {
      for (std::size_t i = 0; i < p; ++i) {
        g[i] += jac[row][i] * r[row];
        for (std::size_t k = i; k < p; ++k) a[i][k] += jac[row][i] * jac[row][k];
      }
    }
    for (std::size_t i = 0; i < p; ++i) {
      for (std::size_t k = 0; k < i; ++k) a[i][k] = a[k][i];
    }
  };

  Matrix a;
  std::vector<double> g;
  normal_equations(a, g);

  double max_diag = 0.0;
  for (std::size_t i = 0; i < p; ++i) max_diag = std::max(max_diag, a[i][i]);
  double mu = std::max(1e-3 * max_diag, 1e-12);
  double nu = 2.0;

  NllsResult result;
  int iter = 0;
  bool converged = false;
  while (iter < opts.max_iterations) {
    ++iter;
    if (projected_gradient_inf(x, g, lower, upper) <= opts.gradient_tol) {
      converged = true;
      break;
    }

    Matrix damped = a;
    for (std::size_t i = 0; i < p; ++i) damped[i][i] += mu;
    std::vector<double> neg_g(p);
    for (std::size_t i = 0; i < p; ++i) neg_g[i] = -g[i];
    std::vector<double> delta;
    if (!solve_linear(std::move(damped), std::move(neg_g), delta)) {
      mu *= nu;
      nu *= 2.0;
      continue;
    }

    std::vector<double> candidate(p), step(p);
    for (std::size_t i = 0; i < p; ++i) {
      double v = x[i] + delta[i];
      if (v < lower[i]) v = lower[i] + (lower[i] - v);  // reflect, then clip
      if (v > upper[i]) v = upper[i] - (v - upper[i]);
      candidate[i] = std::clamp(v, lower[i], upper[i]);
      step[i] = candidate[i] - x[i];
    }
    if (norm2(step) <= opts.step_tol * (norm2(x) + opts.step_tol)) {
      converged = true;
      break;
    }

    std::vector<double> r_new = residual(candidate);
    const double cost_new =
        all_finite(r_new) ? half_squared_norm(r_new) : std::numeric_limits<double>::infinity();
    if (cost_new < cost) {
      // Gain ratio against the quadratic model on the projected step.
      double linear = 0.0, quad = 0.0;
      for (std::size_t i = 0; i < p; ++i) {
        linear += step[i] * g[i];
        for (std::size_t k = 0; k < p; ++k) quad += step[i] * a[i][k] * step[k];
      }
      const double predicted = -(linear + 0.5 * quad);
      if (predicted > 0.0) {
        const double rho = (cost - cost_new) / predicted;
        mu *= std::max(1.0 / 3.0, 1.0 - std::pow(2.0 * rho - 1.0, 3.0));
      } else {
        mu *= 0.5;  // projection bent the step; still downhill, relax gently
      }
      nu = 2.0;
      x = std::move(candidate);
      r = std::move(r_new);
      cost = cost_new;
      jac = jacobian_at(x, r);
      normal_equations(a, g);
    } else {
      mu *= nu;
      nu *= 2.0;
    }
  }

  result.x = std::move(x);
  result.cost = cost;
  result.iterations = iter;
  result.converged = converged;
  return result;
}

namespace {

// Trapezoid evaluated from the fit parameterization (left corner plus three
// widths). Negative inputs are treated as zero so finite-difference probes
// right at the bounds stay well-defined.
double trapezoid_value(double t, std::span<const double> params) {
  const double a = std::max(params[0], 0.0);
  const double b = a + std::max(params[1], 0.0);
  const double c = b + std::max(params[2], 0.0);
  const double d = c + std::max(params[3], 0.0);
  if (t < a || t > d) return 0.0;
  if (t < b) return (t - a) / (b - a);
  if (t <= c) return 1.0;
  if (c == d) return 1.0;
  return (d - t) / (d - c);
}

double bell_value(double t, double mu, double sigma) {
  const double z = (t - mu) / sigma;
  return std::exp(-0.5 * z * z);
}

double rmse_from_cost(double cost, std::size_t samples) {
  return std::sqrt(2.0 * cost / static_cast<double>(samples));
}

struct StartPoint {
  std::vector<double> x;
};

std::vector<StartPoint> jittered_starts(std::vector<double> primary,
                                        const std::vector<double>& lower,
                                        const std::vector<double>& upper, double scale) {
  std::vector<StartPoint> starts;
  starts.push_back({primary});
  std::mt19937_64 rng(20260817);  // fixed: fits must be reproducible
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (int j = 0; j < 4; ++j) {
    auto x = primary;
    for (std::size_t i = 0; i < x.size(); ++i) {
      x[i] = std::clamp(x[i] + scale * unit(rng), lower[i], upper[i]);
    }
    starts.push_back({std::move(x)});
  }
  return starts;
}

FitResult pick_best(const std::vector<NllsResult>& runs, std::size_t samples,
                    const std::function<SatisfactionFunction(const std::vector<double>&)>& build) {
  const NllsResult* best = nullptr;
  for (const auto& run : runs) {
    if (run.converged && (best == nullptr || !best->converged || run.cost < best->cost)) {
      best = &run;
    }
  }
  if (best == nullptr) {  // nothing converged: take the lowest error anyway
    for (const auto& run : runs) {
      if (best == nullptr || run.cost < best->cost) best = &run;
    }
  }
  return FitResult{build(best->x), rmse_from_cost(best->cost, samples), best->iterations,
                   best->converged};
}

double max_value(const SampledFunction& target) {
  double m = 0.0;
  for (double v : target.values) m = std::max(m, v);
  if (m <= 0.0) throw AllZeroTarget("target function is zero everywhere");
  return m;
}

}  // namespace

FitResult fit_trapezoid(const SampledFunction& target) {
  const auto& grid = target.grid;
  const double peak = max_value(target);
  const double level = 0.9 * peak;

  std::size_t first_level = 0, last_level = 0, first_nonzero = 0, last_nonzero = 0;
  bool seen_level = false, seen_nonzero = false;
  for (std::size_t j = 0; j < target.values.size(); ++j) {
    if (target.values[j] > 0.0) {
      if (!seen_nonzero) first_nonzero = j;
      seen_nonzero = true;
      last_nonzero = j;
    }
    if (target.values[j] >= level) {
      if (!seen_level) first_level = j;
      seen_level = true;
      last_level = j;
    }
  }

  const double a0 = grid.time_at(first_nonzero);
  const double b0 = std::max(a0, grid.time_at(first_level));
  const double c0 = std::max(b0, grid.time_at(last_level));
  const double d0 = std::max(c0, grid.time_at(last_nonzero));
  const std::vector<double> primary{a0, b0 - a0, c0 - b0, d0 - c0};
  const std::vector<double> lower{0.0, 0.0, 0.0, 0.0};
  const std::vector<double> upper{grid.last_time(), grid.span_seconds(), grid.span_seconds(),
                                  grid.span_seconds()};

  auto residual = [&target, &grid](std::span<const double> params) {
    std::vector<double> r(grid.step_count);
    for (std::size_t j = 0; j < grid.step_count; ++j) {
      r[j] = trapezoid_value(grid.time_at(j), params) - target.values[j];
    }
    return r;
  };

  NllsOptions opts;
  opts.fd_step = grid.step_seconds() / 2.0;  // kinks make exact derivatives brittle

  std::vector<NllsResult> runs;
  for (const auto& start : jittered_starts(primary, lower, upper, 2.0 * grid.step_seconds())) {
    runs.push_back(solve_bounded_nlls(residual, start.x, lower, upper, opts));
  }
  return pick_best(runs, grid.step_count, [](const std::vector<double>& x) {
    const double a = std::max(x[0], 0.0);
    const double b = a + std::max(x[1], 0.0);
    const double c = b + std::max(x[2], 0.0);
    const double d = c + std::max(x[3], 0.0);
    return SatisfactionFunction{Trapezoid(a, b, c, d)};
  });
}

FitResult fit_bell(const SampledFunction& target) {
  const auto& grid = target.grid;
  const double peak = max_value(target);
  const double half = 0.5 * peak;

  std::size_t argmax = 0;
  std::size_t first_half = 0, last_half = 0;
  bool seen_half = false;
  for (std::size_t j = 0; j < target.values.size(); ++j) {
    if (target.values[j] > target.values[argmax]) argmax = j;
    if (target.values[j] >= half) {
      if (!seen_half) first_half = j;
      seen_half = true;
      last_half = j;
    }
  }

  const double step = grid.step_seconds();
  const std::vector<double> lower{grid.start_s, step};
  const std::vector<double> upper{grid.last_time(), grid.span_seconds()};
  const double width = grid.time_at(last_half) - grid.time_at(first_half);
  const std::vector<double> primary{grid.time_at(argmax),
                                    std::clamp(width / 2.0, lower[1], upper[1])};

  auto residual = [&target, &grid](std::span<const double> params) {
    std::vector<double> r(grid.step_count);
    for (std::size_t j = 0; j < grid.step_count; ++j) {
      r[j] = bell_value(grid.time_at(j), params[0], params[1]) - target.values[j];
    }
    return r;
  };
  auto jacobian = [&grid](std::span<const double> params) {
    const double mu = params[0], sigma = params[1];
    Matrix jac(grid.step_count, std::vector<double>(2));
    for (std::size_t j = 0; j < grid.step_count; ++j) {
      const double t = grid.time_at(j);
      const double v = bell_value(t, mu, sigma);
      jac[j][0] = v * (t - mu) / (sigma * sigma);
      jac[j][1] = v * (t - mu) * (t - mu) / (sigma * sigma * sigma);
    }
    return jac;
  };

  std::vector<NllsResult> runs;
  for (const auto& start : jittered_starts(primary, lower, upper, 2.0 * step)) {
    runs.push_back(solve_bounded_nlls(residual, start.x, lower, upper, {}, jacobian));
  }
  return pick_best(runs, grid.step_count, [](const std::vector<double>& x) {
    return SatisfactionFunction{Bell(x[0], x[1])};
  });
}

FitResult best_fit(const SampledFunction& target) {
  auto trap = fit_trapezoid(target);
  auto bell = fit_bell(target);
  return bell.error < trap.error ? std::move(bell) : std::move(trap);
}

}  // namespace fuzzysched
