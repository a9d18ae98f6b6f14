#pragma once

#include <functional>
#include <span>
#include <vector>

#include "fuzzysched/model.hpp"

namespace fuzzysched {

/// Residual vector r(x); the solver minimizes 0.5 * ||r(x)||^2.
using ResidualFn = std::function<std::vector<double>(std::span<const double>)>;
/// Jacobian rows match residual entries; row j holds dr_j/dx_i.
using JacobianFn = std::function<std::vector<std::vector<double>>(std::span<const double>)>;

struct NllsOptions {
  double gradient_tol = 1e-8;  // infinity norm of the projected gradient
  double step_tol = 1e-10;
  int max_iterations = 200;
  double fd_step = 1e-6;  // forward/backward probe width when no Jacobian is given
};

struct NllsResult {
  std::vector<double> x;
  double cost = 0.0;  // 0.5 * sum of squared residuals at x
  int iterations = 0;
  bool converged = false;
};

/// Box-bounded nonlinear least squares: damped Gauss-Newton steps inside an
/// adaptive trust region, with candidates reflected and clipped at the bounds.
/// Stops on a small projected gradient, a tiny step, or the iteration cap
/// (converged=false in that case). Deterministic. Throws NonFiniteResidual
/// when r(x0) contains non-finite entries; non-finite trial points are
/// rejected like uphill steps.
NllsResult solve_bounded_nlls(const ResidualFn& residual, std::vector<double> x0,
                              std::vector<double> lower, std::vector<double> upper,
                              const NllsOptions& opts = {},
                              const JacobianFn& jacobian = nullptr);

/// Outcome of fitting a parametric model to a sampled target. `model` holds a
/// Trapezoid or Bell; `error` is the root-mean-square deviation over every
/// grid point of the target.
struct FitResult {
  SatisfactionFunction model;
  double error = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Least-squares trapezoid fit. Internally parameterized as corner `a` plus
/// three non-negative widths so the corner ordering holds exactly. The primary
/// start places b/c at the first/last grid times reaching 90% of the target
/// maximum and a/d at the first/last nonzero times; four seeded jitters of
/// that start guard against local minima. Returns the lowest-error converged
/// start (lowest-error overall when none converged). Throws AllZeroTarget.
FitResult fit_trapezoid(const SampledFunction& target);

/// Least-squares fit of a unit-amplitude bell with parameters (mu, sigma);
/// mu starts at the grid argmax, sigma at half the width of the region above
/// half-maximum, with the same jittered multi-start scheme. sigma is bounded
/// below by the grid step. Throws AllZeroTarget.
FitResult fit_bell(const SampledFunction& target);

/// Runs both fitters and keeps the lower error; exact ties go to the
/// trapezoid.
FitResult best_fit(const SampledFunction& target);

}  // namespace fuzzysched
