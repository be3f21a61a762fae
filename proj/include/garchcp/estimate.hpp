#pragma once

#include "garchcp/model.hpp"

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace garchcp {

struct FitOptions {
  int max_iter = 500;
  double grad_tol = 1e-6;   // max-norm of the projected gradient
  double rel_tol = 1e-10;   // relative objective change between accepted iterates
  bool record_trace = false;
};

struct FitResult {
  GarchParams params;
  double objective = 0.0;
  int iterations = 0;
  bool converged = false;
  double gamma = 0.0;  // 0 = QMLE
  double projected_gradient = 0.0;
  std::vector<double> trace;  // objective at each accepted iterate (record_trace only)
};

struct ObjectiveValue {
  double value = 0.0;
  std::array<double, 3> gradient{};  // d/d(omega, alpha, beta)
};

/// (1/n) sum X_t^2. Used as sigma~^2_1 by every estimation-side recursion.
double sample_second_moment(std::span<const double> series);

/// X_t^2 / sigma~^2_t(params), recursion started at the sample second moment.
std::vector<double> residuals_squared(std::span<const double> series, const GarchParams& params);

/// Gaussian quasi-likelihood (1/n) sum [log sigma~^2_t + X_t^2 / sigma~^2_t].
double qmle_objective(std::span<const double> series, const GarchParams& params);
double qmle_objective(std::span<const double> series, const GarchParams& params, double init);
ObjectiveValue qmle_objective_gradient(std::span<const double> series, const GarchParams& params,
                                       double init);

/// Density power divergence criterion with a Gaussian kernel,
///   (1/n) sum (2 pi)^{-g/2} sigma~_t^{-g} [ (1+g)^{-1/2} - (1 + 1/g) exp(-g X_t^2 / (2 sigma~^2_t)) ],
/// with the minimizer-irrelevant constant 1/g dropped. gamma must be > 0.
double dpd_objective(std::span<const double> series, const GarchParams& params, double gamma);
double dpd_objective(std::span<const double> series, const GarchParams& params, double gamma,
                     double init);
ObjectiveValue dpd_objective_gradient(std::span<const double> series, const GarchParams& params,
                                      double gamma, double init);

/// Minimizes the QMLE (gamma = 0) or DPD (gamma > 0) criterion.
///
/// Box: omega in [1e-6, 10 v], alpha, beta in [0, 0.999], alpha + beta <= 0.9999,
/// where v is the sample second moment. Multi-start from
/// (v/2, .05, .90), (v/2, .10, .80), (v/3, .30, .40), (v, .05, .05); returns the
/// start with the smallest final objective. Requires n >= 20.
FitResult fit(std::span<const double> series, double gamma, const FitOptions& opts = {});

/// Single local minimization from `start`; exposed for tests.
FitResult fit_from(std::span<const double> series, double gamma, const GarchParams& start,
                   const FitOptions& opts = {});

}  // namespace garchcp
