#include "garchcp/estimate.hpp"

#include "optimizer.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace garchcp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_finite(std::span<const double> series) {
  for (std::size_t t = 0; t < series.size(); ++t) {
    if (!std::isfinite(series[t])) {
      throw std::invalid_argument("non-finite observation at t=" + std::to_string(t + 1));
    }
  }
}

double checked_init(std::span<const double> series) {
  if (series.empty()) throw std::invalid_argument("empty series");
  const double v = sample_second_moment(series);
  if (!(v > 0.0)) {
    throw std::invalid_argument("degenerate series: all observations are zero");
  }
  return v;
}

// Runs the variance recursion with its parameter derivatives and feeds
// (x^2, sigma^2, dsigma^2) to `term`, which returns the per-observation loss
// and writes d loss / d sigma^2.
template <class Term>
ObjectiveValue accumulate(std::span<const double> series, const GarchParams& p, double init,
                          bool with_gradient, Term&& term) {
  ObjectiveValue out;
  double sigma2 = init;
  double d_omega = 0.0, d_alpha = 0.0, d_beta = 0.0;
  double sum = 0.0, g0 = 0.0, g1 = 0.0, g2 = 0.0;
  double prev_x2 = 0.0;
  for (std::size_t t = 0; t < series.size(); ++t) {
    if (t > 0) {
      if (with_gradient) {
        d_omega = 1.0 + p.beta * d_omega;
        d_alpha = prev_x2 + p.beta * d_alpha;
        d_beta = sigma2 + p.beta * d_beta;
      }
      sigma2 = p.omega + p.alpha * prev_x2 + p.beta * sigma2;
    }
    if (!(sigma2 > 0.0)) {
      out.value = kInf;
      return out;
    }
    const double x2 = series[t] * series[t];
    double dl = 0.0;
    sum += term(x2, sigma2, dl);
    if (with_gradient) {
      g0 += dl * d_omega;
      g1 += dl * d_alpha;
      g2 += dl * d_beta;
    }
    prev_x2 = x2;
  }
  const double inv_n = 1.0 / static_cast<double>(series.size());
  out.value = sum * inv_n;
  out.gradient = {g0 * inv_n, g1 * inv_n, g2 * inv_n};
  return out;
}

ObjectiveValue qmle_impl(std::span<const double> series, const GarchParams& p, double init,
                         bool with_gradient) {
  return accumulate(series, p, init, with_gradient, [](double x2, double s2, double& dl) {
    const double r = x2 / s2;
    dl = (1.0 - r) / s2;
    return std::log(s2) + r;
  });
}

ObjectiveValue dpd_impl(std::span<const double> series, const GarchParams& p, double gamma,
                        double init, bool with_gradient) {
  const double c = std::pow(2.0 * std::numbers::pi, -0.5 * gamma);
  const double a = 1.0 / std::sqrt(1.0 + gamma);
  const double b = 1.0 + 1.0 / gamma;
  return accumulate(series, p, init, with_gradient, [=](double x2, double s2, double& dl) {
    const double r = x2 / s2;
    const double e = std::exp(-0.5 * gamma * r);
    const double w = c * std::exp(-0.5 * gamma * std::log(s2));
    const double bracket = a - b * e;
    dl = w * (0.5 * gamma / s2) * (-bracket - b * e * r);
    return w * bracket;
  });
}

void require_gamma(double gamma) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw std::invalid_argument("dpd_objective: gamma must be > 0 (use qmle_objective for 0)");
  }
}

}  // namespace

double sample_second_moment(std::span<const double> series) {
  if (series.empty()) return 0.0;
  double s = 0.0;
  for (double x : series) s += x * x;
  return s / static_cast<double>(series.size());
}

std::vector<double> residuals_squared(std::span<const double> series, const GarchParams& params) {
  require_finite(series);
  const double init = checked_init(series);
  const auto path = variance_path(series, params, init);
  std::vector<double> out(series.size());
  for (std::size_t t = 0; t < series.size(); ++t) {
    out[t] = series[t] * series[t] / path.values[t];
  }
  return out;
}

double qmle_objective(std::span<const double> series, const GarchParams& params) {
  return qmle_objective(series, params, checked_init(series));
}

double qmle_objective(std::span<const double> series, const GarchParams& params, double init) {
  return qmle_impl(series, params, init, false).value;
}

ObjectiveValue qmle_objective_gradient(std::span<const double> series, const GarchParams& params,
                                       double init) {
  return qmle_impl(series, params, init, true);
}

double dpd_objective(std::span<const double> series, const GarchParams& params, double gamma) {
  require_gamma(gamma);
  return dpd_objective(series, params, gamma, checked_init(series));
}

double dpd_objective(std::span<const double> series, const GarchParams& params, double gamma,
                     double init) {
  require_gamma(gamma);
  return dpd_impl(series, params, gamma, init, false).value;
}

ObjectiveValue dpd_objective_gradient(std::span<const double> series, const GarchParams& params,
                                      double gamma, double init) {
  require_gamma(gamma);
  return dpd_impl(series, params, gamma, init, true);
}

namespace {

constexpr double kOmegaLower = 1e-6;
constexpr double kOmegaUpper = 10.0;  // relative to the sample second moment
constexpr double kCoefUpper = 0.999;
constexpr double kPersistenceMax = 0.9999;
constexpr std::size_t kMinFitLength = 20;

void check_fit_input(std::span<const double> series, double gamma) {
  if (series.size() < kMinFitLength) {
    throw std::invalid_argument("fit: need at least " + std::to_string(kMinFitLength) +
                                " observations, got " + std::to_string(series.size()));
  }
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) {
    throw std::invalid_argument("fit: gamma must be finite and >= 0");
  }
  require_finite(series);
}

}  // namespace

FitResult fit_from(std::span<const double> series, double gamma, const GarchParams& start,
                   const FitOptions& opts) {
  check_fit_input(series, gamma);
  start.validate();
  const double v = checked_init(series);

  // Optimize over z = (ln(omega / v), alpha, beta). The log keeps omega well
  // scaled even when outliers inflate v by many orders of magnitude.
  auto to_params = [v](const Eigen::Vector3d& z) {
    return GarchParams{std::exp(z[0]) * v, z[1], z[2]};
  };
  auto eval = [&](const Eigen::Vector3d& z, bool grad) {
    const GarchParams p = to_params(z);
    return gamma > 0.0 ? dpd_impl(series, p, gamma, v, grad) : qmle_impl(series, p, v, grad);
  };
  detail::ValueFn value = [&](const Eigen::Vector3d& z) { return eval(z, false).value; };
  detail::ValueGradFn value_grad = [&](const Eigen::Vector3d& z, Eigen::Vector3d& g) {
    const ObjectiveValue o = eval(z, true);
    g = {o.gradient[0] * std::exp(z[0]) * v, o.gradient[1], o.gradient[2]};
    return o.value;
  };

  detail::FeasibleSet set;
  set.lower = {std::log(kOmegaLower / v), 0.0, 0.0};
  set.upper = {std::log(kOmegaUpper), kCoefUpper, kCoefUpper};
  set.pair_max = kPersistenceMax;

  detail::MinimizeOptions mopts;
  mopts.max_iter = opts.max_iter;
  mopts.grad_tol = opts.grad_tol;
  mopts.rel_tol = opts.rel_tol;
  mopts.record_trace = opts.record_trace;

  const Eigen::Vector3d z0{std::log(start.omega / v), start.alpha, start.beta};
  const detail::MinimizeResult m = detail::minimize_projected_newton(value, value_grad, z0, set, mopts);

  FitResult r;
  r.params = to_params(m.x);
  r.objective = m.value;
  r.iterations = m.iterations;
  r.converged = m.converged && std::isfinite(m.value);
  r.gamma = gamma;
  r.projected_gradient = m.projected_gradient;
  r.trace = m.trace;
  return r;
}

FitResult fit(std::span<const double> series, double gamma, const FitOptions& opts) {
  check_fit_input(series, gamma);
  const double v = checked_init(series);
  const GarchParams starts[] = {
      {v / 2.0, 0.05, 0.90},
      {v / 2.0, 0.10, 0.80},
      {v / 3.0, 0.30, 0.40},
      {v, 0.05, 0.05},
  };
  FitResult best;
  bool have = false;
  for (const auto& s : starts) {
    FitResult r = fit_from(series, gamma, s, opts);
    if (!have || r.objective < best.objective) {
      best = std::move(r);
      have = true;
    }
  }
  return best;
}

}  // namespace garchcp
