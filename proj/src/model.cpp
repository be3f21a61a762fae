#include "garchcp/model.hpp"

#include "garchcp/rng.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace garchcp {

bool GarchParams::valid() const noexcept {
  return std::isfinite(omega) && std::isfinite(alpha) && std::isfinite(beta) && omega > 0.0 &&
         alpha >= 0.0 && beta >= 0.0 && alpha + beta < 1.0;
}

void GarchParams::validate() const {
  if (!(std::isfinite(omega) && std::isfinite(alpha) && std::isfinite(beta))) {
    throw std::invalid_argument("GARCH parameters must be finite");
  }
  if (omega <= 0.0) throw std::invalid_argument("omega must be positive");
  if (alpha < 0.0) throw std::invalid_argument("alpha must be non-negative");
  if (beta < 0.0) throw std::invalid_argument("beta must be non-negative");
  if (alpha + beta >= 1.0) {
    throw std::invalid_argument("alpha + beta must be < 1 (got " + std::to_string(alpha + beta) +
                                ")");
  }
}

double GarchParams::unconditional_variance() const {
  validate();
  return omega / (1.0 - alpha - beta);
}

void ContaminationSpec::validate() const {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("contamination p must lie in [0, 1]");
  if (!(s >= 0.0) || !std::isfinite(s)) {
    throw std::invalid_argument("contamination magnitude s must be finite and >= 0");
  }
}

double unconditional_sd(const GarchParams& params) {
  return std::sqrt(params.unconditional_variance());
}

VariancePath variance_path(std::span<const double> series, const GarchParams& params,
                           double init) {
  if (!(init > 0.0) || !std::isfinite(init)) {
    throw std::invalid_argument("variance_path: init must be positive and finite");
  }
  VariancePath path;
  path.init = init;
  path.values.resize(series.size());
  double sigma2 = init;
  for (std::size_t t = 0; t < series.size(); ++t) {
    if (!std::isfinite(series[t])) {
      throw std::invalid_argument("variance_path: non-finite observation at t=" +
                                  std::to_string(t + 1));
    }
    if (t > 0) {
      sigma2 = params.omega + params.alpha * series[t - 1] * series[t - 1] + params.beta * sigma2;
    }
    path.values[t] = sigma2;
  }
  return path;
}

std::vector<double> simulate(const GarchParams& params, std::size_t n, std::size_t burn_in,
                             const ContaminationSpec& contamination,
                             const std::optional<RegimeChange>& change, std::uint64_t seed,
                             SimulationTrace* trace) {
  if (n == 0) throw std::invalid_argument("simulate: n must be positive");
  params.validate();
  contamination.validate();
  if (change) {
    if (change->index < 1 || change->index >= n) {
      throw std::invalid_argument("simulate: change index must lie in [1, n)");
    }
    change->params.validate();
  }

  const double scale_before = contamination.s * unconditional_sd(params);
  const double scale_after = change ? contamination.s * unconditional_sd(change->params) : 0.0;
  const bool io = contamination.kind == OutlierKind::Innovation;
  const bool ao = contamination.kind == OutlierKind::Additive;

  Engine rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);

  if (trace) {
    trace->clean.assign(n, 0.0);
    trace->outlier.assign(n, 0);
    trace->sigma2.assign(n, 0.0);
    trace->outlier_scale.assign(n, 0.0);
  }

  std::vector<double> out(n);
  const std::size_t total = burn_in + n;
  double sigma2 = params.unconditional_variance();
  double prev_x2 = 0.0;
  for (std::size_t i = 0; i < total; ++i) {
    // t is the 1-based index among the kept observations (0 during burn-in).
    const std::size_t t = i >= burn_in ? i - burn_in + 1 : 0;
    const bool switched = change && t > change->index;
    const GarchParams& th = switched ? change->params : params;
    const double scale = switched ? scale_after : scale_before;

    if (i > 0) sigma2 = th.omega + th.alpha * prev_x2 + th.beta * sigma2;

    double eps = normal(rng);
    const double u = uniform(rng);
    const bool outlier = contamination.active() && u < contamination.p;
    if (io && outlier) eps += scale * sign_of(eps);

    const double x = std::sqrt(sigma2) * eps;
    prev_x2 = x * x;

    if (t > 0) {
      double observed = x;
      if (ao && outlier) observed += scale * sign_of(x);
      out[t - 1] = observed;
      if (trace) {
        trace->clean[t - 1] = x;
        trace->outlier[t - 1] = outlier ? 1 : 0;
        trace->sigma2[t - 1] = sigma2;
        trace->outlier_scale[t - 1] = scale;
      }
    }
  }
  return out;
}

}  // namespace garchcp
