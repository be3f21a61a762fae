#include "garchcp/detect.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace garchcp {

void TruncationSpec::validate() const {
  if (!(M > 0.0) || !std::isfinite(M)) throw std::invalid_argument("truncation M must be > 0");
  if (!(delta >= 0.0 && delta < M)) {
    throw std::invalid_argument("truncation delta must satisfy 0 <= delta < M");
  }
}

double truncate(double x, const TruncationSpec& spec) {
  if (!(x >= 0.0)) throw std::invalid_argument("truncate: input must be >= 0");
  const double lo = spec.M - spec.delta;
  const double hi = spec.M + spec.delta;
  if (x < lo) return x;
  if (x < hi) {
    const double d = x - hi;
    return spec.M - d * d / (4.0 * spec.delta);
  }
  return spec.M;
}

std::vector<double> truncate_all(std::span<const double> values, const TruncationSpec& spec) {
  spec.validate();
  std::vector<double> out(values.size());
  std::transform(values.begin(), values.end(), out.begin(),
                 [&](double x) { return truncate(x, spec); });
  return out;
}

std::string_view to_string(TestKind kind) {
  switch (kind) {
    case TestKind::CusumNaive:
      return "cusum-naive";
    case TestKind::CusumRobust:
      return "cusum-robust";
    case TestKind::SnNaive:
      return "sn-naive";
    case TestKind::SnRobust:
      return "sn-robust";
  }
  return "unknown";
}

TestKind parse_test_kind(std::string_view text) {
  if (text == "cusum-naive" || text == "CusumNaive") return TestKind::CusumNaive;
  if (text == "cusum-robust" || text == "CusumRobust") return TestKind::CusumRobust;
  if (text == "sn-naive" || text == "SnNaive") return TestKind::SnNaive;
  if (text == "sn-robust" || text == "SnRobust") return TestKind::SnRobust;
  throw std::invalid_argument("unknown test kind '" + std::string(text) + "'");
}

std::vector<double> cusum_process(std::span<const double> values) {
  const std::size_t n = values.size();
  if (n < 2) throw std::invalid_argument("cusum_process: need n >= 2");
  // D_k is invariant to shifts; centering on the first value makes constant
  // inputs give exact zeros.
  const double shift = values[0];
  double total = 0.0;
  for (double v : values) total += v - shift;
  std::vector<double> d(n);
  double partial = 0.0;
  const double nd = static_cast<double>(n);
  for (std::size_t k = 1; k <= n; ++k) {
    partial += values[k - 1] - shift;
    d[k - 1] = std::abs(partial - static_cast<double>(k) / nd * total);
  }
  d[n - 1] = 0.0;
  return d;
}

namespace {

std::size_t argmax_first(const std::vector<double>& d) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < d.size(); ++k) {
    if (d[k] > d[best]) best = k;
  }
  return best + 1;
}

bool all_equal(std::span<const double> values) {
  return std::adjacent_find(values.begin(), values.end(), std::not_equal_to<>()) == values.end();
}

}  // namespace

std::size_t locate_change(std::span<const double> values) {
  return argmax_first(cusum_process(values));
}

TestResult cusum_test(std::span<const double> values, double alpha, TestKind kind) {
  const std::size_t n = values.size();
  if (n < 2) throw std::invalid_argument("cusum_test: need n >= 2");
  if (all_equal(values)) throw std::invalid_argument("degenerate residuals: constant input");
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  var /= static_cast<double>(n);
  if (!(var > 0.0)) throw std::invalid_argument("degenerate residuals: zero variance");

  const auto d = cusum_process(values);
  const std::size_t k_hat = argmax_first(d);

  TestResult r;
  r.kind = kind;
  r.alpha = alpha;
  r.statistic = d[k_hat - 1] / (std::sqrt(static_cast<double>(n)) * std::sqrt(var));
  r.critical_value = critical_value(LimitKind::SupBridge, alpha);
  r.reject = r.statistic > r.critical_value;
  r.k_hat = k_hat;
  r.tau_hat_sq = var;
  return r;
}

std::vector<double> self_normalizer(std::span<const double> values) {
  const std::size_t n = values.size();
  if (n < 2) throw std::invalid_argument("self_normalizer: need n >= 2");
  const double nd = static_cast<double>(n);

  // V_{n,k} is invariant to shifts of the input; center to limit cancellation.
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= nd;
  std::vector<double> x(n);
  for (std::size_t t = 0; t < n; ++t) x[t] = values[t] - mean;

  // Forward: S_t prefix sums, cumulative sums of S_t^2 and t S_t (t = 1..k).
  std::vector<double> s(n + 1, 0.0), s_sq(n + 1, 0.0), t_s(n + 1, 0.0);
  for (std::size_t t = 1; t <= n; ++t) {
    s[t] = s[t - 1] + x[t - 1];
    s_sq[t] = s_sq[t - 1] + s[t] * s[t];
    t_s[t] = t_s[t - 1] + static_cast<double>(t) * s[t];
  }
  // Backward: R_t = sum_{j>=t} x_j, suffix sums of R_t^2 and (n - t + 1) R_t.
  std::vector<double> r(n + 2, 0.0), r_sq(n + 2, 0.0), u_r(n + 2, 0.0);
  for (std::size_t t = n; t >= 1; --t) {
    r[t] = r[t + 1] + x[t - 1];
    r_sq[t] = r_sq[t + 1] + r[t] * r[t];
    u_r[t] = u_r[t + 1] + static_cast<double>(n - t + 1) * r[t];
  }

  // V_{n,k} = 0 exactly when x_1..x_k and x_{k+1}..x_n are each constant.
  std::size_t head = 1;
  while (head < n && values[head] == values[0]) ++head;
  std::size_t tail = 1;
  while (tail < n && values[n - 1 - tail] == values[n - 1]) ++tail;

  std::vector<double> v(n - 1);
  for (std::size_t k = 1; k < n; ++k) {
    if (k <= head && n - k <= tail) {
      v[k - 1] = 0.0;
      continue;
    }
    const double kd = static_cast<double>(k);
    const double sk = s[k] / kd;
    const double forward =
        s_sq[k] - 2.0 * sk * t_s[k] + sk * sk * kd * (kd + 1.0) * (2.0 * kd + 1.0) / 6.0;
    const double md = static_cast<double>(n - k);
    const double rk = r[k + 1] / md;
    const double backward =
        r_sq[k + 1] - 2.0 * rk * u_r[k + 1] + rk * rk * md * (md + 1.0) * (2.0 * md + 1.0) / 6.0;
    v[k - 1] = std::max(0.0, forward) + std::max(0.0, backward);
  }
  return v;
}

TestResult sn_test(std::span<const double> values, double alpha, TestKind kind) {
  const std::size_t n = values.size();
  if (n < 4) throw std::invalid_argument("sn_test: need n >= 4");
  const auto d = cusum_process(values);
  const auto v = self_normalizer(values);
  const double nd = static_cast<double>(n);
  double stat = -1.0;
  for (std::size_t k = 1; k < n; ++k) {
    if (!(v[k - 1] > 0.0)) continue;
    stat = std::max(stat, nd * d[k - 1] * d[k - 1] / v[k - 1]);
  }
  if (stat < 0.0) {
    throw std::invalid_argument("degenerate residuals: self-normalizer vanishes for every k");
  }
  TestResult r;
  r.kind = kind;
  r.alpha = alpha;
  r.statistic = stat;
  r.critical_value = critical_value(LimitKind::SnFunctional, alpha);
  r.reject = r.statistic > r.critical_value;
  r.k_hat = argmax_first(d);
  return r;
}

TestResult test_values(std::span<const double> values, TestKind kind, double alpha) {
  return is_sn(kind) ? sn_test(values, alpha, kind) : cusum_test(values, alpha, kind);
}

std::vector<double> test_inputs(std::span<const double> series, const GarchParams& params,
                                const std::optional<TruncationSpec>& trunc) {
  auto resid = residuals_squared(series, params);
  if (trunc) return truncate_all(resid, *trunc);
  return resid;
}

namespace {

void check_kind_trunc(TestKind kind, const std::optional<TruncationSpec>& trunc) {
  if (is_robust(kind) && !trunc) {
    throw std::invalid_argument(std::string(to_string(kind)) + " requires a truncation spec");
  }
  if (!is_robust(kind) && trunc) {
    throw std::invalid_argument(std::string(to_string(kind)) + " does not take a truncation spec");
  }
}

}  // namespace

TestResult run_test_with_fit(std::span<const double> series, const FitResult& fit, TestKind kind,
                             const std::optional<TruncationSpec>& trunc, double alpha) {
  check_kind_trunc(kind, trunc);
  const auto inputs = test_inputs(series, fit.params, trunc);
  TestResult r = test_values(inputs, kind, alpha);
  if (trunc) r.M_used = trunc->M;
  r.gamma = fit.gamma;
  r.fit_params = fit.params;
  r.fit_converged = fit.converged;
  return r;
}

TestResult run_test(std::span<const double> series, TestKind kind, double gamma,
                    const std::optional<TruncationSpec>& trunc, double alpha,
                    const FitOptions& fit_opts) {
  check_kind_trunc(kind, trunc);
  if (trunc) trunc->validate();
  const FitResult f = fit(series, gamma, fit_opts);
  return run_test_with_fit(series, f, kind, trunc, alpha);
}

}  // namespace garchcp
