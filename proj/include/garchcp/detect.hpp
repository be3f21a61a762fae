#pragma once

#include "garchcp/estimate.hpp"
#include "garchcp/limits.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace garchcp {

/// Truncation of squared residuals at threshold M.
///
/// delta > 0 gives the C^1 quadratic blend on [M - delta, M + delta);
/// delta = 0 gives the hard cap min(x, M).
struct TruncationSpec {
  double M = 9.0;
  double delta = 0.0;

  void validate() const;
  friend bool operator==(const TruncationSpec&, const TruncationSpec&) = default;
};

/// Truncates one squared residual. Throws on x < 0.
double truncate(double x, const TruncationSpec& spec);
std::vector<double> truncate_all(std::span<const double> values, const TruncationSpec& spec);

enum class TestKind { CusumNaive, CusumRobust, SnNaive, SnRobust };

std::string_view to_string(TestKind kind);
TestKind parse_test_kind(std::string_view text);
[[nodiscard]] inline bool is_robust(TestKind k) noexcept {
  return k == TestKind::CusumRobust || k == TestKind::SnRobust;
}
[[nodiscard]] inline bool is_sn(TestKind k) noexcept {
  return k == TestKind::SnNaive || k == TestKind::SnRobust;
}
[[nodiscard]] inline LimitKind limit_of(TestKind k) noexcept {
  return is_sn(k) ? LimitKind::SnFunctional : LimitKind::SupBridge;
}

struct TestResult {
  TestKind kind = TestKind::CusumNaive;
  double statistic = 0.0;
  double critical_value = 0.0;
  double alpha = 0.05;
  bool reject = false;
  std::size_t k_hat = 1;               // 1-based argmax of the CUSUM numerator
  std::optional<double> tau_hat_sq;    // CUSUM kinds only
  std::optional<double> M_used;        // robust kinds only
  // Estimation metadata, filled by run_test.
  std::optional<double> gamma;
  std::optional<GarchParams> fit_params;
  std::optional<bool> fit_converged;

  friend bool operator==(const TestResult&, const TestResult&) = default;
};

/// D_k = |S_k - (k/n) S_n| for k = 1..n.
std::vector<double> cusum_process(std::span<const double> values);

/// argmax_k D_k, smallest k on ties (1-based).
std::size_t locate_change(std::span<const double> values);

/// max_k D_k / (sqrt(n) tau), tau^2 the divide-by-n variance of the values.
/// Throws on constant input ("degenerate residuals").
TestResult cusum_test(std::span<const double> values, double alpha,
                      TestKind kind = TestKind::CusumNaive);

/// V_{n,k} for k = 1..n-1 (element k-1) in O(n).
std::vector<double> self_normalizer(std::span<const double> values);

/// max over k in [1, n-1] with V_{n,k} > 0 of n D_k^2 / V_{n,k}. Requires n >= 4.
TestResult sn_test(std::span<const double> values, double alpha, TestKind kind = TestKind::SnNaive);

/// Dispatches to cusum_test or sn_test on already-built test inputs.
TestResult test_values(std::span<const double> values, TestKind kind, double alpha);

/// Squared residuals at `fit`, truncated when `trunc` is set.
std::vector<double> test_inputs(std::span<const double> series, const GarchParams& params,
                                const std::optional<TruncationSpec>& trunc);

/// Full pipeline: fit -> squared residuals -> optional truncation -> test.
/// Naive kinds forbid `trunc`; robust kinds require it.
TestResult run_test(std::span<const double> series, TestKind kind, double gamma,
                    const std::optional<TruncationSpec>& trunc, double alpha,
                    const FitOptions& fit_opts = {});

/// Same pipeline with a precomputed fit.
TestResult run_test_with_fit(std::span<const double> series, const FitResult& fit, TestKind kind,
                             const std::optional<TruncationSpec>& trunc, double alpha);

struct SegmentationConfig {
  TestKind kind = TestKind::SnRobust;
  double gamma = 0.1;
  std::optional<TruncationSpec> trunc = TruncationSpec{};
  double alpha = 0.05;
  std::size_t min_segment = 250;
  FitOptions fit;
};

struct Segment {
  std::size_t start = 1;  // 1-based, inclusive
  std::size_t end = 0;    // 1-based, inclusive
  FitResult fit;
  bool fit_failed = false;
  std::optional<TestResult> test;  // last test run on this segment, if any
};

struct SegmentationResult {
  std::vector<std::size_t> change_points;  // 1-based; segment ends at each
  std::vector<Segment> segments;
  std::vector<std::string> warnings;
};

/// Binary segmentation with run_test: split at the located change when the
/// test rejects and the split point lies in (min_segment, len - min_segment);
/// segments shorter than 2 * min_segment are not tested. Each final segment is
/// refit with config.gamma.
SegmentationResult binary_segmentation(std::span<const double> series,
                                       const SegmentationConfig& config);

}  // namespace garchcp
