#include "garchcp/detect.hpp"
#include "garchcp/rng.hpp"

#include "properties.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <stdexcept>

using namespace garchcp;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

std::vector<double> squared_normals(std::size_t n, std::uint64_t seed, double shift_after = 0.0) {
  Engine rng(seed);
  std::normal_distribution<double> normal;
  std::vector<double> out(n);
  for (std::size_t t = 0; t < n; ++t) {
    const double z = normal(rng);
    out[t] = z * z + (t >= n / 2 ? shift_after : 0.0);
  }
  return out;
}

}  // namespace

TEST_CASE("truncation examples", "[detect]") {
  CHECK(truncate(4.0, {9.0, 0.0}) == 4.0);
  CHECK(truncate(25.0, {9.0, 0.0}) == 9.0);
  CHECK(truncate(9.0, {9.0, 0.0}) == 9.0);
  CHECK_THAT(truncate(9.0, {9.0, 1.0}), WithinAbs(8.75, 1e-15));
  CHECK(truncate(7.9, {9.0, 1.0}) == 7.9);
  CHECK(truncate(10.0, {9.0, 1.0}) == 9.0);
  CHECK_THROWS_AS(truncate(-1.0, {9.0, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(TruncationSpec({0.0, 0.0}).validate(), std::invalid_argument);
  CHECK_THROWS_AS(TruncationSpec({9.0, 9.0}).validate(), std::invalid_argument);
  CHECK_THROWS_AS(TruncationSpec({9.0, -1.0}).validate(), std::invalid_argument);
  const std::vector<double> v{1.0, 10.0, 30.0};
  CHECK(truncate_all(v, {9.0, 0.0}) == std::vector<double>{1.0, 9.0, 9.0});
}

TEST_CASE("test kind names", "[detect]") {
  for (auto k : {TestKind::CusumNaive, TestKind::CusumRobust, TestKind::SnNaive, TestKind::SnRobust}) {
    CHECK(parse_test_kind(to_string(k)) == k);
  }
  CHECK(parse_test_kind("SnRobust") == TestKind::SnRobust);
  CHECK_THROWS_AS(parse_test_kind("cusum"), std::invalid_argument);
  CHECK(limit_of(TestKind::SnNaive) == LimitKind::SnFunctional);
  CHECK(limit_of(TestKind::CusumRobust) == LimitKind::SupBridge);
}

TEST_CASE("cusum process and change location", "[detect]") {
  const std::vector<double> v{0.0, 0.0, 1.0, 1.0};
  const auto d = cusum_process(v);
  CHECK(d[1] == 1.0);
  CHECK(d.back() == 0.0);
  CHECK(d == testing::brute_cusum(v));
  CHECK(locate_change(std::vector<double>{0, 0, 0, 1, 1, 1}) == 3);
  CHECK(locate_change(std::vector<double>(10, 2.5)) == 1);
  // Ties resolve to the smallest index: D = (1, 0, 1, 0).
  CHECK(locate_change(std::vector<double>{1, -1, 1, -1}) == 1);
  CHECK_THROWS_AS(cusum_process(std::vector<double>{1.0}), std::invalid_argument);
}

TEST_CASE("cusum test statistic", "[detect]") {
  const std::vector<double> v{0.0, 0.0, 1.0, 1.0};
  // max D = 1, tau^2 = 1/4, statistic = 1 / (2 * 0.5).
  const TestResult r = cusum_test(v, 0.05);
  CHECK_THAT(r.statistic, WithinRel(1.0, 1e-15));
  CHECK_THAT(*r.tau_hat_sq, WithinRel(0.25, 1e-15));
  CHECK(r.k_hat == 2);
  CHECK(r.kind == TestKind::CusumNaive);
  CHECK(r.critical_value == critical_value(LimitKind::SupBridge, 0.05));
  CHECK(r.reject == (r.statistic > r.critical_value));
  CHECK_FALSE(r.M_used);
  CHECK(cusum_test(v, 1.0).reject);
  CHECK_THROWS_WITH(cusum_test(std::vector<double>(5, 3.0), 0.05),
                    ContainsSubstring("degenerate residuals"));
}

TEST_CASE("self-normalizer examples", "[detect]") {
  const std::vector<double> v{1.0, 0.0, 0.0, 0.0};
  const auto s = self_normalizer(v);
  REQUIRE(s.size() == 3);
  CHECK_THAT(s[1], WithinAbs(0.25, 1e-15));
  for (double x : self_normalizer(std::vector<double>(20, 4.0))) CHECK(x == 0.0);
  const auto random = squared_normals(50, 1);
  const auto fast = self_normalizer(random);
  const auto slow = testing::brute_self_normalizer(random);
  for (std::size_t k = 0; k < fast.size(); ++k) CHECK_THAT(fast[k], WithinRel(slow[k], 1e-10));
}

TEST_CASE("sn test", "[detect]") {
  CHECK_THROWS_AS(sn_test(std::vector<double>{1, 2, 3}, 0.05), std::invalid_argument);
  CHECK_THROWS_WITH(sn_test(std::vector<double>(10, 1.0), 0.05),
                    ContainsSubstring("degenerate residuals"));
  const auto v = squared_normals(400, 2);
  const TestResult r = sn_test(v, 0.05);
  CHECK(r.kind == TestKind::SnNaive);
  CHECK_FALSE(r.tau_hat_sq);
  CHECK(r.k_hat == locate_change(v));
  CHECK(r.reject == (r.statistic > r.critical_value));
  // Brute-force statistic.
  const auto d = cusum_process(v);
  const auto V = testing::brute_self_normalizer(v);
  double best = 0.0;
  for (std::size_t k = 0; k + 1 < v.size(); ++k) {
    best = std::max(best, static_cast<double>(v.size()) * d[k] * d[k] / V[k]);
  }
  CHECK_THAT(r.statistic, WithinRel(best, 1e-10));
  // Constant head runs make early V vanish; those k are skipped.
  auto capped = v;
  for (std::size_t t = 0; t < 100; ++t) capped[t] = 9.0;
  CHECK(std::isfinite(sn_test(capped, 0.05, TestKind::SnRobust).statistic));
}

TEST_CASE("null rejection rates on i.i.d. squared normals", "[detect][slow]") {
  const int reps = 2000;
  int cusum_rej = 0, sn_rej = 0;
  for (int i = 0; i < reps; ++i) {
    const auto v = squared_normals(500, derive_seed(10, i));
    cusum_rej += cusum_test(truncate_all(v, {9.0, 0.0}), 0.05, TestKind::CusumRobust).reject;
    sn_rej += sn_test(v, 0.05).reject;
  }
  const double cusum_rate = cusum_rej / double(reps);
  const double sn_rate = sn_rej / double(reps);
  CHECK(cusum_rate >= 0.025);
  CHECK(cusum_rate <= 0.055);
  CHECK(sn_rate >= 0.04);
  CHECK(sn_rate <= 0.07);
}

TEST_CASE("mean shift consistency", "[detect][slow]") {
  const int reps = 300;
  int cusum_rej = 0, sn_rej = 0;
  for (int i = 0; i < reps; ++i) {
    const auto v = squared_normals(500, derive_seed(11, i), 1.0);
    cusum_rej += cusum_test(v, 0.05).reject;
    sn_rej += sn_test(v, 0.05).reject;
  }
  CHECK(cusum_rej >= 0.99 * reps);
  CHECK(sn_rej >= 0.95 * reps);
}

TEST_CASE("pipeline decomposition", "[detect]") {
  const auto x = simulate({1.0, 0.3, 0.4}, 800, 500, {OutlierKind::Innovation, 0.01, 10.0},
                          std::nullopt, 13);
  const TruncationSpec trunc{9.0, 0.0};
  const TestResult end_to_end = run_test(x, TestKind::CusumRobust, 0.1, trunc, 0.05);
  const FitResult f = fit(x, 0.1);
  const TestResult manual =
      cusum_test(truncate_all(residuals_squared(x, f.params), trunc), 0.05, TestKind::CusumRobust);
  CHECK(end_to_end.statistic == manual.statistic);
  CHECK(end_to_end.k_hat == manual.k_hat);
  CHECK(end_to_end.M_used == 9.0);
  CHECK(end_to_end.gamma == 0.1);
  CHECK(end_to_end.fit_params == f.params);
  CHECK(end_to_end.fit_converged == f.converged);
  CHECK(test_inputs(x, f.params, trunc) == truncate_all(residuals_squared(x, f.params), trunc));

  const TestResult via_fit = run_test_with_fit(x, f, TestKind::SnRobust, trunc, 0.05);
  CHECK(via_fit.statistic == sn_test(test_inputs(x, f.params, trunc), 0.05).statistic);

  CHECK_THROWS_AS(run_test(x, TestKind::CusumNaive, 0.0, trunc, 0.05), std::invalid_argument);
  CHECK_THROWS_AS(run_test(x, TestKind::SnRobust, 0.1, std::nullopt, 0.05), std::invalid_argument);
}

TEST_CASE("located change converges to the true fraction", "[detect][slow]") {
  const GarchParams before{1.0, 0.3, 0.4};
  const GarchParams after{2.0, 0.3, 0.4};
  const std::size_t n = 2000;
  int rejecting = 0, near = 0;
  for (int i = 0; i < 100; ++i) {
    const auto x = simulate(before, n, 1000, {}, RegimeChange{n / 2, after}, derive_seed(14, i));
    const TestResult r = run_test(x, TestKind::CusumRobust, 0.1, TruncationSpec{}, 0.05);
    if (!r.reject) continue;
    ++rejecting;
    near += std::abs(static_cast<double>(r.k_hat) / n - 0.5) <= 0.05;
  }
  REQUIRE(rejecting >= 50);
  CHECK(near >= 0.9 * rejecting);
}
