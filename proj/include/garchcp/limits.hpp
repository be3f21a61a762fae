#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace garchcp {

/// Limiting null laws of the test statistics.
enum class LimitKind {
  SupBridge,     // sup_t |B(t) - t B(1)|  (CUSUM tests)
  SnFunctional,  // sup_t (B(t) - t B(1))^2 / V(t)  (self-normalized tests)
};

std::string_view to_string(LimitKind kind);
LimitKind parse_limit_kind(std::string_view text);

struct QuantileTable {
  LimitKind kind = LimitKind::SupBridge;
  std::size_t grid_n = 0;
  std::size_t reps = 0;
  std::uint64_t seed = 0;
  std::map<double, double> quantiles;  // probability level -> quantile

  /// Throws if `level` is not tabulated.
  [[nodiscard]] double at(double level) const;
  /// Linear interpolation between tabulated levels; explicit opt-in.
  [[nodiscard]] double interpolate(double level) const;
};

struct LimitSimulation {
  QuantileTable table;
  std::vector<double> draws;  // sorted
};

/// Simulates `reps` draws of the limit on a grid of `grid_n` steps and
/// tabulates the empirical quantiles at 0.90, 0.95, 0.99 and `extra_levels`.
///
/// SupBridge draws use the exact conditional law of the bridge maximum between
/// grid points, so they carry no discretization bias. SnFunctional draws
/// evaluate V(t) by left-endpoint Riemann sums and take the sup over interior
/// grid points. Replication i uses derive_seed(seed, i), so results do not
/// depend on `workers`.
LimitSimulation simulate_limit_draws(LimitKind kind, std::size_t grid_n, std::size_t reps,
                                     std::uint64_t seed, const std::vector<double>& extra_levels = {},
                                     unsigned workers = 1);

QuantileTable simulate_limit(LimitKind kind, std::size_t grid_n, std::size_t reps,
                             std::uint64_t seed, const std::vector<double>& extra_levels = {},
                             unsigned workers = 1);

/// One draw of each functional from a given path of Gaussian increments
/// z_1..z_grid_n (B(i / grid_n) = (z_1 + ... + z_i) / sqrt(grid_n)).
double sn_functional_from_increments(const std::vector<double>& increments);
double sup_bridge_from_increments(const std::vector<double>& increments);

/// Kolmogorov distribution function 1 - 2 sum_{j>=1} (-1)^{j-1} exp(-2 j^2 x^2).
/// Returns 0 for x <= 0.
double kolmogorov_cdf(double x);

/// Empirical quantile (order statistic ceil(level * n)) of sorted draws.
double empirical_quantile(const std::vector<double>& sorted_draws, double level);

/// CSV with header `kind,level,quantile,grid_n,reps,seed`.
void write_quantile_csv(std::ostream& out, const std::vector<QuantileTable>& tables);
std::vector<QuantileTable> read_quantile_csv(std::istream& in);

/// Critical values looked up from quantile tables.
class CriticalValues {
 public:
  /// Tables shipped with the library (grid_n = 1e4, reps = 1e5, seed = 20240101).
  static const CriticalValues& embedded();

  explicit CriticalValues(std::vector<QuantileTable> tables);

  /// (1 - alpha) quantile. alpha = 1 gives 0. Levels missing from the table
  /// throw unless `interpolate` is set.
  [[nodiscard]] double critical_value(LimitKind kind, double alpha, bool interpolate = false) const;
  [[nodiscard]] const QuantileTable& table(LimitKind kind) const;
  [[nodiscard]] const std::vector<QuantileTable>& tables() const { return tables_; }

 private:
  std::vector<QuantileTable> tables_;
};

/// Shorthand for CriticalValues::embedded().critical_value(kind, alpha).
double critical_value(LimitKind kind, double alpha);

}  // namespace garchcp
