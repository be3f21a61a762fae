#pragma once

#include "garchcp/detect.hpp"
#include "garchcp/model.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace garchcp {

/// One column of a study table. gamma = 0 means the QMLE; M is required for
/// robust kinds and forbidden for naive ones.
struct TestConfig {
  TestKind kind = TestKind::CusumNaive;
  double gamma = 0.0;
  std::optional<double> M;

  void validate() const;
  /// e.g. "T_n", "T_n^9(R)", "SN_n^16(Q)".
  [[nodiscard]] std::string label() const;
  [[nodiscard]] std::optional<TruncationSpec> truncation() const;

  friend bool operator==(const TestConfig&, const TestConfig&) = default;
};

struct ChangeSpec {
  double fraction = 0.5;  // change after observation floor(n * fraction)
  GarchParams post;
};

struct McScenario {
  std::string name;
  GarchParams base{1.0, 0.3, 0.4};
  std::optional<ChangeSpec> change;
  ContaminationSpec contamination;
  std::size_t n = 500;
  std::size_t reps = 500;
  double alpha = 0.05;
  std::size_t burn_in = 1000;
  std::vector<TestConfig> tests;
  std::uint64_t seed = 1;
  FitOptions fit;

  void validate() const;
  /// floor(n * fraction), or nullopt without a change.
  [[nodiscard]] std::optional<RegimeChange> regime_change() const;
};

struct CellResult {
  std::string scenario;
  std::string test;
  std::size_t n = 0;
  std::size_t reps = 0;
  double rate = 0.0;  // rejections / valid
  double se = 0.0;    // sqrt(rate (1 - rate) / valid)
  std::size_t rejections = 0;
  std::size_t valid = 0;
  std::size_t failures = 0;  // non-converged fits or degenerate residuals
  bool aborted = false;      // failures exceeded 5% of reps

  friend bool operator==(const CellResult&, const CellResult&) = default;
};

struct McTable {
  std::vector<CellResult> rows;

  /// Header: scenario,test,n,reps,rate,se,failures,aborted
  void write_csv(std::ostream& out) const;
  [[nodiscard]] const CellResult& find(const std::string& scenario, const std::string& test) const;

  friend bool operator==(const McTable&, const McTable&) = default;
};

class CellAborted : public std::runtime_error {
 public:
  explicit CellAborted(const CellResult& cell);
  const CellResult& cell() const noexcept { return cell_; }

 private:
  CellResult cell_;
};

/// Share of failed replications above which a cell is aborted.
inline constexpr double kMaxFailureShare = 0.05;

/// Runs every test of the scenario on the same simulated paths. Each
/// replication fits once per distinct gamma. Replication i is simulated with
/// derive_seed(scenario.seed, i).
std::vector<CellResult> run_scenario(const McScenario& scenario, unsigned workers = 1);

/// One cell. Throws CellAborted when more than 5% of fits fail.
CellResult run_cell(const McScenario& scenario, const TestConfig& test, unsigned workers = 1);

/// All scenario x test cells, in input order. Aborted cells are kept and flagged.
McTable run_study(const std::vector<McScenario>& scenarios, unsigned parallelism = 1);

/// i.i.d. N(0, sigma^2) experiment: X_t = X_t^o + s sign(X_t^o) P_t, with
/// sigma^2 switching from 1 to variance_ratio after n/2 when set. T_n is
/// computed on X_t^2, T_n^R on min(X_t^2, M); both use the sup-bridge
/// critical value.
struct IntroConfig {
  std::size_t n = 500;
  std::size_t reps = 2000;
  double p = 0.0;
  double s = 0.0;
  std::optional<double> variance_ratio;
  double M = 9.0;
  double alpha = 0.05;
  std::uint64_t seed = 1;
};

struct IntroResult {
  double naive_rate = 0.0;
  double robust_rate = 0.0;
  double naive_se = 0.0;
  double robust_se = 0.0;
};

IntroResult intro_example(const IntroConfig& config, unsigned workers = 1);

/// One intro sample (exposed for tests).
std::vector<double> simulate_intro(std::size_t n, double p, double s,
                                   std::optional<double> variance_ratio, std::uint64_t seed);

}  // namespace garchcp
