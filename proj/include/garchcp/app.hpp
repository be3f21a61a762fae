#pragma once

#include "garchcp/detect.hpp"
#include "garchcp/estimate.hpp"

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace garchcp::app {

/// Input file problem; the message names the file and, when known, the line.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PriceSeries {
  std::vector<std::string> dates;  // ISO 8601 (YYYY-MM-DD), strictly increasing
  std::vector<double> prices;      // > 0
};

struct CsvColumns {
  std::string date = "date";
  std::string price = "price";
};

/// Reads a comma-separated file with a header row. Rejects malformed dates,
/// missing or non-positive prices and duplicate or decreasing dates.
PriceSeries load_csv(const std::filesystem::path& path, const CsvColumns& columns = {});
PriceSeries parse_price_csv(std::istream& in, const std::string& source,
                            const CsvColumns& columns = {});

/// Reads one numeric column (e.g. precomputed returns) from a CSV with a header.
std::vector<double> load_column(const std::filesystem::path& path, const std::string& column);

/// r_t = 100 (ln S_t - ln S_{t-1}); length prices - 1. Needs >= 2 prices.
std::vector<double> log_returns(const PriceSeries& prices);

/// Lower-case hex SHA-256 of the file contents.
std::string sha256_file(const std::filesystem::path& path);
std::string sha256_hex(std::string_view bytes);

struct InputInfo {
  std::string path;
  std::string sha256;
  std::string source;  // "prices" or "returns"
  std::size_t observations = 0;

  friend bool operator==(const InputInfo&, const InputInfo&) = default;
};

struct FitSummary {
  std::string label;  // "QMLE" or "MDPDE(gamma)"
  double gamma = 0.0;
  GarchParams params;
  double objective = 0.0;
  int iterations = 0;
  bool converged = false;

  friend bool operator==(const FitSummary&, const FitSummary&) = default;
};

struct ReportTest {
  std::string label;
  TestResult result;
  bool reject_1pct = false;
  bool reject_5pct = false;

  friend bool operator==(const ReportTest&, const ReportTest&) = default;
};

struct SegmentSummary {
  std::size_t start = 1;
  std::size_t end = 0;
  std::optional<FitSummary> fit;
  std::optional<ReportTest> test;

  friend bool operator==(const SegmentSummary&, const SegmentSummary&) = default;
};

/// Output of `test` and `segment`. Contains no timestamps, so the same inputs
/// give byte-identical JSON.
struct Report {
  std::string command;
  InputInfo input;
  std::map<std::string, std::string> config;
  std::vector<FitSummary> fits;
  std::vector<ReportTest> tests;
  std::vector<std::size_t> change_points;
  std::vector<SegmentSummary> segments;
  std::vector<std::string> warnings;

  friend bool operator==(const Report&, const Report&) = default;
};

std::string report_to_json(const Report& report);
Report report_from_json(std::string_view text);

FitSummary summarize_fit(const FitResult& fit);

/// Exit codes of the command-line tool.
inline constexpr int kExitNoRejection = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitRejection = 2;

/// Entry point of the `garchcp` tool; returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace garchcp::app
