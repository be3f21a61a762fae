#pragma once

#include "garchcp/mcstudy.hpp"

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace garchcp {

/// Schema violation; the message starts with the JSON path of the bad field,
/// e.g. "scenarios[1].base.alpha: expected a number".
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Grid of the i.i.d. variance-change experiment: every combination of n,
/// contamination and variance ratio (1 = no change) becomes one row pair.
struct IntroStudy {
  std::vector<std::size_t> n{100, 300, 500};
  std::size_t reps = 2000;
  double alpha = 0.05;
  double M = 9.0;
  std::vector<std::pair<double, double>> contaminations{{0.0, 0.0}, {0.01, 5.0}};  // (p, s)
  std::vector<double> variance_ratios{1.0, 2.0};
  std::uint64_t seed = 1;
};

struct StudyConfig {
  enum class Kind { Intro, Garch };
  Kind kind = Kind::Garch;
  IntroStudy intro;
  std::vector<McScenario> scenarios;
  unsigned parallelism = 1;
};

StudyConfig parse_study_config(std::string_view json_text);
/// Throws ConfigError naming the path when the file cannot be read.
StudyConfig load_study_config(const std::filesystem::path& path);

/// Overrides reps in every cell (useful for quick runs).
void override_reps(StudyConfig& config, std::size_t reps);

/// Runs the configured grid. Intro rows are named like "size clean" or
/// "power(x2) p=0.01 s=5" and carry the tests "T_n" and "T_n^R".
McTable run_study_config(const StudyConfig& config, std::optional<unsigned> parallelism = {});

}  // namespace garchcp
