#include "garchcp/study_config.hpp"

#include <catch_amalgamated.hpp>

#include <filesystem>
#include <string>

using namespace garchcp;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::StartsWith;

namespace {

const std::string kMinimal = R"({
  "study": "garch",
  "defaults": {"n": [200, 300], "reps": 10, "tests": [{"kind": "cusum-naive"}]},
  "scenarios": [
    {"name": "size", "base": {"omega": 1, "alpha": 0.3, "beta": 0.4}},
    {"name": "power", "base": [1, 0.3, 0.4], "n": 250, "seed": 9,
     "change": {"fraction": 0.4, "post": {"omega": 1.5, "alpha": 0.3, "beta": 0.4}},
     "contamination": {"kind": "io", "p": 0.01, "s": 10},
     "tests": [{"kind": "sn-robust", "gamma": 0.1, "M": 16}]}
  ]
})";

std::string error_of(const std::string& text) {
  try {
    parse_study_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

std::string replaced(const std::string& from, const std::string& to) {
  std::string out = kMinimal;
  out.replace(out.find(from), from.size(), to);
  return out;
}

}  // namespace

TEST_CASE("garch config parsing", "[config]") {
  const StudyConfig cfg = parse_study_config(kMinimal);
  CHECK(cfg.kind == StudyConfig::Kind::Garch);
  CHECK(cfg.parallelism == 1);
  REQUIRE(cfg.scenarios.size() == 3);
  CHECK(cfg.scenarios[0].n == 200);
  CHECK(cfg.scenarios[1].n == 300);
  CHECK(cfg.scenarios[0].reps == 10);
  CHECK_FALSE(cfg.scenarios[0].change);
  CHECK(cfg.scenarios[0].tests.size() == 1);
  const auto& p = cfg.scenarios[2];
  CHECK(p.n == 250);
  CHECK(p.seed == 9);
  REQUIRE(p.change);
  CHECK(p.change->fraction == 0.4);
  CHECK(p.change->post == GarchParams{1.5, 0.3, 0.4});
  CHECK(p.contamination.kind == OutlierKind::Innovation);
  CHECK(p.contamination.s == 10.0);
  REQUIRE(p.tests.size() == 1);
  CHECK(p.tests[0].label() == "SN_n^16(R)");
}

TEST_CASE("config errors name the field path", "[config]") {
  CHECK_THAT(error_of("{"), StartsWith("<root>: invalid JSON"));
  CHECK_THAT(error_of(R"({"study": "other"})"), StartsWith("study: "));
  CHECK_THAT(error_of(R"({"study": "garch", "scenarios": []})"), StartsWith("scenarios: "));
  CHECK_THAT(error_of(R"({"study": "garch", "extra": 1, "scenarios": []})"),
             StartsWith("extra: unknown field"));

  std::string bad = replaced("\"alpha\": 0.3, \"beta\": 0.4}}", "\"alpha\": \"x\", \"beta\": 0.4}}");
  CHECK(error_of(bad) == "scenarios[0].base.alpha: expected a number");

  bad = replaced("\"kind\": \"io\"", "\"kind\": \"xx\"");
  CHECK_THAT(error_of(bad), StartsWith("scenarios[1].contamination.kind: "));

  bad = replaced("\"M\": 16", "\"M\": 16, \"q\": 1");
  CHECK(error_of(bad) == "scenarios[1].tests[0].q: unknown field");

  bad = replaced("\"fraction\": 0.4", "\"fraction\": 1.5");
  CHECK_THAT(error_of(bad), StartsWith("scenarios[1].change.fraction: "));

  bad = replaced("\"n\": 250", "\"n\": 20");
  CHECK_THAT(error_of(bad), StartsWith("scenarios[1].n: "));

  bad = replaced("[1, 0.3, 0.4]", "[1, 0.6, 0.4]");
  CHECK_THAT(error_of(bad), StartsWith("scenarios[1].base: "));

  bad = replaced(", \"M\": 16}", "}");
  CHECK_THAT(error_of(bad), StartsWith("scenarios[1].tests[0]: "));
}

TEST_CASE("intro config parsing", "[config]") {
  const StudyConfig cfg = parse_study_config(
      R"({"study": "intro", "n": [100], "reps": 50, "contaminations": [{"p": 0.01, "s": 5}],
          "variance_ratios": [2], "seed": 3, "parallelism": 2})");
  CHECK(cfg.kind == StudyConfig::Kind::Intro);
  CHECK(cfg.parallelism == 2);
  CHECK(cfg.intro.n == std::vector<std::size_t>{100});
  CHECK(cfg.intro.reps == 50);
  CHECK(cfg.intro.contaminations.size() == 1);
  CHECK(cfg.intro.variance_ratios == std::vector<double>{2.0});
  const McTable t = run_study_config(cfg);
  REQUIRE(t.rows.size() == 2);
  CHECK(t.rows[0].scenario == "power(x2) p=0.01 s=5");
  CHECK(t.rows[0].test == "T_n");
  CHECK(t.rows[1].test == "T_n^R");
  CHECK(error_of(R"({"study": "intro", "variance_ratios": [0]})") ==
        "variance_ratios[0]: must be > 0");
  CHECK(error_of(R"({"study": "intro", "contaminations": [{"p": 2}]})") ==
        "contaminations[0].p: must be in [0, 1]");
}

TEST_CASE("shipped configs load", "[config]") {
  const std::filesystem::path dir = std::filesystem::path(GARCHCP_SOURCE_DIR) / "configs";
  int count = 0;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.path().extension() != ".json") continue;
    INFO(entry.path());
    StudyConfig cfg = load_study_config(entry.path());
    override_reps(cfg, 3);
    if (cfg.kind == StudyConfig::Kind::Garch) {
      CHECK(cfg.scenarios.size() == 24);
      for (const auto& s : cfg.scenarios) {
        CHECK(s.reps == 3);
        CHECK(s.tests.size() == 10);
        CHECK_NOTHROW(s.validate());
      }
    } else {
      CHECK(cfg.intro.reps == 3);
    }
    ++count;
  }
  CHECK(count == 6);
  CHECK_THROWS_WITH(load_study_config(dir / "missing.json"), ContainsSubstring("missing.json"));
}
