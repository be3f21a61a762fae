#include "garchcp/mcstudy.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <sstream>
#include <stdexcept>

using namespace garchcp;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::StartsWith;

namespace {

McScenario small_scenario() {
  McScenario s;
  s.name = "small";
  s.n = 200;
  s.reps = 20;
  s.seed = 4;
  s.tests = {{TestKind::CusumNaive, 0.0, std::nullopt}, {TestKind::SnRobust, 0.1, 9.0}};
  return s;
}

}  // namespace

TEST_CASE("test labels", "[mcstudy]") {
  CHECK(TestConfig{TestKind::CusumNaive, 0.0, std::nullopt}.label() == "T_n");
  CHECK(TestConfig{TestKind::SnNaive, 0.0, std::nullopt}.label() == "SN_n");
  CHECK(TestConfig{TestKind::CusumRobust, 0.1, 9.0}.label() == "T_n^9(R)");
  CHECK(TestConfig{TestKind::CusumRobust, 0.0, 16.0}.label() == "T_n^16(Q)");
  CHECK(TestConfig{TestKind::SnRobust, 0.1, 16.0}.label() == "SN_n^16(R)");
  CHECK_THROWS_AS((TestConfig{TestKind::CusumRobust, 0.1, std::nullopt}.validate()),
                  std::invalid_argument);
  CHECK_THROWS_AS((TestConfig{TestKind::CusumNaive, 0.0, 9.0}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((TestConfig{TestKind::CusumNaive, -1.0, std::nullopt}.validate()),
                  std::invalid_argument);
}

TEST_CASE("scenario validation", "[mcstudy]") {
  auto s = small_scenario();
  CHECK_NOTHROW(s.validate());
  CHECK_FALSE(s.regime_change());
  s.change = ChangeSpec{0.5, {1.5, 0.3, 0.4}};
  REQUIRE(s.regime_change());
  CHECK(s.regime_change()->index == 100);
  auto bad = s;
  bad.tests.clear();
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  CHECK_THROWS_AS(run_study({bad}), std::invalid_argument);
  CHECK_THROWS_AS(run_study({}), std::invalid_argument);
  bad = s;
  bad.n = 49;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = s;
  bad.change->fraction = 1.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = s;
  bad.alpha = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("level one rejects everything", "[mcstudy]") {
  auto s = small_scenario();
  s.alpha = 1.0;
  for (const auto& cell : run_scenario(s)) {
    CHECK(cell.rate == 1.0);
    CHECK(cell.se == 0.0);
    CHECK(cell.failures == 0);
  }
}

TEST_CASE("cell bookkeeping", "[mcstudy]") {
  auto s = small_scenario();
  const auto cells = run_scenario(s, 2);
  REQUIRE(cells.size() == 2);
  for (const auto& c : cells) {
    CHECK(c.reps == 20);
    CHECK(c.valid + c.failures == c.reps);
    CHECK(c.rate == static_cast<double>(c.rejections) / static_cast<double>(c.valid));
    CHECK(c.se == std::sqrt(c.rate * (1.0 - c.rate) / static_cast<double>(c.valid)));
    CHECK(c.rate >= 0.0);
    CHECK(c.rate <= 1.0);
  }
  const CellResult single = run_cell(s, s.tests[1]);
  CHECK(single == cells[1]);

  McTable table{cells};
  CHECK(table.find("small", "T_n").test == "T_n");
  CHECK_THROWS_AS(table.find("small", "nope"), std::out_of_range);
  std::ostringstream csv;
  table.write_csv(csv);
  CHECK_THAT(csv.str(), StartsWith("scenario,test,n,reps,rate,se,failures,aborted\n"));
  CHECK_THAT(csv.str(), ContainsSubstring("small,SN_n^9(R),200,20,"));
}

TEST_CASE("failed fits abort a cell", "[mcstudy]") {
  auto s = small_scenario();
  s.fit.max_iter = 1;
  CHECK_THROWS_AS(run_cell(s, s.tests[0]), CellAborted);
  const auto table = run_study({s});
  for (const auto& row : table.rows) {
    CHECK(row.aborted);
    CHECK(row.failures == row.reps);
    CHECK(row.valid == 0);
  }
}

TEST_CASE("intro example", "[mcstudy]") {
  CHECK_THROWS_AS(intro_example(IntroConfig{.n = 40}), std::invalid_argument);
  // p = 0 and (p = 1, s = 0) draw the same stream and add nothing.
  IntroConfig a{.n = 200, .reps = 400, .p = 0.0, .s = 5.0};
  IntroConfig b{.n = 200, .reps = 400, .p = 1.0, .s = 0.0};
  const auto ra = intro_example(a);
  const auto rb = intro_example(b);
  CHECK(ra.naive_rate == rb.naive_rate);
  CHECK(ra.robust_rate == rb.robust_rate);
  CHECK(simulate_intro(50, 0.0, 5.0, std::nullopt, 3) == simulate_intro(50, 1.0, 0.0, std::nullopt, 3));

  // Power grows with n; the 95% intervals do not overlap.
  IntroConfig small{.n = 100, .reps = 1000, .variance_ratio = 2.0};
  IntroConfig large{.n = 500, .reps = 1000, .variance_ratio = 2.0};
  const auto ps = intro_example(small);
  const auto pl = intro_example(large);
  CHECK(pl.naive_rate - 1.96 * pl.naive_se > ps.naive_rate + 1.96 * ps.naive_se);
  CHECK(pl.robust_rate - 1.96 * pl.robust_se > ps.robust_rate + 1.96 * ps.robust_se);
}

TEST_CASE("clean GARCH sizes lie near the nominal level", "[mcstudy][slow]") {
  McScenario s;
  s.name = "size";
  s.n = 500;
  s.reps = 200;
  s.seed = 8;
  s.tests = {{TestKind::CusumNaive, 0.0, std::nullopt},
             {TestKind::SnNaive, 0.0, std::nullopt},
             {TestKind::CusumRobust, 0.1, 9.0},
             {TestKind::SnRobust, 0.1, 9.0}};
  for (const auto& c : run_scenario(s)) {
    INFO(c.test << " rate " << c.rate);
    const double se = std::sqrt(0.05 * 0.95 / static_cast<double>(c.valid));
    CHECK(c.failures == 0);
    CHECK(c.rate >= 0.03 - 3.0 * se);
    CHECK(c.rate <= 0.07 + 3.0 * se);
  }
}
