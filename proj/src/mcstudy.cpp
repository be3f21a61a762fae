#include "garchcp/mcstudy.hpp"

#include "garchcp/rng.hpp"
#include "parallel.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <random>
#include <sstream>

namespace garchcp {

namespace {

std::string format_number(double x) {
  std::ostringstream os;
  os.precision(12);
  os << x;
  return os.str();
}

double binomial_se(double rate, std::size_t count) {
  if (count == 0) return 0.0;
  return std::sqrt(rate * (1.0 - rate) / static_cast<double>(count));
}

enum class Outcome : unsigned char { Accept, Reject, Failure };

}  // namespace

void TestConfig::validate() const {
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) {
    throw std::invalid_argument("test gamma must be >= 0");
  }
  if (is_robust(kind) && !M) throw std::invalid_argument(label() + ": robust test needs M");
  if (!is_robust(kind) && M) throw std::invalid_argument(label() + ": naive test takes no M");
  if (M) TruncationSpec{*M, 0.0}.validate();
}

std::string TestConfig::label() const {
  std::string out = is_sn(kind) ? "SN_n" : "T_n";
  if (M) out += "^" + format_number(*M);
  if (is_robust(kind) || gamma > 0.0) out += gamma > 0.0 ? "(R)" : "(Q)";
  return out;
}

std::optional<TruncationSpec> TestConfig::truncation() const {
  if (!M) return std::nullopt;
  return TruncationSpec{*M, 0.0};
}

void McScenario::validate() const {
  base.validate();
  contamination.validate();
  if (n < 50) throw std::invalid_argument("scenario " + name + ": n must be >= 50");
  if (reps < 1) throw std::invalid_argument("scenario " + name + ": reps must be >= 1");
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw std::invalid_argument("scenario " + name + ": alpha must be in (0, 1]");
  }
  if (tests.empty()) throw std::invalid_argument("scenario " + name + ": empty test list");
  for (const auto& t : tests) t.validate();
  if (change) {
    if (!(change->fraction > 0.0 && change->fraction < 1.0)) {
      throw std::invalid_argument("scenario " + name + ": change fraction must be in (0, 1)");
    }
    change->post.validate();
  }
}

std::optional<RegimeChange> McScenario::regime_change() const {
  if (!change) return std::nullopt;
  const auto k = static_cast<std::size_t>(std::floor(static_cast<double>(n) * change->fraction));
  return RegimeChange{k, change->post};
}

void McTable::write_csv(std::ostream& out) const {
  out << "scenario,test,n,reps,rate,se,failures,aborted\n";
  const auto old_precision = out.precision(6);
  for (const auto& r : rows) {
    out << r.scenario << ',' << r.test << ',' << r.n << ',' << r.reps << ',' << r.rate << ','
        << r.se << ',' << r.failures << ',' << (r.aborted ? 1 : 0) << '\n';
  }
  out.precision(old_precision);
}

const CellResult& McTable::find(const std::string& scenario, const std::string& test) const {
  for (const auto& r : rows) {
    if (r.scenario == scenario && r.test == test) return r;
  }
  throw std::out_of_range("no cell " + scenario + " / " + test);
}

CellAborted::CellAborted(const CellResult& cell)
    : std::runtime_error("cell " + cell.scenario + " / " + cell.test + " aborted: " +
                         std::to_string(cell.failures) + " of " + std::to_string(cell.reps) +
                         " replications failed"),
      cell_(cell) {}

std::vector<CellResult> run_scenario(const McScenario& scenario, unsigned workers) {
  scenario.validate();
  const std::size_t n_tests = scenario.tests.size();
  const auto change = scenario.regime_change();

  std::vector<double> gammas;
  for (const auto& t : scenario.tests) {
    if (std::find(gammas.begin(), gammas.end(), t.gamma) == gammas.end()) gammas.push_back(t.gamma);
  }

  std::vector<Outcome> outcomes(scenario.reps * n_tests, Outcome::Failure);
  detail::parallel_for(scenario.reps, workers, [&](std::size_t i) {
    const auto x = simulate(scenario.base, scenario.n, scenario.burn_in, scenario.contamination,
                            change, derive_seed(scenario.seed, i));
    std::vector<std::optional<FitResult>> fits(gammas.size());
    for (std::size_t g = 0; g < gammas.size(); ++g) {
      try {
        auto f = fit(x, gammas[g], scenario.fit);
        if (f.converged) fits[g] = std::move(f);
      } catch (const std::invalid_argument&) {
      }
    }
    for (std::size_t j = 0; j < n_tests; ++j) {
      const auto& cfg = scenario.tests[j];
      const auto g = static_cast<std::size_t>(
          std::find(gammas.begin(), gammas.end(), cfg.gamma) - gammas.begin());
      Outcome o = Outcome::Failure;
      if (fits[g]) {
        try {
          const auto r = run_test_with_fit(x, *fits[g], cfg.kind, cfg.truncation(), scenario.alpha);
          o = r.reject ? Outcome::Reject : Outcome::Accept;
        } catch (const std::invalid_argument&) {
        }
      }
      outcomes[i * n_tests + j] = o;
    }
  });

  std::vector<CellResult> cells;
  cells.reserve(n_tests);
  for (std::size_t j = 0; j < n_tests; ++j) {
    CellResult c;
    c.scenario = scenario.name;
    c.test = scenario.tests[j].label();
    c.n = scenario.n;
    c.reps = scenario.reps;
    for (std::size_t i = 0; i < scenario.reps; ++i) {
      switch (outcomes[i * n_tests + j]) {
        case Outcome::Reject:
          ++c.rejections;
          ++c.valid;
          break;
        case Outcome::Accept:
          ++c.valid;
          break;
        case Outcome::Failure:
          ++c.failures;
          break;
      }
    }
    c.rate = c.valid ? static_cast<double>(c.rejections) / static_cast<double>(c.valid) : 0.0;
    c.se = binomial_se(c.rate, c.valid);
    c.aborted = static_cast<double>(c.failures) > kMaxFailureShare * static_cast<double>(c.reps);
    cells.push_back(std::move(c));
  }
  return cells;
}

CellResult run_cell(const McScenario& scenario, const TestConfig& test, unsigned workers) {
  McScenario single = scenario;
  single.tests = {test};
  auto cells = run_scenario(single, workers);
  if (cells.front().aborted) throw CellAborted(cells.front());
  return cells.front();
}

McTable run_study(const std::vector<McScenario>& scenarios, unsigned parallelism) {
  if (scenarios.empty()) throw std::invalid_argument("run_study: no scenarios");
  for (const auto& s : scenarios) s.validate();
  McTable table;
  for (const auto& s : scenarios) {
    auto cells = run_scenario(s, parallelism);
    table.rows.insert(table.rows.end(), cells.begin(), cells.end());
  }
  return table;
}

std::vector<double> simulate_intro(std::size_t n, double p, double s,
                                   std::optional<double> variance_ratio, std::uint64_t seed) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("intro: p must be in [0, 1]");
  if (!(s >= 0.0)) throw std::invalid_argument("intro: s must be >= 0");
  if (variance_ratio && !(*variance_ratio > 0.0)) {
    throw std::invalid_argument("intro: variance ratio must be > 0");
  }
  Engine rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  const double sd_after = variance_ratio ? std::sqrt(*variance_ratio) : 1.0;
  std::vector<double> x(n);
  for (std::size_t t = 1; t <= n; ++t) {
    const double z = normal(rng);
    const double u = uniform(rng);
    const double clean = (t > n / 2 ? sd_after : 1.0) * z;
    x[t - 1] = clean + (u < p ? s * sign_of(clean) : 0.0);
  }
  return x;
}

IntroResult intro_example(const IntroConfig& config, unsigned workers) {
  if (config.n < 50) throw std::invalid_argument("intro: n must be >= 50");
  if (config.reps < 1) throw std::invalid_argument("intro: reps must be >= 1");
  const TruncationSpec trunc{config.M, 0.0};
  trunc.validate();

  std::vector<unsigned char> naive(config.reps), robust(config.reps);
  detail::parallel_for(config.reps, workers, [&](std::size_t i) {
    const auto x = simulate_intro(config.n, config.p, config.s, config.variance_ratio,
                                  derive_seed(config.seed, i));
    std::vector<double> sq(x.size());
    std::transform(x.begin(), x.end(), sq.begin(), [](double v) { return v * v; });
    naive[i] = cusum_test(sq, config.alpha).reject;
    robust[i] = cusum_test(truncate_all(sq, trunc), config.alpha, TestKind::CusumRobust).reject;
  });

  const double reps = static_cast<double>(config.reps);
  IntroResult r;
  r.naive_rate = static_cast<double>(std::count(naive.begin(), naive.end(), 1)) / reps;
  r.robust_rate = static_cast<double>(std::count(robust.begin(), robust.end(), 1)) / reps;
  r.naive_se = binomial_se(r.naive_rate, config.reps);
  r.robust_se = binomial_se(r.robust_rate, config.reps);
  return r;
}

}  // namespace garchcp
