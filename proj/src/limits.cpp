#include "garchcp/limits.hpp"

#include "embedded_table.hpp"
#include "garchcp/rng.hpp"
#include "parallel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace garchcp {

namespace {

constexpr double kLevelTol = 1e-9;
constexpr std::size_t kMinGrid = 1000;
constexpr std::size_t kMinReps = 10000;

const std::vector<double> kDefaultLevels = {0.90, 0.95, 0.99};

}  // namespace

std::string_view to_string(LimitKind kind) {
  switch (kind) {
    case LimitKind::SupBridge:
      return "sup-bridge";
    case LimitKind::SnFunctional:
      return "sn-functional";
  }
  return "unknown";
}

LimitKind parse_limit_kind(std::string_view text) {
  if (text == "sup-bridge" || text == "SupBridge") return LimitKind::SupBridge;
  if (text == "sn-functional" || text == "SnFunctional") return LimitKind::SnFunctional;
  throw std::invalid_argument("unknown limit kind '" + std::string(text) +
                              "' (expected sup-bridge or sn-functional)");
}

double QuantileTable::at(double level) const {
  for (const auto& [lv, q] : quantiles) {
    if (std::abs(lv - level) < kLevelTol) return q;
  }
  throw std::out_of_range("quantile level " + std::to_string(level) + " not tabulated for " +
                          std::string(to_string(kind)) + "; supply a table or opt into interpolation");
}

double QuantileTable::interpolate(double level) const {
  if (quantiles.empty()) throw std::out_of_range("empty quantile table");
  auto hi = quantiles.lower_bound(level - kLevelTol);
  if (hi != quantiles.end() && std::abs(hi->first - level) < kLevelTol) return hi->second;
  if (hi == quantiles.begin() || hi == quantiles.end()) {
    throw std::out_of_range("quantile level " + std::to_string(level) +
                            " outside the tabulated range");
  }
  auto lo = std::prev(hi);
  const double w = (level - lo->first) / (hi->first - lo->first);
  return lo->second + w * (hi->second - lo->second);
}

double sup_bridge_from_increments(const std::vector<double>& increments) {
  const std::size_t n = increments.size();
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  double total = 0.0;
  for (double z : increments) total += z;
  double w = 0.0, sup = 0.0;
  for (std::size_t i = 1; i <= n; ++i) {
    w += increments[i - 1];
    const double b = (w - static_cast<double>(i) / static_cast<double>(n) * total) * scale;
    sup = std::max(sup, std::abs(b));
  }
  return sup;
}

namespace {

// Exact draw of sup |B(t) - t B(1)|: grid values from the increments, then the
// conditional maximum of each Brownian-bridge piece near the running sup.
double draw_sup_bridge(std::size_t grid_n, Engine& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> bridge(grid_n + 1, 0.0);
  const double h = 1.0 / static_cast<double>(grid_n);
  const double sd = std::sqrt(h);
  double w = 0.0;
  for (std::size_t i = 1; i <= grid_n; ++i) {
    w += sd * normal(rng);
    bridge[i] = w;
  }
  const double total = w;
  double sup = 0.0;
  for (std::size_t i = 1; i <= grid_n; ++i) {
    bridge[i] -= static_cast<double>(i) * h * total;
    sup = std::max(sup, std::abs(bridge[i]));
  }
  bridge[grid_n] = 0.0;

  // A piece whose endpoints lie 6 sqrt(h) below the grid sup exceeds it with
  // probability below exp(-72); only nearby pieces are refined.
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  const double threshold = sup - 6.0 * sd;
  double refined = sup;
  for (std::size_t i = 0; i < grid_n; ++i) {
    const double a = bridge[i];
    const double b = bridge[i + 1];
    if (std::max(a, b) >= threshold) {
      const double u = 1.0 - uniform(rng);
      const double m = 0.5 * (a + b + std::sqrt((a - b) * (a - b) - 2.0 * h * std::log(u)));
      refined = std::max(refined, m);
    }
    if (-std::min(a, b) >= threshold) {
      const double u = 1.0 - uniform(rng);
      const double m = 0.5 * (a + b - std::sqrt((a - b) * (a - b) - 2.0 * h * std::log(u)));
      refined = std::max(refined, -m);
    }
  }
  return refined;
}

}  // namespace

double sn_functional_from_increments(const std::vector<double>& increments) {
  const std::size_t n = increments.size();
  if (n < 2) throw std::invalid_argument("sn functional needs at least two increments");
  const double nd = static_cast<double>(n);
  const double scale = 1.0 / std::sqrt(nd);

  std::vector<double> b(n + 1, 0.0);  // B(i/n)
  for (std::size_t i = 1; i <= n; ++i) b[i] = b[i - 1] + increments[i - 1] * scale;
  const double b1 = b[n];

  // Forward prefix sums over i = 0..k-1 of B_i^2 and i B_i.
  std::vector<double> p0(n + 1, 0.0), p1(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    p0[i + 1] = p0[i] + b[i] * b[i];
    p1[i + 1] = p1[i] + static_cast<double>(i) * b[i];
  }
  // Backward suffix sums over i = k..n-1 of C_i^2 and (n - i) C_i, C_i = B(1) - B_i.
  std::vector<double> q0(n + 1, 0.0), q1(n + 1, 0.0);
  for (std::size_t i = n; i-- > 0;) {
    const double c = b1 - b[i];
    q0[i] = q0[i + 1] + c * c;
    q1[i] = q1[i + 1] + static_cast<double>(n - i) * c;
  }

  double best = 0.0;
  for (std::size_t k = 1; k < n; ++k) {
    const double kd = static_cast<double>(k);
    const double md = static_cast<double>(n - k);
    const double bk = b[k] / kd;
    const double sum_i2 = (kd - 1.0) * kd * (2.0 * kd - 1.0) / 6.0;
    const double forward = p0[k] - 2.0 * bk * p1[k] + bk * bk * sum_i2;
    const double ck = (b1 - b[k]) / md;
    const double sum_u2 = md * (md + 1.0) * (2.0 * md + 1.0) / 6.0;
    const double backward = q0[k] - 2.0 * ck * q1[k] + ck * ck * sum_u2;
    const double v = (forward + backward) / nd;
    if (!(v > 0.0)) continue;
    const double bridge = b[k] - kd / nd * b1;
    best = std::max(best, bridge * bridge / v);
  }
  return best;
}

double empirical_quantile(const std::vector<double>& sorted_draws, double level) {
  if (sorted_draws.empty()) throw std::invalid_argument("no draws");
  if (!(level > 0.0 && level <= 1.0)) throw std::invalid_argument("level must lie in (0, 1]");
  const double pos = std::ceil(level * static_cast<double>(sorted_draws.size()) - 1e-9);
  const std::size_t idx = std::clamp<std::size_t>(static_cast<std::size_t>(pos), 1, sorted_draws.size());
  return sorted_draws[idx - 1];
}

LimitSimulation simulate_limit_draws(LimitKind kind, std::size_t grid_n, std::size_t reps,
                                     std::uint64_t seed, const std::vector<double>& extra_levels,
                                     unsigned workers) {
  if (grid_n < kMinGrid) {
    throw std::invalid_argument("simulate_limit: grid_n must be >= " + std::to_string(kMinGrid));
  }
  if (reps < kMinReps) {
    throw std::invalid_argument("simulate_limit: reps must be >= " + std::to_string(kMinReps));
  }
  LimitSimulation sim;
  sim.draws.assign(reps, 0.0);
  detail::parallel_for(reps, workers, [&](std::size_t i) {
    Engine rng(derive_seed(seed, i));
    if (kind == LimitKind::SupBridge) {
      sim.draws[i] = draw_sup_bridge(grid_n, rng);
    } else {
      std::normal_distribution<double> normal(0.0, 1.0);
      std::vector<double> z(grid_n);
      for (double& v : z) v = normal(rng);
      sim.draws[i] = sn_functional_from_increments(z);
    }
  });
  std::sort(sim.draws.begin(), sim.draws.end());

  sim.table.kind = kind;
  sim.table.grid_n = grid_n;
  sim.table.reps = reps;
  sim.table.seed = seed;
  std::vector<double> levels = kDefaultLevels;
  levels.insert(levels.end(), extra_levels.begin(), extra_levels.end());
  for (double lv : levels) sim.table.quantiles[lv] = empirical_quantile(sim.draws, lv);
  return sim;
}

QuantileTable simulate_limit(LimitKind kind, std::size_t grid_n, std::size_t reps,
                             std::uint64_t seed, const std::vector<double>& extra_levels,
                             unsigned workers) {
  return simulate_limit_draws(kind, grid_n, reps, seed, extra_levels, workers).table;
}

double kolmogorov_cdf(double x) {
  if (!(x > 0.0)) return 0.0;
  if (x > 20.0) return 1.0;
  // For small x the alternating series converges slowly; use the theta-function
  // dual sqrt(2 pi)/x sum exp(-(2j-1)^2 pi^2 / (8 x^2)).
  if (x < 0.6) {
    const double pi = 3.14159265358979323846;
    double sum = 0.0;
    for (int j = 1; j < 200; ++j) {
      const double term = std::exp(-(2.0 * j - 1.0) * (2.0 * j - 1.0) * pi * pi / (8.0 * x * x));
      sum += term;
      if (term < 1e-16 * sum) break;
    }
    return std::sqrt(2.0 * pi) / x * sum;
  }
  double sum = 0.0;
  for (int j = 1; j < 1000; ++j) {
    const double term = std::exp(-2.0 * j * j * x * x);
    sum += (j % 2 == 1) ? term : -term;
    if (term < 1e-12) break;
  }
  return 1.0 - 2.0 * sum;
}

void write_quantile_csv(std::ostream& out, const std::vector<QuantileTable>& tables) {
  out << "kind,level,quantile,grid_n,reps,seed\n";
  char buf[128];
  for (const auto& t : tables) {
    for (const auto& [lv, q] : t.quantiles) {
      std::snprintf(buf, sizeof buf, "%.6g,%.10g", lv, q);
      out << to_string(t.kind) << ',' << buf << ',' << t.grid_n << ',' << t.reps << ',' << t.seed
          << '\n';
    }
  }
}

std::vector<QuantileTable> read_quantile_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("quantile table: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "kind,level,quantile,grid_n,reps,seed") {
    throw std::runtime_error("quantile table: unexpected header '" + line + "'");
  }
  std::vector<QuantileTable> tables;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) fields.push_back(f);
    if (fields.size() != 6) {
      throw std::runtime_error("quantile table line " + std::to_string(lineno) +
                               ": expected 6 fields");
    }
    try {
      const LimitKind kind = parse_limit_kind(fields[0]);
      const double level = std::stod(fields[1]);
      const double q = std::stod(fields[2]);
      const std::size_t grid_n = std::stoull(fields[3]);
      const std::size_t reps = std::stoull(fields[4]);
      const std::uint64_t seed = std::stoull(fields[5]);
      auto it = std::find_if(tables.begin(), tables.end(),
                             [&](const QuantileTable& t) { return t.kind == kind; });
      if (it == tables.end()) {
        tables.push_back(QuantileTable{kind, grid_n, reps, seed, {}});
        it = std::prev(tables.end());
      }
      it->quantiles[level] = q;
    } catch (const std::logic_error& e) {
      throw std::runtime_error("quantile table line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return tables;
}

CriticalValues::CriticalValues(std::vector<QuantileTable> tables) : tables_(std::move(tables)) {
  for (const auto& t : tables_) {
    double prev = -1.0;
    for (const auto& [lv, q] : t.quantiles) {
      if (q < prev) {
        throw std::invalid_argument("quantile table for " + std::string(to_string(t.kind)) +
                                    " is not monotone in level");
      }
      prev = q;
    }
  }
}

const CriticalValues& CriticalValues::embedded() {
  static const CriticalValues cv = [] {
    std::istringstream in{std::string(detail::embedded_quantile_csv())};
    return CriticalValues(read_quantile_csv(in));
  }();
  return cv;
}

const QuantileTable& CriticalValues::table(LimitKind kind) const {
  for (const auto& t : tables_) {
    if (t.kind == kind) return t;
  }
  throw std::out_of_range("no quantile table for " + std::string(to_string(kind)));
}

double CriticalValues::critical_value(LimitKind kind, double alpha, bool interpolate) const {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw std::invalid_argument("significance level must lie in (0, 1]");
  }
  // Both limits are positive random variables, so their 0-quantile is 0.
  if (alpha == 1.0) return 0.0;
  const QuantileTable& t = table(kind);
  return interpolate ? t.interpolate(1.0 - alpha) : t.at(1.0 - alpha);
}

double critical_value(LimitKind kind, double alpha) {
  return CriticalValues::embedded().critical_value(kind, alpha);
}

}  // namespace garchcp
