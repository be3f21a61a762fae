#include "garchcp/app.hpp"

#include "garchcp/limits.hpp"
#include "garchcp/mcstudy.hpp"
#include "garchcp/model.hpp"
#include "garchcp/study_config.hpp"

#include "CLI11.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <thread>

namespace garchcp::app {

namespace {

/// Levels tabulated by `limits --generate`.
const std::vector<double> kGeneratedLevels{0.80, 0.85, 0.90, 0.95, 0.975, 0.99, 0.995};

struct DataOptions {
  std::string path;
  std::string date_col = "date";
  std::string price_col = "price";
  std::string returns_col;
};

struct LoadedData {
  std::vector<double> returns;
  std::vector<std::string> dates;  // date of each return, empty for return files
  InputInfo info;
};

void add_data_options(CLI::App* cmd, DataOptions& opts) {
  cmd->add_option("data", opts.path, "CSV file with prices (or returns, see --returns-col)")
      ->required();
  cmd->add_option("--date-col", opts.date_col, "Date column name")->capture_default_str();
  cmd->add_option("--price-col", opts.price_col, "Price column name")->capture_default_str();
  cmd->add_option("--returns-col", opts.returns_col,
                  "Read this column as returns instead of computing log returns");
}

LoadedData load_data(const DataOptions& opts) {
  LoadedData d;
  d.info.path = opts.path;
  d.info.sha256 = sha256_file(opts.path);
  if (!opts.returns_col.empty()) {
    d.returns = load_column(opts.path, opts.returns_col);
    d.info.source = "returns";
  } else {
    const auto prices = load_csv(opts.path, CsvColumns{opts.date_col, opts.price_col});
    d.returns = log_returns(prices);
    d.dates.assign(prices.dates.begin() + 1, prices.dates.end());
    d.info.source = "prices";
  }
  d.info.observations = d.returns.size();
  return d;
}

std::string fmt(double x, int precision = 4) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(precision) << x;
  return os.str();
}

std::string fmt_general(double x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError(path + ": cannot write file");
  out << text;
}

ReportTest make_report_test(std::string label, const TestResult& r) {
  ReportTest t;
  t.label = std::move(label);
  t.result = r;
  const LimitKind limit = limit_of(r.kind);
  t.reject_5pct = r.statistic > critical_value(limit, 0.05);
  t.reject_1pct = r.statistic > critical_value(limit, 0.01);
  return t;
}

std::string stars(const ReportTest& t) {
  if (t.reject_1pct) return "**";
  if (t.reject_5pct) return "*";
  return "";
}

void print_fit(std::ostream& out, const FitSummary& f) {
  out << "  " << std::left << std::setw(12) << f.label << " omega=" << fmt(f.params.omega)
      << " alpha=" << fmt(f.params.alpha) << " beta=" << fmt(f.params.beta)
      << (f.converged ? "" : "  (not converged)") << '\n';
}

struct TestOptions {
  DataOptions data;
  std::string test = "all";
  bool naive = false;
  bool robust = false;
  std::vector<double> M;
  double gamma = 0.1;
  double alpha = 0.05;
  int max_iter = 500;
  double tol = 1e-6;
  std::string report;
  std::string path_out;
};

struct BatteryEntry {
  TestKind kind;
  std::optional<double> M;
};

std::vector<BatteryEntry> battery(const TestOptions& o) {
  const bool both = !o.naive && !o.robust;
  const bool cusum = o.test == "all" || o.test == "cusum";
  const bool sn = o.test == "all" || o.test == "sn";
  const std::vector<double> ms = o.M.empty() ? std::vector<double>{9.0, 16.0} : o.M;
  std::vector<BatteryEntry> out;
  if (both || o.naive) {
    if (cusum) out.push_back({TestKind::CusumNaive, std::nullopt});
    if (sn) out.push_back({TestKind::SnNaive, std::nullopt});
  }
  if (both || o.robust) {
    if (cusum) {
      for (double m : ms) out.push_back({TestKind::CusumRobust, m});
    }
    if (sn) {
      for (double m : ms) out.push_back({TestKind::SnRobust, m});
    }
  }
  return out;
}

std::string test_label(TestKind kind, std::optional<double> M) {
  std::string out = is_sn(kind) ? "SN_n" : "T_n";
  if (M) out += "^" + fmt_general(*M) + "(R)";
  return out;
}

int cmd_test(const TestOptions& o, std::ostream& out, std::ostream& err) {
  if (o.gamma <= 0.0) throw std::invalid_argument("--gamma must be > 0 for the robust fit");
  const LoadedData data = load_data(o.data);
  FitOptions fopts;
  fopts.max_iter = o.max_iter;
  fopts.grad_tol = o.tol;

  Report report;
  report.command = "test";
  report.input = data.info;
  report.config = {{"test", o.test},
                   {"gamma", fmt_general(o.gamma)},
                   {"alpha", fmt_general(o.alpha)},
                   {"max_iter", std::to_string(o.max_iter)},
                   {"tol", fmt_general(o.tol)}};

  const FitResult qmle = fit(data.returns, 0.0, fopts);
  const FitResult mdpde = fit(data.returns, o.gamma, fopts);
  report.fits = {summarize_fit(qmle), summarize_fit(mdpde)};
  for (const auto& f : report.fits) {
    if (!f.converged) report.warnings.push_back(f.label + " fit did not converge");
  }

  const auto entries = battery(o);
  std::vector<std::vector<double>> paths;
  for (const auto& e : entries) {
    const FitResult& f = is_robust(e.kind) ? mdpde : qmle;
    std::optional<TruncationSpec> trunc;
    if (e.M) trunc = TruncationSpec{*e.M, 0.0};
    const TestResult r = run_test_with_fit(data.returns, f, e.kind, trunc, o.alpha);
    report.tests.push_back(make_report_test(test_label(e.kind, e.M), r));
    if (!o.path_out.empty()) paths.push_back(cusum_process(test_inputs(data.returns, f.params, trunc)));
  }

  out << "observations: " << data.returns.size() << "  sha256: " << data.info.sha256 << '\n';
  out << "fits (whole series):\n";
  for (const auto& f : report.fits) print_fit(out, f);
  out << '\n'
      << std::left << std::setw(14) << "test" << std::setw(14) << "statistic" << std::setw(10)
      << "cv" << std::setw(8) << "reject" << "k_hat\n";
  bool any = false;
  for (const auto& t : report.tests) {
    const auto& r = t.result;
    any = any || r.reject;
    std::string k = ".";
    if (r.reject) {
      k = std::to_string(r.k_hat);
      if (!data.dates.empty()) k += " (" + data.dates[r.k_hat - 1] + ")";
    }
    out << std::left << std::setw(14) << t.label << std::setw(14)
        << (fmt(r.statistic, r.statistic >= 10.0 ? 1 : 2) + stars(t)) << std::setw(10)
        << fmt(r.critical_value, 3) << std::setw(8) << (r.reject ? "yes" : "no") << k << '\n';
  }
  out << "(* and ** mark significance at the 5% and 1% levels; decisions use alpha="
      << fmt_general(o.alpha) << ")\n";
  for (const auto& w : report.warnings) err << "warning: " << w << '\n';

  if (!o.path_out.empty()) {
    std::ostringstream csv;
    csv << "k";
    for (const auto& t : report.tests) csv << ',' << t.label;
    csv << '\n' << std::setprecision(12);
    for (std::size_t k = 0; k < data.returns.size(); ++k) {
      csv << k + 1;
      for (const auto& p : paths) csv << ',' << p[k];
      csv << '\n';
    }
    write_text(o.path_out, csv.str());
  }
  if (!o.report.empty()) write_text(o.report, report_to_json(report));
  return any ? kExitRejection : kExitNoRejection;
}

struct SegmentOptions {
  DataOptions data;
  std::string test = "sn";
  bool naive = false;
  double M = 9.0;
  double gamma = 0.1;
  double alpha = 0.05;
  std::size_t min_segment = 250;
  int max_iter = 500;
  double tol = 1e-6;
  std::string report;
};

int cmd_segment(const SegmentOptions& o, std::ostream& out, std::ostream& err) {
  const LoadedData data = load_data(o.data);
  SegmentationConfig cfg;
  const bool sn = o.test == "sn";
  if (o.naive) {
    cfg.kind = sn ? TestKind::SnNaive : TestKind::CusumNaive;
    cfg.gamma = 0.0;
    cfg.trunc.reset();
  } else {
    if (o.gamma <= 0.0) throw std::invalid_argument("--gamma must be > 0 for the robust fit");
    cfg.kind = sn ? TestKind::SnRobust : TestKind::CusumRobust;
    cfg.gamma = o.gamma;
    cfg.trunc = TruncationSpec{o.M, 0.0};
  }
  cfg.alpha = o.alpha;
  cfg.min_segment = o.min_segment;
  cfg.fit.max_iter = o.max_iter;
  cfg.fit.grad_tol = o.tol;

  const auto seg = binary_segmentation(data.returns, cfg);
  const std::string label = test_label(cfg.kind, cfg.trunc ? std::optional(cfg.trunc->M) : std::nullopt);

  Report report;
  report.command = "segment";
  report.input = data.info;
  report.config = {{"test", std::string(to_string(cfg.kind))},
                   {"gamma", fmt_general(cfg.gamma)},
                   {"alpha", fmt_general(cfg.alpha)},
                   {"min_segment", std::to_string(cfg.min_segment)},
                   {"max_iter", std::to_string(o.max_iter)},
                   {"tol", fmt_general(o.tol)}};
  if (cfg.trunc) report.config["M"] = fmt_general(cfg.trunc->M);
  report.change_points = seg.change_points;
  report.warnings = seg.warnings;
  for (const auto& s : seg.segments) {
    SegmentSummary ss;
    ss.start = s.start;
    ss.end = s.end;
    if (!s.fit_failed || s.fit.iterations > 0) ss.fit = summarize_fit(s.fit);
    if (s.test) ss.test = make_report_test(label, *s.test);
    report.segments.push_back(std::move(ss));
  }

  out << "observations: " << data.returns.size() << "  test: " << label << "  alpha="
      << fmt_general(cfg.alpha) << '\n';
  out << "change points:";
  if (seg.change_points.empty()) out << " none";
  for (std::size_t cp : seg.change_points) {
    out << ' ' << cp;
    if (!data.dates.empty()) out << " (" << data.dates[cp - 1] << ')';
  }
  out << '\n';
  for (const auto& s : report.segments) {
    out << "segment [" << s.start << ", " << s.end << "]";
    if (s.test) out << "  stat=" << fmt(s.test->result.statistic, 2) << stars(*s.test);
    out << '\n';
    if (s.fit) print_fit(out, *s.fit);
  }
  for (const auto& w : report.warnings) err << "warning: " << w << '\n';
  if (!o.report.empty()) write_text(o.report, report_to_json(report));
  return report.change_points.empty() ? kExitNoRejection : kExitRejection;
}

struct McOptions {
  std::string config;
  std::string out_path;
  std::size_t reps = 0;
  unsigned parallelism = 0;
};

int cmd_mc(const McOptions& o, std::ostream& out, std::ostream& err) {
  StudyConfig cfg = load_study_config(o.config);
  if (o.reps > 0) override_reps(cfg, o.reps);
  std::optional<unsigned> workers;
  if (o.parallelism > 0) workers = o.parallelism;
  const McTable table = run_study_config(cfg, workers);
  std::ostringstream csv;
  table.write_csv(csv);
  if (!o.out_path.empty()) write_text(o.out_path, csv.str());
  out << csv.str();
  bool aborted = false;
  for (const auto& r : table.rows) {
    if (r.aborted) {
      aborted = true;
      err << "warning: cell " << r.scenario << " / " << r.test << " aborted (" << r.failures
          << " of " << r.reps << " fits failed)\n";
    }
  }
  return aborted ? kExitFailure : kExitNoRejection;
}

struct LimitsOptions {
  std::string kind = "sup-bridge";
  std::optional<double> alpha;
  bool generate = false;
  bool interpolate = false;
  std::string out_path;
  std::string table_path;
  std::size_t grid_n = 10000;
  std::size_t reps = 100000;
  std::uint64_t seed = 20240101;
  unsigned parallelism = 0;
};

int cmd_limits(const LimitsOptions& o, std::ostream& out, std::ostream&) {
  const unsigned workers =
      o.parallelism > 0 ? o.parallelism : std::max(1u, std::thread::hardware_concurrency());
  if (o.generate) {
    if (o.out_path.empty()) throw std::invalid_argument("--generate needs --out");
    std::vector<QuantileTable> tables;
    for (LimitKind k : {LimitKind::SupBridge, LimitKind::SnFunctional}) {
      tables.push_back(simulate_limit(k, o.grid_n, o.reps, o.seed, kGeneratedLevels, workers));
    }
    std::ostringstream csv;
    write_quantile_csv(csv, tables);
    write_text(o.out_path, csv.str());
    out << csv.str();
    return kExitNoRejection;
  }
  std::optional<CriticalValues> custom;
  if (!o.table_path.empty()) {
    std::ifstream in(o.table_path);
    if (!in) throw DataError(o.table_path + ": cannot open file");
    custom.emplace(read_quantile_csv(in));
  }
  const CriticalValues& cv = custom ? *custom : CriticalValues::embedded();
  const LimitKind kind = parse_limit_kind(o.kind);
  if (o.alpha) {
    out << std::setprecision(6) << cv.critical_value(kind, *o.alpha, o.interpolate) << '\n';
    return kExitNoRejection;
  }
  const auto& t = cv.table(kind);
  out << "kind,level,quantile\n" << std::setprecision(6);
  for (const auto& [level, q] : t.quantiles) out << to_string(kind) << ',' << level << ',' << q << '\n';
  return kExitNoRejection;
}

struct SimulateOptions {
  std::vector<double> params{1.0, 0.3, 0.4};
  std::vector<double> post;
  double change_at = 0.5;
  std::size_t n = 1000;
  std::size_t burn_in = 1000;
  std::string contamination = "none";
  double p = 0.0;
  double s = 0.0;
  std::uint64_t seed = 1;
  std::string out_path;
};

GarchParams to_params(const std::vector<double>& v, const std::string& flag) {
  if (v.size() != 3) throw std::invalid_argument(flag + " expects omega,alpha,beta");
  GarchParams p{v[0], v[1], v[2]};
  p.validate();
  return p;
}

int cmd_simulate(const SimulateOptions& o, std::ostream& out, std::ostream&) {
  const GarchParams base = to_params(o.params, "--params");
  ContaminationSpec c;
  if (o.contamination == "io") {
    c.kind = OutlierKind::Innovation;
  } else if (o.contamination == "ao") {
    c.kind = OutlierKind::Additive;
  } else if (o.contamination != "none") {
    throw std::invalid_argument("--contamination must be none, io or ao");
  }
  c.p = o.p;
  c.s = o.s;
  std::optional<RegimeChange> change;
  if (!o.post.empty()) {
    if (!(o.change_at > 0.0 && o.change_at < 1.0)) throw std::invalid_argument("--change-at must be in (0, 1)");
    change = RegimeChange{static_cast<std::size_t>(std::floor(o.change_at * static_cast<double>(o.n))),
                          to_params(o.post, "--post")};
  }
  const auto x = simulate(base, o.n, o.burn_in, c, change, o.seed);
  std::ostringstream csv;
  csv << "t,return\n" << std::setprecision(17);
  for (std::size_t t = 0; t < x.size(); ++t) csv << t + 1 << ',' << x[t] << '\n';
  if (o.out_path.empty()) {
    out << csv.str();
  } else {
    write_text(o.out_path, csv.str());
  }
  return kExitNoRejection;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Outlier-robust change-point tests for GARCH(1,1) returns", "garchcp"};
  app.require_subcommand(1);

  TestOptions topt;
  auto* test = app.add_subcommand("test", "Run the naive and robust change-point tests on a series");
  add_data_options(test, topt.data);
  test->add_option("--test", topt.test, "Test family")
      ->check(CLI::IsMember({"all", "cusum", "sn"}))
      ->capture_default_str();
  test->add_flag("--naive", topt.naive, "Only the naive (untruncated, QMLE) tests");
  test->add_flag("--robust", topt.robust, "Only the robust (truncated, MDPDE) tests");
  test->add_option("--M", topt.M, "Truncation thresholds (default 9 and 16)");
  test->add_option("--gamma", topt.gamma, "MDPDE tuning parameter")->capture_default_str();
  test->add_option("--alpha", topt.alpha, "Significance level")->capture_default_str();
  test->add_option("--max-iter", topt.max_iter, "Optimizer iteration cap")->capture_default_str();
  test->add_option("--tol", topt.tol, "Projected-gradient tolerance")->capture_default_str();
  test->add_option("--report", topt.report, "Write a JSON report here");
  test->add_option("--path-out", topt.path_out, "Write the CUSUM paths D_k as CSV here");

  SegmentOptions sopt;
  auto* segment = app.add_subcommand("segment", "Binary segmentation with one test");
  add_data_options(segment, sopt.data);
  segment->add_option("--test", sopt.test, "Test family")
      ->check(CLI::IsMember({"cusum", "sn"}))
      ->capture_default_str();
  segment->add_flag("--naive", sopt.naive, "Use the naive test instead of the robust one");
  segment->add_option("--M", sopt.M, "Truncation threshold")->capture_default_str();
  segment->add_option("--gamma", sopt.gamma, "MDPDE tuning parameter")->capture_default_str();
  segment->add_option("--alpha", sopt.alpha, "Significance level")->capture_default_str();
  segment->add_option("--min-segment", sopt.min_segment, "Minimum segment length")
      ->capture_default_str();
  segment->add_option("--max-iter", sopt.max_iter, "Optimizer iteration cap")->capture_default_str();
  segment->add_option("--tol", sopt.tol, "Projected-gradient tolerance")->capture_default_str();
  segment->add_option("--report", sopt.report, "Write a JSON report here");

  McOptions mopt;
  auto* mc = app.add_subcommand("mc", "Run a Monte Carlo size/power study from a JSON config");
  mc->add_option("config", mopt.config, "Study configuration file")->required();
  mc->add_option("--out", mopt.out_path, "Write the table CSV here");
  mc->add_option("--reps", mopt.reps, "Override the replication count");
  mc->add_option("--parallelism", mopt.parallelism, "Worker threads (default from config)");

  LimitsOptions lopt;
  auto* limits = app.add_subcommand("limits", "Critical values of the limiting null laws");
  limits->add_option("--kind", lopt.kind, "sup-bridge or sn-functional")->capture_default_str();
  limits->add_option("--alpha", lopt.alpha, "Print the (1 - alpha) quantile");
  limits->add_option("--table", lopt.table_path, "Read quantiles from this CSV instead");
  limits->add_flag("--interpolate", lopt.interpolate,
                   "Interpolate linearly between tabulated levels");
  limits->add_flag("--generate", lopt.generate, "Simulate a new quantile table");
  limits->add_option("--out", lopt.out_path, "Output CSV for --generate");
  limits->add_option("--grid-n", lopt.grid_n, "Grid size")->capture_default_str();
  limits->add_option("--reps", lopt.reps, "Replications")->capture_default_str();
  limits->add_option("--seed", lopt.seed, "Seed")->capture_default_str();
  limits->add_option("--parallelism", lopt.parallelism, "Worker threads (default: all cores)");

  SimulateOptions simopt;
  auto* sim = app.add_subcommand("simulate", "Simulate a (contaminated) GARCH(1,1) series");
  sim->add_option("--params", simopt.params, "omega alpha beta")->expected(3)->delimiter(',');
  sim->add_option("--post", simopt.post, "Post-change omega alpha beta")->expected(3)->delimiter(',');
  sim->add_option("--change-at", simopt.change_at, "Change fraction")->capture_default_str();
  sim->add_option("--n", simopt.n, "Length")->capture_default_str();
  sim->add_option("--burn-in", simopt.burn_in, "Discarded initial steps")->capture_default_str();
  sim->add_option("--contamination", simopt.contamination, "none, io or ao")->capture_default_str();
  sim->add_option("--p", simopt.p, "Outlier probability")->capture_default_str();
  sim->add_option("--s", simopt.s, "Outlier size")->capture_default_str();
  sim->add_option("--seed", simopt.seed, "Seed")->capture_default_str();
  sim->add_option("--out", simopt.out_path, "Write CSV here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitNoRejection : kExitFailure;
  }

  try {
    if (*test) return cmd_test(topt, out, err);
    if (*segment) return cmd_segment(sopt, out, err);
    if (*mc) return cmd_mc(mopt, out, err);
    if (*limits) return cmd_limits(lopt, out, err);
    if (*sim) return cmd_simulate(simopt, out, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitFailure;
}

}  // namespace garchcp::app
