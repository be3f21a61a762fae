#include "garchcp/app.hpp"

#include "json.hpp"

namespace garchcp {

using nlohmann::json;

void to_json(json& j, const GarchParams& p) {
  j = json{{"omega", p.omega}, {"alpha", p.alpha}, {"beta", p.beta}};
}

void from_json(const json& j, GarchParams& p) {
  j.at("omega").get_to(p.omega);
  j.at("alpha").get_to(p.alpha);
  j.at("beta").get_to(p.beta);
}

namespace {

template <class T>
void put_optional(json& j, const char* key, const std::optional<T>& v) {
  j[key] = v ? json(*v) : json(nullptr);
}

template <class T>
void get_optional(const json& j, const char* key, std::optional<T>& v) {
  const auto it = j.find(key);
  if (it == j.end() || it->is_null()) {
    v.reset();
  } else {
    v = it->get<T>();
  }
}

}  // namespace

void to_json(json& j, const TestResult& r) {
  j = json{{"kind", std::string(to_string(r.kind))},
           {"statistic", r.statistic},
           {"critical_value", r.critical_value},
           {"alpha", r.alpha},
           {"reject", r.reject},
           {"k_hat", r.k_hat}};
  put_optional(j, "tau_hat_sq", r.tau_hat_sq);
  put_optional(j, "M_used", r.M_used);
  put_optional(j, "gamma", r.gamma);
  put_optional(j, "fit_params", r.fit_params);
  put_optional(j, "fit_converged", r.fit_converged);
}

void from_json(const json& j, TestResult& r) {
  r.kind = parse_test_kind(j.at("kind").get<std::string>());
  j.at("statistic").get_to(r.statistic);
  j.at("critical_value").get_to(r.critical_value);
  j.at("alpha").get_to(r.alpha);
  j.at("reject").get_to(r.reject);
  j.at("k_hat").get_to(r.k_hat);
  get_optional(j, "tau_hat_sq", r.tau_hat_sq);
  get_optional(j, "M_used", r.M_used);
  get_optional(j, "gamma", r.gamma);
  get_optional(j, "fit_params", r.fit_params);
  get_optional(j, "fit_converged", r.fit_converged);
}

namespace app {

void to_json(json& j, const InputInfo& v) {
  j = json{{"path", v.path},
           {"sha256", v.sha256},
           {"source", v.source},
           {"observations", v.observations}};
}

void from_json(const json& j, InputInfo& v) {
  j.at("path").get_to(v.path);
  j.at("sha256").get_to(v.sha256);
  j.at("source").get_to(v.source);
  j.at("observations").get_to(v.observations);
}

void to_json(json& j, const FitSummary& v) {
  j = json{{"label", v.label},         {"gamma", v.gamma},
           {"params", v.params},       {"objective", v.objective},
           {"iterations", v.iterations}, {"converged", v.converged}};
}

void from_json(const json& j, FitSummary& v) {
  j.at("label").get_to(v.label);
  j.at("gamma").get_to(v.gamma);
  j.at("params").get_to(v.params);
  j.at("objective").get_to(v.objective);
  j.at("iterations").get_to(v.iterations);
  j.at("converged").get_to(v.converged);
}

void to_json(json& j, const ReportTest& v) {
  j = json{{"label", v.label},
           {"result", v.result},
           {"reject_1pct", v.reject_1pct},
           {"reject_5pct", v.reject_5pct}};
}

void from_json(const json& j, ReportTest& v) {
  j.at("label").get_to(v.label);
  j.at("result").get_to(v.result);
  j.at("reject_1pct").get_to(v.reject_1pct);
  j.at("reject_5pct").get_to(v.reject_5pct);
}

void to_json(json& j, const SegmentSummary& v) {
  j = json{{"start", v.start}, {"end", v.end}};
  put_optional(j, "fit", v.fit);
  put_optional(j, "test", v.test);
}

void from_json(const json& j, SegmentSummary& v) {
  j.at("start").get_to(v.start);
  j.at("end").get_to(v.end);
  get_optional(j, "fit", v.fit);
  get_optional(j, "test", v.test);
}

std::string report_to_json(const Report& r) {
  json j{{"command", r.command},   {"input", r.input},
         {"config", r.config},     {"fits", r.fits},
         {"tests", r.tests},       {"change_points", r.change_points},
         {"segments", r.segments}, {"warnings", r.warnings}};
  return j.dump(2) + "\n";
}

Report report_from_json(std::string_view text) {
  Report r;
  try {
    const json j = json::parse(text);
    j.at("command").get_to(r.command);
    j.at("input").get_to(r.input);
    j.at("config").get_to(r.config);
    j.at("fits").get_to(r.fits);
    j.at("tests").get_to(r.tests);
    j.at("change_points").get_to(r.change_points);
    j.at("segments").get_to(r.segments);
    j.at("warnings").get_to(r.warnings);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("report: ") + e.what());
  }
  return r;
}

FitSummary summarize_fit(const FitResult& fit) {
  FitSummary s;
  s.gamma = fit.gamma;
  s.label = fit.gamma > 0.0 ? "MDPDE(" + json(fit.gamma).dump() + ")" : "QMLE";
  s.params = fit.params;
  s.objective = fit.objective;
  s.iterations = fit.iterations;
  s.converged = fit.converged;
  return s;
}

}  // namespace app
}  // namespace garchcp
