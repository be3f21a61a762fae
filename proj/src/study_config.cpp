#include "garchcp/study_config.hpp"

#include "json.hpp"

#include <fstream>
#include <algorithm>
#include <cmath>
#include <tuple>
#include <sstream>

namespace garchcp {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ConfigError(path + ": " + what);
}

std::string child(const std::string& path, std::string_view key) {
  return path.empty() ? std::string(key) : path + "." + std::string(key);
}

std::string index(const std::string& path, std::size_t i) {
  return path + "[" + std::to_string(i) + "]";
}

double as_number(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  return j.get<double>();
}

std::size_t as_count(const json& j, const std::string& path) {
  if (!j.is_number_integer() || j.get<long long>() < 0) fail(path, "expected a non-negative integer");
  return j.get<std::size_t>();
}

std::uint64_t as_seed(const json& j, const std::string& path) {
  if (!j.is_number_integer() || j.get<long long>() < 0) fail(path, "expected a non-negative integer");
  return j.get<std::uint64_t>();
}

std::string as_string(const json& j, const std::string& path) {
  if (!j.is_string()) fail(path, "expected a string");
  return j.get<std::string>();
}

const json* find(const json& obj, std::string_view key) {
  const auto it = obj.find(std::string(key));
  return it == obj.end() ? nullptr : &*it;
}

/// Field from `obj`, falling back to `defaults`; reports the path in `obj`.
const json* lookup(const json& obj, const json& defaults, std::string_view key) {
  if (const json* v = find(obj, key)) return v;
  if (defaults.is_object()) return find(defaults, key);
  return nullptr;
}

void check_keys(const json& obj, const std::string& path,
                std::initializer_list<std::string_view> allowed) {
  if (!obj.is_object()) fail(path.empty() ? "<root>" : path, "expected an object");
  for (const auto& [key, value] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      fail(child(path, key), "unknown field");
    }
  }
}

/// Scalar or array of counts.
std::vector<std::size_t> count_list(const json& j, const std::string& path) {
  if (!j.is_array()) return {as_count(j, path)};
  if (j.empty()) fail(path, "empty list");
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(as_count(j[i], index(path, i)));
  return out;
}

GarchParams parse_params(const json& j, const std::string& path) {
  if (j.is_array()) {
    if (j.size() != 3) fail(path, "expected [omega, alpha, beta]");
    GarchParams p{as_number(j[0], index(path, 0)), as_number(j[1], index(path, 1)),
                  as_number(j[2], index(path, 2))};
    if (!p.valid()) fail(path, "invalid GARCH parameters");
    return p;
  }
  check_keys(j, path, {"omega", "alpha", "beta"});
  GarchParams p;
  for (auto [key, dst] : {std::pair{"omega", &p.omega}, std::pair{"alpha", &p.alpha},
                          std::pair{"beta", &p.beta}}) {
    const json* v = find(j, key);
    if (!v) fail(child(path, key), "missing");
    *dst = as_number(*v, child(path, key));
  }
  if (!p.valid()) fail(path, "invalid GARCH parameters");
  return p;
}

ContaminationSpec parse_contamination(const json& j, const std::string& path) {
  check_keys(j, path, {"kind", "p", "s"});
  ContaminationSpec c;
  const json* kind = find(j, "kind");
  if (!kind) fail(child(path, "kind"), "missing");
  const std::string k = as_string(*kind, child(path, "kind"));
  if (k == "none") {
    c.kind = OutlierKind::None;
  } else if (k == "io" || k == "innovation") {
    c.kind = OutlierKind::Innovation;
  } else if (k == "ao" || k == "additive") {
    c.kind = OutlierKind::Additive;
  } else {
    fail(child(path, "kind"), "expected one of none, io, ao");
  }
  if (const json* p = find(j, "p")) c.p = as_number(*p, child(path, "p"));
  if (const json* s = find(j, "s")) c.s = as_number(*s, child(path, "s"));
  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    fail(path, e.what());
  }
  return c;
}

TestConfig parse_test(const json& j, const std::string& path) {
  check_keys(j, path, {"kind", "gamma", "M"});
  TestConfig t;
  const json* kind = find(j, "kind");
  if (!kind) fail(child(path, "kind"), "missing");
  try {
    t.kind = parse_test_kind(as_string(*kind, child(path, "kind")));
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    fail(child(path, "kind"), e.what());
  }
  if (const json* g = find(j, "gamma")) t.gamma = as_number(*g, child(path, "gamma"));
  if (const json* m = find(j, "M")) t.M = as_number(*m, child(path, "M"));
  try {
    t.validate();
  } catch (const std::invalid_argument& e) {
    fail(path, e.what());
  }
  return t;
}

std::vector<TestConfig> parse_tests(const json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected a list of tests");
  if (j.empty()) fail(path, "empty test list");
  std::vector<TestConfig> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(parse_test(j[i], index(path, i)));
  return out;
}

std::vector<McScenario> parse_scenario(const json& j, const json& defaults,
                                       const std::string& path) {
  check_keys(j, path,
             {"name", "base", "change", "contamination", "n", "reps", "alpha", "burn_in", "tests",
              "seed"});
  McScenario s;
  const json* name = find(j, "name");
  if (!name) fail(child(path, "name"), "missing");
  s.name = as_string(*name, child(path, "name"));
  if (s.name.find_first_of(",\"\n") != std::string::npos) {
    fail(child(path, "name"), "must not contain commas, quotes or newlines");
  }

  const json* base = lookup(j, defaults, "base");
  if (!base) fail(child(path, "base"), "missing");
  s.base = parse_params(*base, child(path, "base"));

  if (const json* change = find(j, "change"); change && !change->is_null()) {
    const std::string cp = child(path, "change");
    check_keys(*change, cp, {"fraction", "post"});
    ChangeSpec c;
    if (const json* f = find(*change, "fraction")) c.fraction = as_number(*f, child(cp, "fraction"));
    if (!(c.fraction > 0.0 && c.fraction < 1.0)) fail(child(cp, "fraction"), "must be in (0, 1)");
    const json* post = find(*change, "post");
    if (!post) fail(child(cp, "post"), "missing");
    c.post = parse_params(*post, child(cp, "post"));
    s.change = c;
  }
  if (const json* c = lookup(j, defaults, "contamination")) {
    s.contamination = parse_contamination(*c, child(path, "contamination"));
  }
  if (const json* v = lookup(j, defaults, "reps")) {
    s.reps = as_count(*v, child(path, "reps"));
    if (s.reps < 1) fail(child(path, "reps"), "must be >= 1");
  }
  if (const json* v = lookup(j, defaults, "alpha")) {
    s.alpha = as_number(*v, child(path, "alpha"));
    if (!(s.alpha > 0.0 && s.alpha <= 1.0)) fail(child(path, "alpha"), "must be in (0, 1]");
  }
  if (const json* v = lookup(j, defaults, "burn_in")) s.burn_in = as_count(*v, child(path, "burn_in"));
  if (const json* v = lookup(j, defaults, "seed")) s.seed = as_seed(*v, child(path, "seed"));
  const json* tests = lookup(j, defaults, "tests");
  if (!tests) fail(child(path, "tests"), "missing");
  s.tests = parse_tests(*tests, child(path, "tests"));

  const json* n = lookup(j, defaults, "n");
  if (!n) fail(child(path, "n"), "missing");
  std::vector<McScenario> out;
  for (std::size_t size : count_list(*n, child(path, "n"))) {
    if (size < 50) fail(child(path, "n"), "must be >= 50");
    McScenario copy = s;
    copy.n = size;
    out.push_back(std::move(copy));
  }
  return out;
}

IntroStudy parse_intro(const json& root) {
  check_keys(root, "", {"study", "parallelism", "n", "reps", "alpha", "M", "contaminations",
                        "variance_ratios", "seed"});
  IntroStudy s;
  if (const json* v = find(root, "n")) {
    s.n = count_list(*v, "n");
    for (std::size_t size : s.n) {
      if (size < 50) fail("n", "must be >= 50");
    }
  }
  if (const json* v = find(root, "reps")) {
    s.reps = as_count(*v, "reps");
    if (s.reps < 1) fail("reps", "must be >= 1");
  }
  if (const json* v = find(root, "alpha")) s.alpha = as_number(*v, "alpha");
  if (const json* v = find(root, "M")) {
    s.M = as_number(*v, "M");
    if (!(s.M > 0.0)) fail("M", "must be > 0");
  }
  if (const json* v = find(root, "seed")) s.seed = as_seed(*v, "seed");
  if (const json* v = find(root, "contaminations")) {
    if (!v->is_array() || v->empty()) fail("contaminations", "expected a non-empty list");
    s.contaminations.clear();
    for (std::size_t i = 0; i < v->size(); ++i) {
      const std::string p = index("contaminations", i);
      check_keys((*v)[i], p, {"p", "s"});
      const json* pp = find((*v)[i], "p");
      const json* ss = find((*v)[i], "s");
      const double prob = pp ? as_number(*pp, child(p, "p")) : 0.0;
      const double scale = ss ? as_number(*ss, child(p, "s")) : 0.0;
      if (!(prob >= 0.0 && prob <= 1.0)) fail(child(p, "p"), "must be in [0, 1]");
      if (!(scale >= 0.0)) fail(child(p, "s"), "must be >= 0");
      s.contaminations.emplace_back(prob, scale);
    }
  }
  if (const json* v = find(root, "variance_ratios")) {
    if (!v->is_array() || v->empty()) fail("variance_ratios", "expected a non-empty list");
    s.variance_ratios.clear();
    for (std::size_t i = 0; i < v->size(); ++i) {
      const double r = as_number((*v)[i], index("variance_ratios", i));
      if (!(r > 0.0)) fail(index("variance_ratios", i), "must be > 0");
      s.variance_ratios.push_back(r);
    }
  }
  if (!(s.alpha > 0.0 && s.alpha <= 1.0)) fail("alpha", "must be in (0, 1]");
  return s;
}

std::string format_number(double x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

}  // namespace

StudyConfig parse_study_config(std::string_view json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("<root>: invalid JSON: ") + e.what());
  }
  if (!root.is_object()) fail("<root>", "expected an object");

  StudyConfig cfg;
  const json* study = find(root, "study");
  if (!study) fail("study", "missing");
  const std::string kind = as_string(*study, "study");
  if (const json* p = find(root, "parallelism")) {
    const std::size_t workers = as_count(*p, "parallelism");
    if (workers < 1 || workers > 1024) fail("parallelism", "must be in [1, 1024]");
    cfg.parallelism = static_cast<unsigned>(workers);
  }

  if (kind == "intro") {
    cfg.kind = StudyConfig::Kind::Intro;
    cfg.intro = parse_intro(root);
    return cfg;
  }
  if (kind != "garch") fail("study", "expected \"intro\" or \"garch\"");
  cfg.kind = StudyConfig::Kind::Garch;
  check_keys(root, "", {"study", "parallelism", "defaults", "scenarios"});
  const json empty = json::object();
  const json* defaults = find(root, "defaults");
  if (defaults) {
    check_keys(*defaults, "defaults",
               {"base", "contamination", "n", "reps", "alpha", "burn_in", "tests", "seed"});
  }
  const json* scenarios = find(root, "scenarios");
  if (!scenarios || !scenarios->is_array() || scenarios->empty()) {
    fail("scenarios", "expected a non-empty list");
  }
  for (std::size_t i = 0; i < scenarios->size(); ++i) {
    auto expanded =
        parse_scenario((*scenarios)[i], defaults ? *defaults : empty, index("scenarios", i));
    cfg.scenarios.insert(cfg.scenarios.end(), expanded.begin(), expanded.end());
  }
  return cfg;
}

StudyConfig load_study_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string() + ": cannot open config file");
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return parse_study_config(buffer.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

void override_reps(StudyConfig& config, std::size_t reps) {
  if (reps < 1) throw std::invalid_argument("reps must be >= 1");
  config.intro.reps = reps;
  for (auto& s : config.scenarios) s.reps = reps;
}

McTable run_study_config(const StudyConfig& config, std::optional<unsigned> parallelism) {
  const unsigned workers = parallelism.value_or(config.parallelism);
  if (config.kind == StudyConfig::Kind::Garch) return run_study(config.scenarios, workers);

  const auto& s = config.intro;
  McTable table;
  for (double ratio : s.variance_ratios) {
    for (const auto& [p, scale] : s.contaminations) {
      std::string name = ratio == 1.0 ? "size" : "power(x" + format_number(ratio) + ")";
      name += p > 0.0 ? " p=" + format_number(p) + " s=" + format_number(scale) : " clean";
      for (std::size_t n : s.n) {
        IntroConfig ic;
        ic.n = n;
        ic.reps = s.reps;
        ic.p = p;
        ic.s = scale;
        if (ratio != 1.0) ic.variance_ratio = ratio;
        ic.M = s.M;
        ic.alpha = s.alpha;
        ic.seed = s.seed;
        const IntroResult r = intro_example(ic, workers);
        for (const auto& [label, rate, se] :
             {std::tuple{"T_n", r.naive_rate, r.naive_se},
              std::tuple{"T_n^R", r.robust_rate, r.robust_se}}) {
          CellResult c;
          c.scenario = name;
          c.test = label;
          c.n = n;
          c.reps = s.reps;
          c.rate = rate;
          c.se = se;
          c.valid = s.reps;
          c.rejections = static_cast<std::size_t>(std::llround(rate * static_cast<double>(s.reps)));
          table.rows.push_back(std::move(c));
        }
      }
    }
  }
  return table;
}

}  // namespace garchcp
