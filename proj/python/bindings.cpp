#include "garchcp/detect.hpp"
#include "garchcp/estimate.hpp"
#include "garchcp/limits.hpp"
#include "garchcp/mcstudy.hpp"
#include "garchcp/model.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using namespace garchcp;

namespace {

std::string params_repr(const GarchParams& p) {
  std::ostringstream os;
  os << "GarchParams(omega=" << p.omega << ", alpha=" << p.alpha << ", beta=" << p.beta << ")";
  return os.str();
}

}  // namespace

PYBIND11_MODULE(garchcp, m) {
  m.doc() = "Outlier-robust change-point tests for GARCH(1,1) returns";

  py::class_<GarchParams>(m, "GarchParams")
      .def(py::init([](double omega, double alpha, double beta) {
             GarchParams p{omega, alpha, beta};
             p.validate();
             return p;
           }),
           py::arg("omega"), py::arg("alpha"), py::arg("beta"))
      .def_readwrite("omega", &GarchParams::omega)
      .def_readwrite("alpha", &GarchParams::alpha)
      .def_readwrite("beta", &GarchParams::beta)
      .def("unconditional_variance", &GarchParams::unconditional_variance)
      .def("__eq__", [](const GarchParams& a, const GarchParams& b) { return a == b; })
      .def("__repr__", &params_repr);

  py::enum_<OutlierKind>(m, "OutlierKind")
      .value("NONE", OutlierKind::None)
      .value("INNOVATION", OutlierKind::Innovation)
      .value("ADDITIVE", OutlierKind::Additive);

  py::enum_<TestKind>(m, "TestKind")
      .value("CUSUM_NAIVE", TestKind::CusumNaive)
      .value("CUSUM_ROBUST", TestKind::CusumRobust)
      .value("SN_NAIVE", TestKind::SnNaive)
      .value("SN_ROBUST", TestKind::SnRobust);

  py::enum_<LimitKind>(m, "LimitKind")
      .value("SUP_BRIDGE", LimitKind::SupBridge)
      .value("SN_FUNCTIONAL", LimitKind::SnFunctional);

  m.def(
      "simulate",
      [](const GarchParams& params, std::size_t n, std::size_t burn_in, OutlierKind kind, double p,
         double s, std::optional<double> change_at, std::optional<GarchParams> post,
         std::uint64_t seed) {
        std::optional<RegimeChange> change;
        if (post) {
          const double frac = change_at.value_or(0.5);
          if (!(frac > 0.0 && frac < 1.0)) throw std::invalid_argument("change_at must be in (0, 1)");
          change = RegimeChange{static_cast<std::size_t>(frac * static_cast<double>(n)), *post};
        }
        return simulate(params, n, burn_in, ContaminationSpec{kind, p, s}, change, seed);
      },
      py::arg("params"), py::arg("n"), py::arg("burn_in") = 1000,
      py::arg("contamination") = OutlierKind::None, py::arg("p") = 0.0, py::arg("s") = 0.0,
      py::arg("change_at") = py::none(), py::arg("post") = py::none(), py::arg("seed") = 1,
      "Simulate a (contaminated, possibly regime-switching) GARCH(1,1) series.");

  py::class_<FitResult>(m, "FitResult")
      .def_readonly("params", &FitResult::params)
      .def_readonly("objective", &FitResult::objective)
      .def_readonly("iterations", &FitResult::iterations)
      .def_readonly("converged", &FitResult::converged)
      .def_readonly("gamma", &FitResult::gamma);

  m.def(
      "fit",
      [](const std::vector<double>& x, double gamma, int max_iter, double tol) {
        FitOptions o;
        o.max_iter = max_iter;
        o.grad_tol = tol;
        return fit(x, gamma, o);
      },
      py::arg("series"), py::arg("gamma") = 0.0, py::arg("max_iter") = 500, py::arg("tol") = 1e-6,
      "QMLE (gamma = 0) or MDPDE (gamma > 0) fit.");

  m.def(
      "residuals_squared",
      [](const std::vector<double>& x, const GarchParams& p) { return residuals_squared(x, p); },
      py::arg("series"), py::arg("params"));

  py::class_<TestResult>(m, "TestResult")
      .def_readonly("kind", &TestResult::kind)
      .def_readonly("statistic", &TestResult::statistic)
      .def_readonly("critical_value", &TestResult::critical_value)
      .def_readonly("alpha", &TestResult::alpha)
      .def_readonly("reject", &TestResult::reject)
      .def_readonly("k_hat", &TestResult::k_hat)
      .def_readonly("tau_hat_sq", &TestResult::tau_hat_sq)
      .def_readonly("M_used", &TestResult::M_used)
      .def_readonly("gamma", &TestResult::gamma)
      .def_readonly("fit_params", &TestResult::fit_params);

  m.def(
      "run_test",
      [](const std::vector<double>& x, TestKind kind, double gamma, std::optional<double> M,
         double alpha) {
        std::optional<TruncationSpec> trunc;
        if (M) trunc = TruncationSpec{*M, 0.0};
        return run_test(x, kind, gamma, trunc, alpha);
      },
      py::arg("series"), py::arg("kind"), py::arg("gamma") = 0.0, py::arg("M") = py::none(),
      py::arg("alpha") = 0.05,
      "Fit, build (optionally truncated) squared residuals and run one test.");

  m.def(
      "cusum_test", [](const std::vector<double>& v, double alpha) { return cusum_test(v, alpha); },
      py::arg("values"), py::arg("alpha") = 0.05);
  m.def(
      "sn_test", [](const std::vector<double>& v, double alpha) { return sn_test(v, alpha); },
      py::arg("values"), py::arg("alpha") = 0.05);
  m.def(
      "cusum_process", [](const std::vector<double>& v) { return cusum_process(v); },
      py::arg("values"));
  m.def(
      "truncate", [](double x, double M, double delta) { return truncate(x, {M, delta}); },
      py::arg("x"), py::arg("M"), py::arg("delta") = 0.0);

  py::class_<Segment>(m, "Segment")
      .def_readonly("start", &Segment::start)
      .def_readonly("end", &Segment::end)
      .def_readonly("fit", &Segment::fit)
      .def_readonly("fit_failed", &Segment::fit_failed)
      .def_readonly("test", &Segment::test);

  py::class_<SegmentationResult>(m, "SegmentationResult")
      .def_readonly("change_points", &SegmentationResult::change_points)
      .def_readonly("segments", &SegmentationResult::segments)
      .def_readonly("warnings", &SegmentationResult::warnings);

  m.def(
      "binary_segmentation",
      [](const std::vector<double>& x, TestKind kind, double gamma, std::optional<double> M,
         double alpha, std::size_t min_segment) {
        SegmentationConfig cfg;
        cfg.kind = kind;
        cfg.gamma = gamma;
        cfg.trunc = M ? std::optional<TruncationSpec>(TruncationSpec{*M, 0.0}) : std::nullopt;
        cfg.alpha = alpha;
        cfg.min_segment = min_segment;
        return binary_segmentation(x, cfg);
      },
      py::arg("series"), py::arg("kind") = TestKind::SnRobust, py::arg("gamma") = 0.1,
      py::arg("M") = 9.0, py::arg("alpha") = 0.05, py::arg("min_segment") = 250);

  m.def("critical_value", py::overload_cast<LimitKind, double>(&critical_value), py::arg("kind"),
        py::arg("alpha"));
  m.def("kolmogorov_cdf", &kolmogorov_cdf, py::arg("x"));
  m.def(
      "simulate_limit",
      [](LimitKind kind, std::size_t grid_n, std::size_t reps, std::uint64_t seed) {
        return simulate_limit(kind, grid_n, reps, seed).quantiles;
      },
      py::arg("kind"), py::arg("grid_n") = 10000, py::arg("reps") = 100000, py::arg("seed") = 1,
      "Simulated quantiles of a limiting null law, keyed by probability level.");
}
