#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace garchcp {

/// GARCH(1,1) parameters: sigma^2_t = omega + alpha * X^2_{t-1} + beta * sigma^2_{t-1}.
struct GarchParams {
  double omega = 1.0;
  double alpha = 0.0;
  double beta = 0.0;

  /// omega > 0, alpha >= 0, beta >= 0, alpha + beta < 1, all finite.
  [[nodiscard]] bool valid() const noexcept;
  /// Throws std::invalid_argument naming the violated constraint.
  void validate() const;

  [[nodiscard]] double persistence() const noexcept { return alpha + beta; }
  [[nodiscard]] double unconditional_variance() const;

  friend bool operator==(const GarchParams&, const GarchParams&) = default;
};

enum class OutlierKind {
  None,
  Innovation,  // IO: outlier added to eps_t inside the recursion
  Additive,    // AO: outlier added to the observed X_t after generation
};

struct ContaminationSpec {
  OutlierKind kind = OutlierKind::None;
  double p = 0.0;  // Bernoulli probability of an outlier at each t
  double s = 0.0;  // magnitude, in units of the unconditional sd

  void validate() const;
  [[nodiscard]] bool active() const noexcept { return kind != OutlierKind::None; }
};

/// Parameters switch to `params` for t > index (1-based), i.e. X_1..X_index
/// come from the initial regime.
struct RegimeChange {
  std::size_t index = 0;
  GarchParams params;
};

/// Innovation law. Only the Gaussian case is supported; new laws must be added
/// here explicitly.
enum class Innovation { StandardNormal };

struct VariancePath {
  std::vector<double> values;  // sigma~^2_1 .. sigma~^2_n
  double init = 0.0;
};

/// Internal quantities of one simulation run, for testing.
struct SimulationTrace {
  std::vector<double> clean;           // X_{o,t} before additive outliers
  std::vector<unsigned char> outlier;  // P_t
  std::vector<double> sigma2;          // conditional variance used at t
  std::vector<double> outlier_scale;   // s * sqrt(omega / (1 - alpha - beta)) of the regime at t
};

/// sqrt(omega / (1 - alpha - beta)). Throws if alpha + beta >= 1.
double unconditional_sd(const GarchParams& params);

/// sigma~^2_1 = init, sigma~^2_t = omega + alpha X^2_{t-1} + beta sigma~^2_{t-1}.
VariancePath variance_path(std::span<const double> series, const GarchParams& params, double init);

/// Simulates n observations of a (possibly contaminated, possibly
/// regime-switching) GARCH(1,1) process with standard normal innovations.
///
/// The recursion starts at the unconditional variance of `params`, runs
/// `burn_in + n` steps and keeps the last n. Innovation outliers enter the
/// recursion; additive outliers are applied to the output only. The outlier
/// scale uses the regime in force at t. Every step draws one normal and one
/// uniform, so outputs for p = 0, kind = None and s = 0 share a stream.
std::vector<double> simulate(const GarchParams& params, std::size_t n, std::size_t burn_in,
                             const ContaminationSpec& contamination,
                             const std::optional<RegimeChange>& change, std::uint64_t seed,
                             SimulationTrace* trace = nullptr);

/// sign with sign(0) = +1.
inline double sign_of(double x) noexcept { return x < 0.0 ? -1.0 : 1.0; }

}  // namespace garchcp
