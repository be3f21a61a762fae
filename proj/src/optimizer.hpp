#pragma once

#include <Eigen/Dense>

#include <functional>
#include <vector>

namespace garchcp::detail {

/// Box l <= x <= u intersected with the half-space x[1] + x[2] <= pair_max.
struct FeasibleSet {
  Eigen::Vector3d lower;
  Eigen::Vector3d upper;
  double pair_max = 1.0;

  /// Euclidean projection.
  [[nodiscard]] Eigen::Vector3d project(const Eigen::Vector3d& x) const;
};

struct MinimizeResult {
  Eigen::Vector3d x;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
  double projected_gradient = 0.0;
  std::vector<double> trace;
};

struct MinimizeOptions {
  int max_iter = 500;
  double grad_tol = 1e-6;
  double rel_tol = 1e-10;
  bool record_trace = false;
};

using ValueFn = std::function<double(const Eigen::Vector3d&)>;
using ValueGradFn = std::function<double(const Eigen::Vector3d&, Eigen::Vector3d&)>;

/// Projected Newton iteration: the Hessian is a central difference of the
/// analytic gradient, restricted to the face of active constraints, with an
/// Armijo backtracking search along the projection arc. Falls back to the
/// projected gradient when the Newton step fails. Non-finite values count as
/// +inf and are rejected by the line search.
MinimizeResult minimize_projected_newton(const ValueFn& value, const ValueGradFn& value_grad,
                                         const Eigen::Vector3d& start, const FeasibleSet& set,
                                         const MinimizeOptions& opts);

}  // namespace garchcp::detail
