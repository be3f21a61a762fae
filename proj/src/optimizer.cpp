#include "optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace garchcp::detail {

Eigen::Vector3d FeasibleSet::project(const Eigen::Vector3d& x) const {
  Eigen::Vector3d p = x.cwiseMax(lower).cwiseMin(upper);
  if (p[1] + p[2] <= pair_max) return p;
  // The projection lies on the line x1 + x2 = pair_max, clipped to the box.
  const double lo = std::max(lower[1], pair_max - upper[2]);
  const double hi = std::min(upper[1], pair_max - lower[2]);
  const double a = std::clamp(0.5 * (x[1] - x[2] + pair_max), lo, hi);
  p[1] = a;
  p[2] = pair_max - a;
  return p;
}

namespace {

constexpr double kArmijo = 1e-4;
constexpr int kMaxBacktracks = 50;

double safe(double v) {
  return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
}

// Orthogonal projector onto the directions that keep every active constraint
// active: box coordinates pinned with an outward gradient, and the face
// x1 + x2 = pair_max when descent would push the sum up.
Eigen::Matrix3d active_projector(const Eigen::Vector3d& x, const Eigen::Vector3d& g,
                                 const FeasibleSet& set) {
  Eigen::Matrix<double, 4, 3> c = Eigen::Matrix<double, 4, 3>::Zero();
  int rows = 0;
  for (int i = 0; i < 3; ++i) {
    const double tol = 1e-12 * std::max(1.0, std::abs(set.upper[i]));
    if ((x[i] <= set.lower[i] + tol && g[i] > 0.0) || (x[i] >= set.upper[i] - tol && g[i] < 0.0)) {
      c(rows++, i) = 1.0;
    }
  }
  if (x[1] + x[2] >= set.pair_max - 1e-12 && g[1] + g[2] < 0.0) {
    c(rows, 1) = 1.0;
    c(rows++, 2) = 1.0;
  }
  if (rows == 0) return Eigen::Matrix3d::Identity();
  const Eigen::MatrixXd a = c.topRows(rows);
  const Eigen::MatrixXd gram_inv = (a * a.transpose()).completeOrthogonalDecomposition().pseudoInverse();
  return Eigen::Matrix3d::Identity() - a.transpose() * gram_inv * a;
}

}  // namespace

MinimizeResult minimize_projected_newton(const ValueFn& value, const ValueGradFn& value_grad,
                                         const Eigen::Vector3d& start, const FeasibleSet& set,
                                         const MinimizeOptions& opts) {
  MinimizeResult res;
  Eigen::Vector3d x = set.project(start);
  Eigen::Vector3d g;
  double f = safe(value_grad(x, g));
  if (opts.record_trace) res.trace.push_back(f);

  auto hessian = [&](const Eigen::Vector3d& at, const Eigen::Vector3d& g0) {
    Eigen::Matrix3d h;
    Eigen::Vector3d gp, gm;
    for (int i = 0; i < 3; ++i) {
      const double step = 1e-5 * std::max(std::abs(at[i]), set.lower[i] > 0.0 ? set.lower[i] : 1e-3);
      Eigen::Vector3d xp = at, xm = at;
      xp[i] += step;
      value_grad(xp, gp);
      if (at[i] - step >= set.lower[i]) {
        xm[i] -= step;
        value_grad(xm, gm);
        h.col(i) = (gp - gm) / (2.0 * step);
      } else {
        h.col(i) = (gp - g0) / step;
      }
    }
    return Eigen::Matrix3d(0.5 * (h + h.transpose()));
  };

  // Armijo search along the projection arc x(t) = P(x + t d).
  auto search = [&](const Eigen::Vector3d& d, Eigen::Vector3d& x_new, double& f_new) {
    double step = 1.0;
    for (int bt = 0; bt < kMaxBacktracks; ++bt, step *= 0.5) {
      x_new = set.project(x + step * d);
      const Eigen::Vector3d s = x_new - x;
      if (s.cwiseAbs().maxCoeff() == 0.0) return false;
      f_new = safe(value(x_new));
      if (f_new <= f + kArmijo * g.dot(s)) return true;
    }
    return false;
  };

  int small_changes = 0;
  int iter = 0;
  for (; iter < opts.max_iter; ++iter) {
    const double pg = (x - set.project(x - g)).cwiseAbs().maxCoeff();
    res.projected_gradient = pg;
    if (!std::isfinite(f)) break;
    if (pg <= opts.grad_tol) {
      res.converged = true;
      break;
    }

    // Newton step in the subspace left free by the active constraints, with
    // the reduced Hessian's eigenvalues floored to keep it a descent step.
    const Eigen::Matrix3d p = active_projector(x, g, set);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> pe(p);
    Eigen::MatrixXd z(3, 0);
    for (int i = 0; i < 3; ++i) {
      if (pe.eigenvalues()[i] > 0.5) {
        z.conservativeResize(3, z.cols() + 1);
        z.col(z.cols() - 1) = pe.eigenvectors().col(i);
      }
    }
    if (z.cols() == 0) break;
    // Jacobi scaling first: curvature in omega / v can exceed that in alpha
    // and beta by many orders of magnitude when outliers inflate v.
    const Eigen::MatrixXd hr = z.transpose() * hessian(x, g) * z;
    const Eigen::VectorXd scale =
        hr.diagonal().cwiseAbs().cwiseMax(1e-300).cwiseSqrt().cwiseInverse();
    const Eigen::MatrixXd hs = scale.asDiagonal() * hr * scale.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> he(hs);
    Eigen::VectorXd lam = he.eigenvalues().cwiseAbs();
    lam = lam.cwiseMax(std::max(1e-12, 1e-8 * lam.maxCoeff()));
    const Eigen::VectorXd gs = scale.asDiagonal() * (z.transpose() * g);
    const Eigen::VectorXd ds =
        he.eigenvectors() * (he.eigenvectors().transpose() * gs).cwiseQuotient(lam);
    Eigen::Vector3d d = -z * (scale.asDiagonal() * ds);
    if (!d.allFinite() || g.dot(d) >= 0.0) d = -(p * g);

    Eigen::Vector3d x_new;
    double f_new = f;
    bool accepted = search(d, x_new, f_new);
    if (!accepted) {
      d = -(p * g);
      accepted = search(d, x_new, f_new);
    }
    if (!accepted) break;

    f_new = safe(value_grad(x_new, g));
    const double change = std::abs(f - f_new);
    x = x_new;
    f = f_new;
    if (opts.record_trace) res.trace.push_back(f);

    if (change <= opts.rel_tol * std::max(1.0, std::abs(f))) {
      if (++small_changes >= 2) {
        ++iter;
        res.projected_gradient = (x - set.project(x - g)).cwiseAbs().maxCoeff();
        res.converged = true;
        break;
      }
    } else {
      small_changes = 0;
    }
  }
  res.x = x;
  res.value = f;
  res.iterations = iter;
  return res;
}

}  // namespace garchcp::detail
