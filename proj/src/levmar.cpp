#include "emspec/levmar.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "emspec/errors.hpp"

namespace emspec {

namespace {

// Cosine-style gradient measure: max_j |(J'r)_j| / (||J_j|| ||r||).
// Scale-invariant, zero at any stationary point.
double gradient_measure(const Eigen::MatrixXd& J, const Eigen::VectorXd& r) {
  const double rnorm = r.norm();
  if (rnorm == 0) return 0;
  double worst = 0;
  const Eigen::VectorXd g = J.transpose() * r;
  for (Eigen::Index j = 0; j < J.cols(); ++j) {
    const double cn = J.col(j).norm();
    if (cn > 0) worst = std::max(worst, std::abs(g[j]) / (cn * rnorm));
  }
  return worst;
}

Eigen::VectorXd clamp_to_bounds(Eigen::VectorXd p, const LmBounds& bounds) {
  if (bounds.lower.size() == p.size())
    for (Eigen::Index j = 0; j < p.size(); ++j) p[j] = std::max(p[j], bounds.lower[j]);
  if (bounds.upper.size() == p.size())
    for (Eigen::Index j = 0; j < p.size(); ++j) p[j] = std::min(p[j], bounds.upper[j]);
  return p;
}

}  // namespace

LmResult lm_minimize(const LmFunction& fn, Eigen::VectorXd p0, const LmOptions& opt,
                     const LmBounds& bounds) {
  const Eigen::Index n = p0.size();
  if (n == 0) throw InvalidInputError("lm_minimize: empty parameter vector");

  // Internal scaling by the initial magnitudes keeps mixed-unit problems
  // (rad/s frequencies next to order-one efficiencies) well conditioned.
  Eigen::VectorXd scale(n);
  for (Eigen::Index j = 0; j < n; ++j) scale[j] = std::abs(p0[j]) > 0 ? std::abs(p0[j]) : 1.0;

  Eigen::VectorXd p = clamp_to_bounds(std::move(p0), bounds);
  Eigen::VectorXd r;
  Eigen::MatrixXd J;
  fn(p, r, &J);
  if (J.rows() != r.size() || J.cols() != n)
    throw InvalidInputError("lm_minimize: Jacobian shape mismatch");
  const Eigen::Index m = r.size();

  Eigen::MatrixXd Js = J * scale.asDiagonal();  // Jacobian in scaled space
  double cost = 0.5 * r.squaredNorm();

  double mu = -1;  // set from the first A = Js'Js
  double nu = 2;
  int iterations = 0;
  std::string message = "max_iterations";

  for (int it = 0; it < opt.max_iterations; ++it) {
    iterations = it + 1;
    if (r.norm() == 0) {
      message = "exact";
      break;
    }
    if (gradient_measure(Js, r) <= opt.gtol) {
      message = "gradient";
      break;
    }

    const Eigen::MatrixXd A = Js.transpose() * Js;
    const Eigen::VectorXd g = Js.transpose() * r;
    const double max_diag = A.diagonal().maxCoeff();
    if (!(max_diag > 0)) {
      message = "degenerate";
      break;
    }
    if (mu < 0) mu = opt.tau * max_diag;

    Eigen::VectorXd diag = A.diagonal();
    for (Eigen::Index j = 0; j < n; ++j) diag[j] = std::max(diag[j], 1e-14 * max_diag);

    // Damped normal equations, retried with stronger damping on failure.
    bool stepped = false;
    while (!stepped) {
      Eigen::MatrixXd Ad = A;
      Ad.diagonal() += mu * diag;
      Eigen::LDLT<Eigen::MatrixXd> ldlt(Ad);
      Eigen::VectorXd dq = ldlt.solve(-g);
      if (ldlt.info() != Eigen::Success || !dq.allFinite()) {
        mu *= nu;
        nu *= 2;
        if (mu > 1e32 * max_diag) {
          message = "stalled";
          stepped = true;
        }
        continue;
      }

      const Eigen::VectorXd p_new =
          clamp_to_bounds(p + (dq.array() * scale.array()).matrix(), bounds);
      const Eigen::VectorXd dq_eff = ((p_new - p).array() / scale.array()).matrix();
      const Eigen::VectorXd q = (p.array() / scale.array()).matrix();

      if (dq_eff.norm() <= opt.xtol * (q.norm() + opt.xtol)) {
        message = "step";
        stepped = true;
        break;
      }

      // Model decrease of 0.5||r||^2 for the (possibly clamped) step.
      const double predicted = -g.dot(dq_eff) - 0.5 * dq_eff.dot(A * dq_eff);
      Eigen::VectorXd r_new;
      fn(p_new, r_new, nullptr);
      const double cost_new = 0.5 * r_new.squaredNorm();

      if (cost_new < cost && predicted > 0) {
        const double rho = (cost - cost_new) / predicted;
        p = p_new;
        fn(p, r, &J);
        Js = J * scale.asDiagonal();
        cost = 0.5 * r.squaredNorm();
        mu *= std::max(1.0 / 3.0, 1.0 - std::pow(2.0 * rho - 1.0, 3));
        nu = 2;
        stepped = true;
      } else {
        mu *= nu;
        nu *= 2;
        if (mu > 1e32 * max_diag) {
          message = "stalled";
          stepped = true;
        }
      }
    }
    if (message == "step" || message == "stalled") break;
  }

  // Final state, gradient check, and covariance.
  fn(p, r, &J);
  Js = J * scale.asDiagonal();

  LmResult result;
  result.parameters = p;
  result.residual_norm = r.norm();
  result.gradient_measure = gradient_measure(Js, r);
  result.iterations = iterations;
  result.converged = (result.gradient_measure <= opt.gtol) || (result.residual_norm == 0);
  result.message = message;

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(Js, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& sv = svd.singularValues();
  const double sv_max = sv.size() ? sv[0] : 0.0;
  const double rank_tol = 1e-10 * sv_max;
  result.identifiable = sv_max > 0;
  Eigen::VectorXd inv2(sv.size());
  for (Eigen::Index j = 0; j < sv.size(); ++j) {
    if (sv[j] > rank_tol) {
      inv2[j] = 1.0 / (sv[j] * sv[j]);
    } else {
      inv2[j] = 0;
      result.identifiable = false;
    }
  }
  const double s2 = (m > n) ? r.squaredNorm() / static_cast<double>(m - n) : 0.0;
  Eigen::MatrixXd cov_q = svd.matrixV() * inv2.asDiagonal() * svd.matrixV().transpose() * s2;
  result.covariance = scale.asDiagonal() * cov_q * scale.asDiagonal();
  result.standard_errors.resize(n);
  for (Eigen::Index j = 0; j < n; ++j)
    result.standard_errors[j] = std::sqrt(std::max(result.covariance(j, j), 0.0));
  if (!result.identifiable && result.message != "degenerate")
    result.message += "; non-identifiable directions in Jacobian";
  return result;
}

}  // namespace emspec
