// Dense Levenberg-Marquardt with analytic Jacobians, internal parameter
// scaling, optional box constraints, and covariance from the
// residual-scaled Gauss-Newton Hessian at the optimum.
#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>

namespace emspec {

// Fills residuals (size m) and, when jacobian != nullptr, the m x n
// Jacobian, both at parameter vector p.
using LmFunction =
    std::function<void(const Eigen::VectorXd& p, Eigen::VectorXd& residuals,
                       Eigen::MatrixXd* jacobian)>;

struct LmOptions {
  double gtol = 1e-10;       // scaled-gradient (cosine) tolerance
  double xtol = 1e-12;       // relative step tolerance
  int max_iterations = 500;
  double tau = 1e-3;         // initial damping, lambda0 = tau * max diag(J'J)
};

struct LmBounds {
  Eigen::VectorXd lower;  // size 0 = unbounded
  Eigen::VectorXd upper;
};

struct LmResult {
  Eigen::VectorXd parameters;
  Eigen::VectorXd standard_errors;
  Eigen::MatrixXd covariance;
  double residual_norm = 0;     // ||r||_2 at the solution
  double gradient_measure = 0;  // max_j |(J'r)_j| / (||J_j|| ||r||)
  int iterations = 0;
  bool converged = false;       // gradient criterion met at exit
  bool identifiable = true;     // Jacobian numerically full rank at exit
  std::string message;
};

LmResult lm_minimize(const LmFunction& fn, Eigen::VectorXd p0, const LmOptions& opt = {},
                     const LmBounds& bounds = {});

}  // namespace emspec
