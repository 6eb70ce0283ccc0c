#pragma once

#include <functional>

#include <Eigen/Dense>

namespace optomech {

struct LeastSquaresOptions {
  double relative_step_tolerance = 1e-10;
  double relative_cost_tolerance = 1e-12;
  int max_iterations = 200;
  double initial_damping = 1e-3;
};

/// Fills residuals r(x) and the Jacobian ∂r/∂x (rows = residuals).
using ResidualFunction = std::function<void(const Eigen::VectorXd &x, Eigen::VectorXd &residuals,
                                            Eigen::MatrixXd &jacobian)>;

/// Maps a trial point back into the feasible set (e.g. clamps a parameter at zero).
using Projection = std::function<void(Eigen::VectorXd &x)>;

struct LeastSquaresResult {
  Eigen::VectorXd parameters;
  Eigen::MatrixXd covariance; // σ²·(JᵀJ)⁻¹ with σ² = Σr² / (n − p)
  double cost = 0.0;          // ½·Σr²
  int iterations = 0;
  bool converged = false;
};

/// Marquardt-scaled damped Gauss-Newton. Only steps that lower the cost are accepted, so the cost
/// sequence is monotone. Returns the best point found even when not converged.
LeastSquaresResult levenberg_marquardt(const ResidualFunction &fn, Eigen::VectorXd start,
                                       Eigen::Index residual_count, const LeastSquaresOptions &options = {},
                                       const Projection &project = {});

} // namespace optomech
