#include "optomech/least_squares.hpp"

#include <cmath>
#include <limits>

#include "optomech/errors.hpp"

namespace optomech {

namespace {

constexpr double max_damping = 1e20;

Eigen::MatrixXd covariance_at(const Eigen::MatrixXd &jac, double cost) {
  const Eigen::Index n = jac.rows();
  const Eigen::Index p = jac.cols();
  const double dof = static_cast<double>(std::max<Eigen::Index>(n - p, 1));
  const double sigma2 = 2.0 * cost / dof;
  const Eigen::MatrixXd normal = jac.transpose() * jac;
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(normal);
  return sigma2 * cod.pseudoInverse();
}

} // namespace

LeastSquaresResult levenberg_marquardt(const ResidualFunction &fn, Eigen::VectorXd start,
                                       Eigen::Index residual_count, const LeastSquaresOptions &options,
                                       const Projection &project) {
  const Eigen::Index p = start.size();
  if (p == 0 || residual_count < p) {
    throw DomainError("least squares needs at least as many residuals as parameters");
  }
  if (project) {
    project(start);
  }

  Eigen::VectorXd x = std::move(start);
  Eigen::VectorXd r(residual_count);
  Eigen::MatrixXd jac(residual_count, p);
  fn(x, r, jac);
  double cost = 0.5 * r.squaredNorm();
  if (!std::isfinite(cost)) {
    throw DomainError("least squares: residuals at the starting point are not finite");
  }

  Eigen::VectorXd trial_r(residual_count);
  Eigen::MatrixXd trial_jac(residual_count, p);
  double damping = options.initial_damping;
  LeastSquaresResult result;

  int iter = 0;
  while (iter < options.max_iterations) {
    ++iter;
    if (cost == 0.0) {
      result.converged = true;
      break;
    }
    const Eigen::MatrixXd normal = jac.transpose() * jac;
    const Eigen::VectorXd gradient = jac.transpose() * r;
    Eigen::VectorXd scale = normal.diagonal().cwiseMax(std::numeric_limits<double>::min());

    bool accepted = false;
    while (damping < max_damping) {
      Eigen::MatrixXd damped = normal;
      damped.diagonal() += damping * scale;
      Eigen::VectorXd step = damped.ldlt().solve(-gradient);
      Eigen::VectorXd candidate = x + step;
      if (project) {
        project(candidate);
      }
      step = candidate - x;
      fn(candidate, trial_r, trial_jac);
      const double trial_cost = 0.5 * trial_r.squaredNorm();
      if (std::isfinite(trial_cost) && trial_cost <= cost) {
        const double decrease = (cost - trial_cost) / cost;
        const double step_size = step.norm() / (x.norm() + options.relative_step_tolerance);
        x = std::move(candidate);
        r.swap(trial_r);
        jac.swap(trial_jac);
        cost = trial_cost;
        damping = std::max(damping / 10.0, 1e-15);
        accepted = true;
        if (step_size < options.relative_step_tolerance || decrease < options.relative_cost_tolerance) {
          result.converged = true;
        }
        break;
      }
      damping *= 10.0;
    }
    if (!accepted) {
      // No damping level lowers the cost any further: x is a local minimum to working precision.
      result.converged = true;
    }
    if (result.converged) {
      break;
    }
  }

  result.parameters = x;
  result.cost = cost;
  result.iterations = iter;
  result.covariance = covariance_at(jac, cost);
  return result;
}

} // namespace optomech
