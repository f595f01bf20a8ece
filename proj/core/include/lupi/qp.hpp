#pragma once

#include <string_view>

#include <Eigen/Dense>

namespace lupi {

/// Dense convex quadratic program
///
///   minimize    1/2 x'Px + q'x
///   subject to  Gx <= h,  Ax = b.
///
/// `g`/`h` and `a`/`b` may have zero rows.
struct QpProblem {
  Eigen::MatrixXd p;
  Eigen::VectorXd q;
  Eigen::MatrixXd g;
  Eigen::VectorXd h;
  Eigen::MatrixXd a;
  Eigen::VectorXd b;

  /// Problem with n variables and no constraints; fill in the blocks after.
  static QpProblem unconstrained(Eigen::MatrixXd p, Eigen::VectorXd q);

  Eigen::Index num_vars() const noexcept { return q.size(); }
  Eigen::Index num_ineq() const noexcept { return h.size(); }
  Eigen::Index num_eq() const noexcept { return b.size(); }

  double objective(const Eigen::VectorXd& x) const;

  /// Throws InvalidArgument on inconsistent shapes, asymmetric P, or (when
  /// n <= 64) a negative eigenvalue below -1e-8.
  void validate() const;
};

enum class QpStatus { optimal, max_iterations, infeasible };

std::string_view to_string(QpStatus status);

struct QpSolution {
  Eigen::VectorXd x;
  Eigen::VectorXd lambda_ineq;
  Eigen::VectorXd nu_eq;
  double objective = 0.0;
  double kkt_residual = 0.0;
  QpStatus status = QpStatus::max_iterations;
  int iterations = 0;
};

struct QpOptions {
  double tol = 1e-8;
  int max_iter = 100;
};

/// Largest violation among the KKT conditions at (x, lambda, nu): primal
/// feasibility, dual feasibility, stationarity and complementary slackness,
/// all in the infinity norm.
double kkt_residual(const QpProblem& problem, const Eigen::VectorXd& x,
                    const Eigen::VectorXd& lambda_ineq, const Eigen::VectorXd& nu_eq);

/// Primal-dual interior point method with Mehrotra predictor-corrector steps.
/// Returns the best iterate seen; `status` tells whether it is certified.
QpSolution solve_qp(const QpProblem& problem, const QpOptions& options = {});

}  // namespace lupi
