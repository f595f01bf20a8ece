#pragma once

#include <span>
#include <string>

#include "lupi/qp.hpp"
#include "lupi/svm.hpp"

namespace lupi {

/// Slack function xi(x*) = <w*, x*> + b* learned in the privileged space.
struct SlackModel {
  Vector w_star;
  double b_star = 0.0;
};

struct SvmPlusConfig {
  double c = 1.0;
  double gamma = 1.0;
  double tol = 1e-8;
  int max_iter = 100;
};

struct SvmPlusResult {
  LinearModel model;
  SlackModel slack;
  double objective = 0.0;
  double kkt_residual = 0.0;
  QpStatus status = QpStatus::max_iterations;
  int iterations = 0;
  /// Slack function evaluated on the training set.
  Vector train_slacks;
  /// Name of the most violated constraint block ("margin", "slack", or
  /// "none") and its worst violation.
  std::string worst_block = "none";
  double worst_violation = 0.0;
};

/// SVM+ with linear decision and slack functions:
///
///   min 1/2 (|w|^2 + gamma |w*|^2) + C sum_i (<w*, x*_i> + b*)
///   s.t. y_i (<w, x_i> + b) >= 1 - (<w*, x*_i> + b*),   <w*, x*_i> + b* >= 0
///
/// solved as a primal QP in (w, b, w*, b*). Throws SolverError when the QP
/// solver reports infeasibility; a result with status max_iterations is
/// returned as-is.
SvmPlusResult train_svm_plus(const Matrix& x, const Matrix& x_star, std::span<const int> y,
                             const SvmPlusConfig& config);

/// The QP handed to the solver; exposed for diagnostics and tests.
QpProblem svm_plus_qp(const Matrix& x, const Matrix& x_star, std::span<const int> y,
                      const SvmPlusConfig& config);

/// <w*, x*_i> + b* per row. Large values mark hard samples.
Vector slack_values(const SlackModel& slack, const Matrix& x_star);

/// The SVM+ objective recomputed from the model blocks.
double svm_plus_objective(const LinearModel& model, const SlackModel& slack, const Matrix& x_star,
                          const SvmPlusConfig& config);

}  // namespace lupi
