#include "lupi/svm_plus.hpp"

#include <string>

#include "lupi/error.hpp"

namespace lupi {

QpProblem svm_plus_qp(const Matrix& x, const Matrix& x_star, std::span<const int> y,
                      const SvmPlusConfig& config) {
  const Eigen::Index n = x.rows();
  const Eigen::Index d = x.cols();
  const Eigen::Index ds = x_star.cols();
  if (x_star.rows() != n || static_cast<std::size_t>(n) != y.size())
    throw DimensionMismatch("SVM+: x, x_star and y must have the same number of rows");
  if (!(config.c > 0.0) || !(config.gamma > 0.0))
    throw InvalidArgument("SVM+: C and gamma must be positive");
  for (int v : y) {
    if (v != 1 && v != -1) throw InvalidArgument("SVM+ labels must be -1 or +1");
  }

  // Variable layout: [w (d), b, w* (ds), b*].
  const Eigen::Index nv = d + 1 + ds + 1;
  const Eigen::Index ws = d + 1;
  const Eigen::Index bs = d + 1 + ds;

  Matrix p = Matrix::Zero(nv, nv);
  p.diagonal().head(d).setOnes();
  p.diagonal().segment(ws, ds).setConstant(config.gamma);

  Vector q = Vector::Zero(nv);
  q.segment(ws, ds) = config.c * x_star.colwise().sum().transpose();
  q[bs] = config.c * static_cast<double>(n);

  Matrix g = Matrix::Zero(2 * n, nv);
  Vector h(2 * n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double yi = y[static_cast<std::size_t>(i)];
    // -y_i(<w, x_i> + b) - (<w*, x*_i> + b*) <= -1
    g.row(i).head(d) = -yi * x.row(i);
    g(i, d) = -yi;
    g.row(i).segment(ws, ds) = -x_star.row(i);
    g(i, bs) = -1.0;
    h[i] = -1.0;
    // -(<w*, x*_i> + b*) <= 0
    g.row(n + i).segment(ws, ds) = -x_star.row(i);
    g(n + i, bs) = -1.0;
    h[n + i] = 0.0;
  }
  return QpProblem{std::move(p), std::move(q), std::move(g), std::move(h), Matrix(0, nv), Vector(0)};
}

SvmPlusResult train_svm_plus(const Matrix& x, const Matrix& x_star, std::span<const int> y,
                             const SvmPlusConfig& config) {
  const QpProblem qp = svm_plus_qp(x, x_star, y, config);
  const QpSolution sol = solve_qp(qp, QpOptions{config.tol, config.max_iter});
  if (sol.status == QpStatus::infeasible)
    throw SolverError("SVM+: QP solver reported infeasibility (kkt residual " +
                      std::to_string(sol.kkt_residual) + ")");

  const Eigen::Index d = x.cols();
  const Eigen::Index ds = x_star.cols();
  SvmPlusResult out;
  out.model = LinearModel{sol.x.head(d), sol.x[d]};
  out.slack = SlackModel{sol.x.segment(d + 1, ds), sol.x[d + 1 + ds]};
  out.objective = sol.objective;
  out.kkt_residual = sol.kkt_residual;
  out.status = sol.status;
  out.iterations = sol.iterations;
  out.train_slacks = slack_values(out.slack, x_star);

  const Vector margins = decision_margins(out.model, x, y);
  const double margin_violation = (1.0 - out.train_slacks.array() - margins.array()).maxCoeff();
  const double slack_violation = (-out.train_slacks.array()).maxCoeff();
  if (std::max(margin_violation, slack_violation) > 0.0) {
    out.worst_block = margin_violation >= slack_violation ? "margin" : "slack";
    out.worst_violation = std::max(margin_violation, slack_violation);
  }
  return out;
}

Vector slack_values(const SlackModel& slack, const Matrix& x_star) {
  if (x_star.cols() != slack.w_star.size())
    throw DimensionMismatch("slack model has " + std::to_string(slack.w_star.size()) +
                            " weights but privileged data has " + std::to_string(x_star.cols()) +
                            " columns");
  return (x_star * slack.w_star).array() + slack.b_star;
}

double svm_plus_objective(const LinearModel& model, const SlackModel& slack, const Matrix& x_star,
                          const SvmPlusConfig& config) {
  return 0.5 * (model.w.squaredNorm() + config.gamma * slack.w_star.squaredNorm()) +
         config.c * slack_values(slack, x_star).sum();
}

}  // namespace lupi
