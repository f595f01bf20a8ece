#include "lupi/qp.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include <Eigen/Eigenvalues>

#include "lupi/error.hpp"

namespace lupi {
namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kHessianRegularization = 1e-10;
constexpr double kEqualityRegularization = 1e-12;
constexpr double kStepFraction = 0.99;
constexpr int kStallWindow = 10;

double max_or_zero(const VectorXd& v) { return v.size() ? v.maxCoeff() : 0.0; }
double inf_norm(const VectorXd& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

// Largest step in [0, 1] keeping v + alpha * dv >= 0.
double step_to_boundary(const VectorXd& v, const VectorXd& dv) {
  double alpha = 1.0;
  for (Index i = 0; i < v.size(); ++i) {
    if (dv[i] < 0.0) alpha = std::min(alpha, -v[i] / dv[i]);
  }
  return alpha;
}

// Factorization of the reduced Newton system
//   [ P + G'WG + dI   A' ] [dx]   [rx]
//   [ A              -eI ] [dnu] = [ry]
class NewtonSystem {
 public:
  NewtonSystem(const QpProblem& qp, const VectorXd& weights) : n_(qp.num_vars()), p_(qp.num_eq()) {
    MatrixXd h = qp.p;
    h.diagonal().array() += kHessianRegularization;
    if (weights.size() > 0) h.noalias() += qp.g.transpose() * weights.asDiagonal() * qp.g;
    if (p_ == 0) {
      ldlt_.compute(h);
    } else {
      MatrixXd k = MatrixXd::Zero(n_ + p_, n_ + p_);
      k.topLeftCorner(n_, n_) = h;
      k.topRightCorner(n_, p_) = qp.a.transpose();
      k.bottomLeftCorner(p_, n_) = qp.a;
      k.bottomRightCorner(p_, p_).diagonal().setConstant(-kEqualityRegularization);
      lu_.compute(k);
    }
  }

  void solve(const VectorXd& rx, const VectorXd& ry, VectorXd& dx, VectorXd& dnu) const {
    if (p_ == 0) {
      dx = ldlt_.solve(rx);
      dnu.resize(0);
      return;
    }
    VectorXd rhs(n_ + p_);
    rhs << rx, ry;
    const VectorXd sol = lu_.solve(rhs);
    dx = sol.head(n_);
    dnu = sol.tail(p_);
  }

 private:
  Index n_;
  Index p_;
  Eigen::LDLT<MatrixXd> ldlt_;
  Eigen::PartialPivLU<MatrixXd> lu_;
};

QpSolution finish(const QpProblem& qp, VectorXd x, VectorXd lambda, VectorXd nu, QpStatus status,
                  int iterations) {
  QpSolution sol;
  sol.objective = qp.objective(x);
  sol.kkt_residual = kkt_residual(qp, x, lambda, nu);
  sol.x = std::move(x);
  sol.lambda_ineq = std::move(lambda);
  sol.nu_eq = std::move(nu);
  sol.status = status;
  sol.iterations = iterations;
  return sol;
}

QpSolution solve_equality_only(const QpProblem& qp, const QpOptions& options) {
  const NewtonSystem sys(qp, VectorXd());
  VectorXd x, nu;
  sys.solve(-qp.q, qp.b, x, nu);
  // One round of iterative refinement on the KKT residual.
  VectorXd rd = qp.p * x + qp.q;
  if (qp.num_eq() > 0) rd += qp.a.transpose() * nu;
  VectorXd re = qp.num_eq() > 0 ? VectorXd(qp.a * x - qp.b) : VectorXd();
  VectorXd dx, dnu;
  sys.solve(-rd, -re, dx, dnu);
  x += dx;
  if (qp.num_eq() > 0) nu += dnu;
  const double res = kkt_residual(qp, x, VectorXd(), nu);
  return finish(qp, std::move(x), VectorXd(), std::move(nu),
                res <= options.tol ? QpStatus::optimal : QpStatus::max_iterations, 1);
}

}  // namespace

QpProblem QpProblem::unconstrained(MatrixXd p, VectorXd q) {
  const Index n = q.size();
  return QpProblem{std::move(p), std::move(q), MatrixXd(0, n), VectorXd(0), MatrixXd(0, n),
                   VectorXd(0)};
}

double QpProblem::objective(const VectorXd& x) const { return 0.5 * x.dot(p * x) + q.dot(x); }

void QpProblem::validate() const {
  const Index n = q.size();
  if (n == 0) throw InvalidArgument("QP has no variables");
  if (p.rows() != n || p.cols() != n) throw InvalidArgument("QP: P must be n x n");
  if (g.cols() != n || g.rows() != h.size()) throw InvalidArgument("QP: G must be m x n, h length m");
  if (a.cols() != n || a.rows() != b.size()) throw InvalidArgument("QP: A must be p x n, b length p");
  if (!p.allFinite() || !q.allFinite() || !g.allFinite() || !h.allFinite() || !a.allFinite() ||
      !b.allFinite())
    throw InvalidArgument("QP: non-finite coefficients");
  if ((p - p.transpose()).cwiseAbs().maxCoeff() > 1e-10) throw InvalidArgument("QP: P is not symmetric");
  if (n <= 64) {
    const Eigen::SelfAdjointEigenSolver<MatrixXd> eig(p, Eigen::EigenvaluesOnly);
    if (eig.eigenvalues().minCoeff() < -1e-8) throw InvalidArgument("QP: P is not positive semidefinite");
  }
}

std::string_view to_string(QpStatus status) {
  switch (status) {
    case QpStatus::optimal:
      return "optimal";
    case QpStatus::max_iterations:
      return "max_iterations";
    case QpStatus::infeasible:
      return "infeasible";
  }
  return "unknown";
}

double kkt_residual(const QpProblem& qp, const VectorXd& x, const VectorXd& lambda,
                    const VectorXd& nu) {
  VectorXd stationarity = qp.p * x + qp.q;
  double res = 0.0;
  if (qp.num_ineq() > 0) {
    const VectorXd slack = qp.g * x - qp.h;
    stationarity.noalias() += qp.g.transpose() * lambda;
    res = std::max(res, std::max(0.0, max_or_zero(slack)));
    res = std::max(res, std::max(0.0, -lambda.minCoeff()));
    res = std::max(res, inf_norm(lambda.cwiseProduct(slack)));
  }
  if (qp.num_eq() > 0) {
    stationarity.noalias() += qp.a.transpose() * nu;
    res = std::max(res, inf_norm(qp.a * x - qp.b));
  }
  return std::max(res, inf_norm(stationarity));
}

QpSolution solve_qp(const QpProblem& qp, const QpOptions& options) {
  qp.validate();
  if (!(options.tol > 0.0)) throw InvalidArgument("QP tolerance must be positive");
  if (options.max_iter < 1) throw InvalidArgument("QP max_iter must be at least 1");
  if (qp.num_ineq() == 0) return solve_equality_only(qp, options);

  const Index m = qp.num_ineq();
  const Index pe = qp.num_eq();

  // Starting point: minimize 1/2 x'Px + q'x + 1/2 |h - Gx|^2 subject to Ax = b.
  // The residual Gx - h doubles as the multiplier guess; slacks and
  // multipliers are then shifted into the positive orthant.
  VectorXd x, nu;
  {
    QpProblem shifted = qp;
    shifted.p.noalias() += qp.g.transpose() * qp.g;
    shifted.q -= qp.g.transpose() * qp.h;
    const NewtonSystem sys(shifted, VectorXd());
    sys.solve(-shifted.q, qp.b, x, nu);
  }
  VectorXd s = qp.h - qp.g * x;
  VectorXd lambda = -s;
  const auto shift_positive = [](VectorXd& v) {
    const double lowest = v.minCoeff();
    if (lowest <= 0.0) v.array() += 1.0 - lowest;
  };
  shift_positive(s);
  shift_positive(lambda);
  if (pe == 0) nu.resize(0);

  VectorXd best_x = x, best_lambda = lambda, best_nu = nu;
  double best_res = std::numeric_limits<double>::infinity();
  std::deque<double> history;
  const double infeasibility_floor = std::sqrt(options.tol);

  VectorXd dx, dnu, dx_aff, dnu_aff;
  for (int iter = 0; iter < options.max_iter; ++iter) {
    const double res = kkt_residual(qp, x, lambda, nu);
    if (res < best_res) {
      best_res = res;
      best_x = x;
      best_lambda = lambda;
      best_nu = nu;
    }
    if (res <= options.tol) return finish(qp, x, lambda, nu, QpStatus::optimal, iter);

    double primal_infeasibility = std::max(0.0, max_or_zero(qp.g * x - qp.h));
    if (pe > 0) primal_infeasibility = std::max(primal_infeasibility, inf_norm(qp.a * x - qp.b));
    history.push_back(res);
    if (static_cast<int>(history.size()) > kStallWindow) {
      const double old = history.front();
      history.pop_front();
      if (res > 0.5 * old && primal_infeasibility > infeasibility_floor)
        return finish(qp, best_x, best_lambda, best_nu, QpStatus::infeasible, iter);
    }

    VectorXd r_dual = qp.p * x + qp.q + qp.g.transpose() * lambda;
    if (pe > 0) r_dual.noalias() += qp.a.transpose() * nu;
    const VectorXd r_eq = pe > 0 ? VectorXd(qp.a * x - qp.b) : VectorXd();
    const VectorXd r_in = qp.g * x + s - qp.h;
    const double mu = s.dot(lambda) / static_cast<double>(m);

    const VectorXd weights = lambda.cwiseQuotient(s);
    const NewtonSystem sys(qp, weights);

    // Solves for the direction given the complementarity residual r_c
    // (lambda o ds + s o dlambda = -r_c).
    auto direction = [&](const VectorXd& r_c, VectorXd& dxo, VectorXd& dnuo, VectorXd& dlo,
                         VectorXd& dso) {
      const VectorXd rc_over_s = r_c.cwiseQuotient(s);
      const VectorXd rx =
          -r_dual - qp.g.transpose() * (weights.cwiseProduct(r_in) - rc_over_s);
      sys.solve(rx, -r_eq, dxo, dnuo);
      const VectorXd g_dx = qp.g * dxo;
      dlo = weights.cwiseProduct(g_dx + r_in) - rc_over_s;
      dso = -r_in - g_dx;
    };

    VectorXd dl_aff, ds_aff;
    const VectorXd comp = s.cwiseProduct(lambda);
    direction(comp, dx_aff, dnu_aff, dl_aff, ds_aff);
    const double alpha_aff = std::min(step_to_boundary(s, ds_aff), step_to_boundary(lambda, dl_aff));
    const double mu_aff =
        (s + alpha_aff * ds_aff).dot(lambda + alpha_aff * dl_aff) / static_cast<double>(m);
    const double sigma = std::pow(std::clamp(mu_aff / mu, 0.0, 1.0), 3);

    VectorXd dl, ds;
    const VectorXd r_c =
        (comp + ds_aff.cwiseProduct(dl_aff)).array() - sigma * mu;
    direction(r_c, dx, dnu, dl, ds);
    const double alpha_max = std::min(step_to_boundary(s, ds), step_to_boundary(lambda, dl));
    const double alpha = std::min(1.0, kStepFraction * alpha_max);

    if (!dx.allFinite() || !dl.allFinite() || !ds.allFinite()) break;
    x += alpha * dx;
    s += alpha * ds;
    lambda += alpha * dl;
    if (pe > 0) nu += alpha * dnu;
  }

  const double res = kkt_residual(qp, x, lambda, nu);
  if (res < best_res) {
    best_x = x;
    best_lambda = lambda;
    best_nu = nu;
    best_res = res;
  }
  const QpStatus status = best_res <= options.tol ? QpStatus::optimal : QpStatus::max_iterations;
  return finish(qp, std::move(best_x), std::move(best_lambda), std::move(best_nu), status,
                options.max_iter);
}

}  // namespace lupi
