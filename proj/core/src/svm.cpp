#include "lupi/svm.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

#include "lupi/error.hpp"

namespace lupi {
namespace {

void check_binary(std::span<const int> y) {
  for (int v : y) {
    if (v != 1 && v != -1) throw InvalidArgument("SVM labels must be -1 or +1, got " + std::to_string(v));
  }
}

void check_columns(const LinearModel& model, const Matrix& x) {
  if (x.cols() != model.w.size())
    throw DimensionMismatch("model has " + std::to_string(model.w.size()) + " weights but data has " +
                            std::to_string(x.cols()) + " columns");
}

// Every this many epochs the free variables take one Newton step on their
// face of the box. Coordinate descent alone crawls on ill-conditioned duals.
constexpr int kNewtonInterval = 10;
constexpr int kNewtonRepeats = 8;

// Minimizes the dual 1/2 |w|^2 - sum(alpha) over the free variables along the
// Newton direction, projected onto the box. Never increases the dual
// objective. Returns true when the step was clipped by a bound.
bool newton_step(const Matrix& x, std::span<const int> y, const Vector& cost, double bias_feature,
                 Vector& alpha, Vector& w, double& b) {
  std::vector<Eigen::Index> free;
  for (Eigen::Index i = 0; i < alpha.size(); ++i) {
    if (alpha[i] > 0.0 && alpha[i] < cost[i]) free.push_back(i);
  }
  if (free.empty()) return false;
  const auto nf = static_cast<Eigen::Index>(free.size());
  Matrix z(nf, x.cols() + 1);
  Vector grad(nf);
  for (Eigen::Index k = 0; k < nf; ++k) {
    const Eigen::Index i = free[static_cast<std::size_t>(k)];
    const double yi = y[static_cast<std::size_t>(i)];
    z.row(k).head(x.cols()) = yi * x.row(i);
    z(k, x.cols()) = yi * bias_feature;
    grad[k] = yi * (x.row(i).dot(w) + b * bias_feature) - 1.0;
  }
  // Q_F = Z Z^T, handled through the thin SVD Z = U S V^T so the cost stays
  // linear in the free-set size.
  Eigen::JacobiSVD<Matrix> svd(z, Eigen::ComputeThinU);
  svd.setThreshold(1e-6);
  const Eigen::Index r = svd.rank();
  const auto u = svd.matrixU().leftCols(r);
  const Vector ug = u.transpose() * grad;
  // Along null directions of Q_F the dual is linear; follow them to a bound.
  const Vector null_part = grad - u * ug;
  Vector dir;
  const bool linear = null_part.norm() > 1e-9 * std::max(1.0, grad.norm());
  if (linear) {
    dir = -null_part;
  } else {
    dir = -(u * (ug.array() / svd.singularValues().head(r).array().square()).matrix());
  }
  const Vector dw = z.transpose() * dir;
  const double slope = grad.dot(dir);
  const double curvature = dw.squaredNorm();
  if (!(slope < 0.0) || !dir.allFinite()) return false;
  const double full =
      linear || !(curvature > 0.0) ? std::numeric_limits<double>::infinity() : -slope / curvature;
  double first_bound = std::numeric_limits<double>::infinity();
  double last_bound = 0.0;
  for (Eigen::Index k = 0; k < nf; ++k) {
    const Eigen::Index i = free[static_cast<std::size_t>(k)];
    if (dir[k] == 0.0) continue;
    const double bound = dir[k] > 0.0 ? (cost[i] - alpha[i]) / dir[k] : -alpha[i] / dir[k];
    first_bound = std::min(first_bound, bound);
    last_bound = std::max(last_bound, bound);
  }
  if (!(first_bound > 0.0)) return false;

  auto projected = [&](double t) {
    Vector step(nf);
    for (Eigen::Index k = 0; k < nf; ++k) {
      const Eigen::Index i = free[static_cast<std::size_t>(k)];
      step[k] = std::clamp(alpha[i] + t * dir[k], 0.0, cost[i]) - alpha[i];
    }
    return step;
  };
  const bool clipped = full > first_bound;
  Vector step;
  if (!clipped) {
    step = projected(full);
  } else {
    // Projected search: halve from the full step, or the farthest bound if
    // that comes first, until the projected point decreases the dual enough.
    // Many variables can reach their bounds at once this way.
    Vector w_aug(x.cols() + 1);
    w_aug << w, b;
    double t = std::min(full, last_bound);
    for (int halving = 0; halving < 40 && t > first_bound; ++halving, t *= 0.5) {
      Vector trial = projected(t);
      const Vector dtrial = z.transpose() * trial;
      const double change = w_aug.dot(dtrial) + 0.5 * dtrial.squaredNorm() - trial.sum();
      if (change <= 1e-4 * grad.dot(trial)) {
        step = std::move(trial);
        break;
      }
    }
    // Exact minimizer up to the first bound, which always decreases the dual.
    if (step.size() == 0) step = projected(first_bound);
  }
  for (Eigen::Index k = 0; k < nf; ++k) {
    const Eigen::Index i = free[static_cast<std::size_t>(k)];
    alpha[i] = std::clamp(alpha[i] + step[k], 0.0, cost[i]);
  }
  // Rebuild from alpha so clamping cannot leave w out of sync.
  w.setZero();
  b = 0.0;
  for (Eigen::Index i = 0; i < alpha.size(); ++i) {
    if (alpha[i] == 0.0) continue;
    const double a = alpha[i] * y[static_cast<std::size_t>(i)];
    w.noalias() += a * x.row(i).transpose();
    b += a * bias_feature;
  }
  return clipped;
}

}  // namespace

Vector LinearModel::scores(const Matrix& x) const { return predict(*this, x); }

double weighted_svm_primal(const LinearModel& model, const Matrix& x, std::span<const int> y,
                           const Vector& cost, bool use_bias) {
  double reg = model.w.squaredNorm();
  if (use_bias) reg += model.b * model.b;
  const Vector f = predict(model, x);
  double loss = 0.0;
  for (Eigen::Index i = 0; i < f.size(); ++i)
    loss += cost[i] * std::max(0.0, 1.0 - y[static_cast<std::size_t>(i)] * f[i]);
  return 0.5 * reg + loss;
}

TrainedSvm train_weighted_svm(const Matrix& x, std::span<const int> y, const Vector& cost,
                              const SvmConfig& config) {
  const Eigen::Index n = x.rows();
  if (n == 0) throw InvalidArgument("SVM training set is empty");
  if (static_cast<std::size_t>(n) != y.size() || cost.size() != n)
    throw DimensionMismatch("SVM: x, y and cost lengths differ");
  if (!x.allFinite() || !cost.allFinite()) throw InvalidArgument("SVM: non-finite input");
  if ((cost.array() <= 0.0).any()) throw InvalidArgument("SVM: per-sample costs must be positive");
  if (!(config.tol > 0.0)) throw InvalidArgument("SVM: tol must be positive");
  if (config.max_epochs < 1) throw InvalidArgument("SVM: max_epochs must be at least 1");
  check_binary(y);

  const double bias_feature = config.use_bias ? 1.0 : 0.0;
  const Vector qd = x.rowwise().squaredNorm().array() + bias_feature;

  Vector alpha = Vector::Zero(n);
  Vector w = Vector::Zero(x.cols());
  double b = 0.0;

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::mt19937_64 rng(config.seed);

  auto dual_objective = [&] { return alpha.sum() - 0.5 * (w.squaredNorm() + b * b); };

  TrainedSvm out;
  int epoch = 0;
  double violation = 0.0;
  for (; epoch < config.max_epochs;) {
    std::shuffle(order.begin(), order.end(), rng);
    violation = 0.0;
    for (const Eigen::Index i : order) {
      const double yi = y[static_cast<std::size_t>(i)];
      const double grad = yi * (x.row(i).dot(w) + b * bias_feature) - 1.0;
      const double upper = cost[i];
      double pg = grad;
      if (alpha[i] <= 0.0) pg = std::min(grad, 0.0);
      else if (alpha[i] >= upper) pg = std::max(grad, 0.0);
      violation = std::max(violation, std::abs(pg));
      if (pg == 0.0) continue;

      const double old = alpha[i];
      // A zero row has no curvature; the dual is linear there and maximized at the bound.
      const double next = qd[i] > 0.0 ? std::clamp(old - grad / qd[i], 0.0, upper) : upper;
      const double delta = (next - old) * yi;
      if (delta == 0.0) continue;
      alpha[i] = next;
      w.noalias() += delta * x.row(i).transpose();
      b += delta * bias_feature;
    }
    ++epoch;
    if (violation > config.tol && epoch % kNewtonInterval == 0) {
      // Bounds hit by a clipped step leave the free set for the next one.
      for (int k = 0; k < kNewtonRepeats && newton_step(x, y, cost, bias_feature, alpha, w, b); ++k) {
      }
    }
    if (config.on_epoch) config.on_epoch(epoch, dual_objective());
    if (violation <= config.tol) {
      const LinearModel m{w, b};
      const double primal = weighted_svm_primal(m, x, y, cost, config.use_bias);
      const double gap = primal - dual_objective();
      if (gap <= config.tol * std::max(1.0, std::abs(primal))) {
        out.converged = true;
        break;
      }
    }
  }

  out.model = LinearModel{w, b};
  out.primal_objective = weighted_svm_primal(out.model, x, y, cost, config.use_bias);
  out.dual_objective = dual_objective();
  out.alpha = std::move(alpha);
  out.duality_gap = out.primal_objective - out.dual_objective;
  out.max_violation = violation;
  out.epochs = epoch;
  return out;
}

TrainedSvm train_svm(const Matrix& x, std::span<const int> y, const SvmConfig& config) {
  if (!(config.c > 0.0)) throw InvalidArgument("SVM: C must be positive");
  return train_weighted_svm(x, y, Vector::Constant(x.rows(), config.c), config);
}

Vector predict(const LinearModel& model, const Matrix& x) {
  check_columns(model, x);
  return (x * model.w).array() + model.b;
}

Labels predict_labels(const LinearModel& model, const Matrix& x) {
  const Vector s = predict(model, x);
  Labels out(static_cast<std::size_t>(s.size()));
  for (Eigen::Index i = 0; i < s.size(); ++i) out[static_cast<std::size_t>(i)] = sign_label(s[i]);
  return out;
}

Vector decision_margins(const LinearModel& model, const Matrix& x, std::span<const int> y) {
  Vector s = predict(model, x);
  if (static_cast<std::size_t>(s.size()) != y.size())
    throw DimensionMismatch("decision_margins: label count does not match rows");
  for (Eigen::Index i = 0; i < s.size(); ++i) s[i] *= y[static_cast<std::size_t>(i)];
  return s;
}

}  // namespace lupi
