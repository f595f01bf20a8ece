#pragma once

#include <cstdint>
#include <functional>
#include <span>

#include "lupi/dataset.hpp"

namespace lupi {

/// Linear decision function f(x) = <w, x> + b.
struct LinearModel {
  Vector w;
  double b = 0.0;

  /// Raw decision values, one per row of `x`.
  Vector scores(const Matrix& x) const;
};

struct SvmConfig {
  double c = 1.0;
  /// Bias through a constant-1 feature; the bias is regularized like any
  /// other weight.
  bool use_bias = true;
  /// Stop once the largest projected-gradient violation and the relative
  /// duality gap both drop below this value.
  double tol = 1e-6;
  int max_epochs = 10000;
  /// Seed of the per-epoch coordinate permutation.
  std::uint64_t seed = 0x5eedULL;
  /// Called after every epoch with (epoch, dual objective) when set.
  std::function<void(int, double)> on_epoch;
};

/// Outcome of the dual coordinate-descent solver, with its optimality
/// certificate.
struct TrainedSvm {
  LinearModel model;
  Vector alpha;
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  double duality_gap = 0.0;
  double max_violation = 0.0;
  int epochs = 0;
  bool converged = false;
};

/// Weighted soft-margin SVM
///
///   min_w 1/2 |w|^2 + sum_i cost_i max(0, 1 - y_i <w, x_i>)
///
/// solved in the dual by coordinate descent over 0 <= alpha_i <= cost_i.
/// When `config.use_bias` is set the features are augmented with a
/// constant 1 and its weight becomes `b`. `config.c` is ignored.
TrainedSvm train_weighted_svm(const Matrix& x, std::span<const int> y, const Vector& cost,
                              const SvmConfig& config);

/// Plain soft-margin SVM with uniform cost `config.c`.
TrainedSvm train_svm(const Matrix& x, std::span<const int> y, const SvmConfig& config);

/// Primal objective of the (possibly bias-augmented) weighted problem.
double weighted_svm_primal(const LinearModel& model, const Matrix& x, std::span<const int> y,
                           const Vector& cost, bool use_bias);

/// <w, x_i> + b per row.
Vector predict(const LinearModel& model, const Matrix& x);

/// Class label from a decision value; zero maps to +1.
inline int sign_label(double score) noexcept { return score >= 0.0 ? 1 : -1; }

Labels predict_labels(const LinearModel& model, const Matrix& x);

/// y_i (<w, x_i> + b) per row.
Vector decision_margins(const LinearModel& model, const Matrix& x, std::span<const int> y);

}  // namespace lupi
