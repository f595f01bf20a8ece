#pragma once

#include <span>

#include "lupi/svm.hpp"

namespace lupi {

inline constexpr double kDefaultMarginFloor = 0.1;

/// Per-sample target margins, every entry at least `epsilon`.
struct MarginVector {
  Vector rho;
  double epsilon = kDefaultMarginFloor;
};

struct MarginTransferConfig {
  double c_priv = 1.0;
  double c_orig = 1.0;
  double epsilon = kDefaultMarginFloor;
  bool teacher_bias = true;
  /// Ablation switch: fit a bias in the student as well.
  bool student_bias = false;
  double tol = 1e-6;
  int max_epochs = 10000;
  std::uint64_t seed = 0x5eedULL;

  SvmConfig teacher_config() const;
  SvmConfig student_config() const;
};

struct MarginTransferResult {
  TrainedSvm student;
  MarginVector margins;
  TrainedSvm teacher;
};

/// rho_i = max(y_i f*(x*_i), epsilon) for the teacher f*.
MarginVector compute_transfer_margins(const LinearModel& teacher, const Matrix& x_star,
                                      std::span<const int> y, double epsilon);

/// Floors an arbitrary margin vector at epsilon.
MarginVector threshold_margins(const Vector& raw, double epsilon);

/// SVM with data-dependent margins
///
///   min 1/2 |w|^2 + C sum_i xi_i   s.t.  y_i <w, x_i> >= rho_i - xi_i,  xi_i >= 0
///
/// solved through the equivalent weighted problem on x_i / rho_i with
/// per-sample costs C rho_i.
TrainedSvm train_with_margins(const Matrix& x, std::span<const int> y, const MarginVector& margins,
                              const MarginTransferConfig& config);

/// Two stages: a bias SVM on the privileged features, then the student on
/// the original features with the teacher's thresholded training margins.
MarginTransferResult train_margin_transfer(const Dataset& data, const MarginTransferConfig& config);

/// Same as above with an already trained teacher.
MarginTransferResult train_margin_transfer(const Dataset& data, const TrainedSvm& teacher,
                                           const MarginTransferConfig& config);

}  // namespace lupi
