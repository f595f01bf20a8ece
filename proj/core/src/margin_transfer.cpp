#include "lupi/margin_transfer.hpp"

#include <sstream>

#include "lupi/error.hpp"

namespace lupi {

SvmConfig MarginTransferConfig::teacher_config() const {
  SvmConfig cfg;
  cfg.c = c_priv;
  cfg.use_bias = teacher_bias;
  cfg.tol = tol;
  cfg.max_epochs = max_epochs;
  cfg.seed = seed;
  return cfg;
}

SvmConfig MarginTransferConfig::student_config() const {
  SvmConfig cfg;
  cfg.c = c_orig;
  cfg.use_bias = false;  // the student's bias, if any, is an explicit feature column
  cfg.tol = tol;
  cfg.max_epochs = max_epochs;
  cfg.seed = seed;
  return cfg;
}

MarginVector threshold_margins(const Vector& raw, double epsilon) {
  if (!(epsilon > 0.0)) throw InvalidArgument("margin floor epsilon must be positive");
  return MarginVector{raw.cwiseMax(epsilon), epsilon};
}

MarginVector compute_transfer_margins(const LinearModel& teacher, const Matrix& x_star,
                                      std::span<const int> y, double epsilon) {
  return threshold_margins(decision_margins(teacher, x_star, y), epsilon);
}

TrainedSvm train_with_margins(const Matrix& x, std::span<const int> y, const MarginVector& margins,
                              const MarginTransferConfig& config) {
  if (!(config.c_orig > 0.0)) throw InvalidArgument("margin transfer: c_orig must be positive");
  if (margins.rho.size() != x.rows())
    throw DimensionMismatch("margin vector length does not match training rows");
  if (!margins.rho.allFinite() || (margins.rho.array() < margins.epsilon).any() ||
      !(margins.epsilon > 0.0))
    throw InvalidArgument("margin vector must be finite and floored at a positive epsilon");

  const Eigen::Index d = x.cols();
  Matrix scaled(x.rows(), d + (config.student_bias ? 1 : 0));
  scaled.leftCols(d) = x.array().colwise() / margins.rho.array();
  if (config.student_bias) scaled.col(d) = margins.rho.cwiseInverse();
  const Vector cost = config.c_orig * margins.rho;

  TrainedSvm fit = train_weighted_svm(scaled, y, cost, config.student_config());
  if (config.student_bias) {
    fit.model.b = fit.model.w[d];
    fit.model.w.conservativeResize(d);
  }
  return fit;
}

MarginTransferResult train_margin_transfer(const Dataset& data, const TrainedSvm& teacher,
                                           const MarginTransferConfig& config) {
  if (!data.is_binary()) throw InvalidArgument("margin transfer needs binary labels");
  MarginVector margins = compute_transfer_margins(teacher.model, data.x_star(), data.y(), config.epsilon);
  try {
    TrainedSvm student = train_with_margins(data.x(), data.y(), margins, config);
    return MarginTransferResult{std::move(student), std::move(margins), teacher};
  } catch (const Error& e) {
    std::ostringstream msg;
    msg << "margin transfer student failed (rho min " << margins.rho.minCoeff() << ", max "
        << margins.rho.maxCoeff() << "): " << e.what();
    throw SolverError(msg.str());
  }
}

MarginTransferResult train_margin_transfer(const Dataset& data, const MarginTransferConfig& config) {
  if (!data.has_privileged()) throw InvalidArgument("margin transfer needs privileged features");
  if (!data.is_binary()) throw InvalidArgument("margin transfer needs binary labels");
  if (!(config.c_priv > 0.0)) throw InvalidArgument("margin transfer: c_priv must be positive");
  const TrainedSvm teacher = train_svm(data.x_star(), data.y(), config.teacher_config());
  return train_margin_transfer(data, teacher, config);
}

}  // namespace lupi
