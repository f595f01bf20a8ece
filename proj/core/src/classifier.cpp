#include "lupi/classifier.hpp"

#include <string>

#include "lupi/error.hpp"
#include "lupi/parallel.hpp"

namespace lupi {

std::string_view to_string(Method method) {
  switch (method) {
    case Method::svm:
      return "svm";
    case Method::margin_transfer:
      return "margin_transfer";
    case Method::svm_plus:
      return "svm_plus";
    case Method::reference_privileged:
      return "reference_svm_on_privileged";
  }
  return "unknown";
}

Method parse_method(std::string_view name) {
  for (Method m : {Method::svm, Method::margin_transfer, Method::svm_plus, Method::reference_privileged}) {
    if (name == to_string(m)) return m;
  }
  throw InvalidArgument("unknown method '" + std::string(name) +
                        "' (expected svm, margin_transfer, svm_plus or reference_svm_on_privileged)");
}

bool uses_privileged(Method method) { return method != Method::svm; }

namespace {

TrainingStats stats_of(const TrainedSvm& t) {
  return TrainingStats{t.primal_objective, t.duality_gap, t.converged, t.epochs};
}

}  // namespace

BinaryModel train_binary(Method method, const Dataset& data, const MethodParams& params,
                         const SolverSettings& settings) {
  if (!data.is_binary()) throw InvalidArgument("binary trainer needs labels in {-1, +1}");
  if (uses_privileged(method) && !data.has_privileged())
    throw InvalidArgument(std::string(to_string(method)) + " needs privileged features");

  SvmConfig svm_cfg;
  svm_cfg.c = params.c;
  svm_cfg.use_bias = true;
  svm_cfg.tol = settings.svm_tol;
  svm_cfg.max_epochs = settings.svm_max_epochs;
  svm_cfg.seed = settings.seed;

  BinaryModel out;
  out.method = method;
  switch (method) {
    case Method::svm:
    case Method::reference_privileged: {
      const auto res = train_svm(method == Method::svm ? data.x() : data.x_star(), data.y(), svm_cfg);
      out.model = res.model;
      out.stats = stats_of(res);
      break;
    }
    case Method::margin_transfer: {
      MarginTransferConfig cfg;
      cfg.c_orig = params.c;
      cfg.c_priv = params.c_priv;
      cfg.epsilon = params.epsilon;
      cfg.tol = settings.svm_tol;
      cfg.max_epochs = settings.svm_max_epochs;
      cfg.seed = settings.seed;
      auto res = train_margin_transfer(data, cfg);
      out.stats = stats_of(res.student);
      out.model = std::move(res.student.model);
      out.teacher = std::move(res.teacher.model);
      out.margins = std::move(res.margins);
      break;
    }
    case Method::svm_plus: {
      SvmPlusConfig cfg{params.c, params.gamma, settings.qp_tol, settings.qp_max_iter};
      auto res = train_svm_plus(data.x(), data.x_star(), data.y(), cfg);
      out.stats = TrainingStats{res.objective, res.kkt_residual, res.status == QpStatus::optimal, res.iterations};
      out.model = std::move(res.model);
      out.slack = std::move(res.slack);
      break;
    }
  }
  return out;
}

Vector binary_scores(const BinaryModel& model, const Dataset& data) {
  if (model.method == Method::reference_privileged) return predict(model.model, data.x_star());
  return predict(model.model, data.x());
}

OvrModel train_ovr(const Dataset& data, Method method, const MethodParams& params,
                   const SolverSettings& settings, int jobs) {
  if (uses_privileged(method) && !data.has_privileged())
    throw InvalidArgument(std::string(to_string(method)) + " needs privileged features");
  OvrModel out;
  out.method = method;
  out.class_ids = data.classes();
  if (out.class_ids.size() < 2) throw InvalidArgument("one-versus-rest needs at least two classes");

  const auto k = out.class_ids.size();
  out.models.resize(k);
  parallel_for(k, jobs, [&](std::size_t c) {
    Labels y(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) y[i] = data.y()[i] == out.class_ids[c] ? 1 : -1;
    std::optional<Matrix> x_star;
    if (data.has_privileged()) x_star = data.x_star();
    const Dataset binary(data.x(), std::move(x_star), std::move(y));
    out.models[c] = train_binary(method, binary, params, settings);
  });
  return out;
}

std::size_t argmax_index(const Vector& scores) {
  if (scores.size() == 0) throw InvalidArgument("argmax of an empty score vector");
  Eigen::Index best = 0;
  for (Eigen::Index k = 1; k < scores.size(); ++k) {
    if (scores[k] > scores[best]) best = k;
  }
  return static_cast<std::size_t>(best);
}

Matrix ovr_scores(const OvrModel& model, const Dataset& data) {
  Matrix s(static_cast<Eigen::Index>(data.size()), static_cast<Eigen::Index>(model.models.size()));
  for (std::size_t k = 0; k < model.models.size(); ++k)
    s.col(static_cast<Eigen::Index>(k)) = binary_scores(model.models[k], data);
  return s;
}

namespace {

Labels argmax_labels(const OvrModel& model, const Matrix& scores) {
  Labels out(static_cast<std::size_t>(scores.rows()));
  for (Eigen::Index i = 0; i < scores.rows(); ++i)
    out[static_cast<std::size_t>(i)] = model.class_ids[argmax_index(scores.row(i).transpose())];
  return out;
}

}  // namespace

Labels predict_ovr(const OvrModel& model, const Dataset& data) {
  return argmax_labels(model, ovr_scores(model, data));
}

Labels predict_ovr(const OvrModel& model, const Matrix& x) {
  if (model.method == Method::reference_privileged)
    throw InvalidArgument("reference model predicts from privileged features; pass a Dataset");
  Matrix s(x.rows(), static_cast<Eigen::Index>(model.models.size()));
  for (std::size_t k = 0; k < model.models.size(); ++k)
    s.col(static_cast<Eigen::Index>(k)) = predict(model.models[k].model, x);
  return argmax_labels(model, s);
}

Classifier fit(Method method, const Dataset& data, const MethodParams& params,
               const SolverSettings& settings) {
  Classifier c;
  c.binary = data.is_binary();
  if (c.binary) {
    c.binary_model = train_binary(method, data, params, settings);
  } else {
    c.ovr_model = train_ovr(data, method, params, settings);
  }
  return c;
}

Labels predict(const Classifier& classifier, const Dataset& data) {
  if (!classifier.binary) return predict_ovr(classifier.ovr_model, data);
  const Vector s = binary_scores(classifier.binary_model, data);
  Labels out(static_cast<std::size_t>(s.size()));
  for (Eigen::Index i = 0; i < s.size(); ++i) out[static_cast<std::size_t>(i)] = sign_label(s[i]);
  return out;
}

}  // namespace lupi
