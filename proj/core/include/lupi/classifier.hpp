#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lupi/margin_transfer.hpp"
#include "lupi/svm_plus.hpp"

namespace lupi {

enum class Method { svm, margin_transfer, svm_plus, reference_privileged };

std::string_view to_string(Method method);
Method parse_method(std::string_view name);
/// True for methods that need privileged features at training time.
bool uses_privileged(Method method);

/// Hyperparameters of every method; each method reads the fields it needs.
///   svm, reference_privileged: c
///   margin_transfer:           c (student), c_priv (teacher), epsilon
///   svm_plus:                  c, gamma
struct MethodParams {
  double c = 1.0;
  double c_priv = 1.0;
  double gamma = 1.0;
  double epsilon = kDefaultMarginFloor;
};

/// Solver tolerances shared by all trainers.
struct SolverSettings {
  double svm_tol = 1e-6;
  int svm_max_epochs = 10000;
  double qp_tol = 1e-8;
  int qp_max_iter = 100;
  std::uint64_t seed = 0x5eedULL;
};

/// Solver outcome of the final (original-space) training stage.
struct TrainingStats {
  double objective = 0.0;
  /// Duality gap for coordinate descent, KKT residual for the QP.
  double residual = 0.0;
  bool converged = false;
  /// Epochs or interior-point iterations.
  int iterations = 0;
};

/// A trained binary classifier plus the privileged-space artifacts kept for
/// diagnostics.
struct BinaryModel {
  Method method = Method::svm;
  LinearModel model;
  std::optional<LinearModel> teacher;
  std::optional<MarginVector> margins;
  std::optional<SlackModel> slack;
  TrainingStats stats;
};

/// Trains one binary problem (labels +-1).
BinaryModel train_binary(Method method, const Dataset& data, const MethodParams& params,
                         const SolverSettings& settings = {});

/// Decision values; the reference method reads the privileged block.
Vector binary_scores(const BinaryModel& model, const Dataset& data);

/// One-versus-rest ensemble over `class_ids`.
struct OvrModel {
  Method method = Method::svm;
  std::vector<int> class_ids;
  std::vector<BinaryModel> models;
};

/// Trains K binary problems (class k as +1, the rest as -1) with one shared
/// parameter setting. `jobs` > 1 trains classes concurrently.
OvrModel train_ovr(const Dataset& data, Method method, const MethodParams& params,
                   const SolverSettings& settings = {}, int jobs = 1);

/// Index of the largest entry, ties going to the lowest index.
std::size_t argmax_index(const Vector& scores);

/// N x K decision values.
Matrix ovr_scores(const OvrModel& model, const Dataset& data);
Labels predict_ovr(const OvrModel& model, const Dataset& data);
/// Prediction from original features only (not valid for the reference method).
Labels predict_ovr(const OvrModel& model, const Matrix& x);

/// Binary or multiclass classifier depending on the training labels.
struct Classifier {
  bool binary = true;
  BinaryModel binary_model;
  OvrModel ovr_model;
};

Classifier fit(Method method, const Dataset& data, const MethodParams& params,
               const SolverSettings& settings = {});
Labels predict(const Classifier& classifier, const Dataset& data);

}  // namespace lupi
