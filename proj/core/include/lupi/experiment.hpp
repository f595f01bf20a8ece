#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lupi/model_selection.hpp"
#include "lupi/serialization.hpp"
#include "lupi/stats.hpp"

namespace lupi {

inline constexpr int kDefaultRepeats = 20;

/// Repeated train/test evaluation with per-method grid search.
struct ExperimentConfig {
  std::string task = "task";
  std::vector<Method> methods;
  int repeats = kDefaultRepeats;
  std::size_t n_train_per_class = 100;
  /// Test samples per class; defaults to twice the training count, capped by
  /// what is left after the training draw.
  std::optional<std::size_t> n_test_per_class;
  /// CV folds; default 5.
  int folds = 5;
  /// CV repetitions; defaults to 5 for binary and 1 for multiclass tasks.
  std::optional<int> cv_repeats;
  /// Original-space grid override.
  std::optional<std::vector<double>> c_grid;
  /// Privileged-space grid override (gamma for SVM+, teacher C for margin
  /// transfer, C for the privileged reference).
  std::optional<std::vector<double>> priv_grid;
  std::optional<Norm> normalize;
  std::optional<Norm> normalize_privileged;
  double epsilon = kDefaultMarginFloor;
  std::uint64_t seed = 0;
  /// Worker threads; never affects results.
  int jobs = 1;
  SolverSettings solver;

  void validate() const;
};

struct PairwiseTest {
  std::size_t first = 0;
  std::size_t second = 0;
  WilcoxonResult result;
};

struct ExperimentReport {
  std::vector<Method> methods;
  /// repeats x methods test accuracies.
  Matrix accuracies;
  /// chosen[repeat][method].
  std::vector<std::vector<MethodParams>> chosen;
  /// Empty when there are fewer than two repeats.
  std::vector<MeanStderr> summary;
  std::vector<PairwiseTest> wilcoxon;
};

/// Grid searched for `method` under the config's normalization and overrides.
CvGrid experiment_grid(Method method, const ExperimentConfig& config);

/// Per repeat: seeded stratified split, grid search on the training part,
/// retrain with the winner, test accuracy. Deterministic for a fixed seed.
ExperimentReport run_experiment(const Dataset& data, const ExperimentConfig& config);

/// Report document with the fully resolved configuration embedded.
/// `source` describes where the data came from.
Json report_to_json(const ExperimentReport& report, const ExperimentConfig& config, const Dataset& data,
                    const Json& source);

/// One row per task: mean and standard error per method, then p-value and
/// significance flag per method pair.
std::string report_to_csv(const ExperimentReport& report, const ExperimentConfig& config);

/// Per-sample easy/hard diagnostics of a trained binary model.
struct Diagnostics {
  /// y_i f(x_i) of the deployed (original-space) model.
  Vector original_margins;
  /// y_i f*(x*_i) of the margin-transfer teacher, unthresholded.
  std::optional<Vector> teacher_margins;
  std::optional<MarginVector> rho;
  /// SVM+ slack function values.
  std::optional<Vector> slack;
  /// Human scores mapped onto [0, 2].
  std::optional<Vector> human_rho;
  /// Privileged-space easiness (teacher margin, or negated slack for SVM+).
  std::optional<Vector> privileged_easiness;

  struct Tau {
    std::string name;
    std::optional<double> value;  // empty when degenerate
  };
  std::vector<Tau> taus;
};

Diagnostics diagnose(const BinaryModel& model, const Dataset& data,
                     const std::optional<HumanScores>& scores);

Json to_json(const Diagnostics& diag);
std::string diagnostics_csv(const Diagnostics& diag, const Labels& y);

}  // namespace lupi
