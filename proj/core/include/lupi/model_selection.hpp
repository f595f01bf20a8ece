#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "lupi/classifier.hpp"

namespace lupi {

/// Regularization grid for one feature space: 10^-3..10^3 for the
/// privileged space and L2-normalized original features, 10^0..10^5 for
/// L1-normalized original features.
std::vector<double> grid_for(Norm normalization, Space space);

/// Hyperparameter grid. `priv_values` is empty for methods without a
/// privileged-space parameter; otherwise the Cartesian product is searched.
struct CvGrid {
  std::vector<double> orig_values;
  std::vector<double> priv_values;

  void validate() const;
  std::size_t size() const noexcept {
    return orig_values.size() * std::max<std::size_t>(1, priv_values.size());
  }
};

/// `outer_repeats` independent stratified partitions into `folds` folds.
struct CvPlan {
  int outer_repeats = 5;
  int folds = 5;
  std::uint64_t seed = 0;

  /// 5 repeats of 5-fold CV.
  static CvPlan binary_default(std::uint64_t seed = 0) { return CvPlan{5, 5, seed}; }
  /// A single 5-fold CV.
  static CvPlan multiclass_default(std::uint64_t seed = 0) { return CvPlan{1, 5, seed}; }

  void validate() const;
};

struct FoldSplit {
  int repeat = 0;
  int fold = 0;
  std::vector<std::size_t> train;
  std::vector<std::size_t> validation;
};

/// All (repeat, fold) partitions, repeat-major. Fold membership is stratified
/// by label and depends only on the labels and the plan's seed.
std::vector<FoldSplit> make_cv_splits(const Labels& y, const CvPlan& plan);

struct CvRow {
  double orig = 0.0;
  std::optional<double> priv;
  /// Validation accuracy per (repeat, fold), repeat-major.
  std::vector<double> accuracies;
  double mean_accuracy = 0.0;
};

struct CvResult {
  MethodParams best;
  std::size_t best_row = 0;
  std::vector<CvRow> table;
};

/// Maps a grid point onto the method's parameters (privileged value goes to
/// c_priv for margin transfer and to gamma for SVM+).
MethodParams params_at(Method method, const MethodParams& base, double orig,
                       std::optional<double> priv);

/// Grid search by mean validation accuracy. Rows are ordered orig-major,
/// then priv. Ties go to the smallest orig value, then the smallest priv
/// value. Output does not depend on `jobs`.
CvResult cross_validate(const Dataset& train, Method method, const CvGrid& grid, const CvPlan& plan,
                        const MethodParams& base = {}, const SolverSettings& settings = {},
                        int jobs = 1);

/// CSV with columns orig,priv,repeat,fold,accuracy.
void write_cv_table_csv(std::ostream& out, const CvResult& result, const CvPlan& plan);

}  // namespace lupi
