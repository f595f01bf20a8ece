#include "lupi/model_selection.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <random>
#include <string>

#include "lupi/error.hpp"
#include "lupi/parallel.hpp"
#include "lupi/stats.hpp"

namespace lupi {
namespace {

std::vector<double> powers_of_ten(int lo, int hi) {
  std::vector<double> out;
  for (int e = lo; e <= hi; ++e) out.push_back(std::pow(10.0, e));
  return out;
}

void check_increasing(const std::vector<double>& v, const char* name) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!(v[i] > 0.0) || !std::isfinite(v[i]))
      throw InvalidArgument(std::string(name) + " values must be positive and finite");
    if (i > 0 && !(v[i] > v[i - 1]))
      throw InvalidArgument(std::string(name) + " values must be strictly increasing");
  }
}

}  // namespace

std::vector<double> grid_for(Norm normalization, Space space) {
  if (space == Space::original && normalization == Norm::l1) return powers_of_ten(0, 5);
  return powers_of_ten(-3, 3);
}

void CvGrid::validate() const {
  if (orig_values.empty()) throw InvalidArgument("CV grid needs at least one original-space value");
  check_increasing(orig_values, "original-space grid");
  check_increasing(priv_values, "privileged-space grid");
}

void CvPlan::validate() const {
  if (folds < 2) throw InvalidArgument("CV needs at least 2 folds");
  if (outer_repeats < 1) throw InvalidArgument("CV needs at least 1 repeat");
}

std::vector<FoldSplit> make_cv_splits(const Labels& y, const CvPlan& plan) {
  plan.validate();
  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < y.size(); ++i) by_class[y[i]].push_back(i);
  for (const auto& [label, idx] : by_class) {
    if (idx.size() < static_cast<std::size_t>(plan.folds))
      throw InvalidArgument("class " + std::to_string(label) + " has " + std::to_string(idx.size()) +
                            " samples, fewer than " + std::to_string(plan.folds) + " folds");
  }

  const auto folds = static_cast<std::size_t>(plan.folds);
  std::vector<FoldSplit> splits;
  splits.reserve(static_cast<std::size_t>(plan.outer_repeats) * folds);
  for (int r = 0; r < plan.outer_repeats; ++r) {
    std::seed_seq seq{static_cast<std::uint32_t>(plan.seed), static_cast<std::uint32_t>(plan.seed >> 32),
                      static_cast<std::uint32_t>(r)};
    std::mt19937_64 rng(seq);
    std::vector<std::size_t> fold_of(y.size());
    std::size_t offset = 0;
    for (auto [label, idx] : by_class) {
      std::shuffle(idx.begin(), idx.end(), rng);
      for (std::size_t k = 0; k < idx.size(); ++k) fold_of[idx[k]] = (offset + k) % folds;
      offset = (offset + idx.size()) % folds;
    }
    for (std::size_t f = 0; f < folds; ++f) {
      FoldSplit s;
      s.repeat = r;
      s.fold = static_cast<int>(f);
      for (std::size_t i = 0; i < y.size(); ++i) (fold_of[i] == f ? s.validation : s.train).push_back(i);
      splits.push_back(std::move(s));
    }
  }
  return splits;
}

MethodParams params_at(Method method, const MethodParams& base, double orig,
                       std::optional<double> priv) {
  MethodParams p = base;
  p.c = orig;
  if (priv) {
    if (method == Method::margin_transfer) p.c_priv = *priv;
    if (method == Method::svm_plus) p.gamma = *priv;
  }
  return p;
}

CvResult cross_validate(const Dataset& train, Method method, const CvGrid& grid, const CvPlan& plan,
                        const MethodParams& base, const SolverSettings& settings, int jobs) {
  grid.validate();
  const auto splits = make_cv_splits(train.y(), plan);

  std::vector<std::optional<double>> priv_axis;
  if (grid.priv_values.empty()) {
    priv_axis.push_back(std::nullopt);
  } else {
    for (double v : grid.priv_values) priv_axis.emplace_back(v);
  }
  const std::size_t n_priv = priv_axis.size();
  const std::size_t n_rows = grid.orig_values.size() * n_priv;
  auto row_of = [&](std::size_t o, std::size_t p) { return o * n_priv + p; };

  // acc[split][row]
  std::vector<std::vector<double>> acc(splits.size(), std::vector<double>(n_rows, 0.0));
  parallel_for(splits.size(), jobs, [&](std::size_t s) {
    const Dataset fold_train = train.subset(splits[s].train);
    const Dataset fold_valid = train.subset(splits[s].validation);
    const bool shared_teacher =
        method == Method::margin_transfer && fold_train.is_binary() && priv_axis.front().has_value();
    for (std::size_t p = 0; p < n_priv; ++p) {
      std::optional<TrainedSvm> teacher;
      if (shared_teacher) {
        const MethodParams tp = params_at(method, base, grid.orig_values.front(), priv_axis[p]);
        SvmConfig cfg;
        cfg.c = tp.c_priv;
        cfg.tol = settings.svm_tol;
        cfg.max_epochs = settings.svm_max_epochs;
        cfg.seed = settings.seed;
        teacher = train_svm(fold_train.x_star(), fold_train.y(), cfg);
      }
      for (std::size_t o = 0; o < grid.orig_values.size(); ++o) {
        const MethodParams params = params_at(method, base, grid.orig_values[o], priv_axis[p]);
        Labels predicted;
        if (teacher) {
          MarginTransferConfig cfg;
          cfg.c_orig = params.c;
          cfg.c_priv = params.c_priv;
          cfg.epsilon = params.epsilon;
          cfg.tol = settings.svm_tol;
          cfg.max_epochs = settings.svm_max_epochs;
          cfg.seed = settings.seed;
          const auto res = train_margin_transfer(fold_train, *teacher, cfg);
          predicted = predict_labels(res.student.model, fold_valid.x());
        } else {
          predicted = predict(fit(method, fold_train, params, settings), fold_valid);
        }
        acc[s][row_of(o, p)] = accuracy(predicted, fold_valid.y());
      }
    }
  });

  CvResult result;
  result.table.resize(n_rows);
  for (std::size_t o = 0; o < grid.orig_values.size(); ++o) {
    for (std::size_t p = 0; p < n_priv; ++p) {
      CvRow& row = result.table[row_of(o, p)];
      row.orig = grid.orig_values[o];
      row.priv = priv_axis[p];
      row.accuracies.reserve(splits.size());
      double sum = 0.0;
      for (std::size_t s = 0; s < splits.size(); ++s) {
        row.accuracies.push_back(acc[s][row_of(o, p)]);
        sum += acc[s][row_of(o, p)];
      }
      row.mean_accuracy = sum / static_cast<double>(splits.size());
    }
  }
  // Rows are orig-major with ascending values, so the first maximum wins the
  // tie-break toward smaller orig, then smaller priv.
  for (std::size_t r = 1; r < n_rows; ++r) {
    if (result.table[r].mean_accuracy > result.table[result.best_row].mean_accuracy) result.best_row = r;
  }
  const CvRow& best = result.table[result.best_row];
  result.best = params_at(method, base, best.orig, best.priv);
  return result;
}

void write_cv_table_csv(std::ostream& out, const CvResult& result, const CvPlan& plan) {
  out << "orig,priv,repeat,fold,accuracy\n";
  const auto saved = out.precision(17);
  for (const CvRow& row : result.table) {
    for (std::size_t k = 0; k < row.accuracies.size(); ++k) {
      out << row.orig << ',';
      if (row.priv) out << *row.priv;
      out << ',' << k / static_cast<std::size_t>(plan.folds) << ','
          << k % static_cast<std::size_t>(plan.folds) << ',' << row.accuracies[k] << '\n';
    }
  }
  out.precision(saved);
}

}  // namespace lupi
