#include "lupi/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <random>
#include <sstream>

#include "lupi/error.hpp"
#include "lupi/parallel.hpp"

namespace lupi {
namespace {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b)};
  std::mt19937_64 rng(seq);
  return rng();
}

std::string format_double(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::string norm_name(const std::optional<Norm>& n) {
  if (!n) return "none";
  return *n == Norm::l1 ? "l1" : "l2";
}

Json params_json(Method method, const MethodParams& p) {
  Json j{{"c", p.c}};
  if (method == Method::margin_transfer) {
    j["c_priv"] = p.c_priv;
    j["epsilon"] = p.epsilon;
  }
  if (method == Method::svm_plus) j["gamma"] = p.gamma;
  return j;
}

// Test indices capped at `per_class` samples of each class, drawn at random
// from what the training split left over.
std::vector<std::size_t> cap_test(const SplitResult& s, std::size_t per_class, std::uint64_t seed) {
  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t k = 0; k < s.test_indices.size(); ++k) by_class[s.test.y()[k]].push_back(k);
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> keep;
  for (auto& [label, idx] : by_class) {
    std::shuffle(idx.begin(), idx.end(), rng);
    idx.resize(std::min(idx.size(), per_class));
    keep.insert(keep.end(), idx.begin(), idx.end());
  }
  std::sort(keep.begin(), keep.end());
  return keep;
}

Dataset prepare(const Dataset& data, const ExperimentConfig& config) {
  Dataset out = data;
  if (config.normalize) out = normalize(out, *config.normalize, Space::original);
  if (config.normalize_privileged) out = normalize(out, *config.normalize_privileged, Space::privileged);
  return out;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (methods.empty()) throw InvalidArgument("experiment needs at least one method");
  if (repeats < 1) throw InvalidArgument("experiment repeats must be at least 1");
  if (n_train_per_class < 1) throw InvalidArgument("n_train_per_class must be at least 1");
  if (n_test_per_class && *n_test_per_class < 1) throw InvalidArgument("n_test_per_class must be at least 1");
  if (folds < 2) throw InvalidArgument("CV needs at least 2 folds");
  if (cv_repeats && *cv_repeats < 1) throw InvalidArgument("CV repeats must be at least 1");
  if (!(epsilon > 0.0)) throw InvalidArgument("epsilon must be positive");
  if (c_grid) CvGrid{*c_grid, {}}.validate();
  if (priv_grid) CvGrid{*priv_grid, {}}.validate();
}

CvGrid experiment_grid(Method method, const ExperimentConfig& config) {
  const Norm orig_norm = config.normalize.value_or(Norm::l2);
  const Norm priv_norm = config.normalize_privileged.value_or(Norm::l2);
  const auto orig = config.c_grid.value_or(grid_for(orig_norm, Space::original));
  const auto priv = config.priv_grid.value_or(grid_for(priv_norm, Space::privileged));
  switch (method) {
    case Method::svm:
      return CvGrid{orig, {}};
    case Method::reference_privileged:
      return CvGrid{priv, {}};
    case Method::margin_transfer:
    case Method::svm_plus:
      return CvGrid{orig, priv};
  }
  return CvGrid{orig, {}};
}

ExperimentReport run_experiment(const Dataset& raw, const ExperimentConfig& config) {
  config.validate();
  for (Method m : config.methods) {
    if (uses_privileged(m) && !raw.has_privileged())
      throw InvalidArgument(std::string(to_string(m)) + " needs privileged features");
  }
  const Dataset data = prepare(raw, config);
  const bool binary = data.is_binary();
  const std::size_t n_test = config.n_test_per_class.value_or(2 * config.n_train_per_class);
  const std::size_t n_methods = config.methods.size();
  const auto repeats = static_cast<std::size_t>(config.repeats);

  ExperimentReport report;
  report.methods = config.methods;
  report.accuracies = Matrix::Zero(static_cast<Eigen::Index>(repeats), static_cast<Eigen::Index>(n_methods));
  report.chosen.assign(repeats, std::vector<MethodParams>(n_methods));

  std::vector<std::optional<SplitResult>> splits(repeats);
  for (std::size_t r = 0; r < repeats; ++r) {
    SplitResult s = split(data, config.n_train_per_class, derive_seed(config.seed, r, 0));
    const auto keep = cap_test(s, n_test, derive_seed(config.seed, r, 1));
    std::vector<std::size_t> kept_indices;
    for (std::size_t k : keep) kept_indices.push_back(s.test_indices[k]);
    s.test = s.test.subset(keep);
    s.test_indices = std::move(kept_indices);
    splits[r] = std::move(s);
  }

  MethodParams base;
  base.epsilon = config.epsilon;
  parallel_for(repeats * n_methods, config.jobs, [&](std::size_t task) {
    const std::size_t r = task / n_methods;
    const std::size_t m = task % n_methods;
    const Method method = config.methods[m];
    const SplitResult& s = *splits[r];
    CvPlan plan = binary ? CvPlan::binary_default() : CvPlan::multiclass_default();
    plan.folds = config.folds;
    if (config.cv_repeats) plan.outer_repeats = *config.cv_repeats;
    plan.seed = derive_seed(config.seed, r, 2);
    try {
      const CvResult cv = cross_validate(s.train, method, experiment_grid(method, config), plan, base,
                                         config.solver, 1);
      const Classifier clf = fit(method, s.train, cv.best, config.solver);
      report.accuracies(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(m)) =
          accuracy(predict(clf, s.test), s.test.y());
      report.chosen[r][m] = cv.best;
    } catch (const Error& e) {
      const std::string context = "repeat " + std::to_string(r) + ", method " +
                                  std::string(to_string(method)) + ": " + e.what();
      if (dynamic_cast<const SolverError*>(&e)) throw SolverError(context);
      if (dynamic_cast<const DataError*>(&e)) throw DataError(context);
      throw InvalidArgument(context);
    }
  });

  if (repeats >= 2) {
    for (std::size_t m = 0; m < n_methods; ++m) {
      const Vector col = report.accuracies.col(static_cast<Eigen::Index>(m));
      report.summary.push_back(mean_stderr(std::span<const double>(col.data(), repeats)));
    }
    for (std::size_t a = 0; a < n_methods; ++a) {
      for (std::size_t b = a + 1; b < n_methods; ++b) {
        const Vector ca = report.accuracies.col(static_cast<Eigen::Index>(a));
        const Vector cb = report.accuracies.col(static_cast<Eigen::Index>(b));
        report.wilcoxon.push_back(PairwiseTest{
            a, b,
            wilcoxon_signed_rank(std::span<const double>(ca.data(), repeats),
                                 std::span<const double>(cb.data(), repeats))});
      }
    }
  }
  return report;
}

Json report_to_json(const ExperimentReport& report, const ExperimentConfig& config, const Dataset& data,
                    const Json& source) {
  const bool binary = data.is_binary();
  Json methods = Json::array();
  Json grids = Json::object();
  for (Method m : report.methods) {
    methods.push_back(std::string(to_string(m)));
    const CvGrid g = experiment_grid(m, config);
    grids[std::string(to_string(m))] = Json{{"orig", g.orig_values}, {"priv", g.priv_values}};
  }

  Json resolved{
      {"task", config.task},
      {"methods", methods},
      {"repeats", config.repeats},
      {"n_train_per_class", config.n_train_per_class},
      {"n_test_per_class", config.n_test_per_class.value_or(2 * config.n_train_per_class)},
      {"cv", Json{{"folds", config.folds},
                  {"repeats", config.cv_repeats.value_or(binary ? 5 : 1)},
                  {"scoring", "accuracy"}}},
      {"grids", grids},
      {"normalize", norm_name(config.normalize)},
      {"normalize_privileged", norm_name(config.normalize_privileged)},
      {"epsilon", config.epsilon},
      {"seed", config.seed},
      {"solver", Json{{"svm_tol", config.solver.svm_tol},
                      {"svm_max_epochs", config.solver.svm_max_epochs},
                      {"qp_tol", config.solver.qp_tol},
                      {"qp_max_iter", config.solver.qp_max_iter},
                      {"seed", config.solver.seed}}},
  };

  Json per_repeat = Json::array();
  for (Eigen::Index r = 0; r < report.accuracies.rows(); ++r) {
    Json row = Json::object();
    for (std::size_t m = 0; m < report.methods.size(); ++m) {
      row[std::string(to_string(report.methods[m]))] =
          Json{{"accuracy", report.accuracies(r, static_cast<Eigen::Index>(m))},
               {"params", params_json(report.methods[m], report.chosen[static_cast<std::size_t>(r)][m])}};
    }
    per_repeat.push_back(std::move(row));
  }

  Json doc{{"config", resolved},
           {"source", source},
           {"data", Json{{"n", data.size()},
                         {"d", data.dim()},
                         {"d_star", data.dim_star()},
                         {"classes", data.classes()}}},
           {"repeats", per_repeat}};

  if (!report.summary.empty()) {
    Json summary = Json::object();
    for (std::size_t m = 0; m < report.methods.size(); ++m)
      summary[std::string(to_string(report.methods[m]))] =
          Json{{"mean", report.summary[m].mean}, {"stderr", report.summary[m].std_error}};
    doc["summary"] = summary;
  }
  if (!report.wilcoxon.empty()) {
    Json tests = Json::array();
    for (const auto& t : report.wilcoxon) {
      const auto& mean_a = report.summary[t.first].mean;
      const auto& mean_b = report.summary[t.second].mean;
      tests.push_back(Json{{"a", std::string(to_string(report.methods[t.first]))},
                           {"b", std::string(to_string(report.methods[t.second]))},
                           {"p_value", t.result.p_value},
                           {"significant", t.result.reject},
                           {"exact", t.result.exact},
                           {"w_plus", t.result.w_plus},
                           {"n_effective", t.result.n_effective},
                           {"better", mean_a > mean_b   ? std::string(to_string(report.methods[t.first]))
                                      : mean_b > mean_a ? std::string(to_string(report.methods[t.second]))
                                                        : std::string("tie")}});
    }
    doc["wilcoxon"] = Json{{"alpha", 0.05}, {"alternative", "two-sided"}, {"tests", tests}};
  }
  return doc;
}

std::string report_to_csv(const ExperimentReport& report, const ExperimentConfig& config) {
  std::ostringstream head, row;
  head << "task,repeats";
  row << config.task << ',' << report.accuracies.rows();
  for (std::size_t m = 0; m < report.methods.size(); ++m) {
    const std::string name(to_string(report.methods[m]));
    head << ',' << name << "_mean," << name << "_stderr";
    if (report.summary.empty()) {
      row << ',' << format_double(report.accuracies.col(static_cast<Eigen::Index>(m)).mean()) << ',';
    } else {
      row << ',' << format_double(report.summary[m].mean) << ',' << format_double(report.summary[m].std_error);
    }
  }
  for (const auto& t : report.wilcoxon) {
    const std::string pair = std::string(to_string(report.methods[t.first])) + "_vs_" +
                             std::string(to_string(report.methods[t.second]));
    head << ',' << pair << "_p," << pair << "_significant";
    row << ',' << format_double(t.result.p_value) << ',' << (t.result.reject ? 1 : 0);
  }
  return head.str() + "\n" + row.str() + "\n";
}

Diagnostics diagnose(const BinaryModel& model, const Dataset& data, const std::optional<HumanScores>& scores) {
  if (!data.is_binary()) throw InvalidArgument("diagnostics need binary labels");
  Diagnostics out;
  out.original_margins = model.method == Method::reference_privileged
                             ? decision_margins(model.model, data.x_star(), data.y())
                             : decision_margins(model.model, data.x(), data.y());
  if (model.teacher) {
    out.teacher_margins = decision_margins(*model.teacher, data.x_star(), data.y());
    const double eps = model.margins ? model.margins->epsilon : kDefaultMarginFloor;
    out.rho = threshold_margins(*out.teacher_margins, eps);
    out.privileged_easiness = out.teacher_margins;
  }
  if (model.slack) {
    out.slack = slack_values(*model.slack, data.x_star());
    out.privileged_easiness = Vector(-*out.slack);
  }
  if (scores) out.human_rho = score_to_margin(*scores, data.y());

  if (out.privileged_easiness)
    out.taus.push_back({"privileged_vs_original", easiness_correlation(*out.privileged_easiness, out.original_margins)});
  if (out.privileged_easiness && out.human_rho)
    out.taus.push_back({"privileged_vs_scores", easiness_correlation(*out.privileged_easiness, *out.human_rho)});
  if (out.human_rho)
    out.taus.push_back({"original_vs_scores", easiness_correlation(out.original_margins, *out.human_rho)});
  return out;
}

Json to_json(const Diagnostics& diag) {
  Json taus = Json::object();
  for (const auto& t : diag.taus) taus[t.name] = t.value ? Json(*t.value) : Json("degenerate");
  Json doc{{"n", diag.original_margins.size()}, {"kendall_tau", taus}};
  if (diag.rho) {
    doc["epsilon"] = diag.rho->epsilon;
    doc["rho_min"] = diag.rho->rho.minCoeff();
    doc["rho_at_floor"] = (diag.rho->rho.array() <= diag.rho->epsilon).count();
  }
  if (diag.slack) {
    doc["slack_min"] = diag.slack->minCoeff();
    doc["slack_max"] = diag.slack->maxCoeff();
  }
  return doc;
}

std::string diagnostics_csv(const Diagnostics& diag, const Labels& y) {
  std::ostringstream out;
  out << "index,label,original_margin";
  if (diag.teacher_margins) out << ",teacher_margin,rho";
  if (diag.slack) out << ",slack";
  if (diag.human_rho) out << ",human_rho";
  out << '\n';
  for (Eigen::Index i = 0; i < diag.original_margins.size(); ++i) {
    out << i << ',' << y[static_cast<std::size_t>(i)] << ',' << format_double(diag.original_margins[i]);
    if (diag.teacher_margins)
      out << ',' << format_double((*diag.teacher_margins)[i]) << ',' << format_double(diag.rho->rho[i]);
    if (diag.slack) out << ',' << format_double((*diag.slack)[i]);
    if (diag.human_rho) out << ',' << format_double((*diag.human_rho)[i]);
    out << '\n';
  }
  return out.str();
}

}  // namespace lupi
