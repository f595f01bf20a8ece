#include "commands.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>

#include "lupi/error.hpp"

namespace lupi::cli {
namespace fs = std::filesystem;
namespace {

std::optional<Norm> parse_norm(const std::string& name) {
  if (name == "l1") return Norm::l1;
  if (name == "l2") return Norm::l2;
  return std::nullopt;
}

std::optional<fs::path> optional_path(const std::string& p) {
  if (p.empty()) return std::nullopt;
  return fs::path(p);
}

Dataset load(const DataFlags& flags) {
  Dataset data = load_dataset(flags.features, optional_path(flags.privileged), optional_path(flags.labels));
  if (const auto n = parse_norm(flags.normalize)) data = normalize(data, *n, Space::original);
  if (const auto n = parse_norm(flags.normalize_privileged)) {
    if (!data.has_privileged()) throw InvalidArgument("--normalize-privileged needs --privileged");
    data = normalize(data, *n, Space::privileged);
  }
  return data;
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError(path.string(), 0, "cannot open for writing");
  out << text;
  if (!out) throw DataError(path.string(), 0, "write failed");
}

void write_json(const fs::path& path, const Json& doc) { write_text(path, doc.dump(2) + "\n"); }

Json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError(path.string(), 0, "cannot open");
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(path.string(), 0, std::string("invalid JSON: ") + e.what());
  }
}

// "model.json" -> "model.margins.json"
fs::path sibling(const fs::path& path, const std::string& suffix) {
  fs::path out = path;
  out.replace_extension();
  out += suffix;
  return out;
}

Json spec_json(const SyntheticSpec& s) {
  return Json{{"n", s.n},
              {"d", s.d},
              {"d_star", s.d_star},
              {"noise_orig", s.noise_orig},
              {"noise_priv", s.noise_priv},
              {"easiness", {s.easiness_lo, s.easiness_hi}},
              {"seed", s.seed}};
}

}  // namespace

int run_gen(const GenOptions& opt) {
  const Dataset data = make_synthetic_lupi(opt.spec);
  const fs::path dir(opt.out_dir);
  fs::create_directories(dir);
  write_csv_matrix(dir / "original.csv", data.x());
  write_csv_matrix(dir / "privileged.csv", data.x_star());
  write_csv_labels(dir / "labels.csv", data.y());
  std::size_t positives = 0;
  for (int y : data.y()) positives += y == 1;
  std::cout << "wrote " << dir.string() << ": n=" << data.size() << " d=" << data.dim()
            << " d_star=" << data.dim_star() << " positives=" << positives
            << " negatives=" << data.size() - positives << '\n';
  return 0;
}

int run_train(const TrainOptions& opt) {
  const Method method = parse_method(opt.method);
  if (uses_privileged(method) && opt.data.privileged.empty())
    throw InvalidArgument(std::string(to_string(method)) + " needs --privileged");
  const Dataset data = load(opt.data);
  SolverSettings settings;
  settings.seed = opt.seed;

  const Json meta{{"n", data.size()}, {"d", data.dim()}, {"d_star", data.dim_star()}};
  const fs::path out(opt.out);
  if (data.is_binary()) {
    const BinaryModel model = train_binary(method, data, opt.params, settings);
    write_json(out, to_json(model, meta));
    if (model.margins) write_json(sibling(out, ".margins.json"), to_json(*model.margins));
    std::cout << "trained " << to_string(method) << " on " << data.size() << " samples: objective "
              << model.stats.objective << ", residual " << model.stats.residual << ", "
              << (model.stats.converged ? "converged" : "NOT converged") << " after "
              << model.stats.iterations << " iterations\n";
    if (!model.stats.converged) std::cerr << "warning: solver stopped before reaching its tolerance\n";
  } else {
    const OvrModel model = train_ovr(data, method, opt.params, settings, opt.jobs);
    write_json(out, to_json(model));
    if (method == Method::margin_transfer) {
      Json margins = Json::array();
      for (std::size_t k = 0; k < model.models.size(); ++k)
        margins.push_back(Json{{"class", model.class_ids[k]}, {"margins", to_json(*model.models[k].margins)}});
      write_json(sibling(out, ".margins.json"), margins);
    }
    std::cout << "trained " << to_string(method) << " one-vs-rest over " << model.class_ids.size()
              << " classes on " << data.size() << " samples\n";
  }
  return 0;
}

int run_experiment(const ExperimentOptions& opt) {
  ExperimentConfig cfg = opt.config;
  if (opt.methods.empty()) {
    cfg.methods = {Method::svm, Method::margin_transfer, Method::svm_plus, Method::reference_privileged};
  } else {
    cfg.methods.clear();
    for (const auto& m : opt.methods) cfg.methods.push_back(parse_method(m));
  }
  if (!opt.c_grid.empty()) cfg.c_grid = opt.c_grid;
  if (!opt.gamma_grid.empty()) cfg.priv_grid = opt.gamma_grid;
  cfg.n_test_per_class = opt.n_test;
  cfg.cv_repeats = opt.cv_repeats;
  cfg.normalize = parse_norm(opt.data.normalize);
  cfg.normalize_privileged = parse_norm(opt.data.normalize_privileged);

  Dataset data = [&] {
    if (opt.synthetic) {
      if (!opt.data.features.empty()) throw InvalidArgument("use either --synthetic or --features, not both");
      return make_synthetic_lupi(opt.spec);
    }
    if (opt.data.features.empty()) throw InvalidArgument("experiment needs --features or --synthetic");
    return load_dataset(opt.data.features, optional_path(opt.data.privileged), optional_path(opt.data.labels));
  }();

  Json source;
  if (opt.synthetic) {
    source = Json{{"kind", "synthetic"}, {"spec", spec_json(opt.spec)}};
  } else {
    source = Json{{"kind", "files"},
                  {"features", opt.data.features},
                  {"privileged", opt.data.privileged.empty() ? Json(nullptr) : Json(opt.data.privileged)},
                  {"labels", opt.data.labels.empty() ? Json(nullptr) : Json(opt.data.labels)}};
  }

  const ExperimentReport report = lupi::run_experiment(data, cfg);
  const fs::path out(opt.out);
  write_json(out, report_to_json(report, cfg, data, source));
  write_text(sibling(out, ".csv"), report_to_csv(report, cfg));

  for (std::size_t m = 0; m < report.methods.size(); ++m) {
    std::cout << to_string(report.methods[m]) << ": ";
    if (report.summary.empty()) {
      std::cout << report.accuracies(0, static_cast<Eigen::Index>(m)) << '\n';
    } else {
      std::cout << report.summary[m].mean << " +- " << report.summary[m].std_error << '\n';
    }
  }
  return 0;
}

int run_diag(const DiagOptions& opt) {
  const Json doc = read_json(opt.model);
  if (doc.value("type", std::string()) == "ovr")
    throw InvalidArgument("diagnostics need a binary model; got a one-vs-rest document");
  const BinaryModel model = binary_model_from_json(doc);
  const Dataset data = load(opt.data);
  if (uses_privileged(model.method) && !data.has_privileged())
    throw InvalidArgument(std::string(to_string(model.method)) + " diagnostics need --privileged");
  std::optional<HumanScores> scores;
  if (!opt.scores.empty()) scores = read_human_scores(opt.scores);

  const Diagnostics diag = diagnose(model, data, scores);
  const fs::path prefix(opt.out);
  fs::path json_path = prefix, csv_path = prefix;
  json_path += ".json";
  csv_path += ".csv";
  write_json(json_path, to_json(diag));
  write_text(csv_path, diagnostics_csv(diag, data.y()));
  for (const auto& t : diag.taus) {
    std::cout << "kendall tau " << t.name << ": ";
    if (t.value) {
      std::cout << *t.value << '\n';
    } else {
      std::cout << "degenerate\n";
    }
  }
  return 0;
}

int run_diag_qp(const QpOptionsCli& opt) {
  const QpProblem problem = qp_problem_from_json(read_json(opt.problem));
  const QpSolution sol = solve_qp(problem, QpOptions{opt.tol, opt.max_iter});
  const std::string text = to_json(sol).dump(2) + "\n";
  if (opt.out.empty()) {
    std::cout << text;
  } else {
    write_text(opt.out, text);
  }
  if (sol.status != QpStatus::optimal) {
    std::cerr << "error: QP solver stopped with status " << to_string(sol.status) << " (KKT residual "
              << sol.kkt_residual << ")\n";
    return 3;
  }
  return 0;
}

}  // namespace lupi::cli
