#include <CLI11.hpp>
#include <iostream>
#include <nlohmann/json.hpp>

#include "commands.hpp"
#include "lupi/error.hpp"

namespace {

using namespace lupi;
using namespace lupi::cli;

const std::vector<std::string> kNormChoices{"l1", "l2", "none"};

void add_data_flags(CLI::App* cmd, DataFlags& d, bool features_required) {
  auto* f = cmd->add_option("--features", d.features, "CSV of original features (labels in the last column unless --labels)");
  if (features_required) f->required();
  cmd->add_option("--privileged", d.privileged, "CSV of privileged features, row-aligned");
  cmd->add_option("--labels", d.labels, "single-column CSV of labels");
  cmd->add_option("--normalize", d.normalize, "per-sample normalization of original features")
      ->check(CLI::IsMember(kNormChoices))
      ->capture_default_str();
  cmd->add_option("--normalize-privileged", d.normalize_privileged, "per-sample normalization of privileged features")
      ->check(CLI::IsMember(kNormChoices))
      ->capture_default_str();
}

void add_synthetic_flags(CLI::App* cmd, SyntheticSpec& s, const std::string& seed_flag) {
  cmd->add_option("--n", s.n, "number of samples (even)")->capture_default_str();
  cmd->add_option("--d", s.d, "original dimension")->capture_default_str();
  cmd->add_option("--d-star", s.d_star, "privileged dimension")->capture_default_str();
  cmd->add_option("--noise-orig", s.noise_orig, "noise sd in the original space")->capture_default_str();
  cmd->add_option("--noise-priv", s.noise_priv, "noise sd in the privileged space")->capture_default_str();
  cmd->add_option("--easiness-lo", s.easiness_lo, "lower end of the easiness range")->capture_default_str();
  cmd->add_option("--easiness-hi", s.easiness_hi, "upper end of the easiness range")->capture_default_str();
  cmd->add_option(seed_flag, s.seed, "generator seed")->capture_default_str();
}

int exit_code_for(const Error& e) {
  if (dynamic_cast<const SolverError*>(&e)) return 3;
  if (dynamic_cast<const DataError*>(&e)) return 2;
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Learning with privileged information: margin transfer, SVM+ and baselines"};
  app.require_subcommand(1);

  GenOptions gen;
  auto* gen_cmd = app.add_subcommand("gen", "write a synthetic dataset (original.csv, privileged.csv, labels.csv)");
  add_synthetic_flags(gen_cmd, gen.spec, "--seed");
  gen_cmd->add_option("--out", gen.out_dir, "output directory")->required();

  TrainOptions train;
  auto* train_cmd = app.add_subcommand("train", "train one model and write it as JSON");
  train_cmd->add_option("--method", train.method, "svm, margin_transfer, svm_plus or reference_svm_on_privileged")
      ->required();
  add_data_flags(train_cmd, train.data, true);
  train_cmd->add_option("--c", train.params.c, "C in the original space")->capture_default_str();
  train_cmd->add_option("--c-priv", train.params.c_priv, "teacher C (margin transfer)")->capture_default_str();
  train_cmd->add_option("--gamma", train.params.gamma, "slack-function regularization (SVM+)")->capture_default_str();
  train_cmd->add_option("--epsilon", train.params.epsilon, "margin floor (margin transfer)")->capture_default_str();
  train_cmd->add_option("--seed", train.seed, "coordinate-descent permutation seed")->capture_default_str();
  train_cmd->add_option("--jobs", train.jobs, "worker threads for one-vs-rest")->capture_default_str();
  train_cmd->add_option("--out", train.out, "model JSON path")->required();

  ExperimentOptions exp;
  auto* exp_cmd = app.add_subcommand("experiment", "repeated split / cross-validation / test comparison");
  exp_cmd->add_option("--method", exp.methods, "methods to compare (repeatable or comma-separated; default all)")
      ->delimiter(',');
  add_data_flags(exp_cmd, exp.data, false);
  exp_cmd->add_flag("--synthetic", exp.synthetic, "generate the data instead of reading --features");
  add_synthetic_flags(exp_cmd, exp.spec, "--data-seed");
  exp_cmd->add_option("--task", exp.config.task, "task name in the reports")->capture_default_str();
  exp_cmd->add_option("--repeats", exp.config.repeats, "train/test repetitions")->capture_default_str();
  exp_cmd->add_option("--n-train", exp.config.n_train_per_class, "training samples per class")->capture_default_str();
  exp_cmd->add_option("--n-test", exp.n_test, "test samples per class (default 2x training, capped)");
  exp_cmd->add_option("--folds", exp.config.folds, "cross-validation folds")->capture_default_str();
  exp_cmd->add_option("--cv-repeats", exp.cv_repeats, "cross-validation repetitions (default 5 binary, 1 multiclass)");
  exp_cmd->add_option("--c-grid", exp.c_grid, "original-space grid override")->delimiter(',');
  exp_cmd->add_option("--gamma-grid", exp.gamma_grid, "privileged-space grid override")->delimiter(',');
  exp_cmd->add_option("--epsilon", exp.config.epsilon, "margin floor (margin transfer)")->capture_default_str();
  exp_cmd->add_option("--seed", exp.config.seed, "protocol seed (splits and folds)")->capture_default_str();
  exp_cmd->add_option("--jobs", exp.config.jobs, "worker threads; results do not depend on it")->capture_default_str();
  exp_cmd->add_option("--out", exp.out, "report JSON path; the CSV table goes next to it")->required();

  DiagOptions diag;
  auto* diag_cmd = app.add_subcommand("diag", "per-sample easy/hard diagnostics of a trained binary model");
  diag_cmd->require_subcommand(0, 1);
  add_data_flags(diag_cmd, diag.data, false);
  diag_cmd->add_option("--model", diag.model, "model JSON from `lupi train`");
  diag_cmd->add_option("--scores", diag.scores, "single-column CSV of human easiness scores in [1, 16]");
  diag_cmd->add_option("--out", diag.out, "output prefix (writes <prefix>.json and <prefix>.csv)");

  QpOptionsCli qp;
  auto* qp_cmd = diag_cmd->add_subcommand("qp", "solve a QP given as JSON and print the solution");
  qp_cmd->add_option("--problem", qp.problem, "QP JSON {P, q, G, h, A, b}")->required();
  qp_cmd->add_option("--tol", qp.tol, "KKT tolerance")->capture_default_str();
  qp_cmd->add_option("--max-iter", qp.max_iter, "iteration limit")->capture_default_str();
  qp_cmd->add_option("--out", qp.out, "write the solution here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (gen_cmd->parsed()) return run_gen(gen);
    if (train_cmd->parsed()) return run_train(train);
    if (exp_cmd->parsed()) return run_experiment(exp);
    if (qp_cmd->parsed()) return run_diag_qp(qp);
    if (diag_cmd->parsed()) {
      if (diag.model.empty() || diag.data.features.empty() || diag.out.empty())
        throw InvalidArgument("diag needs --model, --features and --out");
      return run_diag(diag);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e);
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: malformed JSON: " << e.what() << '\n';
    return 2;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
