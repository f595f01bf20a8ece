#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lupi/experiment.hpp"

namespace lupi::cli {

struct DataFlags {
  std::string features;
  std::string privileged;
  std::string labels;
  std::string normalize = "none";
  std::string normalize_privileged = "none";
};

struct GenOptions {
  SyntheticSpec spec;
  std::string out_dir;
};

struct TrainOptions {
  DataFlags data;
  std::string method;
  MethodParams params;
  std::uint64_t seed = SolverSettings{}.seed;
  int jobs = 1;
  std::string out;
};

struct ExperimentOptions {
  DataFlags data;
  bool synthetic = false;
  SyntheticSpec spec;
  std::vector<std::string> methods;
  ExperimentConfig config;
  std::vector<double> c_grid;
  std::vector<double> gamma_grid;
  std::optional<std::size_t> n_test;
  std::optional<int> cv_repeats;
  std::string out;
};

struct DiagOptions {
  DataFlags data;
  std::string model;
  std::string scores;
  std::string out;
};

struct QpOptionsCli {
  std::string problem;
  double tol = QpOptions{}.tol;
  int max_iter = QpOptions{}.max_iter;
  std::string out;
};

int run_gen(const GenOptions& opt);
int run_train(const TrainOptions& opt);
int run_experiment(const ExperimentOptions& opt);
int run_diag(const DiagOptions& opt);
int run_diag_qp(const QpOptionsCli& opt);

}  // namespace lupi::cli
