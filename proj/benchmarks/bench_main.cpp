#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "lupi/dataset.hpp"
#include "lupi/qp.hpp"
#include "lupi/stats.hpp"
#include "lupi/svm.hpp"
#include "lupi/svm_plus.hpp"

namespace {

lupi::Dataset bench_data(std::size_t n) {
  lupi::SyntheticSpec spec;
  spec.n = n;
  spec.seed = 7;
  return lupi::make_synthetic_lupi(spec);
}

// Dense box-constrained QP: min 1/2 x'Px + q'x, -1 <= x <= 1.
lupi::QpProblem box_qp(Eigen::Index n) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  lupi::Matrix b(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) b(i, j) = g(rng);
  lupi::QpProblem qp;
  qp.p = b.transpose() * b + lupi::Matrix::Identity(n, n);
  qp.q = lupi::Vector::NullaryExpr(n, [&] { return 5.0 * g(rng); });
  qp.g.resize(2 * n, n);
  qp.g << lupi::Matrix::Identity(n, n), -lupi::Matrix::Identity(n, n);
  qp.h = lupi::Vector::Ones(2 * n);
  qp.a.resize(0, n);
  qp.b.resize(0);
  return qp;
}

void BM_QpBox(benchmark::State& state) {
  const auto qp = box_qp(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(lupi::solve_qp(qp));
}
BENCHMARK(BM_QpBox)->Arg(10)->Arg(50)->Arg(200)->Unit(benchmark::kMicrosecond);

void BM_SvmTrain(benchmark::State& state) {
  const auto data = bench_data(static_cast<std::size_t>(state.range(0)));
  lupi::SvmConfig cfg;
  cfg.c = 1.0;
  for (auto _ : state) benchmark::DoNotOptimize(lupi::train_svm(data.x(), data.y(), cfg));
}
BENCHMARK(BM_SvmTrain)->Arg(200)->Arg(1000)->Arg(5000)->Unit(benchmark::kMillisecond);

void BM_SvmPlusTrain(benchmark::State& state) {
  const auto data = bench_data(static_cast<std::size_t>(state.range(0)));
  lupi::SvmPlusConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(lupi::train_svm_plus(data.x(), data.x_star(), data.y(), cfg));
}
BENCHMARK(BM_SvmPlusTrain)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_KendallTau(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> pick(0, 50);
  std::vector<double> u(n), v(n);
  for (std::size_t i = 0; i < n; ++i) {
    u[i] = pick(rng);
    v[i] = u[i] + pick(rng);
  }
  for (auto _ : state) benchmark::DoNotOptimize(lupi::kendall_tau(u, v));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_KendallTau)->RangeMultiplier(8)->Range(64, 32768)->Complexity(benchmark::oNLogN);

}  // namespace

BENCHMARK_MAIN();
