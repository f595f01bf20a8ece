#include <random>

#include "doctest.h"
#include "lupi/error.hpp"
#include "lupi/svm.hpp"
#include "oracles.hpp"

using namespace lupi;

namespace {

SvmConfig no_bias() {
  SvmConfig cfg;
  cfg.use_bias = false;
  return cfg;
}

// Golden-section minimum of a convex 1-D function on [lo, hi].
template <typename F>
double golden_min(F f, double lo, double hi) {
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  for (int i = 0; i < 200; ++i) {
    const double c = b - r * (b - a), d = a + r * (b - a);
    if (f(c) < f(d)) b = d; else a = c;
  }
  return 0.5 * (a + b);
}

}  // namespace

TEST_SUITE("svm_core") {
  TEST_CASE("two symmetric points give the hard-margin solution") {
    Matrix x(2, 2);
    x << 1, 0, -1, 0;
    const Labels y{1, -1};
    const Vector cost = Vector::Constant(2, 10.0);
    const auto fit = train_weighted_svm(x, y, cost, no_bias());
    CHECK(fit.converged);
    CHECK(fit.model.w[0] == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(fit.model.w[1] == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(fit.primal_objective == doctest::Approx(0.5).epsilon(1e-9));

    const auto qp = solve_qp(oracle::weighted_svm_qp(x, y, cost, false));
    REQUIRE(qp.status == QpStatus::optimal);
    CHECK(qp.objective == doctest::Approx(fit.primal_objective).epsilon(1e-7));
  }

  TEST_CASE("one point with a small cost stops inside the margin") {
    const Matrix x = Matrix::Ones(1, 1);
    const Labels y{1};
    const Vector cost = Vector::Constant(1, 0.5);
    const auto fit = train_weighted_svm(x, y, cost, no_bias());
    const auto objective = [](double w) { return 0.5 * w * w + 0.5 * std::max(0.0, 1.0 - w); };
    const double w_star = golden_min(objective, -5.0, 5.0);
    CHECK(w_star == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(fit.model.w[0] == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(fit.primal_objective == doctest::Approx(0.375).epsilon(1e-9));
  }

  TEST_CASE("uniform costs reproduce the plain SVM entry point") {
    std::mt19937_64 rng(3);
    const Matrix x = oracle::random_matrix(30, 4, rng);
    const auto y = oracle::random_labels(30, rng);
    SvmConfig cfg;
    cfg.c = 0.7;
    const auto plain = train_svm(x, y, cfg);
    const auto weighted = train_weighted_svm(x, y, Vector::Constant(30, 0.7), cfg);
    CHECK(plain.model.w == weighted.model.w);
    CHECK(plain.model.b == weighted.model.b);
  }

  TEST_CASE("prediction and margins") {
    LinearModel m{Vector(2), 0.0};
    m.w << 1, 0;
    Matrix x(1, 2);
    x << 2, 5;
    CHECK(predict(m, x)[0] == 2.0);

    LinearModel zero{Vector::Zero(2), 0.0};
    CHECK(predict(zero, x)[0] == 0.0);
    CHECK(predict_labels(zero, x)[0] == 1);

    LinearModel shifted{m.w, -3.0};
    Matrix x2(1, 2);
    x2 << 2, 0;
    CHECK(predict(shifted, x2)[0] == -1.0);
    CHECK(predict_labels(shifted, x2)[0] == -1);

    Matrix three(1, 2);
    three << 3, 0;
    const Labels pos{1}, neg{-1};
    CHECK(decision_margins(m, three, pos)[0] == 3.0);
    CHECK(decision_margins(m, three, neg)[0] == -3.0);
    CHECK(decision_margins(zero, three, neg)[0] == 0.0);

    CHECK_THROWS_AS(predict(m, Matrix::Ones(1, 3)), DimensionMismatch);
  }

  TEST_CASE("invalid inputs are rejected") {
    const Matrix x = Matrix::Ones(2, 1);
    CHECK_THROWS_AS(train_weighted_svm(x, Labels{1, -1}, Vector::Constant(2, 0.0), no_bias()), InvalidArgument);
    CHECK_THROWS_AS(train_weighted_svm(x, Labels{1, 0}, Vector::Ones(2), no_bias()), InvalidArgument);
    CHECK_THROWS_AS(train_weighted_svm(x, Labels{1}, Vector::Ones(2), no_bias()), DimensionMismatch);
  }

  TEST_CASE("agrees with the QP oracle on random instances") {
    std::mt19937_64 rng(17);
    std::uniform_int_distribution<int> pick_n(2, 40), pick_d(1, 6);
    std::uniform_real_distribution<double> logc(-2.0, 2.0);
    for (int trial = 0; trial < 40; ++trial) {
      const int n = pick_n(rng), d = pick_d(rng);
      const Matrix x = oracle::random_matrix(n, d, rng);
      const auto y = oracle::random_labels(static_cast<std::size_t>(n), rng);
      Vector cost(n);
      for (int i = 0; i < n; ++i) cost[i] = std::pow(10.0, logc(rng));
      const bool bias = trial % 2 == 0;
      SvmConfig cfg;
      cfg.use_bias = bias;
      const auto fit = train_weighted_svm(x, y, cost, cfg);
      const auto qp = solve_qp(oracle::weighted_svm_qp(x, y, cost, bias));
      INFO("trial " << trial);
      REQUIRE(qp.status == QpStatus::optimal);
      CHECK(fit.converged);
      CHECK(std::abs(fit.primal_objective - qp.objective) <= 1e-4 * std::max(1.0, std::abs(qp.objective)));
    }
  }

  TEST_CASE("dual objective never decreases across epochs") {
    std::mt19937_64 rng(23);
    const Matrix x = oracle::random_matrix(40, 5, rng);
    const auto y = oracle::random_labels(40, rng);
    SvmConfig cfg;
    cfg.c = 10.0;
    double last = -1e300;
    bool monotone = true;
    int epochs = 0;
    cfg.on_epoch = [&](int, double dual) {
      monotone = monotone && dual >= last - 1e-12;
      last = dual;
      ++epochs;
    };
    train_svm(x, y, cfg);
    CHECK(epochs > 1);
    CHECK(monotone);
  }

  TEST_CASE("negating labels negates w without bias") {
    std::mt19937_64 rng(29);
    const Matrix x = oracle::random_matrix(25, 3, rng);
    auto y = oracle::random_labels(25, rng);
    const auto a = train_svm(x, y, no_bias());
    for (auto& v : y) v = -v;
    const auto b = train_svm(x, y, no_bias());
    CHECK(a.model.w == -b.model.w);
  }

  TEST_CASE("large costs approach the hard-margin solution") {
    Matrix x(2, 2);
    x << 1, 0, -1, 0;
    const Labels y{1, -1};
    const auto fit = train_weighted_svm(x, y, Vector::Constant(2, 1e6), no_bias());
    CHECK(std::abs(fit.primal_objective - 0.5) <= 1e-3);
  }

  TEST_CASE("zero rows without bias saturate at the cost bound") {
    const Matrix x = Matrix::Zero(2, 2);
    const auto fit = train_weighted_svm(x, Labels{1, -1}, Vector::Constant(2, 3.0), no_bias());
    CHECK(fit.model.w.isZero());
    CHECK(fit.primal_objective == doctest::Approx(6.0));
  }
}
