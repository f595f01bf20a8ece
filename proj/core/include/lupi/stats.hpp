#pragma once

#include <optional>
#include <span>

#include "lupi/dataset.hpp"

namespace lupi {

/// Fraction of positions where `predicted` equals `truth`.
double accuracy(std::span<const int> predicted, std::span<const int> truth);

struct MeanStderr {
  double mean = 0.0;
  /// Sample standard deviation (n - 1 denominator) over sqrt(n).
  double std_error = 0.0;
};

MeanStderr mean_stderr(std::span<const double> values);

struct WilcoxonResult {
  double p_value = 1.0;
  bool reject = false;
  /// Sum of ranks of the positive differences a_i - b_i.
  double w_plus = 0.0;
  /// Number of non-zero differences.
  std::size_t n_effective = 0;
  bool exact = true;
};

inline constexpr std::size_t kWilcoxonExactLimit = 25;

/// Two-sided paired Wilcoxon signed-rank test on d_i = a_i - b_i.
///
/// Zero differences are dropped and tied |d_i| share the average rank. Up to
/// 25 non-zero differences the null distribution is exact (all 2^n sign
/// assignments, counted by dynamic programming over rank sums); beyond that
/// a normal approximation with tie and continuity corrections is used.
/// With no non-zero difference, p = 1.
WilcoxonResult wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b,
                                    double alpha = 0.05);

/// Kendall tau-b in O(n log n). Empty when either input is constant.
std::optional<double> kendall_tau(std::span<const double> u, std::span<const double> v);

/// Rank agreement between two per-sample easiness measures (both oriented so
/// that larger means easier).
std::optional<double> easiness_correlation(const Vector& margins_a, const Vector& margins_b);

}  // namespace lupi
