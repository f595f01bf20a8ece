#include "lupi/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "lupi/error.hpp"

namespace lupi {
namespace {

// |d| values this close are treated as tied (and |d| this small as zero), so
// that differences of rounded accuracies rank consistently.
constexpr double kTieTolerance = 1e-12;

bool nearly_equal(double a, double b) {
  return std::abs(a - b) <= kTieTolerance * std::max(1.0, std::max(std::abs(a), std::abs(b)));
}

// Number of inversions in v (pairs i < j with v[i] > v[j]); sorts v.
std::int64_t count_inversions(std::vector<double>& v, std::vector<double>& buf, std::size_t lo,
                              std::size_t hi) {
  if (hi - lo < 2) return 0;
  const std::size_t mid = lo + (hi - lo) / 2;
  std::int64_t inv = count_inversions(v, buf, lo, mid) + count_inversions(v, buf, mid, hi);
  std::size_t i = lo, j = mid, k = lo;
  while (i < mid && j < hi) {
    if (v[j] < v[i]) {
      inv += static_cast<std::int64_t>(mid - i);
      buf[k++] = v[j++];
    } else {
      buf[k++] = v[i++];
    }
  }
  while (i < mid) buf[k++] = v[i++];
  while (j < hi) buf[k++] = v[j++];
  std::copy(buf.begin() + static_cast<long>(lo), buf.begin() + static_cast<long>(hi),
            v.begin() + static_cast<long>(lo));
  return inv;
}

// Sum of t(t-1)/2 over runs of equal adjacent elements.
template <typename Eq>
std::int64_t tied_pairs(std::size_t n, Eq&& equal_to_prev) {
  std::int64_t total = 0, run = 1;
  for (std::size_t i = 1; i <= n; ++i) {
    if (i < n && equal_to_prev(i)) {
      ++run;
    } else {
      total += run * (run - 1) / 2;
      run = 1;
    }
  }
  return total;
}

}  // namespace

double accuracy(std::span<const int> predicted, std::span<const int> truth) {
  if (predicted.size() != truth.size())
    throw DimensionMismatch("accuracy: " + std::to_string(predicted.size()) + " predictions vs " +
                            std::to_string(truth.size()) + " labels");
  if (truth.empty()) throw InvalidArgument("accuracy of an empty label vector");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) hits += predicted[i] == truth[i];
  return static_cast<double>(hits) / static_cast<double>(truth.size());
}

MeanStderr mean_stderr(std::span<const double> values) {
  const std::size_t n = values.size();
  if (n < 2) throw InvalidArgument("mean_stderr needs at least two values");
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(n);
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  return MeanStderr{mean, sd / std::sqrt(static_cast<double>(n))};
}

WilcoxonResult wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b, double alpha) {
  if (a.size() != b.size())
    throw DimensionMismatch("wilcoxon: paired samples have different lengths");
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidArgument("wilcoxon: alpha must be in (0, 1)");

  struct Diff {
    double magnitude;
    bool positive;
  };
  std::vector<Diff> diffs;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    if (std::abs(d) <= kTieTolerance) continue;
    diffs.push_back({std::abs(d), d > 0.0});
  }
  WilcoxonResult out;
  const std::size_t n = diffs.size();
  out.n_effective = n;
  if (n == 0) return out;

  std::sort(diffs.begin(), diffs.end(), [](const Diff& x, const Diff& y) { return x.magnitude < y.magnitude; });

  // Doubled average ranks are integers: a tie run over 1-based positions
  // i..j gets rank (i + j) / 2.
  std::vector<std::int64_t> rank2(n);
  double tie_term = 0.0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i + 1;
    while (j < n && nearly_equal(diffs[j].magnitude, diffs[i].magnitude)) ++j;
    const auto r2 = static_cast<std::int64_t>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) rank2[k] = r2;
    const double t = static_cast<double>(j - i);
    tie_term += t * t * t - t;
    i = j;
  }
  std::int64_t w2 = 0;
  for (std::size_t k = 0; k < n; ++k) {
    if (diffs[k].positive) w2 += rank2[k];
  }
  out.w_plus = static_cast<double>(w2) / 2.0;

  if (n <= kWilcoxonExactLimit) {
    const std::int64_t total = std::accumulate(rank2.begin(), rank2.end(), std::int64_t{0});
    // counts[s]: number of sign assignments whose positive doubled-rank sum is s.
    std::vector<double> counts(static_cast<std::size_t>(total) + 1, 0.0);
    counts[0] = 1.0;
    std::int64_t reach = 0;
    for (const std::int64_t r : rank2) {
      for (std::int64_t s = reach; s >= 0; --s) {
        if (counts[static_cast<std::size_t>(s)] != 0.0)
          counts[static_cast<std::size_t>(s + r)] += counts[static_cast<std::size_t>(s)];
      }
      reach += r;
    }
    double lower = 0.0, upper = 0.0;
    for (std::int64_t s = 0; s <= total; ++s) {
      if (s <= w2) lower += counts[static_cast<std::size_t>(s)];
      if (s >= w2) upper += counts[static_cast<std::size_t>(s)];
    }
    const double denom = std::ldexp(1.0, static_cast<int>(n));
    out.p_value = std::min(1.0, 2.0 * std::min(lower, upper) / denom);
    out.exact = true;
  } else {
    const double nd = static_cast<double>(n);
    const double mean = nd * (nd + 1.0) / 4.0;
    const double var = nd * (nd + 1.0) * (2.0 * nd + 1.0) / 24.0 - tie_term / 48.0;
    const double z = std::max(0.0, std::abs(out.w_plus - mean) - 0.5) / std::sqrt(var);
    out.p_value = std::min(1.0, std::erfc(z / std::sqrt(2.0)));
    out.exact = false;
  }
  out.reject = out.p_value < alpha;
  return out;
}

std::optional<double> kendall_tau(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) throw DimensionMismatch("kendall_tau: vectors have different lengths");
  const std::size_t n = u.size();
  if (n < 2) throw InvalidArgument("kendall_tau needs at least two observations");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return u[i] < u[j] || (u[i] == u[j] && v[i] < v[j]);
  });

  const std::int64_t ties_u =
      tied_pairs(n, [&](std::size_t k) { return u[order[k]] == u[order[k - 1]]; });
  const std::int64_t ties_joint = tied_pairs(n, [&](std::size_t k) {
    return u[order[k]] == u[order[k - 1]] && v[order[k]] == v[order[k - 1]];
  });

  std::vector<double> seq(n), buf(n);
  for (std::size_t k = 0; k < n; ++k) seq[k] = v[order[k]];
  const std::int64_t swaps = count_inversions(seq, buf, 0, n);
  const std::int64_t ties_v = tied_pairs(n, [&](std::size_t k) { return seq[k] == seq[k - 1]; });

  const auto pairs = static_cast<std::int64_t>(n) * static_cast<std::int64_t>(n - 1) / 2;
  if (pairs == ties_u || pairs == ties_v) return std::nullopt;
  const std::int64_t numerator = pairs - ties_u - ties_v + ties_joint - 2 * swaps;
  return static_cast<double>(numerator) /
         std::sqrt(static_cast<double>(pairs - ties_u) * static_cast<double>(pairs - ties_v));
}

std::optional<double> easiness_correlation(const Vector& margins_a, const Vector& margins_b) {
  return kendall_tau(std::span<const double>(margins_a.data(), static_cast<std::size_t>(margins_a.size())),
                     std::span<const double>(margins_b.data(), static_cast<std::size_t>(margins_b.size())));
}

}  // namespace lupi
