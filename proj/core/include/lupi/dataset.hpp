#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace lupi {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Labels = std::vector<int>;

enum class Norm { l1, l2 };
enum class Space { original, privileged };

/// Paired original/privileged features with labels, one sample per row.
///
/// Binary tasks use labels in {-1, +1}; multiclass tasks use 0..K-1. The
/// privileged block, when present, is aligned row-for-row with `x()`.
/// Instances are validated on construction and immutable afterwards.
class Dataset {
 public:
  Dataset(Matrix x, std::optional<Matrix> x_star, Labels y);

  const Matrix& x() const noexcept { return x_; }
  const Matrix& x_star() const;
  bool has_privileged() const noexcept { return x_star_.has_value(); }
  const Labels& y() const noexcept { return y_; }

  std::size_t size() const noexcept { return y_.size(); }
  Eigen::Index dim() const noexcept { return x_.cols(); }
  Eigen::Index dim_star() const noexcept { return x_star_ ? x_star_->cols() : 0; }

  /// True when every label is -1 or +1.
  bool is_binary() const noexcept;
  /// Sorted distinct labels.
  std::vector<int> classes() const;

  /// Rows selected by `indices`, in the given order.
  Dataset subset(std::span<const std::size_t> indices) const;
  /// Copy with the privileged block swapped in as the original features.
  Dataset privileged_as_original() const;

 private:
  Matrix x_;
  std::optional<Matrix> x_star_;
  Labels y_;
};

/// Reads CSV files (one sample per row, optional header row). When
/// `labels_path` is empty the last column of the feature file holds labels.
Dataset load_dataset(const std::filesystem::path& features_path,
                     const std::optional<std::filesystem::path>& privileged_path,
                     const std::optional<std::filesystem::path>& labels_path);

/// Reads a purely numeric CSV matrix. A first row with no numeric cell is a
/// header and is skipped.
Matrix read_csv_matrix(const std::filesystem::path& path);
void write_csv_matrix(const std::filesystem::path& path, const Matrix& m);
void write_csv_labels(const std::filesystem::path& path, const Labels& y);

/// Per-sample L1/L2 normalization of one feature space. All-zero rows are
/// left untouched.
Dataset normalize(const Dataset& data, Norm scheme, Space space);
void normalize_rows(Matrix& m, Norm scheme);

struct SplitResult {
  Dataset train;
  Dataset test;
  std::vector<std::size_t> train_indices;
  std::vector<std::size_t> test_indices;
};

/// Stratified train/test split: `n_train_per_class` samples of each class go
/// to training, the remainder to test. Index lists are sorted ascending.
SplitResult split(const Dataset& data, std::size_t n_train_per_class, std::uint64_t seed);

/// Synthetic LUPI generator.
///
/// For sample i: y_i is drawn from a balanced shuffle of n/2 positives and
/// n/2 negatives, easiness e_i ~ U[easiness_lo, easiness_hi], then
///   x*_i = y_i e_i u* + N(0, noise_priv^2 I),  x_i = y_i e_i u + N(0, noise_orig^2 I)
/// with u, u* the first canonical basis vectors. Draw order: label shuffle,
/// then per sample e_i, privileged noise, original noise.
struct SyntheticSpec {
  std::size_t n = 600;
  Eigen::Index d = 10;
  Eigen::Index d_star = 2;
  double noise_orig = 1.0;
  double noise_priv = 0.05;
  double easiness_lo = 0.2;
  double easiness_hi = 2.0;
  std::uint64_t seed = 1;

  void validate() const;
};

Dataset make_synthetic_lupi(const SyntheticSpec& spec);

/// Easy/hard scores from human rankings, 1 (hardest) to 16 (easiest).
struct HumanScores {
  Vector scores;

  void validate() const;
};

HumanScores read_human_scores(const std::filesystem::path& path);

/// Affine map of scores onto [0, 2]: rho = 2 (score - 1) / 15. Values in
/// [0, 1] mark hard samples. Not thresholded.
Vector score_to_margin(const HumanScores& scores, const Labels& y);

}  // namespace lupi
