#include "lupi/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "lupi/error.hpp"

namespace lupi {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_cells(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    cells.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

std::optional<double> parse_number(std::string_view cell) {
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (ec != std::errc{} || ptr != cell.data() + cell.size() || cell.empty()) return std::nullopt;
  return value;
}

struct RawTable {
  std::vector<std::vector<double>> rows;
  std::vector<long> line_numbers;
};

RawTable read_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError(path.string(), 0, "cannot open file");

  RawTable table;
  std::string line;
  long line_no = 0;
  std::size_t width = 0;
  bool first_content_line = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split_cells(line);
    std::vector<double> row;
    row.reserve(cells.size());
    std::size_t numeric = 0;
    std::size_t bad_cell = cells.size();
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (auto v = parse_number(cells[c])) {
        row.push_back(*v);
        ++numeric;
      } else if (bad_cell == cells.size()) {
        bad_cell = c;
      }
    }
    if (first_content_line) {
      first_content_line = false;
      if (numeric == 0) continue;  // header
    }
    if (bad_cell != cells.size()) {
      throw DataError(path.string(), line_no,
                      "non-numeric cell '" + std::string(cells[bad_cell]) + "' in column " +
                          std::to_string(bad_cell + 1));
    }
    for (double v : row) {
      if (!std::isfinite(v)) throw DataError(path.string(), line_no, "non-finite value");
    }
    if (width == 0) {
      width = row.size();
    } else if (row.size() != width) {
      throw DataError(path.string(), line_no,
                      "expected " + std::to_string(width) + " columns, found " +
                          std::to_string(row.size()));
    }
    table.rows.push_back(std::move(row));
    table.line_numbers.push_back(line_no);
  }
  if (table.rows.empty()) throw DataError(path.string(), line_no, "no data rows");
  return table;
}

Matrix to_matrix(const RawTable& t, std::size_t first_col, std::size_t n_cols) {
  Matrix m(static_cast<Eigen::Index>(t.rows.size()), static_cast<Eigen::Index>(n_cols));
  for (std::size_t i = 0; i < t.rows.size(); ++i)
    for (std::size_t j = 0; j < n_cols; ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = t.rows[i][first_col + j];
  return m;
}

int parse_label(double v, const std::filesystem::path& path, long line) {
  if (v != std::floor(v) || v < -1.0 || v > 1e9) {
    std::ostringstream msg;
    msg << "invalid label value " << v;
    throw DataError(path.string(), line, msg.str());
  }
  return static_cast<int>(v);
}

void check_label_set(const Labels& y) {
  const bool binary = std::all_of(y.begin(), y.end(), [](int v) { return v == -1 || v == 1; });
  if (binary) return;
  for (int v : y) {
    if (v < 0) throw DataError("labels must be all in {-1, +1} or all in 0..K-1");
  }
}

void check_finite(const Matrix& m, const char* what) {
  if (!m.allFinite()) throw DataError(std::string(what) + " contains non-finite entries");
}

}  // namespace

Dataset::Dataset(Matrix x, std::optional<Matrix> x_star, Labels y)
    : x_(std::move(x)), x_star_(std::move(x_star)), y_(std::move(y)) {
  if (y_.empty()) throw DataError("dataset must contain at least one sample");
  if (static_cast<std::size_t>(x_.rows()) != y_.size())
    throw DimensionMismatch("row-count mismatch: " + std::to_string(x_.rows()) +
                            " feature rows vs " + std::to_string(y_.size()) + " labels");
  if (x_star_ && x_star_->rows() != x_.rows())
    throw DimensionMismatch("row-count mismatch: " + std::to_string(x_star_->rows()) +
                            " privileged rows vs " + std::to_string(x_.rows()) + " original rows");
  check_finite(x_, "original features");
  if (x_star_) check_finite(*x_star_, "privileged features");
  check_label_set(y_);
}

const Matrix& Dataset::x_star() const {
  if (!x_star_) throw InvalidArgument("dataset has no privileged features");
  return *x_star_;
}

bool Dataset::is_binary() const noexcept {
  return std::all_of(y_.begin(), y_.end(), [](int v) { return v == -1 || v == 1; });
}

std::vector<int> Dataset::classes() const {
  std::set<int> s(y_.begin(), y_.end());
  return {s.begin(), s.end()};
}

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
  Matrix xs(static_cast<Eigen::Index>(indices.size()), x_.cols());
  std::optional<Matrix> xss;
  if (x_star_) xss.emplace(static_cast<Eigen::Index>(indices.size()), x_star_->cols());
  Labels ys(indices.size());
  for (std::size_t k = 0; k < indices.size(); ++k) {
    const auto i = static_cast<Eigen::Index>(indices[k]);
    if (indices[k] >= y_.size()) throw InvalidArgument("subset index out of range");
    xs.row(static_cast<Eigen::Index>(k)) = x_.row(i);
    if (xss) xss->row(static_cast<Eigen::Index>(k)) = x_star_->row(i);
    ys[k] = y_[indices[k]];
  }
  return Dataset(std::move(xs), std::move(xss), std::move(ys));
}

Dataset Dataset::privileged_as_original() const { return Dataset(x_star(), std::nullopt, y_); }

Matrix read_csv_matrix(const std::filesystem::path& path) {
  const auto t = read_table(path);
  return to_matrix(t, 0, t.rows.front().size());
}

Dataset load_dataset(const std::filesystem::path& features_path,
                     const std::optional<std::filesystem::path>& privileged_path,
                     const std::optional<std::filesystem::path>& labels_path) {
  const auto feats = read_table(features_path);
  const std::size_t width = feats.rows.front().size();
  const std::size_t n = feats.rows.size();

  Labels y(n);
  Matrix x;
  std::filesystem::path label_source = features_path;
  std::vector<long> label_lines = feats.line_numbers;
  if (labels_path) {
    const auto labels = read_table(*labels_path);
    if (labels.rows.front().size() != 1)
      throw DataError(labels_path->string(), labels.line_numbers.front(),
                      "label file must have exactly one column");
    if (labels.rows.size() != n)
      throw DimensionMismatch(labels_path->string(), labels.line_numbers.back(),
                              "row-count mismatch: " + std::to_string(labels.rows.size()) +
                                  " labels vs " + std::to_string(n) + " feature rows");
    for (std::size_t i = 0; i < n; ++i)
      y[i] = parse_label(labels.rows[i][0], *labels_path, labels.line_numbers[i]);
    label_source = *labels_path;
    label_lines = labels.line_numbers;
    x = to_matrix(feats, 0, width);
  } else {
    if (width < 2)
      throw DataError(features_path.string(), feats.line_numbers.front(),
                      "need at least one feature column plus a label column");
    for (std::size_t i = 0; i < n; ++i)
      y[i] = parse_label(feats.rows[i][width - 1], features_path, feats.line_numbers[i]);
    x = to_matrix(feats, 0, width - 1);
  }

  std::optional<Matrix> x_star;
  if (privileged_path) {
    const auto priv = read_table(*privileged_path);
    if (priv.rows.size() != n)
      throw DimensionMismatch(privileged_path->string(), priv.line_numbers.back(),
                              "row-count mismatch: " + std::to_string(priv.rows.size()) +
                                  " privileged rows vs " + std::to_string(n) + " original rows");
    x_star = to_matrix(priv, 0, priv.rows.front().size());
  }

  const bool binary = std::all_of(y.begin(), y.end(), [](int v) { return v == -1 || v == 1; });
  if (!binary) {
    for (std::size_t i = 0; i < n; ++i) {
      if (y[i] < 0)
        throw DataError(label_source.string(), label_lines[i],
                        "invalid label value " + std::to_string(y[i]) +
                            " (labels must be all in {-1, +1} or all in 0..K-1)");
    }
  }
  return Dataset(std::move(x), std::move(x_star), std::move(y));
}

namespace {

std::string format_double(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace

void write_csv_matrix(const std::filesystem::path& path, const Matrix& m) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError(path.string(), 0, "cannot open file for writing");
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
  if (!out) throw DataError(path.string(), 0, "write failed");
}

void write_csv_labels(const std::filesystem::path& path, const Labels& y) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError(path.string(), 0, "cannot open file for writing");
  for (int v : y) out << v << '\n';
  if (!out) throw DataError(path.string(), 0, "write failed");
}

void normalize_rows(Matrix& m, Norm scheme) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    const double norm = scheme == Norm::l1 ? m.row(i).lpNorm<1>() : m.row(i).norm();
    if (norm > 0.0) m.row(i) /= norm;
  }
}

Dataset normalize(const Dataset& data, Norm scheme, Space space) {
  Matrix x = data.x();
  std::optional<Matrix> x_star;
  if (data.has_privileged()) x_star = data.x_star();
  if (space == Space::original) {
    normalize_rows(x, scheme);
  } else {
    if (!x_star) throw InvalidArgument("cannot normalize missing privileged space");
    normalize_rows(*x_star, scheme);
  }
  return Dataset(std::move(x), std::move(x_star), data.y());
}

SplitResult split(const Dataset& data, std::size_t n_train_per_class, std::uint64_t seed) {
  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < data.size(); ++i) by_class[data.y()[i]].push_back(i);

  std::mt19937_64 rng(seed);
  std::vector<std::size_t> train, test;
  for (auto& [label, idx] : by_class) {
    if (idx.size() < n_train_per_class + 1)
      throw InvalidArgument("class " + std::to_string(label) + " has " +
                            std::to_string(idx.size()) + " samples; need at least " +
                            std::to_string(n_train_per_class + 1));
    std::shuffle(idx.begin(), idx.end(), rng);
    train.insert(train.end(), idx.begin(), idx.begin() + static_cast<long>(n_train_per_class));
    test.insert(test.end(), idx.begin() + static_cast<long>(n_train_per_class), idx.end());
  }
  std::sort(train.begin(), train.end());
  std::sort(test.begin(), test.end());
  return SplitResult{data.subset(train), data.subset(test), std::move(train), std::move(test)};
}

void SyntheticSpec::validate() const {
  if (n == 0 || n % 2 != 0) throw InvalidArgument("synthetic n must be even and positive");
  if (d < 1 || d_star < 1) throw InvalidArgument("synthetic dimensions must be at least 1");
  if (!(noise_orig >= 0.0) || !(noise_priv >= 0.0))
    throw InvalidArgument("synthetic noise levels must be non-negative");
  if (!(easiness_lo > 0.0) || !(easiness_hi >= easiness_lo))
    throw InvalidArgument("easiness range must satisfy 0 < lo <= hi");
}

Dataset make_synthetic_lupi(const SyntheticSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);

  Labels y(spec.n);
  std::fill(y.begin(), y.begin() + static_cast<long>(spec.n / 2), 1);
  std::fill(y.begin() + static_cast<long>(spec.n / 2), y.end(), -1);
  std::shuffle(y.begin(), y.end(), rng);

  std::uniform_real_distribution<double> easiness(spec.easiness_lo, spec.easiness_hi);
  std::normal_distribution<double> gauss(0.0, 1.0);

  const auto n = static_cast<Eigen::Index>(spec.n);
  Matrix x(n, spec.d);
  Matrix x_star(n, spec.d_star);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double e = spec.easiness_lo == spec.easiness_hi ? spec.easiness_lo : easiness(rng);
    const double signal = y[static_cast<std::size_t>(i)] * e;
    for (Eigen::Index j = 0; j < spec.d_star; ++j)
      x_star(i, j) = (j == 0 ? signal : 0.0) + spec.noise_priv * gauss(rng);
    for (Eigen::Index j = 0; j < spec.d; ++j)
      x(i, j) = (j == 0 ? signal : 0.0) + spec.noise_orig * gauss(rng);
  }
  return Dataset(std::move(x), std::move(x_star), std::move(y));
}

void HumanScores::validate() const {
  for (Eigen::Index i = 0; i < scores.size(); ++i) {
    if (!(scores[i] >= 1.0 && scores[i] <= 16.0))
      throw DataError("human score " + format_double(scores[i]) + " at index " +
                      std::to_string(i) + " outside [1, 16]");
  }
}

HumanScores read_human_scores(const std::filesystem::path& path) {
  const Matrix m = read_csv_matrix(path);
  if (m.cols() != 1) throw DataError(path.string(), 1, "score file must have exactly one column");
  HumanScores s{m.col(0)};
  s.validate();
  return s;
}

Vector score_to_margin(const HumanScores& scores, const Labels& y) {
  scores.validate();
  if (static_cast<std::size_t>(scores.scores.size()) != y.size())
    throw DimensionMismatch("score count " + std::to_string(scores.scores.size()) +
                            " does not match label count " + std::to_string(y.size()));
  return (2.0 / 15.0) * (scores.scores.array() - 1.0).matrix();
}

}  // namespace lupi
