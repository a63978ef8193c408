#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "simplex/error.hpp"

namespace simplex {

/// Feature matrix plus labels in 1..classes. label_names[k] is the original
/// token of label k+1. An unlabeled dataset has no labels and classes == 0.
struct Dataset {
  Eigen::MatrixXd features;
  std::vector<int> labels;
  int classes = 0;
  std::vector<std::string> label_names;

  Eigen::Index size() const noexcept { return features.rows(); }
  Eigen::Index dimension() const noexcept { return features.cols(); }
  bool labeled() const noexcept { return !labels.empty(); }

  void validate() const;
  Dataset subset(std::span<const Eigen::Index> rows) const;
};

enum class ParseFailure { unreadable, ragged_row, non_numeric, malformed_pair, missing_label };

/// Input-file failure; `line()` is 1-based, 0 when not tied to a line.
class ParseError : public Error {
 public:
  ParseError(ParseFailure failure, const std::string& source, size_t line, const std::string& detail);

  ParseFailure failure() const noexcept { return failure_; }
  size_t line() const noexcept { return line_; }

 private:
  ParseFailure failure_;
  size_t line_;
};

struct CsvOptions {
  /// Column holding the label; negative values count from the end (-1 is the
  /// last column). std::nullopt reads an unlabeled feature table.
  std::optional<int> label_column = -1;
  bool has_header = false;
};

/// Comma- or whitespace-delimited text. The delimiter is chosen per file: comma
/// if the first data line contains one. Blank lines and lines starting with
/// '#' are ignored. Label tokens map to 1..T in order of first appearance.
Dataset load_csv(const std::string& path, const CsvOptions& options = {});
Dataset parse_csv(std::istream& in, const CsvOptions& options, const std::string& source = "<stream>");

/// "label idx:val idx:val ..." lines. Indices are 0-based when the smallest
/// index in the file is 0 and 1-based otherwise; absent entries are zero. The
/// feature count is at least `min_features`.
Dataset load_sparse(const std::string& path, Eigen::Index min_features = 0);
Dataset parse_sparse(std::istream& in, Eigen::Index min_features = 0, const std::string& source = "<stream>");

/// Comma-separated, label token in the last column, round-trip exact.
void save_csv(const Dataset& data, const std::string& path);
/// Sparse format with 1-based indices; zero entries are omitted.
void save_sparse(const Dataset& data, const std::string& path);

/// Re-expresses labels against an existing token mapping (e.g. a model's).
/// Unknown tokens are a data error.
Dataset remap_labels(const Dataset& data, const std::vector<std::string>& label_names);

struct SplitSpec {
  double train_fraction = 0.8;
  std::uint64_t seed = 1;
  bool stratified = true;
};

struct SplitResult {
  Dataset train;
  Dataset validation;
  std::vector<Eigen::Index> train_rows;
  std::vector<Eigen::Index> validation_rows;
  /// Set when stratification was requested but some class has a single
  /// sample, so a plain shuffle split was used instead.
  bool stratification_fallback = false;
};

SplitResult split(const Dataset& data, const SplitSpec& spec);

/// Per-feature affine map fitted on training data: (x - mean) / scale, with
/// scale = 1 for zero-variance features. Not idempotent.
struct Standardizer {
  Eigen::VectorXd mean;
  Eigen::VectorXd scale;

  static Standardizer fit(const Eigen::Ref<const Eigen::MatrixXd>& features);
  Eigen::MatrixXd apply(const Eigen::Ref<const Eigen::MatrixXd>& features) const;
  Dataset apply(const Dataset& data) const;
};

}  // namespace simplex
