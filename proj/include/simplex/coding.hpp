#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

namespace simplex {

// Labels are 1-based throughout the library: a T-class problem uses 1..T.

/// The T vertices of a regular simplex centred at the origin of R^(T-1).
///
/// Row y-1 of codes() is the code vector c_y. The vectors have unit norm,
/// pairwise inner product -1/(T-1), and sum to zero. Immutable after
/// construction.
class CodeBook {
 public:
  explicit CodeBook(int classes);

  int classes() const noexcept { return classes_; }
  int dim() const noexcept { return classes_ - 1; }

  /// Inner product between two distinct code vectors, -1/(T-1).
  double off_diagonal() const noexcept { return -1.0 / (classes_ - 1); }

  const Eigen::MatrixXd& codes() const noexcept { return codes_; }
  const Eigen::MatrixXd& gram() const noexcept { return gram_; }

  Eigen::VectorXd code(int label) const;

  /// argmax_y <v, c_y>; ties go to the smallest label.
  int decode(const Eigen::Ref<const Eigen::VectorXd>& v) const;

  /// Row-wise decode of an m x (T-1) matrix.
  std::vector<int> decode_batch(const Eigen::Ref<const Eigen::MatrixXd>& values) const;

  /// Label matrix whose i-th row is c_{labels[i]}.
  Eigen::MatrixXd encode(std::span<const int> labels) const;

  void check_label(int label) const;

 private:
  int classes_;
  Eigen::MatrixXd codes_;
  Eigen::MatrixXd gram_;
};

}  // namespace simplex
