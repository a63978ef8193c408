#include "simplex/coding.hpp"

#include <cmath>
#include <string>

#include "simplex/error.hpp"

namespace simplex {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid argument";
    case ErrorCode::invalid_data: return "invalid data";
    case ErrorCode::dimension_mismatch: return "dimension mismatch";
    case ErrorCode::degenerate_data: return "degenerate data";
    case ErrorCode::numerical: return "numerical failure";
    case ErrorCode::io: return "i/o error";
    case ErrorCode::parse: return "parse error";
    case ErrorCode::config: return "invalid configuration";
  }
  return "unknown error";
}

namespace {

// Simplex recursion: c_1 = e_1 and, for j >= 2,
//   c_j = (-1/(T-1), sqrt(1 - 1/(T-1)^2) * d_{j-1})
// where d_1..d_{T-1} are the codes of the (T-1)-class simplex in R^(T-2).
void fill_codes(Eigen::Ref<Eigen::MatrixXd> out, int classes) {
  if (classes == 2) {
    out(0, 0) = 1.0;
    out(1, 0) = -1.0;
    return;
  }
  const double a = static_cast<double>(classes - 1);
  const double head = -1.0 / a;
  const double tail = std::sqrt((a * a - 1.0)) / a;
  out.setZero();
  out(0, 0) = 1.0;
  fill_codes(out.block(1, 1, classes - 1, classes - 2), classes - 1);
  out.block(1, 0, classes - 1, 1).setConstant(head);
  out.block(1, 1, classes - 1, classes - 2) *= tail;
}

}  // namespace

CodeBook::CodeBook(int classes) : classes_(classes) {
  require(classes >= 2, ErrorCode::invalid_argument,
          "code book needs at least 2 classes, got " + std::to_string(classes));
  codes_.resize(classes, classes - 1);
  fill_codes(codes_, classes);
  gram_ = codes_ * codes_.transpose();
}

void CodeBook::check_label(int label) const {
  require(label >= 1 && label <= classes_, ErrorCode::invalid_argument,
          "label " + std::to_string(label) + " outside 1.." + std::to_string(classes_));
}

Eigen::VectorXd CodeBook::code(int label) const {
  check_label(label);
  return codes_.row(label - 1).transpose();
}

int CodeBook::decode(const Eigen::Ref<const Eigen::VectorXd>& v) const {
  require(v.size() == dim(), ErrorCode::dimension_mismatch,
          "decode expects a vector of size " + std::to_string(dim()) + ", got " +
              std::to_string(v.size()));
  int best = 0;
  double best_score = codes_.row(0).dot(v);
  for (int y = 1; y < classes_; ++y) {
    const double score = codes_.row(y).dot(v);
    if (score > best_score) {
      best_score = score;
      best = y;
    }
  }
  return best + 1;
}

std::vector<int> CodeBook::decode_batch(const Eigen::Ref<const Eigen::MatrixXd>& values) const {
  require(values.rows() == 0 || values.cols() == dim(), ErrorCode::dimension_mismatch,
          "decode_batch expects " + std::to_string(dim()) + " columns, got " +
              std::to_string(values.cols()));
  std::vector<int> labels(static_cast<size_t>(values.rows()));
  for (Eigen::Index i = 0; i < values.rows(); ++i) {
    labels[static_cast<size_t>(i)] = decode(values.row(i).transpose());
  }
  return labels;
}

Eigen::MatrixXd CodeBook::encode(std::span<const int> labels) const {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(labels.size()), dim());
  for (size_t i = 0; i < labels.size(); ++i) {
    check_label(labels[i]);
    out.row(static_cast<Eigen::Index>(i)) = codes_.row(labels[i] - 1);
  }
  return out;
}

}  // namespace simplex
