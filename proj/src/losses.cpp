#include "simplex/losses.hpp"

#include <algorithm>
#include <string>

#include "simplex/error.hpp"

namespace simplex {

std::string_view to_string(LossKind kind) noexcept {
  switch (kind) {
    case LossKind::s_ls: return "s-ls";
    case LossKind::sc_svm: return "sc-svm";
    case LossKind::sh_svm: return "sh-svm";
  }
  return "?";
}

LossKind parse_loss(std::string_view name) {
  if (name == "s-ls") return LossKind::s_ls;
  if (name == "sc-svm") return LossKind::sc_svm;
  if (name == "sh-svm") return LossKind::sh_svm;
  fail(ErrorCode::config, "unknown loss '" + std::string(name) + "'");
}

namespace {

void check_value_dim(const CodeBook& codebook, Eigen::Index size) {
  require(size == codebook.dim(), ErrorCode::dimension_mismatch,
          "loss argument must have size " + std::to_string(codebook.dim()) + ", got " +
              std::to_string(size));
}

}  // namespace

double loss_value(LossKind kind, const CodeBook& codebook, int label,
                  const Eigen::Ref<const Eigen::VectorXd>& v) {
  codebook.check_label(label);
  check_value_dim(codebook, v.size());
  const auto& codes = codebook.codes();
  const auto cy = codes.row(label - 1);
  switch (kind) {
    case LossKind::s_ls:
      return (cy.transpose() - v).squaredNorm();
    case LossKind::sc_svm: {
      const double margin = 1.0 / (codebook.classes() - 1);
      double total = 0.0;
      for (int k = 0; k < codebook.classes(); ++k) {
        if (k == label - 1) continue;
        total += std::max(margin + codes.row(k).dot(v), 0.0);
      }
      return total;
    }
    case LossKind::sh_svm:
      return std::max(1.0 - cy.dot(v), 0.0);
  }
  return 0.0;
}

Eigen::VectorXd loss_gradient(LossKind kind, const CodeBook& codebook, int label,
                              const Eigen::Ref<const Eigen::VectorXd>& v) {
  codebook.check_label(label);
  check_value_dim(codebook, v.size());
  const auto& codes = codebook.codes();
  const Eigen::VectorXd cy = codes.row(label - 1).transpose();
  switch (kind) {
    case LossKind::s_ls:
      return -2.0 * (cy - v);
    case LossKind::sc_svm: {
      const double threshold = codebook.off_diagonal();
      Eigen::VectorXd g = Eigen::VectorXd::Zero(codebook.dim());
      for (int k = 0; k < codebook.classes(); ++k) {
        if (k == label - 1) continue;
        if (codes.row(k).dot(v) > threshold) g += codes.row(k).transpose();
      }
      return g;
    }
    case LossKind::sh_svm:
      if (cy.dot(v) < 1.0) return -cy;
      return Eigen::VectorXd::Zero(codebook.dim());
  }
  return Eigen::VectorXd::Zero(codebook.dim());
}

Eigen::MatrixXd subgradient_linear(LossKind kind, const CodeBook& codebook, int label,
                                   const Eigen::Ref<const Eigen::MatrixXd>& weights,
                                   const Eigen::Ref<const Eigen::VectorXd>& x) {
  require(weights.rows() == codebook.dim() && weights.cols() == x.size(),
          ErrorCode::dimension_mismatch,
          "weights must be " + std::to_string(codebook.dim()) + " x " + std::to_string(x.size()));
  const Eigen::VectorXd v = weights * x;
  return loss_gradient(kind, codebook, label, v) * x.transpose();
}

}  // namespace simplex
