#pragma once

#include <string_view>

#include <Eigen/Dense>

#include "simplex/coding.hpp"

namespace simplex {

enum class LossKind {
  s_ls,    // |c_y - v|^2
  sc_svm,  // sum_{y' != y} max(1/(T-1) + <c_y', v>, 0)
  sh_svm,  // max(1 - <c_y, v>, 0)
};

std::string_view to_string(LossKind kind) noexcept;
LossKind parse_loss(std::string_view name);

double loss_value(LossKind kind, const CodeBook& codebook, int label,
                  const Eigen::Ref<const Eigen::VectorXd>& v);

/// Subgradient of W -> V(y, W x) at W, a (T-1) x p matrix.
///
/// This is the true (sub)gradient; an optimizer subtracts it. Hinge terms
/// are active on strict inequality, so a point exactly on a kink contributes
/// the zero extension.
Eigen::MatrixXd subgradient_linear(LossKind kind, const CodeBook& codebook, int label,
                                   const Eigen::Ref<const Eigen::MatrixXd>& weights,
                                   const Eigen::Ref<const Eigen::VectorXd>& x);

/// Subgradient of v -> V(y, v), the building block of subgradient_linear.
Eigen::VectorXd loss_gradient(LossKind kind, const CodeBook& codebook, int label,
                              const Eigen::Ref<const Eigen::VectorXd>& v);

}  // namespace simplex
