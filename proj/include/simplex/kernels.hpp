#pragma once

#include <cstdint>
#include <string>

#include <Eigen/Dense>

namespace simplex {

enum class KernelKind { linear, rbf };

struct KernelSpec {
  KernelKind kind = KernelKind::linear;
  double sigma = 1.0;  // rbf bandwidth; unused for linear

  static KernelSpec linear() { return {KernelKind::linear, 1.0}; }
  static KernelSpec rbf(double sigma) { return {KernelKind::rbf, sigma}; }

  void validate() const;
  std::string describe() const;
};

struct GramMatrix {
  Eigen::MatrixXd values;
  KernelSpec spec;

  Eigen::Index size() const noexcept { return values.rows(); }
};

// Rows of every feature matrix are observations.

/// k(x, z): <x, z> for linear, exp(-|x - z|^2 / (2 sigma^2)) for rbf.
double kernel_value(const KernelSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& x,
                    const Eigen::Ref<const Eigen::VectorXd>& z);

GramMatrix gram(const KernelSpec& spec, const Eigen::Ref<const Eigen::MatrixXd>& features);

/// m x n matrix with entry (i, j) = k(test_i, train_j).
Eigen::MatrixXd cross_gram(const KernelSpec& spec, const Eigen::Ref<const Eigen::MatrixXd>& train,
                           const Eigen::Ref<const Eigen::MatrixXd>& test);

inline constexpr Eigen::Index kSigmaHeuristicMaxPoints = 5000;

/// 25th percentile of the distances between distinct pairs of rows.
///
/// The percentile is the element at 0-based index ceil(0.25 m) - 1 of the
/// sorted distances. Above kSigmaHeuristicMaxPoints rows, a uniform
/// subsample of that size (drawn with `seed`) is used instead.
double rbf_sigma_heuristic(const Eigen::Ref<const Eigen::MatrixXd>& features,
                           std::uint64_t seed = 0x5eed);

void check_finite(const Eigen::Ref<const Eigen::MatrixXd>& m, const char* what);

}  // namespace simplex
