#pragma once

#include <functional>
#include <span>

#include <Eigen/Dense>

#include "simplex/coding.hpp"
#include "simplex/kernels.hpp"
#include "simplex/srls.hpp"

namespace simplex {

struct QpOptions {
  double tol = 1e-6;
  /// Sweep cap; a negative value means 10 n T.
  long max_sweeps = -1;
  /// Called after every sweep with the current dual objective.
  std::function<void(long sweep, double objective)> on_sweep;
};

/// Dual of the simplex-cone SVM.
///
///   max  -1/2 sum a_i^y K_ij G_yy' a_j^y' + 1/(T-1) sum a_i^y
///   s.t. 0 <= a_i^y <= C0 for y != y_i,  a_i^{y_i} = 0,  C0 = 1/(2 n lambda)
///
/// Representer coefficients are c_i = -sum_{y != y_i} a_i^y c_y.
struct ScSvmDual {
  Eigen::MatrixXd alpha;  // n x T
  double c0 = 0.0;
  double objective = 0.0;
  double kkt_violation = 0.0;
  bool converged = false;
  long sweeps = 0;
};

/// Dual of the simplex half-space SVM without the convex-hull constraint.
///
///   max  -1/2 sum a_i K_ij G_{y_i y_j} a_j + sum a_i,   0 <= a_i <= C0
///
/// Representer coefficients are c_i = a_i c_{y_i}.
struct ShSvmDual {
  Eigen::VectorXd alpha;  // n
  double c0 = 0.0;
  double objective = 0.0;
  double kkt_violation = 0.0;
  bool converged = false;
  long sweeps = 0;
};

inline double svm_box_bound(Eigen::Index n, double lambda) {
  return 1.0 / (2.0 * static_cast<double>(n) * lambda);
}

/// Cyclic coordinate ascent, i ascending then y ascending, with exact
/// per-coordinate maximization clipped to the box. Stops once the largest
/// KKT violation is <= tol or after max_sweeps sweeps (converged == false).
ScSvmDual solve_sc_svm_dual(const Eigen::Ref<const Eigen::MatrixXd>& kernel, std::span<const int> labels,
                            const CodeBook& codebook, double lambda, const QpOptions& options = {});
ShSvmDual solve_sh_svm_dual(const Eigen::Ref<const Eigen::MatrixXd>& kernel, std::span<const int> labels,
                            const CodeBook& codebook, double lambda, const QpOptions& options = {});

Eigen::MatrixXd sc_svm_coefficients(const ScSvmDual& dual, std::span<const int> labels,
                                    const CodeBook& codebook);
Eigen::MatrixXd sh_svm_coefficients(const ShSvmDual& dual, std::span<const int> labels,
                                    const CodeBook& codebook);

double dual_objective(const ScSvmDual& dual, const Eigen::Ref<const Eigen::MatrixXd>& kernel,
                      std::span<const int> labels, const CodeBook& codebook);
double dual_objective(const ShSvmDual& dual, const Eigen::Ref<const Eigen::MatrixXd>& kernel,
                      std::span<const int> labels, const CodeBook& codebook);

/// Largest KKT residual: |g| for interior coordinates, max(g, 0) at the lower
/// bound and max(-g, 0) at the upper bound, g being the objective gradient.
double kkt_report(const ScSvmDual& dual, const Eigen::Ref<const Eigen::MatrixXd>& kernel,
                  std::span<const int> labels, const CodeBook& codebook);
double kkt_report(const ShSvmDual& dual, const Eigen::Ref<const Eigen::MatrixXd>& kernel,
                  std::span<const int> labels, const CodeBook& codebook);

struct ScSvmFit {
  ScSvmDual dual;
  KernelModel model;
};

struct ShSvmFit {
  ShSvmDual dual;
  KernelModel model;
};

ScSvmFit fit_sc_svm(const GramMatrix& gram, const Eigen::Ref<const Eigen::MatrixXd>& inputs,
                    std::span<const int> labels, const CodeBook& codebook, double lambda,
                    const QpOptions& options = {});
ShSvmFit fit_sh_svm(const GramMatrix& gram, const Eigen::Ref<const Eigen::MatrixXd>& inputs,
                    std::span<const int> labels, const CodeBook& codebook, double lambda,
                    const QpOptions& options = {});

}  // namespace simplex
