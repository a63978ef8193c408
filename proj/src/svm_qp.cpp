#include "simplex/svm_qp.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "simplex/error.hpp"

namespace simplex {

namespace {

// Both duals share one shape: each variable a_v is tied to a training point
// point(v), a direction u_v in R^(T-1) and a linear weight b_v, with
//   C_i = sum_{v : point(v) = i} a_v u_v,   objective = -1/2 tr(C^T K C) + sum b_v a_v.
// The gradient w.r.t. a_v is b_v - <u_v, (K C)_i> and the curvature is K_ii |u_v|^2.
struct BoxQp {
  std::vector<Eigen::Index> point;
  Eigen::MatrixXd directions;  // one row per variable
  Eigen::VectorXd linear;
  double c0;
};

constexpr double kFlatCurvature = 1e-14;

BoxQp sc_problem(std::span<const int> labels, const CodeBook& codebook, double c0) {
  const int classes = codebook.classes();
  BoxQp qp;
  qp.c0 = c0;
  const auto count = static_cast<Eigen::Index>(labels.size()) * (classes - 1);
  qp.directions.resize(count, codebook.dim());
  qp.linear = Eigen::VectorXd::Constant(count, 1.0 / (classes - 1));
  Eigen::Index v = 0;
  for (size_t i = 0; i < labels.size(); ++i) {
    for (int y = 1; y <= classes; ++y) {
      if (y == labels[i]) continue;
      qp.point.push_back(static_cast<Eigen::Index>(i));
      qp.directions.row(v++) = -codebook.codes().row(y - 1);
    }
  }
  return qp;
}

BoxQp sh_problem(std::span<const int> labels, const CodeBook& codebook, double c0) {
  BoxQp qp;
  qp.c0 = c0;
  const auto n = static_cast<Eigen::Index>(labels.size());
  qp.directions.resize(n, codebook.dim());
  qp.linear = Eigen::VectorXd::Ones(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    qp.point.push_back(i);
    qp.directions.row(i) = codebook.codes().row(labels[static_cast<size_t>(i)] - 1);
  }
  return qp;
}

Eigen::MatrixXd assemble(const BoxQp& qp, const Eigen::VectorXd& alpha, Eigen::Index n) {
  Eigen::MatrixXd coeffs = Eigen::MatrixXd::Zero(n, qp.directions.cols());
  for (Eigen::Index v = 0; v < alpha.size(); ++v) {
    if (alpha(v) != 0.0) coeffs.row(qp.point[static_cast<size_t>(v)]) += alpha(v) * qp.directions.row(v);
  }
  return coeffs;
}

double objective_of(const BoxQp& qp, const Eigen::VectorXd& alpha, const Eigen::MatrixXd& coeffs,
                    const Eigen::MatrixXd& fitted) {
  return -0.5 * coeffs.cwiseProduct(fitted).sum() + qp.linear.dot(alpha);
}

double gradient_at(const BoxQp& qp, const Eigen::MatrixXd& fitted, Eigen::Index v) {
  return qp.linear(v) - qp.directions.row(v).dot(fitted.row(qp.point[static_cast<size_t>(v)]));
}

double max_violation(const BoxQp& qp, const Eigen::VectorXd& alpha, const Eigen::MatrixXd& fitted) {
  double worst = 0.0;
  for (Eigen::Index v = 0; v < alpha.size(); ++v) {
    const double g = gradient_at(qp, fitted, v);
    double r;
    if (alpha(v) <= 0.0) {
      r = std::max(g, 0.0);
    } else if (alpha(v) >= qp.c0) {
      r = std::max(-g, 0.0);
    } else {
      r = std::abs(g);
    }
    worst = std::max(worst, r);
  }
  return worst;
}

struct BoxQpResult {
  Eigen::VectorXd alpha;
  double objective;
  double violation;
  bool converged;
  long sweeps;
};

BoxQpResult coordinate_ascent(const BoxQp& qp, const Eigen::Ref<const Eigen::MatrixXd>& kernel,
                              long max_sweeps, const QpOptions& options) {
  const double tol = options.tol;
  const Eigen::Index n = kernel.rows();
  const Eigen::Index count = qp.linear.size();
  Eigen::VectorXd alpha = Eigen::VectorXd::Zero(count);
  Eigen::MatrixXd coeffs = Eigen::MatrixXd::Zero(n, qp.directions.cols());
  Eigen::MatrixXd fitted = Eigen::MatrixXd::Zero(n, qp.directions.cols());  // K C

  BoxQpResult out{alpha, 0.0, max_violation(qp, alpha, fitted), false, 0};
  if (out.violation <= tol) {
    out.converged = true;
    return out;
  }
  for (long sweep = 1; sweep <= max_sweeps; ++sweep) {
    for (Eigen::Index v = 0; v < count; ++v) {
      const Eigen::Index i = qp.point[static_cast<size_t>(v)];
      const double g = gradient_at(qp, fitted, v);
      const double curvature = kernel(i, i) * qp.directions.row(v).squaredNorm();
      const double old = alpha(v);
      double updated;
      if (curvature > kFlatCurvature) {
        updated = std::clamp(old + g / curvature, 0.0, qp.c0);
      } else {
        updated = g > 0.0 ? qp.c0 : (g < 0.0 ? 0.0 : old);
      }
      const double delta = updated - old;
      if (delta == 0.0) continue;
      alpha(v) = updated;
      coeffs.row(i) += delta * qp.directions.row(v);
      fitted.noalias() += (delta * kernel.col(i)) * qp.directions.row(v);
    }
    // Incremental updates drift; refresh once in a while.
    if (sweep % 64 == 0) fitted.noalias() = kernel * coeffs;
    out.sweeps = sweep;
    if (options.on_sweep) options.on_sweep(sweep, objective_of(qp, alpha, coeffs, fitted));
    out.violation = max_violation(qp, alpha, fitted);
    if (out.violation <= tol) {
      out.converged = true;
      break;
    }
  }
  fitted.noalias() = kernel * coeffs;
  out.alpha = std::move(alpha);
  out.objective = objective_of(qp, out.alpha, coeffs, fitted);
  out.violation = max_violation(qp, out.alpha, fitted);
  return out;
}

void check_qp_inputs(const Eigen::Ref<const Eigen::MatrixXd>& kernel, std::span<const int> labels,
                     const CodeBook& codebook, double lambda, const QpOptions& options) {
  require(kernel.rows() == kernel.cols(), ErrorCode::dimension_mismatch, "kernel matrix is not square");
  require(kernel.rows() >= 1, ErrorCode::invalid_argument, "empty training set");
  require(static_cast<Eigen::Index>(labels.size()) == kernel.rows(), ErrorCode::dimension_mismatch,
          "label count does not match the kernel matrix");
  require(kernel.allFinite(), ErrorCode::numerical, "kernel matrix has non-finite entries");
  require(std::isfinite(lambda) && lambda > 0.0, ErrorCode::invalid_argument, "lambda must be positive");
  require(options.tol > 0.0, ErrorCode::invalid_argument, "tolerance must be positive");
  for (const int y : labels) codebook.check_label(y);
}

long sweep_cap(const QpOptions& options, Eigen::Index n, int classes) {
  if (options.max_sweeps >= 0) return options.max_sweeps;
  return 10L * static_cast<long>(n) * classes;
}

Eigen::VectorXd flatten_sc(const ScSvmDual& dual, std::span<const int> labels, int classes) {
  Eigen::VectorXd flat(static_cast<Eigen::Index>(labels.size()) * (classes - 1));
  Eigen::Index v = 0;
  for (size_t i = 0; i < labels.size(); ++i) {
    for (int y = 1; y <= classes; ++y) {
      if (y != labels[i]) flat(v++) = dual.alpha(static_cast<Eigen::Index>(i), y - 1);
    }
  }
  return flat;
}

void check_sc_shape(const ScSvmDual& dual, std::span<const int> labels, const CodeBook& codebook) {
  require(dual.alpha.rows() == static_cast<Eigen::Index>(labels.size()) &&
              dual.alpha.cols() == codebook.classes(),
          ErrorCode::dimension_mismatch, "SC-SVM dual has the wrong shape");
}

void check_sh_shape(const ShSvmDual& dual, std::span<const int> labels) {
  require(dual.alpha.size() == static_cast<Eigen::Index>(labels.size()), ErrorCode::dimension_mismatch,
          "SH-SVM dual has the wrong size");
}

}  // namespace

ScSvmDual solve_sc_svm_dual(const Eigen::Ref<const Eigen::MatrixXd>& kernel, std::span<const int> labels,
                            const CodeBook& codebook, double lambda, const QpOptions& options) {
  check_qp_inputs(kernel, labels, codebook, lambda, options);
  const Eigen::Index n = kernel.rows();
  const BoxQp qp = sc_problem(labels, codebook, svm_box_bound(n, lambda));
  const auto result =
      coordinate_ascent(qp, kernel, sweep_cap(options, n, codebook.classes()), options);

  ScSvmDual dual;
  dual.alpha = Eigen::MatrixXd::Zero(n, codebook.classes());
  Eigen::Index v = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (int y = 1; y <= codebook.classes(); ++y) {
      if (y != labels[static_cast<size_t>(i)]) dual.alpha(i, y - 1) = result.alpha(v++);
    }
  }
  dual.c0 = qp.c0;
  dual.objective = result.objective;
  dual.kkt_violation = result.violation;
  dual.converged = result.converged;
  dual.sweeps = result.sweeps;
  return dual;
}

ShSvmDual solve_sh_svm_dual(const Eigen::Ref<const Eigen::MatrixXd>& kernel, std::span<const int> labels,
                            const CodeBook& codebook, double lambda, const QpOptions& options) {
  check_qp_inputs(kernel, labels, codebook, lambda, options);
  const Eigen::Index n = kernel.rows();
  const BoxQp qp = sh_problem(labels, codebook, svm_box_bound(n, lambda));
  const auto result =
      coordinate_ascent(qp, kernel, sweep_cap(options, n, codebook.classes()), options);
  ShSvmDual dual;
  dual.alpha = result.alpha;
  dual.c0 = qp.c0;
  dual.objective = result.objective;
  dual.kkt_violation = result.violation;
  dual.converged = result.converged;
  dual.sweeps = result.sweeps;
  return dual;
}

Eigen::MatrixXd sc_svm_coefficients(const ScSvmDual& dual, std::span<const int> labels,
                                    const CodeBook& codebook) {
  check_sc_shape(dual, labels, codebook);
  const BoxQp qp = sc_problem(labels, codebook, dual.c0);
  return assemble(qp, flatten_sc(dual, labels, codebook.classes()), dual.alpha.rows());
}

Eigen::MatrixXd sh_svm_coefficients(const ShSvmDual& dual, std::span<const int> labels,
                                    const CodeBook& codebook) {
  check_sh_shape(dual, labels);
  const BoxQp qp = sh_problem(labels, codebook, dual.c0);
  return assemble(qp, dual.alpha, dual.alpha.size());
}

double dual_objective(const ScSvmDual& dual, const Eigen::Ref<const Eigen::MatrixXd>& kernel,
                      std::span<const int> labels, const CodeBook& codebook) {
  check_sc_shape(dual, labels, codebook);
  const BoxQp qp = sc_problem(labels, codebook, dual.c0);
  const Eigen::VectorXd alpha = flatten_sc(dual, labels, codebook.classes());
  const Eigen::MatrixXd coeffs = assemble(qp, alpha, kernel.rows());
  return objective_of(qp, alpha, coeffs, kernel * coeffs);
}

double dual_objective(const ShSvmDual& dual, const Eigen::Ref<const Eigen::MatrixXd>& kernel,
                      std::span<const int> labels, const CodeBook& codebook) {
  check_sh_shape(dual, labels);
  const BoxQp qp = sh_problem(labels, codebook, dual.c0);
  const Eigen::MatrixXd coeffs = assemble(qp, dual.alpha, kernel.rows());
  return objective_of(qp, dual.alpha, coeffs, kernel * coeffs);
}

double kkt_report(const ScSvmDual& dual, const Eigen::Ref<const Eigen::MatrixXd>& kernel,
                  std::span<const int> labels, const CodeBook& codebook) {
  check_sc_shape(dual, labels, codebook);
  const BoxQp qp = sc_problem(labels, codebook, dual.c0);
  const Eigen::VectorXd alpha = flatten_sc(dual, labels, codebook.classes());
  const Eigen::MatrixXd coeffs = assemble(qp, alpha, kernel.rows());
  return max_violation(qp, alpha, kernel * coeffs);
}

double kkt_report(const ShSvmDual& dual, const Eigen::Ref<const Eigen::MatrixXd>& kernel,
                  std::span<const int> labels, const CodeBook& codebook) {
  check_sh_shape(dual, labels);
  const BoxQp qp = sh_problem(labels, codebook, dual.c0);
  const Eigen::MatrixXd coeffs = assemble(qp, dual.alpha, kernel.rows());
  return max_violation(qp, dual.alpha, kernel * coeffs);
}

ScSvmFit fit_sc_svm(const GramMatrix& gram, const Eigen::Ref<const Eigen::MatrixXd>& inputs,
                    std::span<const int> labels, const CodeBook& codebook, double lambda,
                    const QpOptions& options) {
  require(inputs.rows() == gram.size(), ErrorCode::dimension_mismatch,
          "gram matrix and inputs disagree on the number of points");
  ScSvmDual dual = solve_sc_svm_dual(gram.values, labels, codebook, lambda, options);
  Eigen::MatrixXd coeffs = sc_svm_coefficients(dual, labels, codebook);
  return {std::move(dual), KernelModel{std::move(coeffs), inputs, gram.spec, codebook, lambda}};
}

ShSvmFit fit_sh_svm(const GramMatrix& gram, const Eigen::Ref<const Eigen::MatrixXd>& inputs,
                    std::span<const int> labels, const CodeBook& codebook, double lambda,
                    const QpOptions& options) {
  require(inputs.rows() == gram.size(), ErrorCode::dimension_mismatch,
          "gram matrix and inputs disagree on the number of points");
  ShSvmDual dual = solve_sh_svm_dual(gram.values, labels, codebook, lambda, options);
  Eigen::MatrixXd coeffs = sh_svm_coefficients(dual, labels, codebook);
  return {std::move(dual), KernelModel{std::move(coeffs), inputs, gram.spec, codebook, lambda}};
}

}  // namespace simplex
