#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "simplex/coding.hpp"
#include "simplex/kernels.hpp"

namespace simplex {

/// f(x) = sum_j k(x, x_j) a_j, where a_j is row j of `coefficients`.
struct KernelModel {
  Eigen::MatrixXd coefficients;  // n x (T-1)
  Eigen::MatrixXd train_inputs;  // n x p
  KernelSpec spec;
  CodeBook codebook;
  double lambda;
};

/// f(x) = W x.
struct LinearModel {
  Eigen::MatrixXd weights;  // (T-1) x p
  CodeBook codebook;
  double lambda;
};

Eigen::MatrixXd predict(const KernelModel& model, const Eigen::Ref<const Eigen::MatrixXd>& inputs);
Eigen::MatrixXd predict(const LinearModel& model, const Eigen::Ref<const Eigen::MatrixXd>& inputs);
std::vector<int> classify(const KernelModel& model, const Eigen::Ref<const Eigen::MatrixXd>& inputs);
std::vector<int> classify(const LinearModel& model, const Eigen::Ref<const Eigen::MatrixXd>& inputs);

/// Solves (K + lambda n I) A = Y_hat with a Cholesky factorization shared by
/// all T-1 right-hand sides.
Eigen::MatrixXd solve_srls_coefficients(const Eigen::Ref<const Eigen::MatrixXd>& kernel,
                                        std::span<const int> labels, const CodeBook& codebook,
                                        double lambda);

KernelModel fit_kernel(const GramMatrix& gram, const Eigen::Ref<const Eigen::MatrixXd>& inputs,
                       std::span<const int> labels, const CodeBook& codebook, double lambda);

/// Solves (X^T X + lambda n I) W^T = X^T Y_hat.
LinearModel fit_linear(const Eigen::Ref<const Eigen::MatrixXd>& inputs, std::span<const int> labels,
                       const CodeBook& codebook, double lambda);

struct LooResult {
  Eigen::MatrixXd predictions;  // n x (T-1), row i is the held-out prediction at x_i
  double error_rate;
};

/// Closed-form leave-one-out: Y_hat - C .* M with C = (K + lambda n I)^{-1} Y_hat
/// and M_ij = 1 / [(K + lambda n I)^{-1}]_ii.
///
/// Held-out models keep the absolute ridge lambda n of the full problem.
LooResult loo_errors(const Eigen::Ref<const Eigen::MatrixXd>& kernel, std::span<const int> labels,
                     const CodeBook& codebook, double lambda);

double misclassification_rate(std::span<const int> predicted, std::span<const int> truth);

inline constexpr size_t kPathSize = 100;

/// `count` log-spaced values from hi down to lo; lo is clamped to 1e-10 hi.
std::vector<double> lambda_grid(double lo, double hi, size_t count = kPathSize);

/// Grid whose endpoints are the extreme eigenvalues of a Gram spectrum.
std::vector<double> lambda_grid_from_spectrum(const Eigen::Ref<const Eigen::VectorXd>& eigenvalues,
                                              size_t count = kPathSize);

/// Regularization path of S-RLS from a single eigendecomposition K = Q L Q^T.
class RegPath {
 public:
  RegPath(const Eigen::Ref<const Eigen::MatrixXd>& kernel, std::span<const int> labels,
          const CodeBook& codebook, size_t count = kPathSize);
  /// Same decomposition, caller-supplied grid.
  RegPath(const Eigen::Ref<const Eigen::MatrixXd>& kernel, std::span<const int> labels,
          const CodeBook& codebook, std::vector<double> lambdas);

  const std::vector<double>& lambdas() const noexcept { return lambdas_; }
  const std::vector<double>& loo_rates() const noexcept { return loo_rates_; }
  const Eigen::VectorXd& eigenvalues() const noexcept { return eigenvalues_; }

  /// A(lambda) = Q (L + n lambda I)^{-1} Q^T Y_hat, for any lambda > 0.
  Eigen::MatrixXd coefficients(double lambda) const;
  LooResult loo(double lambda) const;

 private:
  void decompose(const Eigen::Ref<const Eigen::MatrixXd>& kernel);
  void evaluate();

  CodeBook codebook_;
  std::vector<int> labels_;
  Eigen::MatrixXd label_matrix_;
  Eigen::MatrixXd eigenvectors_;
  Eigen::VectorXd eigenvalues_;
  Eigen::MatrixXd projected_labels_;  // Q^T Y_hat
  Eigen::MatrixXd squared_vectors_;   // Q .* Q, for diag((K + n lambda I)^{-1})
  std::vector<double> lambdas_;
  std::vector<double> loo_rates_;
};

struct LambdaChoice {
  double lambda;
  double rate;
  size_t index;
};

/// Minimum rate; ties go to the larger lambda.
LambdaChoice select_lambda(std::span<const double> lambdas, std::span<const double> rates);
LambdaChoice select_lambda_loo(const RegPath& path);

}  // namespace simplex
