#include "simplex/srls.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "simplex/error.hpp"

namespace simplex {

namespace {

void check_problem(Eigen::Index n, std::span<const int> labels, double lambda) {
  require(n >= 1, ErrorCode::invalid_argument, "empty training set");
  require(static_cast<Eigen::Index>(labels.size()) == n, ErrorCode::dimension_mismatch,
          "label count " + std::to_string(labels.size()) + " does not match " + std::to_string(n) +
              " training points");
  require(std::isfinite(lambda) && lambda > 0.0, ErrorCode::invalid_argument,
          "lambda must be positive");
}

void check_square(const Eigen::Ref<const Eigen::MatrixXd>& kernel) {
  require(kernel.rows() == kernel.cols(), ErrorCode::dimension_mismatch, "kernel matrix is not square");
  require(kernel.allFinite(), ErrorCode::numerical, "kernel matrix has non-finite entries");
}

Eigen::LLT<Eigen::MatrixXd> factor_regularized(const Eigen::Ref<const Eigen::MatrixXd>& kernel,
                                               double ridge) {
  Eigen::MatrixXd system = kernel;
  system.diagonal().array() += ridge;
  Eigen::LLT<Eigen::MatrixXd> llt(system);
  require(llt.info() == Eigen::Success, ErrorCode::numerical,
          "regularized system is not positive definite");
  return llt;
}

}  // namespace

Eigen::MatrixXd predict(const KernelModel& model, const Eigen::Ref<const Eigen::MatrixXd>& inputs) {
  return cross_gram(model.spec, model.train_inputs, inputs) * model.coefficients;
}

Eigen::MatrixXd predict(const LinearModel& model, const Eigen::Ref<const Eigen::MatrixXd>& inputs) {
  require(inputs.cols() == model.weights.cols(), ErrorCode::dimension_mismatch,
          "model expects " + std::to_string(model.weights.cols()) + " features, got " +
              std::to_string(inputs.cols()));
  check_finite(inputs, "input matrix");
  return inputs * model.weights.transpose();
}

std::vector<int> classify(const KernelModel& model, const Eigen::Ref<const Eigen::MatrixXd>& inputs) {
  return model.codebook.decode_batch(predict(model, inputs));
}

std::vector<int> classify(const LinearModel& model, const Eigen::Ref<const Eigen::MatrixXd>& inputs) {
  return model.codebook.decode_batch(predict(model, inputs));
}

Eigen::MatrixXd solve_srls_coefficients(const Eigen::Ref<const Eigen::MatrixXd>& kernel,
                                        std::span<const int> labels, const CodeBook& codebook,
                                        double lambda) {
  check_square(kernel);
  const Eigen::Index n = kernel.rows();
  check_problem(n, labels, lambda);
  const Eigen::MatrixXd targets = codebook.encode(labels);
  const auto llt = factor_regularized(kernel, lambda * static_cast<double>(n));
  Eigen::MatrixXd coefficients = llt.solve(targets);
  require(coefficients.allFinite(), ErrorCode::numerical, "S-RLS solve produced non-finite values");
  return coefficients;
}

KernelModel fit_kernel(const GramMatrix& gram, const Eigen::Ref<const Eigen::MatrixXd>& inputs,
                       std::span<const int> labels, const CodeBook& codebook, double lambda) {
  require(inputs.rows() == gram.size(), ErrorCode::dimension_mismatch,
          "gram matrix and inputs disagree on the number of points");
  return KernelModel{solve_srls_coefficients(gram.values, labels, codebook, lambda), inputs,
                     gram.spec, codebook, lambda};
}

LinearModel fit_linear(const Eigen::Ref<const Eigen::MatrixXd>& inputs, std::span<const int> labels,
                       const CodeBook& codebook, double lambda) {
  const Eigen::Index n = inputs.rows();
  check_problem(n, labels, lambda);
  check_finite(inputs, "feature matrix");
  const Eigen::MatrixXd targets = codebook.encode(labels);
  Eigen::MatrixXd normal = inputs.transpose() * inputs;
  const auto llt = factor_regularized(normal, lambda * static_cast<double>(n));
  Eigen::MatrixXd weights_t = llt.solve(inputs.transpose() * targets);
  require(weights_t.allFinite(), ErrorCode::numerical, "linear S-RLS solve produced non-finite values");
  return LinearModel{weights_t.transpose(), codebook, lambda};
}

double misclassification_rate(std::span<const int> predicted, std::span<const int> truth) {
  require(predicted.size() == truth.size(), ErrorCode::dimension_mismatch, "label vectors differ in size");
  if (truth.empty()) return 0.0;
  size_t wrong = 0;
  for (size_t i = 0; i < truth.size(); ++i) wrong += predicted[i] != truth[i] ? 1 : 0;
  return static_cast<double>(wrong) / static_cast<double>(truth.size());
}

LooResult loo_errors(const Eigen::Ref<const Eigen::MatrixXd>& kernel, std::span<const int> labels,
                     const CodeBook& codebook, double lambda) {
  check_square(kernel);
  const Eigen::Index n = kernel.rows();
  check_problem(n, labels, lambda);
  const Eigen::MatrixXd targets = codebook.encode(labels);
  const auto llt = factor_regularized(kernel, lambda * static_cast<double>(n));
  const Eigen::MatrixXd inverse = llt.solve(Eigen::MatrixXd::Identity(n, n));
  const Eigen::MatrixXd weighted = inverse * targets;

  LooResult out{targets, 0.0};
  for (Eigen::Index i = 0; i < n; ++i) {
    const double d = inverse(i, i);
    require(d != 0.0 && std::isfinite(d), ErrorCode::degenerate_data,
            "leave-one-out: zero diagonal in the regularized inverse");
    out.predictions.row(i) -= weighted.row(i) / d;
  }
  out.error_rate = misclassification_rate(codebook.decode_batch(out.predictions), labels);
  return out;
}

std::vector<double> lambda_grid(double lo, double hi, size_t count) {
  require(count >= 1, ErrorCode::invalid_argument, "lambda grid needs at least one value");
  require(std::isfinite(hi) && hi > 0.0, ErrorCode::degenerate_data,
          "lambda grid: largest eigenvalue must be positive");
  lo = std::max(lo, 1e-10 * hi);
  std::vector<double> grid(count);
  if (count == 1) {
    grid[0] = hi;
    return grid;
  }
  const double log_hi = std::log(hi);
  const double step = (std::log(lo) - log_hi) / static_cast<double>(count - 1);
  for (size_t k = 0; k < count; ++k) grid[k] = std::exp(log_hi + step * static_cast<double>(k));
  grid.front() = hi;
  grid.back() = lo;
  return grid;
}

std::vector<double> lambda_grid_from_spectrum(const Eigen::Ref<const Eigen::VectorXd>& eigenvalues,
                                              size_t count) {
  require(eigenvalues.size() > 0, ErrorCode::invalid_argument, "empty spectrum");
  return lambda_grid(eigenvalues.minCoeff(), eigenvalues.maxCoeff(), count);
}

RegPath::RegPath(const Eigen::Ref<const Eigen::MatrixXd>& kernel, std::span<const int> labels,
                 const CodeBook& codebook, size_t count)
    : codebook_(codebook), labels_(labels.begin(), labels.end()) {
  decompose(kernel);
  lambdas_ = lambda_grid_from_spectrum(eigenvalues_, count);
  evaluate();
}

RegPath::RegPath(const Eigen::Ref<const Eigen::MatrixXd>& kernel, std::span<const int> labels,
                 const CodeBook& codebook, std::vector<double> lambdas)
    : codebook_(codebook), labels_(labels.begin(), labels.end()), lambdas_(std::move(lambdas)) {
  require(!lambdas_.empty(), ErrorCode::invalid_argument, "empty lambda grid");
  decompose(kernel);
  evaluate();
}

void RegPath::decompose(const Eigen::Ref<const Eigen::MatrixXd>& kernel) {
  check_square(kernel);
  check_problem(kernel.rows(), labels_, 1.0);
  label_matrix_ = codebook_.encode(labels_);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(kernel);
  require(solver.info() == Eigen::Success, ErrorCode::numerical, "eigendecomposition failed");
  eigenvectors_ = solver.eigenvectors();
  eigenvalues_ = solver.eigenvalues();
  projected_labels_.noalias() = eigenvectors_.transpose() * label_matrix_;
  squared_vectors_ = eigenvectors_.array().square().matrix();
}

Eigen::MatrixXd RegPath::coefficients(double lambda) const {
  require(std::isfinite(lambda) && lambda > 0.0, ErrorCode::invalid_argument, "lambda must be positive");
  const double ridge = lambda * static_cast<double>(eigenvectors_.rows());
  const Eigen::ArrayXd shifted = eigenvalues_.array() + ridge;
  require((shifted > 0.0).all(), ErrorCode::numerical,
          "lambda too small for the spectrum of the kernel matrix");
  const Eigen::MatrixXd scaled = shifted.inverse().matrix().asDiagonal() * projected_labels_;
  return eigenvectors_ * scaled;
}

LooResult RegPath::loo(double lambda) const {
  const Eigen::MatrixXd coeffs = coefficients(lambda);
  const double ridge = lambda * static_cast<double>(eigenvectors_.rows());
  const Eigen::VectorXd inverse_diag =
      squared_vectors_ * (eigenvalues_.array() + ridge).inverse().matrix();
  LooResult out{label_matrix_, 0.0};
  for (Eigen::Index i = 0; i < out.predictions.rows(); ++i) {
    const double d = inverse_diag(i);
    require(d != 0.0 && std::isfinite(d), ErrorCode::degenerate_data,
            "leave-one-out: zero diagonal in the regularized inverse");
    out.predictions.row(i) -= coeffs.row(i) / d;
  }
  out.error_rate = misclassification_rate(codebook_.decode_batch(out.predictions), labels_);
  return out;
}

void RegPath::evaluate() {
  loo_rates_.clear();
  loo_rates_.reserve(lambdas_.size());
  for (const double lambda : lambdas_) loo_rates_.push_back(loo(lambda).error_rate);
}

LambdaChoice select_lambda(std::span<const double> lambdas, std::span<const double> rates) {
  require(!lambdas.empty() && lambdas.size() == rates.size(), ErrorCode::invalid_argument,
          "lambda selection needs matching non-empty lambda and rate lists");
  size_t best = 0;
  for (size_t k = 1; k < lambdas.size(); ++k) {
    if (rates[k] < rates[best] || (rates[k] == rates[best] && lambdas[k] > lambdas[best])) best = k;
  }
  return {lambdas[best], rates[best], best};
}

LambdaChoice select_lambda_loo(const RegPath& path) {
  return select_lambda(path.lambdas(), path.loo_rates());
}

}  // namespace simplex
