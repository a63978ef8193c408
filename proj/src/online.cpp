#include "simplex/online.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "simplex/error.hpp"

namespace simplex {

double pegasos_rate(long step, double lambda) { return 1.0 / (lambda * static_cast<double>(step)); }

OnlineState OnlineState::zero(const CodeBook& codebook, Eigen::Index features, double lambda,
                              LossKind loss) {
  require(std::isfinite(lambda) && lambda > 0.0, ErrorCode::invalid_argument, "lambda must be positive");
  OnlineState state;
  state.weights = Eigen::MatrixXd::Zero(codebook.dim(), features);
  state.lambda = lambda;
  state.loss = loss;
  return state;
}

double OnlineState::radius() const { return 1.0 / std::sqrt(lambda); }

void sgd_step(OnlineState& state, const Eigen::Ref<const Eigen::VectorXd>& x, int label,
              const CodeBook& codebook) {
  require(x.allFinite(), ErrorCode::invalid_data, "online step: non-finite input");
  const long step = state.step + 1;
  const double eta = state.rate(step, state.lambda);
  require(std::isfinite(eta) && eta > 0.0, ErrorCode::numerical,
          "online step " + std::to_string(step) + ": invalid learning rate");

  const Eigen::MatrixXd grad = subgradient_linear(state.loss, codebook, label, state.weights, x);
  Eigen::MatrixXd next = (1.0 - eta * state.lambda) * state.weights - eta * grad;
  const double norm = next.norm();
  if (!std::isfinite(norm)) {
    std::ostringstream os;
    os << "online step " << step << ": update diverged (eta = " << eta << ")";
    throw Error(ErrorCode::numerical, os.str());
  }
  const double radius = state.radius();
  if (norm > radius) next *= radius / norm;
  state.weights = std::move(next);
  state.step = step;
}

LinearModel train_online(const Eigen::Ref<const Eigen::MatrixXd>& inputs, std::span<const int> labels,
                         const CodeBook& codebook, const OnlineOptions& options) {
  const Eigen::Index n = inputs.rows();
  require(n >= 1, ErrorCode::invalid_argument, "online training needs a non-empty dataset");
  require(static_cast<Eigen::Index>(labels.size()) == n, ErrorCode::dimension_mismatch,
          "label count does not match the number of inputs");
  require(options.epochs >= 1, ErrorCode::invalid_argument, "epochs must be >= 1");
  check_finite(inputs, "feature matrix");

  OnlineState state = OnlineState::zero(codebook, inputs.cols(), options.lambda, options.loss);
  state.rate = options.rate;
  std::mt19937_64 rng(options.seed);
  std::vector<Eigen::Index> order(static_cast<size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  for (int epoch = 1; epoch <= options.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (const Eigen::Index i : order) {
      sgd_step(state, inputs.row(i).transpose(), labels[static_cast<size_t>(i)], codebook);
      if (options.on_step) options.on_step(state);
    }
    if (options.on_epoch) options.on_epoch(epoch, state);
  }
  return LinearModel{std::move(state.weights), codebook, options.lambda};
}

double regularized_risk(const Eigen::Ref<const Eigen::MatrixXd>& weights,
                        const Eigen::Ref<const Eigen::MatrixXd>& inputs, std::span<const int> labels,
                        const CodeBook& codebook, LossKind loss, double lambda) {
  require(static_cast<Eigen::Index>(labels.size()) == inputs.rows() && inputs.rows() > 0,
          ErrorCode::dimension_mismatch, "label count does not match the number of inputs");
  const Eigen::MatrixXd values = inputs * weights.transpose();
  double total = 0.0;
  for (Eigen::Index i = 0; i < values.rows(); ++i) {
    total += loss_value(loss, codebook, labels[static_cast<size_t>(i)], values.row(i).transpose());
  }
  return total / static_cast<double>(values.rows()) + 0.5 * lambda * weights.squaredNorm();
}

}  // namespace simplex
