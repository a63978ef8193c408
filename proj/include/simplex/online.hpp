#pragma once

#include <cstdint>
#include <functional>
#include <span>

#include <Eigen/Dense>

#include "simplex/coding.hpp"
#include "simplex/losses.hpp"
#include "simplex/srls.hpp"

namespace simplex {

/// eta_i for step i >= 1.
using LearningRate = std::function<double(long step, double lambda)>;

/// eta_i = 1 / (lambda i).
double pegasos_rate(long step, double lambda);

struct OnlineState {
  Eigen::MatrixXd weights;  // (T-1) x p
  long step = 0;            // steps taken so far
  double lambda = 1.0;
  LossKind loss = LossKind::s_ls;
  LearningRate rate = pegasos_rate;

  static OnlineState zero(const CodeBook& codebook, Eigen::Index features, double lambda, LossKind loss);

  /// Radius 1/sqrt(lambda) of the Frobenius ball the iterates live in.
  double radius() const;
};

/// One projected stochastic subgradient step:
///   W_tmp = (1 - eta lambda) W - eta dV(y, W x)
///   W    <- min(1, (1/sqrt(lambda)) / |W_tmp|_F) W_tmp
void sgd_step(OnlineState& state, const Eigen::Ref<const Eigen::VectorXd>& x, int label,
              const CodeBook& codebook);

struct OnlineOptions {
  double lambda = 1e-3;
  int epochs = 10;
  LossKind loss = LossKind::sc_svm;
  std::uint64_t seed = 1;
  LearningRate rate = pegasos_rate;
  /// Invoked after every step; used by tests to audit invariants.
  std::function<void(const OnlineState&)> on_step;
  /// Invoked after every epoch with the 1-based epoch index.
  std::function<void(int epoch, const OnlineState&)> on_epoch;
};

/// Visits every example once per epoch in an order reshuffled from `seed`,
/// starting from W = 0.
LinearModel train_online(const Eigen::Ref<const Eigen::MatrixXd>& inputs, std::span<const int> labels,
                         const CodeBook& codebook, const OnlineOptions& options);

/// (1/n) sum V(y_i, W x_i) + (lambda/2) |W|_F^2, the objective the update above descends.
double regularized_risk(const Eigen::Ref<const Eigen::MatrixXd>& weights,
                        const Eigen::Ref<const Eigen::MatrixXd>& inputs, std::span<const int> labels,
                        const CodeBook& codebook, LossKind loss, double lambda);

}  // namespace simplex
