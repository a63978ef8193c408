#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "simplex/data_io.hpp"
#include "simplex/kernels.hpp"
#include "simplex/losses.hpp"
#include "simplex/model.hpp"

namespace simplex {

enum class SelectMode { holdout, loo };

struct ExperimentConfig {
  LossKind loss = LossKind::s_ls;
  bool online = false;
  KernelKind kernel = KernelKind::linear;
  std::optional<double> sigma;   // rbf only; empty = 25th-percentile heuristic
  std::optional<double> lambda;  // empty = select from the eigenvalue grid
  SelectMode select = SelectMode::holdout;
  double split_fraction = 0.8;
  int epochs = 10;
  std::uint64_t seed = 1;
  bool standardize = false;
  double tol = 1e-6;
  long max_sweeps = -1;

  Solver solver() const noexcept { return solver_for(loss, online); }
  /// Rejects invalid combinations with ErrorCode::config.
  void validate() const;
};

struct TrainReport {
  Solver solver = Solver::s_ls_batch;
  double lambda = 0.0;
  std::optional<double> sigma;
  double objective = 0.0;  // (1/n) sum V(y_i, f(x_i)) + lambda |f|^2
  double train_accuracy = 0.0;
  double wall_seconds = 0.0;
  std::optional<double> loo_rate;
  std::optional<double> validation_rate;
  std::optional<bool> qp_converged;
  std::optional<double> kkt_violation;

  std::string text() const;
};

struct TrainOutcome {
  Model model;
  TrainReport report;
};

TrainOutcome run_train(const ExperimentConfig& config, const Dataset& data);

struct EvaluationReport {
  double accuracy = 0.0;
  Eigen::MatrixXi confusion;  // rows: true label, columns: predicted label
  std::vector<std::string> label_names;

  std::string text() const;
  std::string confusion_csv() const;
};

EvaluationReport evaluate(const Model& model, const Dataset& data);

struct PathTable {
  SelectMode mode = SelectMode::loo;
  std::vector<double> lambdas;
  std::vector<double> rates;
  size_t selected = 0;

  std::string csv() const;
};

/// Per-lambda LOO (or hold-out validation) rates of batch S-LS over the
/// 100-value eigenvalue grid.
PathTable run_path(const ExperimentConfig& config, const Dataset& data);

/// Eigenvalues of the Gram matrix of `features`, used for the lambda grid.
Eigen::VectorXd gram_spectrum(const KernelSpec& spec, const Eigen::Ref<const Eigen::MatrixXd>& features);

struct TheoryReport {
  bool passed = true;
  std::string text;
};

TheoryReport verify_theory(int classes, std::uint64_t seed, size_t trials);

struct BenchmarkReport {
  bool any_error = false;
  std::string text;
  std::string table_csv;    // rows: solvers, columns: datasets
  std::string details_csv;  // one line per cell with lambda, sigma, wall time
};

BenchmarkReport run_benchmark(const std::string& manifest_path);

}  // namespace simplex
