#include "simplex/experiment.hpp"

#include <chrono>
#include <cmath>
#include <iomanip>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "simplex/online.hpp"
#include "simplex/srls.hpp"
#include "simplex/svm_qp.hpp"

namespace simplex {

namespace {

std::string fmt(double v, int precision = 6) {
  std::ostringstream os;
  os << std::setprecision(precision) << v;
  return os.str();
}

KernelSpec resolve_kernel(const ExperimentConfig& config, const Eigen::Ref<const Eigen::MatrixXd>& features,
                          std::uint64_t seed) {
  if (config.kernel == KernelKind::linear) return KernelSpec::linear();
  return KernelSpec::rbf(config.sigma ? *config.sigma : rbf_sigma_heuristic(features, seed));
}

LinearModel to_linear(const KernelModel& model) {
  // f(x) = sum_j <x, x_j> a_j = (A^T X) x for the linear kernel.
  return LinearModel{model.coefficients.transpose() * model.train_inputs, model.codebook, model.lambda};
}

struct FitResult {
  std::variant<KernelModel, LinearModel> predictor;
  std::optional<bool> converged;
  std::optional<double> kkt;
};

FitResult fit_at(const ExperimentConfig& config, const KernelSpec& spec, const Dataset& data,
                 const CodeBook& codebook, double lambda) {
  const Solver solver = config.solver();
  if (is_online(solver)) {
    OnlineOptions options;
    options.lambda = lambda;
    options.epochs = config.epochs;
    options.loss = config.loss;
    options.seed = config.seed;
    return {train_online(data.features, data.labels, codebook, options), {}, {}};
  }
  if (solver == Solver::s_ls_batch) {
    if (spec.kind == KernelKind::linear) return {fit_linear(data.features, data.labels, codebook, lambda), {}, {}};
    return {fit_kernel(gram(spec, data.features), data.features, data.labels, codebook, lambda), {}, {}};
  }
  const GramMatrix g = gram(spec, data.features);
  QpOptions options;
  options.tol = config.tol;
  options.max_sweeps = config.max_sweeps;
  std::optional<bool> converged;
  std::optional<double> kkt;
  KernelModel model = [&] {
    if (solver == Solver::sc_svm_batch) {
      auto fit = fit_sc_svm(g, data.features, data.labels, codebook, lambda, options);
      converged = fit.dual.converged;
      kkt = fit.dual.kkt_violation;
      return fit.model;
    }
    auto fit = fit_sh_svm(g, data.features, data.labels, codebook, lambda, options);
    converged = fit.dual.converged;
    kkt = fit.dual.kkt_violation;
    return fit.model;
  }();
  if (spec.kind == KernelKind::linear) return {to_linear(model), converged, kkt};
  return {std::move(model), converged, kkt};
}

std::vector<double> holdout_rates(const ExperimentConfig& config, const KernelSpec& spec, const Dataset& train,
                                  const Dataset& validation, const CodeBook& codebook,
                                  const std::vector<double>& grid) {
  std::vector<double> rates;
  rates.reserve(grid.size());
  if (config.solver() == Solver::s_ls_batch && spec.kind == KernelKind::rbf) {
    const RegPath path(gram(spec, train.features).values, train.labels, codebook, grid);
    const Eigen::MatrixXd cross = cross_gram(spec, train.features, validation.features);
    for (const double lambda : grid) {
      const auto predicted = codebook.decode_batch(cross * path.coefficients(lambda));
      rates.push_back(misclassification_rate(predicted, validation.labels));
    }
    return rates;
  }
  for (const double lambda : grid) {
    const FitResult fit = fit_at(config, spec, train, codebook, lambda);
    const auto predicted = std::visit(
        [&](const auto& p) { return classify(p, validation.features); }, fit.predictor);
    rates.push_back(misclassification_rate(predicted, validation.labels));
  }
  return rates;
}

double regularization_norm(const std::variant<KernelModel, LinearModel>& predictor) {
  if (const auto* k = std::get_if<KernelModel>(&predictor)) {
    const Eigen::MatrixXd kg = gram(k->spec, k->train_inputs).values;
    return (k->coefficients.transpose() * kg * k->coefficients).trace();
  }
  return std::get<LinearModel>(predictor).weights.squaredNorm();
}

double training_objective(const Model& model, const Dataset& prepared) {
  const Eigen::MatrixXd values =
      std::visit([&](const auto& p) { return predict(p, prepared.features); }, model.predictor);
  double total = 0.0;
  for (Eigen::Index i = 0; i < values.rows(); ++i) {
    total += loss_value(loss_of(model.solver), model.codebook(), prepared.labels[static_cast<size_t>(i)],
                        values.row(i).transpose());
  }
  return total / static_cast<double>(values.rows()) + model.lambda() * regularization_norm(model.predictor);
}

void require_training_data(const Dataset& data) {
  require(data.labeled(), ErrorCode::invalid_data, "training data must be labeled");
  data.validate();
}

}  // namespace

void ExperimentConfig::validate() const {
  const Solver s = solver();
  if (select == SelectMode::loo && s != Solver::s_ls_batch) {
    fail(ErrorCode::config,
         "leave-one-out selection is only available for batch S-LS (solver " + std::string(to_string(s)) + ")");
  }
  if (online && kernel != KernelKind::linear) {
    fail(ErrorCode::config, "online solvers support the linear kernel only");
  }
  require(epochs >= 1, ErrorCode::config, "epochs must be >= 1");
  require(split_fraction > 0.0 && split_fraction < 1.0, ErrorCode::config, "split fraction must lie in (0, 1)");
  if (lambda) require(std::isfinite(*lambda) && *lambda > 0.0, ErrorCode::config, "lambda must be positive");
  if (sigma) require(std::isfinite(*sigma) && *sigma > 0.0, ErrorCode::config, "sigma must be positive");
  require(tol > 0.0, ErrorCode::config, "tolerance must be positive");
}

Eigen::VectorXd gram_spectrum(const KernelSpec& spec, const Eigen::Ref<const Eigen::MatrixXd>& features) {
  if (spec.kind == KernelKind::linear && features.cols() < features.rows()) {
    // X X^T shares its nonzero spectrum with X^T X and has rank <= p < n.
    const Eigen::MatrixXd normal = features.transpose() * features;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(normal, Eigen::EigenvaluesOnly);
    require(solver.info() == Eigen::Success, ErrorCode::numerical, "eigenvalue computation failed");
    Eigen::VectorXd values(solver.eigenvalues().size() + 1);
    values << 0.0, solver.eigenvalues();
    return values;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram(spec, features).values, Eigen::EigenvaluesOnly);
  require(solver.info() == Eigen::Success, ErrorCode::numerical, "eigenvalue computation failed");
  return solver.eigenvalues();
}

std::string TrainReport::text() const {
  std::ostringstream os;
  os << "solver: " << to_string(solver) << '\n';
  os << "lambda: " << fmt(lambda, 10) << '\n';
  if (sigma) os << "sigma: " << fmt(*sigma, 10) << '\n';
  if (loo_rate) os << "loo_error_rate: " << fmt(*loo_rate) << '\n';
  if (validation_rate) os << "validation_error_rate: " << fmt(*validation_rate) << '\n';
  os << "objective: " << fmt(objective, 10) << '\n';
  os << "train_accuracy: " << fmt(train_accuracy) << '\n';
  if (qp_converged) os << "qp_converged: " << (*qp_converged ? "yes" : "no") << '\n';
  if (kkt_violation) os << "kkt_violation: " << fmt(*kkt_violation) << '\n';
  os << "wall_seconds: " << fmt(wall_seconds, 4) << '\n';
  return os.str();
}

TrainOutcome run_train(const ExperimentConfig& config, const Dataset& raw) {
  const auto start = std::chrono::steady_clock::now();
  config.validate();
  require_training_data(raw);

  Dataset data = raw;
  std::optional<Standardizer> standardizer;
  if (config.standardize) {
    standardizer = Standardizer::fit(raw.features);
    data = standardizer->apply(raw);
  }
  const CodeBook codebook(data.classes);
  const KernelSpec spec = resolve_kernel(config, data.features, config.seed);

  TrainReport report;
  report.solver = config.solver();
  if (spec.kind == KernelKind::rbf) report.sigma = spec.sigma;

  double lambda = 0.0;
  if (config.select == SelectMode::loo) {
    const Eigen::MatrixXd k = gram(spec, data.features).values;
    if (config.lambda) {
      lambda = *config.lambda;
      report.loo_rate = loo_errors(k, data.labels, codebook, lambda).error_rate;
    } else {
      const RegPath path(k, data.labels, codebook);
      const auto choice = select_lambda_loo(path);
      lambda = choice.lambda;
      report.loo_rate = choice.rate;
    }
  } else if (config.lambda) {
    lambda = *config.lambda;
  } else {
    const auto parts = split(data, {config.split_fraction, config.seed, true});
    const auto grid = lambda_grid_from_spectrum(gram_spectrum(spec, parts.train.features));
    const auto rates = holdout_rates(config, spec, parts.train, parts.validation, codebook, grid);
    const auto choice = select_lambda(grid, rates);
    lambda = choice.lambda;
    report.validation_rate = choice.rate;
  }

  FitResult fit = fit_at(config, spec, data, codebook, lambda);
  report.qp_converged = fit.converged;
  report.kkt_violation = fit.kkt;
  Model model{config.solver(), std::move(fit.predictor), data.label_names, standardizer};
  report.lambda = lambda;
  report.objective = training_objective(model, data);
  report.train_accuracy = 1.0 - misclassification_rate(model.classify(raw.features), raw.labels);
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {std::move(model), report};
}

std::string EvaluationReport::text() const {
  std::ostringstream os;
  os << "accuracy: " << fmt(accuracy) << '\n';
  os << "confusion (rows = true, columns = predicted):\n";
  size_t width = 5;
  for (const auto& n : label_names) width = std::max(width, n.size() + 1);
  os << std::setw(static_cast<int>(width)) << "";
  for (const auto& n : label_names) os << std::setw(static_cast<int>(width)) << n;
  os << '\n';
  for (Eigen::Index i = 0; i < confusion.rows(); ++i) {
    os << std::setw(static_cast<int>(width)) << label_names[static_cast<size_t>(i)];
    for (Eigen::Index j = 0; j < confusion.cols(); ++j) os << std::setw(static_cast<int>(width)) << confusion(i, j);
    os << '\n';
  }
  return os.str();
}

std::string EvaluationReport::confusion_csv() const {
  std::ostringstream os;
  os << "true\\predicted";
  for (const auto& n : label_names) os << ',' << n;
  os << '\n';
  for (Eigen::Index i = 0; i < confusion.rows(); ++i) {
    os << label_names[static_cast<size_t>(i)];
    for (Eigen::Index j = 0; j < confusion.cols(); ++j) os << ',' << confusion(i, j);
    os << '\n';
  }
  return os.str();
}

EvaluationReport evaluate(const Model& model, const Dataset& raw) {
  require(raw.labeled(), ErrorCode::invalid_data, "evaluation data must be labeled");
  const Dataset data = remap_labels(raw, model.label_names);
  const auto predicted = model.classify(data.features);
  EvaluationReport report;
  report.label_names = model.label_names;
  report.confusion = Eigen::MatrixXi::Zero(model.classes(), model.classes());
  for (size_t i = 0; i < predicted.size(); ++i) report.confusion(data.labels[i] - 1, predicted[i] - 1) += 1;
  report.accuracy = 1.0 - misclassification_rate(predicted, data.labels);
  return report;
}

std::string PathTable::csv() const {
  std::ostringstream os;
  os << "lambda," << (mode == SelectMode::loo ? "loo_error_rate" : "validation_error_rate") << ",selected\n";
  os << std::setprecision(17);
  for (size_t k = 0; k < lambdas.size(); ++k) {
    os << lambdas[k] << ',' << rates[k] << ',' << (k == selected ? 1 : 0) << '\n';
  }
  return os.str();
}

PathTable run_path(const ExperimentConfig& config, const Dataset& raw) {
  config.validate();
  require(config.solver() == Solver::s_ls_batch, ErrorCode::config,
          "the regularization path is only available for batch S-LS");
  require_training_data(raw);
  const Dataset data = config.standardize ? Standardizer::fit(raw.features).apply(raw) : raw;
  const CodeBook codebook(data.classes);
  const KernelSpec spec = resolve_kernel(config, data.features, config.seed);

  PathTable table;
  table.mode = config.select;
  if (config.select == SelectMode::loo) {
    const RegPath path(gram(spec, data.features).values, data.labels, codebook);
    table.lambdas = path.lambdas();
    table.rates = path.loo_rates();
  } else {
    const auto parts = split(data, {config.split_fraction, config.seed, true});
    const auto grid = lambda_grid_from_spectrum(gram_spectrum(spec, parts.train.features));
    const RegPath path(gram(spec, parts.train.features).values, parts.train.labels, codebook, grid);
    const Eigen::MatrixXd cross = cross_gram(spec, parts.train.features, parts.validation.features);
    table.lambdas = grid;
    for (const double lambda : grid) {
      const auto predicted = codebook.decode_batch(cross * path.coefficients(lambda));
      table.rates.push_back(misclassification_rate(predicted, parts.validation.labels));
    }
  }
  table.selected = select_lambda(table.lambdas, table.rates).index;
  return table;
}

}  // namespace simplex
