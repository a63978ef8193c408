#include "simplex/simplex.h"

#include <iomanip>
#include <map>
#include <new>
#include <sstream>
#include <string>

#include "simplex/experiment.hpp"

using namespace simplex;

struct smx_dataset {
  Dataset data;
};

struct smx_model {
  Model model;
  std::string solver_name;
};

struct smx_report {
  std::string text;
  std::string csv;
  std::string details;
  int passed = 1;
  std::map<std::string, double> values;
};

namespace {

thread_local std::string last_error;

smx_status status_of(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument: return SMX_ERR_INVALID_ARGUMENT;
    case ErrorCode::invalid_data: return SMX_ERR_INVALID_DATA;
    case ErrorCode::dimension_mismatch: return SMX_ERR_DIMENSION;
    case ErrorCode::degenerate_data: return SMX_ERR_DEGENERATE;
    case ErrorCode::numerical: return SMX_ERR_NUMERICAL;
    case ErrorCode::io: return SMX_ERR_IO;
    case ErrorCode::parse: return SMX_ERR_PARSE;
    case ErrorCode::config: return SMX_ERR_CONFIG;
  }
  return SMX_ERR_INTERNAL;
}

template <typename F>
smx_status guard(F&& body) {
  try {
    body();
    last_error.clear();
    return SMX_OK;
  } catch (const Error& e) {
    last_error = e.what();
    return status_of(e.code());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return SMX_ERR_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return SMX_ERR_INTERNAL;
  }
}

void need(const void* p, const char* what) {
  require(p != nullptr, ErrorCode::invalid_argument, std::string(what) + " must not be NULL");
}

CsvOptions csv_options(const smx_load_options& o) {
  CsvOptions csv;
  csv.has_header = o.has_header != 0;
  csv.label_column = o.labeled ? std::optional<int>(o.label_column) : std::nullopt;
  return csv;
}

smx_load_options options_or_default(const smx_load_options* options) {
  smx_load_options o;
  smx_load_options_init(&o);
  return options ? *options : o;
}

ExperimentConfig to_config(const smx_train_config& c) {
  ExperimentConfig config;
  switch (c.loss) {
    case SMX_LOSS_S_LS: config.loss = LossKind::s_ls; break;
    case SMX_LOSS_SC_SVM: config.loss = LossKind::sc_svm; break;
    case SMX_LOSS_SH_SVM: config.loss = LossKind::sh_svm; break;
    default: fail(ErrorCode::config, "unknown loss");
  }
  require(c.kernel == SMX_KERNEL_LINEAR || c.kernel == SMX_KERNEL_RBF, ErrorCode::config, "unknown kernel");
  require(c.select == SMX_SELECT_HOLDOUT || c.select == SMX_SELECT_LOO, ErrorCode::config,
          "unknown selection mode");
  config.online = c.online != 0;
  config.kernel = c.kernel == SMX_KERNEL_RBF ? KernelKind::rbf : KernelKind::linear;
  if (c.sigma > 0.0) config.sigma = c.sigma;
  if (c.lambda > 0.0) config.lambda = c.lambda;
  config.select = c.select == SMX_SELECT_LOO ? SelectMode::loo : SelectMode::holdout;
  config.split_fraction = c.split_fraction;
  config.epochs = c.epochs;
  config.seed = c.seed;
  config.standardize = c.standardize != 0;
  config.tol = c.tol;
  config.max_sweeps = c.max_sweeps;
  return config;
}

smx_report* train_report(const TrainReport& r) {
  auto* out = new smx_report;
  out->text = r.text();
  out->values["lambda"] = r.lambda;
  out->values["objective"] = r.objective;
  out->values["train_accuracy"] = r.train_accuracy;
  out->values["wall_seconds"] = r.wall_seconds;
  if (r.sigma) out->values["sigma"] = *r.sigma;
  if (r.loo_rate) out->values["loo_rate"] = *r.loo_rate;
  if (r.validation_rate) out->values["validation_rate"] = *r.validation_rate;
  if (r.qp_converged) out->values["qp_converged"] = *r.qp_converged ? 1.0 : 0.0;
  if (r.kkt_violation) out->values["kkt_violation"] = *r.kkt_violation;
  return out;
}

}  // namespace

extern "C" {

const char* smx_last_error(void) { return last_error.c_str(); }

const char* smx_status_name(smx_status status) {
  switch (status) {
    case SMX_OK: return "ok";
    case SMX_ERR_INVALID_ARGUMENT: return "invalid argument";
    case SMX_ERR_INVALID_DATA: return "invalid data";
    case SMX_ERR_DIMENSION: return "dimension mismatch";
    case SMX_ERR_DEGENERATE: return "degenerate data";
    case SMX_ERR_NUMERICAL: return "numerical failure";
    case SMX_ERR_IO: return "i/o error";
    case SMX_ERR_PARSE: return "parse error";
    case SMX_ERR_CONFIG: return "invalid configuration";
    case SMX_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

void smx_load_options_init(smx_load_options* options) {
  if (!options) return;
  options->format = SMX_FORMAT_CSV;
  options->labeled = 1;
  options->label_column = -1;
  options->has_header = 0;
}

smx_status smx_dataset_load(const char* path, const smx_load_options* options, smx_dataset** out) {
  return guard([&] {
    need(path, "path");
    need(out, "out");
    const auto o = options_or_default(options);
    auto result = std::make_unique<smx_dataset>();
    result->data = o.format == SMX_FORMAT_SPARSE ? load_sparse(path) : load_csv(path, csv_options(o));
    *out = result.release();
  });
}

smx_status smx_dataset_load_for_model(const char* path, const smx_load_options* options, const smx_model* model,
                                      smx_dataset** out) {
  return guard([&] {
    need(path, "path");
    need(model, "model");
    need(out, "out");
    const auto o = options_or_default(options);
    const Eigen::Index p = model->model.dimension();
    auto result = std::make_unique<smx_dataset>();
    if (o.format == SMX_FORMAT_SPARSE) {
      result->data = load_sparse(path, p);
    } else {
      CsvOptions csv = csv_options(o);
      std::optional<Dataset> features_only;
      try {
        csv.label_column = std::nullopt;
        features_only = load_csv(path, csv);
      } catch (const ParseError& e) {
        // A non-numeric token can only be a label column.
        if (e.failure() != ParseFailure::non_numeric) throw;
      }
      csv.label_column = o.label_column;
      if (features_only && features_only->dimension() != p + 1) {
        result->data = std::move(*features_only);
      } else {
        result->data = load_csv(path, csv);
      }
    }
    *out = result.release();
  });
}

smx_status smx_dataset_from_arrays(const double* features, size_t rows, size_t cols, const int* labels,
                                   smx_dataset** out) {
  return guard([&] {
    need(features, "features");
    need(out, "out");
    require(rows > 0 && cols > 0, ErrorCode::invalid_argument, "dataset must have rows and columns");
    auto result = std::make_unique<smx_dataset>();
    Dataset& d = result->data;
    const auto r = static_cast<Eigen::Index>(rows);
    const auto c = static_cast<Eigen::Index>(cols);
    d.features = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        features, r, c);
    if (labels) {
      d.labels.assign(labels, labels + rows);
      for (const int y : d.labels) {
        require(y >= 1, ErrorCode::invalid_data, "labels must be >= 1");
        d.classes = std::max(d.classes, y);
      }
      for (int k = 1; k <= d.classes; ++k) d.label_names.push_back(std::to_string(k));
      d.validate();
    } else {
      check_finite(d.features, "features");
    }
    *out = result.release();
  });
}

size_t smx_dataset_rows(const smx_dataset* data) { return data ? static_cast<size_t>(data->data.size()) : 0; }

size_t smx_dataset_cols(const smx_dataset* data) { return data ? static_cast<size_t>(data->data.dimension()) : 0; }

int smx_dataset_classes(const smx_dataset* data) { return data ? data->data.classes : 0; }

smx_status smx_dataset_label(const smx_dataset* data, size_t row, int* out) {
  return guard([&] {
    need(data, "data");
    need(out, "out");
    require(data->data.labeled(), ErrorCode::invalid_argument, "dataset is unlabeled");
    require(row < data->data.labels.size(), ErrorCode::invalid_argument, "row out of range");
    *out = data->data.labels[row];
  });
}

const char* smx_dataset_label_name(const smx_dataset* data, int label) {
  if (!data || label < 1 || label > static_cast<int>(data->data.label_names.size())) return nullptr;
  return data->data.label_names[static_cast<size_t>(label - 1)].c_str();
}

void smx_dataset_free(smx_dataset* data) { delete data; }

void smx_train_config_init(smx_train_config* config) {
  if (!config) return;
  const ExperimentConfig d;
  config->loss = SMX_LOSS_S_LS;
  config->online = 0;
  config->kernel = SMX_KERNEL_LINEAR;
  config->sigma = 0.0;
  config->lambda = 0.0;
  config->select = SMX_SELECT_HOLDOUT;
  config->split_fraction = d.split_fraction;
  config->epochs = d.epochs;
  config->seed = d.seed;
  config->standardize = 0;
  config->tol = d.tol;
  config->max_sweeps = d.max_sweeps;
}

smx_status smx_train(const smx_train_config* config, const smx_dataset* data, smx_model** model,
                     smx_report** report) {
  return guard([&] {
    need(config, "config");
    need(data, "data");
    need(model, "model");
    auto outcome = run_train(to_config(*config), data->data);
    const std::string name(to_string(outcome.model.solver));
    auto result = std::make_unique<smx_model>(smx_model{std::move(outcome.model), name});
    std::unique_ptr<smx_report> r(report ? train_report(outcome.report) : nullptr);
    *model = result.release();
    if (report) *report = r.release();
  });
}

smx_status smx_model_save(const smx_model* model, const char* path) {
  return guard([&] {
    need(model, "model");
    need(path, "path");
    save_model(model->model, std::string(path));
  });
}

smx_status smx_model_load(const char* path, smx_model** out) {
  return guard([&] {
    need(path, "path");
    need(out, "out");
    Model model = load_model(std::string(path));
    const std::string name(to_string(model.solver));
    auto result = std::make_unique<smx_model>(smx_model{std::move(model), name});
    *out = result.release();
  });
}

size_t smx_model_dimension(const smx_model* model) {
  return model ? static_cast<size_t>(model->model.dimension()) : 0;
}

int smx_model_classes(const smx_model* model) { return model ? model->model.classes() : 0; }

const char* smx_model_solver(const smx_model* model) { return model ? model->solver_name.c_str() : nullptr; }

const char* smx_model_label_name(const smx_model* model, int label) {
  if (!model || label < 1 || label > static_cast<int>(model->model.label_names.size())) return nullptr;
  return model->model.label_names[static_cast<size_t>(label - 1)].c_str();
}

smx_status smx_model_predict(const smx_model* model, const smx_dataset* data, int* labels) {
  return guard([&] {
    need(model, "model");
    need(data, "data");
    need(labels, "labels");
    const auto predicted = model->model.classify(data->data.features);
    std::copy(predicted.begin(), predicted.end(), labels);
  });
}

smx_status smx_model_decision(const smx_model* model, const smx_dataset* data, double* values) {
  return guard([&] {
    need(model, "model");
    need(data, "data");
    need(values, "values");
    const Eigen::MatrixXd v = model->model.decision(data->data.features);
    Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(values, v.rows(),
                                                                                        v.cols()) = v;
  });
}

void smx_model_free(smx_model* model) { delete model; }

smx_status smx_evaluate(const smx_model* model, const smx_dataset* data, smx_report** out) {
  return guard([&] {
    need(model, "model");
    need(data, "data");
    need(out, "out");
    const auto r = evaluate(model->model, data->data);
    auto result = std::make_unique<smx_report>();
    result->text = r.text();
    result->csv = r.confusion_csv();
    result->values["accuracy"] = r.accuracy;
    *out = result.release();
  });
}

smx_status smx_path(const smx_train_config* config, const smx_dataset* data, smx_report** out) {
  return guard([&] {
    need(config, "config");
    need(data, "data");
    need(out, "out");
    const auto table = run_path(to_config(*config), data->data);
    auto result = std::make_unique<smx_report>();
    result->csv = table.csv();
    result->values["lambda"] = table.lambdas[table.selected];
    result->values["rate"] = table.rates[table.selected];
    result->values["selected_index"] = static_cast<double>(table.selected);
    result->values["rows"] = static_cast<double>(table.lambdas.size());
    std::ostringstream text;
    text << std::setprecision(10) << "selected lambda " << table.lambdas[table.selected] << " (row "
         << table.selected + 1 << " of " << table.lambdas.size() << "), rate " << table.rates[table.selected] << '\n';
    result->text = text.str();
    *out = result.release();
  });
}

smx_status smx_verify_theory(int classes, uint64_t seed, size_t trials, smx_report** out) {
  return guard([&] {
    need(out, "out");
    const auto r = verify_theory(classes, seed, trials);
    auto result = std::make_unique<smx_report>();
    result->text = r.text;
    result->passed = r.passed ? 1 : 0;
    *out = result.release();
  });
}

smx_status smx_benchmark(const char* manifest_path, smx_report** out) {
  return guard([&] {
    need(manifest_path, "manifest_path");
    need(out, "out");
    const auto r = run_benchmark(manifest_path);
    auto result = std::make_unique<smx_report>();
    result->text = r.text;
    result->csv = r.table_csv;
    result->details = r.details_csv;
    result->passed = r.any_error ? 0 : 1;
    *out = result.release();
  });
}

const char* smx_report_text(const smx_report* report) { return report ? report->text.c_str() : ""; }

const char* smx_report_csv(const smx_report* report) { return report ? report->csv.c_str() : ""; }

const char* smx_report_details_csv(const smx_report* report) { return report ? report->details.c_str() : ""; }

int smx_report_passed(const smx_report* report) { return report ? report->passed : 0; }

smx_status smx_report_value(const smx_report* report, const char* key, double* out) {
  return guard([&] {
    need(report, "report");
    need(key, "key");
    need(out, "out");
    const auto it = report->values.find(key);
    require(it != report->values.end(), ErrorCode::invalid_argument, std::string("report has no value '") + key + "'");
    *out = it->second;
  });
}

void smx_report_free(smx_report* report) { delete report; }

}  // extern "C"
