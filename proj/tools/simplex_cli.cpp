// Command-line front end; everything goes through the C interface.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "simplex/simplex.h"

namespace {

enum Exit { kOk = 0, kPartial = 1, kUsage = 2, kData = 3, kNumerical = 4 };

struct Failure {
  int code;
};

int exit_code(smx_status status) {
  switch (status) {
    case SMX_OK: return kOk;
    case SMX_ERR_INVALID_ARGUMENT:
    case SMX_ERR_CONFIG: return kUsage;
    case SMX_ERR_INVALID_DATA:
    case SMX_ERR_DIMENSION:
    case SMX_ERR_DEGENERATE:
    case SMX_ERR_IO:
    case SMX_ERR_PARSE: return kData;
    case SMX_ERR_NUMERICAL: return kNumerical;
    case SMX_ERR_INTERNAL: return kPartial;
  }
  return kPartial;
}

void check(smx_status status) {
  if (status == SMX_OK) return;
  std::cerr << "error (" << smx_status_name(status) << "): " << smx_last_error() << '\n';
  throw Failure{exit_code(status)};
}

[[noreturn]] void usage(const std::string& message) {
  std::cerr << "error: " << message << '\n';
  throw Failure{kUsage};
}

struct DatasetDeleter {
  void operator()(smx_dataset* d) const { smx_dataset_free(d); }
};
struct ModelDeleter {
  void operator()(smx_model* m) const { smx_model_free(m); }
};
struct ReportDeleter {
  void operator()(smx_report* r) const { smx_report_free(r); }
};
using DatasetPtr = std::unique_ptr<smx_dataset, DatasetDeleter>;
using ModelPtr = std::unique_ptr<smx_model, ModelDeleter>;
using ReportPtr = std::unique_ptr<smx_report, ReportDeleter>;

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  out << content;
  if (!out) {
    std::cerr << "error: cannot write " << path << '\n';
    throw Failure{kData};
  }
}

// "auto" or a positive number; 0 stands for auto in the C config.
double auto_or_positive(const std::string& text, const char* flag) {
  if (text == "auto") return 0.0;
  try {
    size_t used = 0;
    const double v = std::stod(text, &used);
    if (used == text.size() && v > 0.0) return v;
  } catch (const std::exception&) {
  }
  usage(std::string(flag) + " must be 'auto' or a positive number, got '" + text + "'");
}

struct DataFlags {
  std::string path;
  std::string format = "csv";
  int label_col = -1;
  bool has_header = false;

  void add(CLI::App* app, bool required = true) {
    auto* opt = app->add_option("--data", path, "Data file");
    if (required) opt->required();
    app->add_option("--format", format, "csv or sparse")->check(CLI::IsMember({"csv", "sparse"}));
    app->add_option("--label-col", label_col, "Label column (csv; negative counts from the end)");
    app->add_flag("--header", has_header, "First csv line is a header");
  }

  smx_load_options options() const {
    smx_load_options o;
    smx_load_options_init(&o);
    o.format = format == "sparse" ? SMX_FORMAT_SPARSE : SMX_FORMAT_CSV;
    o.label_column = label_col;
    o.has_header = has_header ? 1 : 0;
    return o;
  }

  DatasetPtr load() const {
    const auto o = options();
    smx_dataset* d = nullptr;
    check(smx_dataset_load(path.c_str(), &o, &d));
    return DatasetPtr(d);
  }
};

struct TrainFlags {
  std::string loss = "s-ls";
  std::string mode = "batch";
  std::string kernel = "linear";
  std::string sigma = "auto";
  std::string lambda = "auto";
  std::string select = "ho";
  double split_frac = 0.8;
  int epochs = 10;
  std::uint64_t seed = 1;
  bool standardize = false;
  double tol = 1e-6;
  long max_sweeps = -1;

  void add(CLI::App* app) {
    app->add_option("--loss", loss, "s-ls, sc-svm or sh-svm")->check(CLI::IsMember({"s-ls", "sc-svm", "sh-svm"}));
    app->add_option("--mode", mode, "batch or online")->check(CLI::IsMember({"batch", "online"}));
    app->add_option("--kernel", kernel, "linear or rbf")->check(CLI::IsMember({"linear", "rbf"}));
    app->add_option("--sigma", sigma, "RBF bandwidth or 'auto'");
    app->add_option("--lambda", lambda, "Regularization parameter or 'auto'");
    app->add_option("--select", select, "ho (hold-out) or loo")->check(CLI::IsMember({"ho", "loo"}));
    app->add_option("--split-frac", split_frac, "Training fraction of the hold-out split");
    app->add_option("--epochs", epochs, "Online epochs");
    app->add_option("--seed", seed, "Random seed");
    app->add_flag("--standardize", standardize, "Standardize features before training");
    app->add_option("--tol", tol, "KKT tolerance of the SVM solvers");
    app->add_option("--max-sweeps", max_sweeps, "Sweep cap of the SVM solvers (negative: 10 n T)");
  }

  smx_train_config config() const {
    smx_train_config c;
    smx_train_config_init(&c);
    c.loss = loss == "sc-svm" ? SMX_LOSS_SC_SVM : loss == "sh-svm" ? SMX_LOSS_SH_SVM : SMX_LOSS_S_LS;
    c.online = mode == "online" ? 1 : 0;
    c.kernel = kernel == "rbf" ? SMX_KERNEL_RBF : SMX_KERNEL_LINEAR;
    c.sigma = auto_or_positive(sigma, "--sigma");
    c.lambda = auto_or_positive(lambda, "--lambda");
    c.select = select == "loo" ? SMX_SELECT_LOO : SMX_SELECT_HOLDOUT;
    c.split_fraction = split_frac;
    c.epochs = epochs;
    c.seed = seed;
    c.standardize = standardize ? 1 : 0;
    c.tol = tol;
    c.max_sweeps = max_sweeps;
    return c;
  }
};

int cmd_train(const DataFlags& data, const TrainFlags& flags, const std::string& out, const std::string& report_path) {
  const auto config = flags.config();
  const auto dataset = data.load();
  smx_model* m = nullptr;
  smx_report* r = nullptr;
  check(smx_train(&config, dataset.get(), &m, &r));
  ModelPtr model(m);
  ReportPtr report(r);
  if (!out.empty()) check(smx_model_save(model.get(), out.c_str()));
  std::cout << smx_report_text(report.get());
  if (!report_path.empty()) write_file(report_path, smx_report_text(report.get()));
  return kOk;
}

ModelPtr load_model(const std::string& path) {
  smx_model* m = nullptr;
  check(smx_model_load(path.c_str(), &m));
  return ModelPtr(m);
}

DatasetPtr load_for_model(const DataFlags& data, const smx_model* model) {
  const auto o = data.options();
  smx_dataset* d = nullptr;
  check(smx_dataset_load_for_model(data.path.c_str(), &o, model, &d));
  return DatasetPtr(d);
}

int cmd_predict(const DataFlags& data, const std::string& model_path, const std::string& out) {
  const auto model = load_model(model_path);
  const auto dataset = load_for_model(data, model.get());
  std::vector<int> labels(smx_dataset_rows(dataset.get()));
  check(smx_model_predict(model.get(), dataset.get(), labels.data()));
  std::string text;
  for (const int y : labels) {
    text += smx_model_label_name(model.get(), y);
    text += '\n';
  }
  if (out.empty()) {
    std::cout << text;
  } else {
    write_file(out, text);
  }
  return kOk;
}

int cmd_evaluate(const DataFlags& data, const std::string& model_path, const std::string& report_path) {
  const auto model = load_model(model_path);
  const auto dataset = load_for_model(data, model.get());
  if (smx_dataset_classes(dataset.get()) == 0) usage("evaluation data must contain labels");
  smx_report* r = nullptr;
  check(smx_evaluate(model.get(), dataset.get(), &r));
  ReportPtr report(r);
  std::cout << smx_report_text(report.get());
  if (!report_path.empty()) write_file(report_path, smx_report_csv(report.get()));
  return kOk;
}

int cmd_path(const DataFlags& data, const TrainFlags& flags, const std::string& out) {
  const auto config = flags.config();
  const auto dataset = data.load();
  smx_report* r = nullptr;
  check(smx_path(&config, dataset.get(), &r));
  ReportPtr report(r);
  if (out.empty()) {
    std::cout << smx_report_csv(report.get());
  } else {
    write_file(out, smx_report_csv(report.get()));
  }
  std::cerr << smx_report_text(report.get());
  return kOk;
}

int cmd_verify_theory(int classes, std::uint64_t seed, long trials, const std::string& report_path) {
  if (classes < 2) usage("--classes must be >= 2");
  if (trials < 1) usage("--trials must be >= 1");
  smx_report* r = nullptr;
  check(smx_verify_theory(classes, seed, static_cast<size_t>(trials), &r));
  ReportPtr report(r);
  std::cout << smx_report_text(report.get());
  if (!report_path.empty()) write_file(report_path, smx_report_text(report.get()));
  return smx_report_passed(report.get()) ? kOk : kPartial;
}

int cmd_benchmark(const std::string& manifest, const std::string& out, const std::string& report_path) {
  smx_report* r = nullptr;
  check(smx_benchmark(manifest.c_str(), &r));
  ReportPtr report(r);
  std::cout << smx_report_text(report.get());
  if (!out.empty()) write_file(out, smx_report_csv(report.get()));
  if (!report_path.empty()) write_file(report_path, smx_report_details_csv(report.get()));
  return smx_report_passed(report.get()) ? kOk : kPartial;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multiclass learning with simplex coding"};
  app.require_subcommand(1);

  DataFlags data;
  TrainFlags flags;
  std::string out, report, model_path, manifest;
  int classes = 3;
  long trials = 1000;
  std::uint64_t seed = 1;

  auto* train = app.add_subcommand("train", "Fit a model and write it to --out");
  data.add(train);
  flags.add(train);
  train->add_option("--out", out, "Model file to write");
  train->add_option("--report", report, "Also write the training report here");

  auto* predict = app.add_subcommand("predict", "Print one predicted label per input row");
  data.add(predict);
  predict->add_option("--model", model_path, "Model file")->required();
  predict->add_option("--out", out, "Write predictions here instead of standard output");

  auto* evaluate = app.add_subcommand("evaluate", "Accuracy and confusion matrix on labeled data");
  data.add(evaluate);
  evaluate->add_option("--model", model_path, "Model file")->required();
  evaluate->add_option("--report", report, "Write the confusion matrix as CSV here");

  auto* path = app.add_subcommand("path", "Per-lambda error rates of batch S-LS as CSV");
  data.add(path);
  flags.add(path);
  path->add_option("--out", out, "Write the table here instead of standard output");

  auto* theory = app.add_subcommand("verify-theory", "Numerical checks of consistency and comparison bounds");
  theory->add_option("--classes,-T", classes, "Number of classes");
  theory->add_option("--seed", seed, "Random seed");
  theory->add_option("--trials", trials, "Random distributions per loss");
  theory->add_option("--report", report, "Also write the report here");

  auto* bench = app.add_subcommand("benchmark", "Accuracy table over a manifest of datasets and solvers");
  bench->add_option("manifest,--manifest", manifest, "JSON manifest")->required();
  bench->add_option("--out", out, "Write the accuracy table as CSV here");
  bench->add_option("--report", report, "Write per-cell details as CSV here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*train) return cmd_train(data, flags, out, report);
    if (*predict) return cmd_predict(data, model_path, out);
    if (*evaluate) return cmd_evaluate(data, model_path, report);
    if (*path) return cmd_path(data, flags, out);
    if (*theory) return cmd_verify_theory(classes, seed, trials, report);
    if (*bench) return cmd_benchmark(manifest, out, report);
  } catch (const Failure& f) {
    return f.code;
  }
  return kUsage;
}
