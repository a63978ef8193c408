#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "oracles.hpp"
#include "simplex/experiment.hpp"
#include "simplex/svm_qp.hpp"

using namespace simplex;

namespace {

const std::string kData = SIMPLEX_DATA_DIR;

Dataset blobs3() { return load_csv(kData + "/blobs3.csv"); }

Dataset noisy(int T, Eigen::Index per_class, std::uint64_t seed) {
  const auto b = oracle::blobs(T, per_class, 3, 1.0, 1.0, seed);
  Dataset d;
  d.features = b.X;
  d.labels = b.y;
  d.classes = T;
  for (int k = 1; k <= T; ++k) d.label_names.push_back("c" + std::to_string(k));
  return d;
}

std::string model_text(const Model& m) {
  std::ostringstream os;
  save_model(m, os);
  return os.str();
}

}  // namespace

TEST_CASE("invalid configurations are rejected before any work") {
  ExperimentConfig c;
  c.loss = LossKind::sc_svm;
  c.select = SelectMode::loo;
  CHECK_THROWS_AS(c.validate(), Error);
  try {
    run_train(c, blobs3());
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::config);
  }
  ExperimentConfig online_rbf;
  online_rbf.online = true;
  online_rbf.kernel = KernelKind::rbf;
  CHECK_THROWS_AS(online_rbf.validate(), Error);
  ExperimentConfig bad_lambda;
  bad_lambda.lambda = -1.0;
  CHECK_THROWS_AS(bad_lambda.validate(), Error);
  ExperimentConfig ok;
  ok.select = SelectMode::loo;
  CHECK_NOTHROW(ok.validate());
}

TEST_CASE("S-LS rbf with LOO selection") {
  const auto data = blobs3();
  ExperimentConfig c;
  c.kernel = KernelKind::rbf;
  c.select = SelectMode::loo;
  const auto out = run_train(c, data);
  REQUIRE(out.report.loo_rate.has_value());
  REQUIRE(out.report.sigma.has_value());
  CHECK(*out.report.sigma == rbf_sigma_heuristic(data.features, c.seed));
  const RegPath path(gram(KernelSpec::rbf(*out.report.sigma), data.features).values, data.labels, CodeBook(3));
  const auto choice = select_lambda_loo(path);
  CHECK(out.report.lambda == choice.lambda);
  CHECK(*out.report.loo_rate == choice.rate);
  CHECK(out.report.train_accuracy >= 0.99);
  CHECK(evaluate(out.model, data).accuracy == out.report.train_accuracy);
  CHECK(out.report.text().find("loo_error_rate") != std::string::npos);
}

TEST_CASE("SH-SVM rbf model keeps one coefficient row per training point") {
  const auto data = blobs3();
  ExperimentConfig c;
  c.loss = LossKind::sh_svm;
  c.kernel = KernelKind::rbf;
  const auto out = run_train(c, data);
  const auto* k = std::get_if<KernelModel>(&out.model.predictor);
  REQUIRE(k != nullptr);
  CHECK(k->coefficients.rows() == data.size());
  CHECK(out.report.qp_converged.value());
  CHECK(out.report.kkt_violation.value() <= 1e-6);
  CHECK(out.report.validation_rate.has_value());
}

TEST_CASE("linear SVMs are stored in linear form with identical decisions") {
  const auto data = noisy(3, 15, 4);
  ExperimentConfig c;
  c.loss = LossKind::sc_svm;
  c.lambda = 0.05;
  const auto out = run_train(c, data);
  const auto* lin = std::get_if<LinearModel>(&out.model.predictor);
  REQUIRE(lin != nullptr);
  const auto fit = fit_sc_svm(gram(KernelSpec::linear(), data.features), data.features, data.labels, CodeBook(3), 0.05);
  CHECK((predict(*lin, data.features) - predict(fit.model, data.features)).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("path table: 100 rows, marked minimum, consistent with per-lambda training") {
  const auto data = noisy(3, 20, 5);
  ExperimentConfig c;
  c.kernel = KernelKind::rbf;
  c.select = SelectMode::loo;
  const auto table = run_path(c, data);
  REQUIRE(table.lambdas.size() == 100);
  const double best = *std::min_element(table.rates.begin(), table.rates.end());
  CHECK(table.rates[table.selected] == best);
  for (size_t k : {size_t{3}, size_t{25}, size_t{50}, size_t{75}, size_t{96}}) {
    ExperimentConfig fixed = c;
    fixed.lambda = table.lambdas[k];
    CHECK(run_train(fixed, data).report.loo_rate.value() == table.rates[k]);
  }
  std::istringstream csv(table.csv());
  std::string line;
  int rows = -1, marked = 0;
  while (std::getline(csv, line)) {
    ++rows;
    if (rows > 0 && line.back() == '1') ++marked;
  }
  CHECK(rows == 100);
  CHECK(marked == 1);
}

TEST_CASE("hold-out path rates match fits on the split") {
  const auto data = noisy(3, 20, 6);
  ExperimentConfig c;
  c.kernel = KernelKind::rbf;
  c.sigma = 1.0;
  const auto table = run_path(c, data);
  const auto parts = split(data, {c.split_fraction, c.seed, true});
  const auto spec = KernelSpec::rbf(1.0);
  for (size_t k : {size_t{0}, size_t{40}, size_t{99}}) {
    const auto m = fit_kernel(gram(spec, parts.train.features), parts.train.features, parts.train.labels, CodeBook(3),
                              table.lambdas[k]);
    CHECK(table.rates[k] == misclassification_rate(classify(m, parts.validation.features), parts.validation.labels));
  }
  ExperimentConfig svm = c;
  svm.loss = LossKind::sc_svm;
  CHECK_THROWS_AS(run_path(svm, data), Error);
}

TEST_CASE("linear gram spectrum via the p x p normal matrix") {
  std::mt19937_64 rng(3);
  const Eigen::MatrixXd X = oracle::random_matrix(30, 4, rng);
  const Eigen::VectorXd fast = gram_spectrum(KernelSpec::linear(), X);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(X * X.transpose(), Eigen::EigenvaluesOnly);
  CHECK(fast.maxCoeff() == doctest::Approx(es.eigenvalues().maxCoeff()).epsilon(1e-10));
  CHECK(fast.minCoeff() == 0.0);
}

TEST_CASE("every solver trains deterministically") {
  const auto data = noisy(3, 15, 7);
  for (auto loss : {LossKind::s_ls, LossKind::sc_svm, LossKind::sh_svm}) {
    for (bool online : {false, true}) {
      ExperimentConfig c;
      c.loss = loss;
      c.online = online;
      c.standardize = true;
      const auto a = run_train(c, data);
      const auto b = run_train(c, data);
      CHECK(model_text(a.model) == model_text(b.model));
      CHECK(a.model.solver == c.solver());
      CHECK(a.report.objective > 0.0);
      CHECK(evaluate(a.model, data).accuracy == a.report.train_accuracy);
    }
  }
}

TEST_CASE("evaluation counts the confusion matrix") {
  const auto data = blobs3();
  ExperimentConfig c;
  c.lambda = 1e-3;
  const auto out = run_train(c, data);
  const auto ev = evaluate(out.model, data);
  CHECK(ev.confusion.sum() == data.size());
  CHECK(ev.confusion.trace() == static_cast<int>(std::lround(ev.accuracy * static_cast<double>(data.size()))));
  CHECK(ev.confusion_csv().rfind("true\\predicted," + data.label_names[0] + ",", 0) == 0);
}

TEST_CASE("theory verification") {
  CHECK(verify_theory(3, 1, 50).passed);
  const auto two = verify_theory(2, 4, 50);
  CHECK(two.passed);
  CHECK(two.text.find("binary reduction") != std::string::npos);
  CHECK_THROWS_AS(verify_theory(3, 1, 0), Error);
  CHECK_THROWS_AS(verify_theory(1, 1, 10), Error);
}

TEST_CASE("benchmark manifest") {
  const auto report = run_benchmark(kData + "/benchmark.json");
  CHECK_FALSE(report.any_error);
  std::istringstream table(report.table_csv);
  std::string line;
  int rows = 0;
  while (std::getline(table, line)) ++rows;
  CHECK(rows == 6);
  CHECK(run_benchmark(kData + "/benchmark.json").table_csv == report.table_csv);

  const auto dir = std::filesystem::temp_directory_path() / "simplex_bench_test";
  std::filesystem::create_directories(dir);
  std::filesystem::copy_file(kData + "/blobs3.csv", dir / "blobs3.csv", std::filesystem::copy_options::overwrite_existing);
  std::ofstream(dir / "m.json") << R"({"datasets": [{"name": "ok", "train": "blobs3.csv"},
                                                   {"name": "gone", "train": "missing.csv"}],
                                      "solvers": [{"name": "sls", "loss": "s-ls", "select": "loo"},
                                                  {"name": "sh", "loss": "sh-svm", "mode": "online"}]})";
  const auto partial = run_benchmark((dir / "m.json").string());
  CHECK(partial.any_error);
  CHECK(partial.table_csv.find("sls,") != std::string::npos);
  CHECK(partial.table_csv.find(",ERROR") != std::string::npos);
  CHECK(partial.table_csv.find("sls,ERROR") == std::string::npos);

  std::ofstream(dir / "bad.json") << R"({"datasets": [], "solvers": [{"name": "x", "loss": "sc-svm", "select": "loo"}]})";
  CHECK_THROWS_AS(run_benchmark((dir / "bad.json").string()), Error);
  std::filesystem::remove_all(dir);
}
