#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "oracles.hpp"
#include "simplex/model.hpp"
#include "simplex/svm_qp.hpp"

using namespace simplex;

namespace {

Model round_trip(const Model& m) {
  std::stringstream buffer;
  save_model(m, buffer);
  return load_model(buffer, "buffer");
}

std::string text_of(const Model& m) {
  std::ostringstream os;
  save_model(m, os);
  return os.str();
}

}  // namespace

TEST_CASE("kernel model round trip reproduces predictions exactly") {
  const auto data = oracle::blobs(3, 10, 2, 2.0, 0.8, 1);
  const CodeBook cb(3);
  const auto spec = KernelSpec::rbf(0.7318);
  Model m{Solver::s_ls_batch, fit_kernel(gram(spec, data.X), data.X, data.y, cb, 0.0123), {"a", "b", "c"}, {}};
  const Model back = round_trip(m);
  std::mt19937_64 rng(2);
  const Eigen::MatrixXd Z = oracle::random_matrix(20, 2, rng);
  CHECK(back.decision(Z) == m.decision(Z));
  CHECK(back.label_names == m.label_names);
  CHECK(back.lambda() == m.lambda());
  CHECK(back.kernel()->sigma == spec.sigma);
  CHECK(text_of(back) == text_of(m));
}

TEST_CASE("linear model with standardizer round trip") {
  const auto data = oracle::blobs(4, 10, 3, 2.0, 0.8, 3);
  const CodeBook cb(4);
  const auto s = Standardizer::fit(data.X);
  Model m{Solver::sc_svm_online, fit_linear(s.apply(data.X), data.y, cb, 0.5), {"w", "x", "y", "z"}, s};
  const Model back = round_trip(m);
  CHECK(back.solver == Solver::sc_svm_online);
  CHECK(back.standardizer.has_value());
  CHECK(back.classify(data.X) == m.classify(data.X));
  CHECK(back.decision(data.X) == m.decision(data.X));
  CHECK_FALSE(back.kernel().has_value());
}

TEST_CASE("model file layout") {
  const CodeBook cb(2);
  Eigen::MatrixXd W(1, 2);
  W << 0.25, -1.5;
  Model m{Solver::s_ls_batch, LinearModel{W, cb, 0.5}, {"pos", "neg"}, {}};
  CHECK(text_of(m) ==
        "simplex-model 1\nsolver s-ls-batch\nclasses 2\nlambda 0.5\nkernel linear\nlabels 2\npos\nneg\n"
        "standardize 0\nform linear 1 2\n0.25 -1.5\nend\n");
}

TEST_CASE("malformed model files are parse errors with a line number") {
  const CodeBook cb(2);
  Model m{Solver::s_ls_batch, LinearModel{Eigen::MatrixXd::Ones(1, 2), cb, 0.5}, {"p", "n"}, {}};
  const std::string good = text_of(m);
  const auto expect_parse_error = [](const std::string& text, const std::string& needle) {
    std::istringstream in(text);
    try {
      load_model(in, "m");
      FAIL("accepted a malformed model");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::parse);
      CHECK(std::string(e.what()).find(needle) != std::string::npos);
    }
  };
  expect_parse_error("simplex-model 2\n", "m:1:");
  expect_parse_error(good.substr(0, good.size() - 4), "end of file");
  std::string wrong = good;
  wrong.replace(wrong.find("s-ls-batch"), 10, "s-ls-xxxxx");
  std::istringstream in(wrong);
  CHECK_THROWS_AS(load_model(in), Error);
  std::string bad_number = good;
  bad_number.replace(bad_number.find("1 1\nend"), 3, "1 q");
  expect_parse_error(bad_number, "m:11:");
  CHECK_THROWS_AS(load_model(std::string("/nonexistent/model.txt")), Error);
}

TEST_CASE("dimension mismatch at prediction time") {
  const CodeBook cb(3);
  Model m{Solver::s_ls_batch, LinearModel{Eigen::MatrixXd::Ones(2, 4), cb, 0.5}, {"a", "b", "c"}, {}};
  try {
    m.classify(Eigen::MatrixXd::Zero(3, 5));
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::dimension_mismatch);
  }
}

TEST_CASE("solver names") {
  for (auto s : {Solver::s_ls_batch, Solver::s_ls_online, Solver::sc_svm_batch, Solver::sh_svm_batch,
                 Solver::sc_svm_online, Solver::sh_svm_online}) {
    CHECK(parse_solver(to_string(s)) == s);
    CHECK(solver_for(loss_of(s), is_online(s)) == s);
  }
  CHECK_THROWS_AS(parse_solver("svm"), Error);
}
