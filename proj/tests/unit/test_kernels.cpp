#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "oracles.hpp"
#include "simplex/error.hpp"
#include "simplex/kernels.hpp"

using namespace simplex;

TEST_CASE("gram matrices match the naive double loop") {
  std::mt19937_64 rng(11);
  const Eigen::MatrixXd X = oracle::random_matrix(25, 4, rng);
  CHECK((gram(KernelSpec::linear(), X).values - oracle::naive_gram(X, false, 1.0)).cwiseAbs().maxCoeff() <= 1e-12);
  for (double sigma : {0.3, 1.0, 4.0}) {
    const auto K = gram(KernelSpec::rbf(sigma), X).values;
    CHECK((K - oracle::naive_gram(X, true, sigma)).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((K - K.transpose()).cwiseAbs().maxCoeff() == 0.0);
    CHECK((K.diagonal().array() == 1.0).all());
  }
}

TEST_CASE("rbf gram is positive semidefinite") {
  std::mt19937_64 rng(3);
  const Eigen::MatrixXd X = oracle::random_matrix(40, 3, rng);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram(KernelSpec::rbf(1.0), X).values);
  CHECK(es.eigenvalues().minCoeff() >= -1e-10);
}

TEST_CASE("kernel values and cross gram") {
  const Eigen::Vector2d x(1.0, 2.0), z(3.0, -1.0);
  CHECK(kernel_value(KernelSpec::linear(), x, z) == doctest::Approx(1.0));
  CHECK(kernel_value(KernelSpec::rbf(2.0), x, z) == doctest::Approx(std::exp(-13.0 / 8.0)));
  CHECK(kernel_value(KernelSpec::rbf(0.5), x, x) == 1.0);

  std::mt19937_64 rng(5);
  const Eigen::MatrixXd train = oracle::random_matrix(6, 3, rng), test = oracle::random_matrix(4, 3, rng);
  const Eigen::MatrixXd cross = cross_gram(KernelSpec::rbf(1.5), train, test);
  REQUIRE(cross.rows() == 4);
  REQUIRE(cross.cols() == 6);
  for (Eigen::Index i = 0; i < 4; ++i) {
    for (Eigen::Index j = 0; j < 6; ++j) {
      CHECK(cross(i, j) == doctest::Approx(kernel_value(KernelSpec::rbf(1.5), test.row(i), train.row(j))));
    }
  }
  CHECK_THROWS_AS(cross_gram(KernelSpec::linear(), train, Eigen::MatrixXd::Zero(2, 2)), Error);
}

TEST_CASE("sigma heuristic is the 25th percentile of distinct-pair distances") {
  // Four points on a line: distances 1,2,3,1,2,1 -> sorted 1,1,1,2,2,3, m = 6,
  // index ceil(1.5) - 1 = 1.
  Eigen::MatrixXd X(4, 1);
  X << 0, 1, 2, 3;
  CHECK(rbf_sigma_heuristic(X) == 1.0);

  // Duplicates are not distinct pairs.
  Eigen::MatrixXd D(4, 1);
  D << 0, 0, 10, 20;
  // distinct-point distances: 10,20,10,20,10 -> sorted 10,10,10,20,20; index ceil(1.25)-1 = 1.
  CHECK(rbf_sigma_heuristic(D) == 10.0);

  std::mt19937_64 rng(9);
  const Eigen::MatrixXd R = oracle::random_matrix(30, 2, rng);
  std::vector<double> d;
  for (Eigen::Index i = 0; i < R.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < R.rows(); ++j) d.push_back((R.row(i) - R.row(j)).norm());
  }
  std::sort(d.begin(), d.end());
  const auto k = static_cast<size_t>(std::ceil(0.25 * static_cast<double>(d.size()))) - 1;
  CHECK(rbf_sigma_heuristic(R) == doctest::Approx(d[k]).epsilon(1e-14));
}

TEST_CASE("sigma heuristic subsamples large inputs deterministically") {
  std::mt19937_64 rng(1);
  const Eigen::MatrixXd X = oracle::random_matrix(kSigmaHeuristicMaxPoints + 200, 2, rng);
  const double a = rbf_sigma_heuristic(X, 42);
  CHECK(a == rbf_sigma_heuristic(X, 42));
  CHECK(a > 0.0);
}

TEST_CASE("degenerate and invalid kernel inputs") {
  CHECK_THROWS_AS(rbf_sigma_heuristic(Eigen::MatrixXd::Ones(5, 2)), Error);
  CHECK_THROWS_AS(rbf_sigma_heuristic(Eigen::MatrixXd::Ones(1, 2)), Error);
  CHECK_THROWS_AS(KernelSpec::rbf(0.0).validate(), Error);
  CHECK_THROWS_AS(KernelSpec::rbf(-1.0).validate(), Error);
  Eigen::MatrixXd bad = Eigen::MatrixXd::Zero(3, 2);
  bad(1, 1) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(gram(KernelSpec::linear(), bad), Error);
  CHECK(KernelSpec::linear().describe() == "linear");
  CHECK(KernelSpec::rbf(0.5).describe().rfind("rbf 0.5", 0) == 0);
}
