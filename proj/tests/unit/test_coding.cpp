#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "simplex/coding.hpp"
#include "simplex/error.hpp"

using namespace simplex;

TEST_CASE("code book geometry for T = 2..64") {
  for (int T = 2; T <= 64; ++T) {
    const CodeBook cb(T);
    const auto& C = cb.codes();
    REQUIRE(C.rows() == T);
    REQUIRE(C.cols() == T - 1);
    for (int i = 0; i < T; ++i) CHECK(C.row(i).norm() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(C.colwise().sum().norm() <= 1e-12 * T);
    for (int i = 0; i < T; ++i) {
      for (int j = 0; j < T; ++j) {
        if (i != j) CHECK(std::abs(C.row(i).dot(C.row(j)) + 1.0 / (T - 1)) <= 1e-12);
      }
    }
  }
}

TEST_CASE("code book agrees with an independent construction up to rotation") {
  for (int T : {2, 3, 4, 7, 16}) {
    const CodeBook cb(T);
    const Eigen::MatrixXd other = oracle::simplex_codes(T);
    CHECK((cb.gram() - other * other.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("small code books") {
  const CodeBook two(2);
  CHECK(two.code(1)(0) == 1.0);
  CHECK(two.code(2)(0) == -1.0);
  const CodeBook three(3);
  CHECK(three.off_diagonal() == doctest::Approx(-0.5));
  CHECK(three.code(1).isApprox(Eigen::Vector2d(1.0, 0.0)));
}

TEST_CASE("decode returns the code's own label and breaks ties low") {
  for (int T : {2, 3, 5, 10}) {
    const CodeBook cb(T);
    for (int y = 1; y <= T; ++y) CHECK(cb.decode(cb.code(y)) == y);
    CHECK(cb.decode(Eigen::VectorXd::Zero(T - 1)) == 1);
  }
}

TEST_CASE("decode matches nearest code vector") {
  std::mt19937_64 rng(7);
  for (int T : {3, 6}) {
    const CodeBook cb(T);
    const Eigen::MatrixXd V = oracle::random_matrix(200, T - 1, rng);
    const auto batch = cb.decode_batch(V);
    for (Eigen::Index i = 0; i < V.rows(); ++i) {
      int nearest = 1;
      double best = 1e300;
      for (int y = 1; y <= T; ++y) {
        const double d = (cb.code(y) - V.row(i).transpose()).squaredNorm();
        if (d < best) {
          best = d;
          nearest = y;
        }
      }
      CHECK(batch[static_cast<size_t>(i)] == nearest);
    }
  }
}

TEST_CASE("encode stacks codes; bad labels are rejected") {
  const CodeBook cb(4);
  const std::vector<int> labels{2, 4, 1};
  const Eigen::MatrixXd Y = cb.encode(labels);
  for (size_t i = 0; i < labels.size(); ++i) CHECK(Y.row(static_cast<Eigen::Index>(i)).transpose() == cb.code(labels[i]));
  CHECK_THROWS_AS(cb.code(0), Error);
  CHECK_THROWS_AS(cb.code(5), Error);
  CHECK_THROWS_AS(CodeBook(1), Error);
  CHECK_THROWS_AS(cb.decode(Eigen::VectorXd::Zero(2)), Error);
  CHECK(cb.decode_batch(Eigen::MatrixXd(0, 3)).empty());
}
