#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "simplex/error.hpp"
#include "simplex/relaxation.hpp"

using namespace simplex;

namespace {

const LossKind kLosses[] = {LossKind::s_ls, LossKind::sc_svm, LossKind::sh_svm};

double direct_expected_loss(const FiniteDistribution& d, const Eigen::MatrixXd& codes, LossKind kind,
                            const Eigen::MatrixXd& f) {
  double s = 0.0;
  for (Eigen::Index x = 0; x < d.points(); ++x) {
    for (int y = 1; y <= d.classes(); ++y) {
      const Eigen::VectorXd v = f.row(x).transpose();
      const double v_loss = kind == LossKind::s_ls    ? oracle::s_ls(codes, y, v)
                            : kind == LossKind::sc_svm ? oracle::sc_svm(codes, y, v)
                                                       : oracle::sh_svm(codes, y, v);
      s += d.marginal(x) * d.conditionals(x, y - 1) * v_loss;
    }
  }
  return s;
}

}  // namespace

TEST_CASE("random distributions are valid") {
  std::mt19937_64 rng(1);
  for (int k = 0; k < 20; ++k) {
    const auto d = random_distribution(4, 1 + k % 6, rng);
    CHECK_NOTHROW(d.validate());
    CHECK(d.marginal.sum() == doctest::Approx(1.0));
    const auto n = near_deterministic_distribution(4, 5, 0.9, rng);
    CHECK_NOTHROW(n.validate());
    for (Eigen::Index x = 0; x < n.points(); ++x) CHECK(n.conditionals.row(x).maxCoeff() >= 0.9);
  }
  FiniteDistribution bad{Eigen::Vector2d(0.5, 0.6), Eigen::MatrixXd::Constant(2, 2, 0.5)};
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("Bayes rule and risk by enumeration") {
  FiniteDistribution d{Eigen::Vector3d(0.2, 0.5, 0.3), Eigen::MatrixXd(3, 3)};
  d.conditionals << 0.1, 0.7, 0.2,
                    0.5, 0.25, 0.25,
                    0.3, 0.3, 0.4;
  CHECK(bayes_rule(d) == std::vector<int>{2, 1, 3});
  CHECK(bayes_risk(d) == doctest::Approx(0.2 * 0.3 + 0.5 * 0.5 + 0.3 * 0.6));
  CHECK_FALSE(bayes_tied(d, 0));
  d.conditionals.row(2) << 0.4, 0.4, 0.2;
  CHECK(bayes_tied(d, 2));
}

TEST_CASE("expected loss and misclassification risk are exact finite sums") {
  std::mt19937_64 rng(2);
  for (int T : {2, 3, 5}) {
    const CodeBook cb(T);
    const auto d = random_distribution(T, 6, rng);
    const Eigen::MatrixXd f = oracle::random_matrix(6, T - 1, rng);
    for (auto kind : kLosses) {
      CHECK(expected_loss(d, cb, kind, f) == doctest::Approx(direct_expected_loss(d, cb.codes(), kind, f)).epsilon(1e-13));
    }
    double risk = 0.0;
    for (Eigen::Index x = 0; x < 6; ++x) risk += d.marginal(x) * (1.0 - d.conditionals(x, cb.decode(f.row(x).transpose()) - 1));
    CHECK(misclass_risk(d, cb, f) == doctest::Approx(risk).epsilon(1e-14));
  }
}

TEST_CASE("target functions") {
  std::mt19937_64 rng(3);
  const CodeBook cb(4);
  const auto d = random_distribution(4, 5, rng);
  const auto ls = target_function(d, cb, LossKind::s_ls);
  CHECK((ls.target - d.conditionals * cb.codes()).cwiseAbs().maxCoeff() <= 1e-14);
  const auto b = bayes_rule(d);
  for (auto kind : {LossKind::sc_svm, LossKind::sh_svm}) {
    const auto p = target_function(d, cb, kind);
    for (Eigen::Index x = 0; x < 5; ++x) CHECK(p.target.row(x).transpose() == cb.code(b[static_cast<size_t>(x)]));
  }
  CHECK(ls.constant == doctest::Approx(std::sqrt(2.0 * 3.0 / 4.0)));
  CHECK(ls.exponent == 0.5);
  CHECK(comparison_constant(LossKind::sc_svm, 4) == 3.0);
  CHECK(comparison_constant(LossKind::sh_svm, 7) == 6.0);
  CHECK(comparison_exponent(LossKind::sh_svm) == 1.0);
}

TEST_CASE("targets minimize the expected loss against brute-force samples") {
  std::mt19937_64 rng(4);
  for (int T : {2, 3, 5}) {
    const CodeBook cb(T);
    for (int k = 0; k < 10; ++k) {
      const auto d = random_distribution(T, 3, rng);
      for (auto kind : kLosses) {
        const double best = expected_loss(d, cb, kind, target_function(d, cb, kind).target);
        for (int s = 0; s < 50; ++s) {
          Eigen::MatrixXd f;
          if (kind == LossKind::sh_svm) {
            // convex combinations of codes
            f = Eigen::MatrixXd(3, T - 1);
            for (Eigen::Index x = 0; x < 3; ++x) {
              Eigen::VectorXd w = oracle::random_matrix(T, 1, rng).cwiseAbs();
              w /= w.sum();
              f.row(x) = w.transpose() * cb.codes();
            }
          } else {
            f = 2.0 * oracle::random_matrix(3, T - 1, rng);
          }
          CHECK(expected_loss(d, cb, kind, f) >= best - 1e-12);
        }
      }
    }
  }
}

TEST_CASE("Fisher consistency and comparison inequalities hold") {
  for (int T : {2, 3, 5}) {
    const CodeBook cb(T);
    std::mt19937_64 rng(10 + T);
    for (int k = 0; k < 30; ++k) {
      const auto d = random_distribution(T, 1 + k % 8, rng);
      for (auto kind : kLosses) {
        const auto f = check_fisher_consistency(d, cb, kind, k);
        CHECK(f.passed);
        CHECK(f.mismatches == 0);
        const auto c = check_comparison_inequality(d, cb, kind, 20, k);
        CHECK(c.passed);
        CHECK(c.samples == 20);
        CHECK(c.violations == 0);
        CHECK(c.minimizer_violations == 0);
        CHECK(c.max_ratio <= 1.0);
      }
    }
  }
}

TEST_CASE("tied points are skipped by the Fisher check") {
  const CodeBook cb(3);
  FiniteDistribution d{Eigen::Vector2d(0.5, 0.5), Eigen::MatrixXd(2, 3)};
  d.conditionals << 0.4, 0.4, 0.2,
                    0.1, 0.2, 0.7;
  const auto r = check_fisher_consistency(d, cb, LossKind::s_ls, 1);
  CHECK(r.skipped_ties == 1);
  CHECK(r.checked == 1);
  CHECK(r.passed);
}

TEST_CASE("noise margins equal the gap between the two largest conditionals") {
  std::mt19937_64 rng(5);
  for (int T : {2, 3, 6}) {
    const CodeBook cb(T);
    const auto d = random_distribution(T, 7, rng);
    const Eigen::VectorXd g = noise_margins(d, cb);
    for (Eigen::Index x = 0; x < 7; ++x) {
      Eigen::VectorXd row = d.conditionals.row(x).transpose();
      std::sort(row.data(), row.data() + row.size(), std::greater<>());
      CHECK(g(x) == doctest::Approx(row(0) - row(1)).epsilon(1e-12));
    }
  }
}

TEST_CASE("noise constant is the exact supremum over s") {
  const Eigen::Vector3d margins(0.1, 0.4, 0.8);
  const Eigen::Vector3d marginal(0.2, 0.3, 0.5);
  for (double q : {0.5, 1.0, 4.0}) {
    const double bq = noise_constant(margins, marginal, q);
    // closed form: max over breakpoints
    const double expected = std::max({0.2 / std::pow(0.1, q), 0.5 / std::pow(0.4, q), 1.0 / std::pow(0.8, q)});
    CHECK(bq == doctest::Approx(expected));
    // a fine grid never exceeds it
    for (int k = 1; k <= 10000; ++k) {
      const double s = k / 10000.0;
      double mass = 0.0;
      for (int j = 0; j < 3; ++j) {
        if (margins(j) <= s) mass += marginal(j);
      }
      CHECK(mass <= bq * std::pow(s, q) + 1e-12);
    }
  }
}

TEST_CASE("improved bound holds on near-deterministic distributions; zero margins are rejected") {
  std::mt19937_64 rng(6);
  const CodeBook cb(3);
  for (int k = 0; k < 20; ++k) {
    const auto d = near_deterministic_distribution(3, 4, 0.9, rng);
    for (double q : {0.5, 1.0, 4.0}) {
      const auto r = check_noise_improved_bound(d, cb, q, 20, k);
      CHECK_FALSE(r.rejected);
      CHECK(r.passed);
      CHECK(r.exponent > 0.5);
      CHECK(r.constant == doctest::Approx(std::pow(2.0 * std::sqrt(r.bq + 1.0), (2 * q + 2) / (q + 2))));
    }
  }
  FiniteDistribution tie{Eigen::Vector2d(0.5, 0.5), Eigen::MatrixXd(2, 3)};
  tie.conditionals << 0.4, 0.4, 0.2,
                      0.9, 0.05, 0.05;
  const auto r = check_noise_improved_bound(tie, cb, 1.0, 10, 1);
  CHECK(r.rejected);
  CHECK_FALSE(r.passed);
  CHECK_FALSE(r.diagnostic.empty());
}

TEST_CASE("f = f_rho gives zero on both sides") {
  std::mt19937_64 rng(7);
  const CodeBook cb(3);
  const auto d = random_distribution(3, 4, rng);
  for (auto kind : kLosses) {
    const auto p = target_function(d, cb, kind);
    CHECK(misclass_risk(d, cb, p.target) == doctest::Approx(bayes_risk(d)));
  }
}
