// Reference implementations used only by the tests. They avoid the library's
// code paths on purpose: different constructions, dense brute-force solves and
// plain projected gradient instead of coordinate ascent.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

// Simplex vertices built by centring the standard basis of R^T and expressing
// it in an orthonormal basis of the sum-zero hyperplane (via QR).
inline Eigen::MatrixXd simplex_codes(int T) {
  const Eigen::MatrixXd centred =
      Eigen::MatrixXd::Identity(T, T) - Eigen::MatrixXd::Constant(T, T, 1.0 / T);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(centred);
  const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(T, T - 1);
  Eigen::MatrixXd codes = centred * q;  // T x (T-1)
  for (int y = 0; y < T; ++y) codes.row(y).normalize();
  return codes;
}

inline Eigen::MatrixXd naive_gram(const Eigen::MatrixXd& X, bool rbf, double sigma) {
  const Eigen::Index n = X.rows();
  Eigen::MatrixXd K(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      double v = 0.0;
      if (rbf) {
        double d2 = 0.0;
        for (Eigen::Index k = 0; k < X.cols(); ++k) d2 += (X(i, k) - X(j, k)) * (X(i, k) - X(j, k));
        v = std::exp(-d2 / (2.0 * sigma * sigma));
      } else {
        for (Eigen::Index k = 0; k < X.cols(); ++k) v += X(i, k) * X(j, k);
      }
      K(i, j) = v;
    }
  }
  return K;
}

inline Eigen::MatrixXd label_matrix(const Eigen::MatrixXd& codes, std::span<const int> labels) {
  Eigen::MatrixXd Y(static_cast<Eigen::Index>(labels.size()), codes.cols());
  for (size_t i = 0; i < labels.size(); ++i) Y.row(static_cast<Eigen::Index>(i)) = codes.row(labels[i] - 1);
  return Y;
}

inline int decode(const Eigen::MatrixXd& codes, const Eigen::VectorXd& v) {
  int best = 1;
  double score = -1e300;
  for (int y = 1; y <= codes.rows(); ++y) {
    const double s = codes.row(y - 1).dot(v);
    if (s > score) {
      score = s;
      best = y;
    }
  }
  return best;
}

// Held-out predictions by actually dropping each point and re-solving with a
// dense LU. The ridge `absolute_ridge` is added to the reduced Gram matrix.
inline Eigen::MatrixXd retrain_loo(const Eigen::MatrixXd& K, const Eigen::MatrixXd& Y, double absolute_ridge) {
  const Eigen::Index n = K.rows();
  Eigen::MatrixXd out(n, Y.cols());
  for (Eigen::Index i = 0; i < n; ++i) {
    std::vector<Eigen::Index> keep;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j != i) keep.push_back(j);
    }
    const auto m = static_cast<Eigen::Index>(keep.size());
    Eigen::MatrixXd Kr(m, m), Yr(m, Y.cols());
    Eigen::RowVectorXd kr(m);
    for (Eigen::Index a = 0; a < m; ++a) {
      Yr.row(a) = Y.row(keep[a]);
      kr(a) = K(i, keep[a]);
      for (Eigen::Index b = 0; b < m; ++b) Kr(a, b) = K(keep[a], keep[b]);
    }
    Kr.diagonal().array() += absolute_ridge;
    const Eigen::MatrixXd A = Kr.fullPivLu().solve(Yr);
    out.row(i) = kr * A;
  }
  return out;
}

// Box-constrained concave QP  max b'a - a'Qa/2, 0 <= a <= ub, by projected
// gradient ascent with step 1/L. Returns the final iterate.
inline Eigen::VectorXd projected_gradient(const Eigen::MatrixXd& Q, const Eigen::VectorXd& b, double ub,
                                          long iterations) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Q, Eigen::EigenvaluesOnly);
  const double L = std::max(es.eigenvalues().maxCoeff(), 1e-12);
  Eigen::VectorXd a = Eigen::VectorXd::Zero(b.size());
  for (long it = 0; it < iterations; ++it) {
    a = (a + (b - Q * a) / L).cwiseMax(0.0).cwiseMin(ub);
  }
  return a;
}

inline double qp_objective(const Eigen::MatrixXd& Q, const Eigen::VectorXd& b, const Eigen::VectorXd& a) {
  return b.dot(a) - 0.5 * a.dot(Q * a);
}

struct DualProblem {
  Eigen::MatrixXd Q;
  Eigen::VectorXd b;
  double ub;
};

// SC-SVM dual written out over the (i, y != y_i) pairs.
inline DualProblem sc_dual(const Eigen::MatrixXd& K, std::span<const int> labels, const Eigen::MatrixXd& codes,
                           double lambda) {
  const int T = static_cast<int>(codes.rows());
  std::vector<std::pair<Eigen::Index, int>> vars;
  for (size_t i = 0; i < labels.size(); ++i) {
    for (int y = 1; y <= T; ++y) {
      if (y != labels[i]) vars.emplace_back(static_cast<Eigen::Index>(i), y);
    }
  }
  const auto m = static_cast<Eigen::Index>(vars.size());
  DualProblem p{Eigen::MatrixXd(m, m), Eigen::VectorXd::Constant(m, 1.0 / (T - 1)),
                1.0 / (2.0 * static_cast<double>(labels.size()) * lambda)};
  for (Eigen::Index u = 0; u < m; ++u) {
    for (Eigen::Index v = 0; v < m; ++v) {
      p.Q(u, v) = K(vars[u].first, vars[v].first) * codes.row(vars[u].second - 1).dot(codes.row(vars[v].second - 1));
    }
  }
  return p;
}

inline DualProblem sh_dual(const Eigen::MatrixXd& K, std::span<const int> labels, const Eigen::MatrixXd& codes,
                           double lambda) {
  const auto n = static_cast<Eigen::Index>(labels.size());
  DualProblem p{Eigen::MatrixXd(n, n), Eigen::VectorXd::Ones(n), 1.0 / (2.0 * static_cast<double>(n) * lambda)};
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      p.Q(i, j) = K(i, j) * codes.row(labels[i] - 1).dot(codes.row(labels[j] - 1));
    }
  }
  return p;
}

// Losses written directly from their definitions.
inline double s_ls(const Eigen::MatrixXd& codes, int y, const Eigen::VectorXd& v) {
  return (codes.row(y - 1).transpose() - v).squaredNorm();
}

inline double sc_svm(const Eigen::MatrixXd& codes, int y, const Eigen::VectorXd& v) {
  const int T = static_cast<int>(codes.rows());
  double s = 0.0;
  for (int k = 1; k <= T; ++k) {
    if (k != y) s += std::max(1.0 / (T - 1) + codes.row(k - 1).dot(v), 0.0);
  }
  return s;
}

inline double sh_svm(const Eigen::MatrixXd& codes, int y, const Eigen::VectorXd& v) {
  return std::max(1.0 - codes.row(y - 1).dot(v), 0.0);
}

// Central finite-difference gradient of a scalar function of a vector.
inline Eigen::VectorXd fd_gradient(const std::function<double(const Eigen::VectorXd&)>& f, const Eigen::VectorXd& x,
                                   double h = 1e-6) {
  Eigen::VectorXd g(x.size());
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    Eigen::VectorXd a = x, b = x;
    a(k) += h;
    b(k) -= h;
    g(k) = (f(a) - f(b)) / (2.0 * h);
  }
  return g;
}

// Gaussian blobs around the vertices of a regular polygon centred at the
// origin, so that classes are separable by linear maps without a bias.
struct Blobs {
  Eigen::MatrixXd X;
  std::vector<int> y;
};

inline Blobs blobs(int T, Eigen::Index per_class, Eigen::Index dim, double radius, double spread, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, spread);
  const Eigen::MatrixXd centres = radius * simplex_codes(T);
  Blobs b{Eigen::MatrixXd::Zero(T * per_class, dim), {}};
  for (int k = 0; k < T; ++k) {
    for (Eigen::Index i = 0; i < per_class; ++i) {
      const Eigen::Index r = k * per_class + i;
      for (Eigen::Index j = 0; j < dim; ++j) {
        b.X(r, j) = (j < T - 1 ? centres(k, j) : 0.0) + noise(rng);
      }
      b.y.push_back(k + 1);
    }
  }
  std::vector<Eigen::Index> order(b.y.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<Eigen::Index>(i);
  std::shuffle(order.begin(), order.end(), rng);
  Blobs shuffled{Eigen::MatrixXd(b.X.rows(), dim), {}};
  for (size_t i = 0; i < order.size(); ++i) {
    shuffled.X.row(static_cast<Eigen::Index>(i)) = b.X.row(order[i]);
    shuffled.y.push_back(b.y[static_cast<size_t>(order[i])]);
  }
  return shuffled;
}

inline std::vector<int> random_labels(Eigen::Index n, int T, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> pick(1, T);
  std::vector<int> y(static_cast<size_t>(n));
  // Every class present at least once when n >= T.
  for (size_t i = 0; i < y.size(); ++i) y[i] = i < static_cast<size_t>(T) ? static_cast<int>(i) + 1 : pick(rng);
  std::shuffle(y.begin(), y.end(), rng);
  return y;
}

inline Eigen::MatrixXd random_matrix(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = g(rng);
  }
  return m;
}

}  // namespace oracle
