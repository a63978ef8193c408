#include "simplex/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>
#include <vector>

#include "simplex/error.hpp"

namespace simplex {

void KernelSpec::validate() const {
  if (kind == KernelKind::rbf) {
    require(std::isfinite(sigma) && sigma > 0.0, ErrorCode::invalid_argument,
            "rbf bandwidth must be positive and finite");
  }
}

std::string KernelSpec::describe() const {
  if (kind == KernelKind::linear) return "linear";
  std::ostringstream os;
  os.precision(17);
  os << "rbf " << sigma;
  return os.str();
}

void check_finite(const Eigen::Ref<const Eigen::MatrixXd>& m, const char* what) {
  require(m.allFinite(), ErrorCode::invalid_data, std::string(what) + " contains non-finite values");
}

namespace {

double squared_distance(const Eigen::Ref<const Eigen::MatrixXd>& a, Eigen::Index i,
                        const Eigen::Ref<const Eigen::MatrixXd>& b, Eigen::Index j) {
  return (a.row(i) - b.row(j)).squaredNorm();
}

}  // namespace

double kernel_value(const KernelSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& x,
                    const Eigen::Ref<const Eigen::VectorXd>& z) {
  require(x.size() == z.size(), ErrorCode::dimension_mismatch, "kernel arguments differ in size");
  if (spec.kind == KernelKind::linear) return x.dot(z);
  return std::exp(-(x - z).squaredNorm() / (2.0 * spec.sigma * spec.sigma));
}

GramMatrix gram(const KernelSpec& spec, const Eigen::Ref<const Eigen::MatrixXd>& features) {
  spec.validate();
  require(features.rows() >= 1 && features.cols() >= 1, ErrorCode::invalid_argument,
          "gram needs a non-empty feature matrix");
  check_finite(features, "feature matrix");
  const Eigen::Index n = features.rows();
  GramMatrix g{Eigen::MatrixXd(n, n), spec};
  if (spec.kind == KernelKind::linear) {
    g.values.noalias() = features * features.transpose();
    // GEMM does not guarantee bitwise symmetry.
    g.values = 0.5 * (g.values + g.values.transpose()).eval();
    return g;
  }
  const double scale = -1.0 / (2.0 * spec.sigma * spec.sigma);
  for (Eigen::Index j = 0; j < n; ++j) {
    g.values(j, j) = 1.0;
    for (Eigen::Index i = j + 1; i < n; ++i) {
      const double v = std::exp(scale * squared_distance(features, i, features, j));
      g.values(i, j) = v;
      g.values(j, i) = v;
    }
  }
  return g;
}

Eigen::MatrixXd cross_gram(const KernelSpec& spec, const Eigen::Ref<const Eigen::MatrixXd>& train,
                           const Eigen::Ref<const Eigen::MatrixXd>& test) {
  spec.validate();
  require(train.cols() == test.cols(), ErrorCode::dimension_mismatch,
          "cross_gram: training inputs have " + std::to_string(train.cols()) +
              " features, test inputs " + std::to_string(test.cols()));
  check_finite(test, "test feature matrix");
  if (spec.kind == KernelKind::linear) {
    return test * train.transpose();
  }
  const double scale = -1.0 / (2.0 * spec.sigma * spec.sigma);
  Eigen::MatrixXd out(test.rows(), train.rows());
  for (Eigen::Index j = 0; j < train.rows(); ++j) {
    for (Eigen::Index i = 0; i < test.rows(); ++i) {
      out(i, j) = std::exp(scale * squared_distance(test, i, train, j));
    }
  }
  return out;
}

double rbf_sigma_heuristic(const Eigen::Ref<const Eigen::MatrixXd>& features, std::uint64_t seed) {
  require(features.rows() >= 2, ErrorCode::invalid_argument,
          "sigma heuristic needs at least two points");
  check_finite(features, "feature matrix");

  std::vector<Eigen::Index> rows(static_cast<size_t>(features.rows()));
  std::iota(rows.begin(), rows.end(), Eigen::Index{0});
  if (features.rows() > kSigmaHeuristicMaxPoints) {
    std::mt19937_64 rng(seed);
    std::shuffle(rows.begin(), rows.end(), rng);
    rows.resize(static_cast<size_t>(kSigmaHeuristicMaxPoints));
    std::sort(rows.begin(), rows.end());
  }

  std::vector<double> distances;
  distances.reserve(rows.size() * (rows.size() - 1) / 2);
  for (size_t a = 0; a < rows.size(); ++a) {
    for (size_t b = a + 1; b < rows.size(); ++b) {
      const double d2 = squared_distance(features, rows[a], features, rows[b]);
      if (d2 > 0.0) distances.push_back(std::sqrt(d2));
    }
  }
  require(!distances.empty(), ErrorCode::degenerate_data,
          "sigma heuristic: all points are identical");

  const auto m = distances.size();
  const auto k = static_cast<size_t>(std::ceil(0.25 * static_cast<double>(m))) - 1;
  std::nth_element(distances.begin(), distances.begin() + static_cast<std::ptrdiff_t>(k),
                   distances.end());
  return distances[k];
}

}  // namespace simplex
