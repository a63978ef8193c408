#include "simplex/relaxation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "simplex/error.hpp"

namespace simplex {

namespace {

constexpr double kTieTolerance = 1e-12;
constexpr double kInequalitySlack = 1e-12;
constexpr double kZeroMargin = 1e-12;  // margins below this count as ties

Eigen::VectorXd dirichlet(Eigen::Index size, std::mt19937_64& rng) {
  std::gamma_distribution<double> gamma(1.0, 1.0);
  Eigen::VectorXd w(size);
  for (Eigen::Index k = 0; k < size; ++k) w(k) = gamma(rng);
  const double total = w.sum();
  if (total <= 0.0) return Eigen::VectorXd::Constant(size, 1.0 / static_cast<double>(size));
  return w / total;
}

Eigen::VectorXd uniform_in_ball(Eigen::Index dim, double radius, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unit;
  Eigen::VectorXd v(dim);
  do {
    for (Eigen::Index k = 0; k < dim; ++k) v(k) = normal(rng);
  } while (v.norm() == 0.0);
  const double r = radius * std::pow(unit(rng), 1.0 / static_cast<double>(dim));
  return v.normalized() * r;
}

Eigen::VectorXd hull_point(const CodeBook& codebook, std::mt19937_64& rng) {
  return codebook.codes().transpose() * dirichlet(codebook.classes(), rng);
}

void check_function_shape(const FiniteDistribution& dist, const CodeBook& codebook,
                          const Eigen::Ref<const Eigen::MatrixXd>& f) {
  require(dist.classes() == codebook.classes(), ErrorCode::dimension_mismatch,
          "distribution and code book disagree on the class count");
  require(f.rows() == dist.points() && f.cols() == codebook.dim(), ErrorCode::dimension_mismatch,
          "function values must be " + std::to_string(dist.points()) + " x " +
              std::to_string(codebook.dim()));
}

// One sampled f: either global or a perturbation of the target, as documented
// on check_comparison_inequality.
Eigen::MatrixXd sample_function(const TargetProfile& profile, const CodeBook& codebook, bool local,
                                double radius, std::mt19937_64& rng) {
  const Eigen::Index m = profile.target.rows();
  const Eigen::Index dim = codebook.dim();
  std::uniform_real_distribution<double> exponent(-3.0, 0.0);
  Eigen::MatrixXd f(m, dim);
  if (profile.kind == LossKind::sh_svm) {
    const double t = local ? std::pow(10.0, exponent(rng)) : 1.0;
    for (Eigen::Index x = 0; x < m; ++x) {
      f.row(x) = (1.0 - t) * profile.target.row(x) + t * hull_point(codebook, rng).transpose();
    }
    return f;
  }
  if (local) {
    const double scale = std::pow(10.0, exponent(rng));
    for (Eigen::Index x = 0; x < m; ++x) {
      f.row(x) = profile.target.row(x) + scale * uniform_in_ball(dim, 1.0, rng).transpose();
    }
    return f;
  }
  for (Eigen::Index x = 0; x < m; ++x) f.row(x) = uniform_in_ball(dim, radius, rng).transpose();
  return f;
}

}  // namespace

void FiniteDistribution::validate() const {
  require(points() >= 1, ErrorCode::invalid_argument, "distribution has no points");
  require(conditionals.rows() == points(), ErrorCode::dimension_mismatch,
          "conditional matrix must have one row per point");
  require(classes() >= 2, ErrorCode::invalid_argument, "distribution needs at least 2 classes");
  require(marginal.allFinite() && conditionals.allFinite(), ErrorCode::invalid_data,
          "distribution has non-finite entries");
  require((marginal.array() >= 0.0).all() && (conditionals.array() >= 0.0).all(),
          ErrorCode::invalid_data, "distribution has negative entries");
  require(std::abs(marginal.sum() - 1.0) <= 1e-12, ErrorCode::invalid_data,
          "marginal weights do not sum to 1");
  for (Eigen::Index x = 0; x < points(); ++x) {
    require(std::abs(conditionals.row(x).sum() - 1.0) <= 1e-12, ErrorCode::invalid_data,
            "conditional row " + std::to_string(x) + " does not sum to 1");
  }
}

FiniteDistribution random_distribution(int classes, Eigen::Index points, std::mt19937_64& rng) {
  require(classes >= 2 && points >= 1, ErrorCode::invalid_argument, "bad distribution size");
  FiniteDistribution dist;
  dist.marginal = dirichlet(points, rng);
  dist.conditionals.resize(points, classes);
  for (Eigen::Index x = 0; x < points; ++x) dist.conditionals.row(x) = dirichlet(classes, rng).transpose();
  return dist;
}

FiniteDistribution near_deterministic_distribution(int classes, Eigen::Index points, double min_top,
                                                   std::mt19937_64& rng) {
  require(classes >= 2 && points >= 1, ErrorCode::invalid_argument, "bad distribution size");
  require(min_top > 0.5 && min_top < 1.0, ErrorCode::invalid_argument, "min_top must lie in (0.5, 1)");
  std::uniform_real_distribution<double> top(min_top, 1.0);
  std::uniform_int_distribution<int> label(0, classes - 1);
  FiniteDistribution dist;
  dist.marginal = dirichlet(points, rng);
  dist.conditionals.resize(points, classes);
  for (Eigen::Index x = 0; x < points; ++x) {
    const double mass = top(rng);
    const int winner = label(rng);
    const Eigen::VectorXd rest = dirichlet(classes - 1, rng) * (1.0 - mass);
    for (int y = 0, k = 0; y < classes; ++y) {
      dist.conditionals(x, y) = y == winner ? mass : rest(k++);
    }
  }
  return dist;
}

std::vector<int> bayes_rule(const FiniteDistribution& dist) {
  std::vector<int> rule(static_cast<size_t>(dist.points()));
  for (Eigen::Index x = 0; x < dist.points(); ++x) {
    Eigen::Index best = 0;
    for (Eigen::Index y = 1; y < dist.conditionals.cols(); ++y) {
      if (dist.conditionals(x, y) > dist.conditionals(x, best)) best = y;
    }
    rule[static_cast<size_t>(x)] = static_cast<int>(best) + 1;
  }
  return rule;
}

double bayes_risk(const FiniteDistribution& dist) {
  double risk = 0.0;
  for (Eigen::Index x = 0; x < dist.points(); ++x) {
    risk += dist.marginal(x) * (1.0 - dist.conditionals.row(x).maxCoeff());
  }
  return risk;
}

bool bayes_tied(const FiniteDistribution& dist, Eigen::Index point) {
  double first = -1.0;
  double second = -1.0;
  for (Eigen::Index y = 0; y < dist.conditionals.cols(); ++y) {
    const double p = dist.conditionals(point, y);
    if (p > first) {
      second = first;
      first = p;
    } else if (p > second) {
      second = p;
    }
  }
  return first - second <= kTieTolerance;
}

double misclass_risk(const FiniteDistribution& dist, const CodeBook& codebook,
                     const Eigen::Ref<const Eigen::MatrixXd>& f) {
  check_function_shape(dist, codebook, f);
  double risk = 0.0;
  for (Eigen::Index x = 0; x < dist.points(); ++x) {
    const int label = codebook.decode(f.row(x).transpose());
    risk += dist.marginal(x) * (1.0 - dist.conditionals(x, label - 1));
  }
  return risk;
}

double expected_loss(const FiniteDistribution& dist, const CodeBook& codebook, LossKind kind,
                     const Eigen::Ref<const Eigen::MatrixXd>& f) {
  check_function_shape(dist, codebook, f);
  double total = 0.0;
  for (Eigen::Index x = 0; x < dist.points(); ++x) {
    double inner = 0.0;
    for (int y = 1; y <= codebook.classes(); ++y) {
      const double p = dist.conditionals(x, y - 1);
      if (p != 0.0) inner += p * loss_value(kind, codebook, y, f.row(x).transpose());
    }
    total += dist.marginal(x) * inner;
  }
  return total;
}

double comparison_constant(LossKind kind, int classes) {
  const double t = static_cast<double>(classes);
  if (kind == LossKind::s_ls) return std::sqrt(2.0 * (t - 1.0) / t);
  return t - 1.0;
}

double comparison_exponent(LossKind kind) { return kind == LossKind::s_ls ? 0.5 : 1.0; }

TargetProfile target_function(const FiniteDistribution& dist, const CodeBook& codebook, LossKind kind) {
  dist.validate();
  require(dist.classes() == codebook.classes(), ErrorCode::dimension_mismatch,
          "distribution and code book disagree on the class count");
  TargetProfile profile{kind, Eigen::MatrixXd(dist.points(), codebook.dim()),
                        comparison_constant(kind, codebook.classes()), comparison_exponent(kind)};
  if (kind == LossKind::s_ls) {
    profile.target = dist.conditionals * codebook.codes();
  } else {
    const auto rule = bayes_rule(dist);
    for (Eigen::Index x = 0; x < dist.points(); ++x) {
      profile.target.row(x) = codebook.codes().row(rule[static_cast<size_t>(x)] - 1);
    }
  }
  return profile;
}

FisherReport check_fisher_consistency(const FiniteDistribution& dist, const CodeBook& codebook,
                                      LossKind kind, std::uint64_t seed) {
  constexpr int kDirections = 20;
  constexpr double kStep = 1e-4;
  constexpr double kAllowedDecrease = 1e-10;

  const TargetProfile profile = target_function(dist, codebook, kind);
  const auto rule = bayes_rule(dist);
  FisherReport report;
  for (Eigen::Index x = 0; x < dist.points(); ++x) {
    if (bayes_tied(dist, x)) {
      ++report.skipped_ties;
      continue;
    }
    ++report.checked;
    if (codebook.decode(profile.target.row(x).transpose()) != rule[static_cast<size_t>(x)]) {
      ++report.mismatches;
    }
  }

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  const double base = expected_loss(dist, codebook, kind, profile.target);
  for (int d = 0; d < kDirections; ++d) {
    Eigen::MatrixXd moved(profile.target.rows(), profile.target.cols());
    if (kind == LossKind::sh_svm) {
      // Feasible directions point from the target towards other hull points.
      for (Eigen::Index x = 0; x < moved.rows(); ++x) {
        const Eigen::RowVectorXd toward = hull_point(codebook, rng).transpose();
        moved.row(x) = profile.target.row(x) + kStep * (toward - profile.target.row(x));
      }
    } else {
      Eigen::MatrixXd direction(profile.target.rows(), profile.target.cols());
      for (Eigen::Index k = 0; k < direction.size(); ++k) direction(k) = normal(rng);
      moved = profile.target + kStep * direction / direction.norm();
    }
    const double change = expected_loss(dist, codebook, kind, moved) - base;
    report.worst_decrease = std::min(report.worst_decrease, change);
  }
  report.passed = report.mismatches == 0 && report.worst_decrease >= -kAllowedDecrease;
  return report;
}

ComparisonReport check_comparison_inequality(const FiniteDistribution& dist, const CodeBook& codebook,
                                             LossKind kind, size_t trials, std::uint64_t seed,
                                             double radius) {
  require(trials >= 1, ErrorCode::invalid_argument, "trials must be >= 1");
  const TargetProfile profile = target_function(dist, codebook, kind);
  const double target_risk = misclass_risk(dist, codebook, profile.target);
  const double target_loss = expected_loss(dist, codebook, kind, profile.target);

  std::mt19937_64 rng(seed);
  ComparisonReport report;
  for (size_t s = 0; s < trials; ++s) {
    const Eigen::MatrixXd f = sample_function(profile, codebook, s % 2 == 1, radius, rng);
    const double lhs = misclass_risk(dist, codebook, f) - target_risk;
    const double excess = expected_loss(dist, codebook, kind, f) - target_loss;
    if (excess < -kInequalitySlack) ++report.minimizer_violations;
    const double rhs = profile.constant * std::pow(std::max(excess, 0.0), profile.exponent);
    ++report.samples;
    if (lhs > rhs + kInequalitySlack) ++report.violations;
    if (lhs > 0.0) {
      const double ratio = rhs > 0.0 ? lhs / rhs : std::numeric_limits<double>::infinity();
      report.max_ratio = std::max(report.max_ratio, ratio);
    }
  }
  report.passed = report.violations == 0 && report.minimizer_violations == 0;
  return report;
}

Eigen::VectorXd noise_margins(const FiniteDistribution& dist, const CodeBook& codebook) {
  const TargetProfile profile = target_function(dist, codebook, LossKind::s_ls);
  const double t = static_cast<double>(codebook.classes());
  Eigen::VectorXd margins(dist.points());
  for (Eigen::Index x = 0; x < dist.points(); ++x) {
    const Eigen::VectorXd fx = profile.target.row(x).transpose();
    const int decoded = codebook.decode(fx);
    const Eigen::VectorXd winner = codebook.codes().row(decoded - 1).transpose();
    double smallest = std::numeric_limits<double>::infinity();
    for (int j = 1; j <= codebook.classes(); ++j) {
      if (j == decoded) continue;
      const double gap = (t - 1.0) / t * (winner - codebook.codes().row(j - 1).transpose()).dot(fx);
      smallest = std::min(smallest, gap);
    }
    margins(x) = smallest;
  }
  return margins;
}

double noise_constant(const Eigen::Ref<const Eigen::VectorXd>& margins,
                      const Eigen::Ref<const Eigen::VectorXd>& marginal, double q) {
  require(q > 0.0, ErrorCode::invalid_argument, "noise exponent q must be positive");
  require(margins.size() == marginal.size(), ErrorCode::dimension_mismatch,
          "margins and marginal differ in size");
  double bq = 0.0;
  for (Eigen::Index k = 0; k < margins.size(); ++k) {
    const double s = margins(k);
    if (marginal(k) == 0.0 || s > 1.0) continue;
    require(s > kZeroMargin, ErrorCode::degenerate_data,
            "a point with zero noise margin carries mass; no finite B_q exists");
    double mass = 0.0;
    for (Eigen::Index j = 0; j < margins.size(); ++j) {
      if (margins(j) >= 0.0 && margins(j) <= s) mass += marginal(j);
    }
    bq = std::max(bq, mass / std::pow(s, q));
  }
  return bq;
}

NoiseReport check_noise_improved_bound(const FiniteDistribution& dist, const CodeBook& codebook, double q,
                                       size_t trials, std::uint64_t seed, double radius) {
  require(q > 0.0, ErrorCode::invalid_argument, "noise exponent q must be positive");
  require(trials >= 1, ErrorCode::invalid_argument, "trials must be >= 1");
  NoiseReport report;
  report.q = q;
  report.exponent = (q + 1.0) / (q + 2.0);
  const Eigen::VectorXd margins = noise_margins(dist, codebook);
  try {
    report.bq = noise_constant(margins, dist.marginal, q);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::degenerate_data) throw;
    report.rejected = true;
    report.passed = false;
    report.diagnostic = e.what();
    return report;
  }
  report.constant = std::pow(2.0 * std::sqrt(report.bq + 1.0), (2.0 * q + 2.0) / (q + 2.0));

  const TargetProfile profile = target_function(dist, codebook, LossKind::s_ls);
  const double t = static_cast<double>(codebook.classes());
  const double target_risk = misclass_risk(dist, codebook, profile.target);
  const double target_loss = expected_loss(dist, codebook, LossKind::s_ls, profile.target);
  std::mt19937_64 rng(seed);
  for (size_t s = 0; s < trials; ++s) {
    const Eigen::MatrixXd f = sample_function(profile, codebook, s % 2 == 1, radius, rng);
    const double lhs = misclass_risk(dist, codebook, f) - target_risk;
    const double excess = std::max(expected_loss(dist, codebook, LossKind::s_ls, f) - target_loss, 0.0);
    const double rhs = report.constant * std::pow(2.0 * (t - 1.0) / t * excess, report.exponent);
    ++report.samples;
    if (lhs > rhs + kInequalitySlack) ++report.violations;
    if (lhs > 0.0) {
      const double ratio = rhs > 0.0 ? lhs / rhs : std::numeric_limits<double>::infinity();
      report.max_ratio = std::max(report.max_ratio, ratio);
    }
  }
  report.passed = report.violations == 0;
  if (!report.passed) {
    std::ostringstream os;
    os << report.violations << " of " << report.samples << " samples violate the bound";
    report.diagnostic = os.str();
  }
  return report;
}

}  // namespace simplex
