#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "simplex/coding.hpp"
#include "simplex/losses.hpp"

namespace simplex {

/// A distribution over m abstract inputs and T labels. Every expectation
/// against it is an exact finite sum.
struct FiniteDistribution {
  Eigen::VectorXd marginal;      // m weights summing to 1
  Eigen::MatrixXd conditionals;  // m x T, row-stochastic

  Eigen::Index points() const noexcept { return marginal.size(); }
  int classes() const noexcept { return static_cast<int>(conditionals.cols()); }
  void validate() const;
};

/// Marginal and conditional rows drawn from flat Dirichlet distributions.
FiniteDistribution random_distribution(int classes, Eigen::Index points, std::mt19937_64& rng);

/// Like random_distribution, but each conditional row puts at least
/// `min_top` mass on one uniformly chosen label.
FiniteDistribution near_deterministic_distribution(int classes, Eigen::Index points, double min_top,
                                                   std::mt19937_64& rng);

/// Pointwise argmax of the conditionals, ties to the smallest label.
std::vector<int> bayes_rule(const FiniteDistribution& dist);
double bayes_risk(const FiniteDistribution& dist);

/// True when the two largest conditionals at `point` coincide (within 1e-12).
bool bayes_tied(const FiniteDistribution& dist, Eigen::Index point);

/// R(D(f)) = sum_x rho_X(x) (1 - rho_{D(f(x))}(x)); f is m x (T-1).
double misclass_risk(const FiniteDistribution& dist, const CodeBook& codebook,
                     const Eigen::Ref<const Eigen::MatrixXd>& f);

/// E(f) = sum_x rho_X(x) sum_y rho_y(x) V(y, f(x)).
double expected_loss(const FiniteDistribution& dist, const CodeBook& codebook, LossKind kind,
                     const Eigen::Ref<const Eigen::MatrixXd>& f);

/// Minimizer of the expected loss together with the comparison constants
/// R(D(f)) - R(D(f_rho)) <= C_T (E(f) - E(f_rho))^alpha.
struct TargetProfile {
  LossKind kind;
  Eigen::MatrixXd target;  // m x (T-1)
  double constant;         // C_T
  double exponent;         // alpha
};

double comparison_constant(LossKind kind, int classes);
double comparison_exponent(LossKind kind);

TargetProfile target_function(const FiniteDistribution& dist, const CodeBook& codebook, LossKind kind);

struct FisherReport {
  bool passed = true;
  size_t checked = 0;        // non-tied points compared against the Bayes rule
  size_t skipped_ties = 0;
  size_t mismatches = 0;     // points where D(f_rho) != b_rho
  double worst_decrease = 0.0;  // most negative E(f_rho + step d) - E(f_rho) seen
};

/// Checks D(f_rho) = b_rho at every non-tied point and that 20 random
/// perturbations of size 1e-4 never lower E(f_rho) by more than 1e-10. For
/// SH-SVM the perturbations stay inside the convex hull of the codes.
FisherReport check_fisher_consistency(const FiniteDistribution& dist, const CodeBook& codebook,
                                      LossKind kind, std::uint64_t seed = 1);

struct ComparisonReport {
  bool passed = true;
  size_t samples = 0;
  size_t violations = 0;           // samples where LHS > RHS + 1e-12
  size_t minimizer_violations = 0; // samples with E(f) < E(f_rho) - 1e-12
  double max_ratio = 0.0;          // max LHS / RHS over samples with LHS > 0
};

inline constexpr double kSampleRadius = 3.0;

/// Samples `trials` functions f and checks the comparison inequality with
/// the constants of `target_function`. Half of the samples are drawn
/// globally (ball of radius `radius`, or the hull for SH-SVM), half as
/// perturbations of f_rho at random scales.
ComparisonReport check_comparison_inequality(const FiniteDistribution& dist, const CodeBook& codebook,
                                             LossKind kind, size_t trials, std::uint64_t seed,
                                             double radius = kSampleRadius);

/// gamma(x) = min_{j != D(f_rho(x))} (T-1)/T <c_D - c_j, f_rho(x)> for the S-LS target.
Eigen::VectorXd noise_margins(const FiniteDistribution& dist, const CodeBook& codebook);

/// Smallest B_q with rho_X{gamma <= s} <= B_q s^q for every s in (0, 1].
/// The supremum over s is attained at the margin values themselves.
double noise_constant(const Eigen::Ref<const Eigen::VectorXd>& margins,
                      const Eigen::Ref<const Eigen::VectorXd>& marginal, double q);

struct NoiseReport {
  bool passed = true;
  bool rejected = false;  // a point with zero margin makes B_q infinite
  std::string diagnostic;
  double q = 0.0;
  double bq = 0.0;
  double constant = 0.0;  // K = (2 sqrt(B_q + 1))^((2q+2)/(q+2))
  double exponent = 0.0;  // (q+1)/(q+2)
  size_t samples = 0;
  size_t violations = 0;
  double max_ratio = 0.0;
};

/// R(D(f)) - R(D(f_rho)) <= K (2(T-1)/T (E(f) - E(f_rho)))^((q+1)/(q+2)) for S-LS.
NoiseReport check_noise_improved_bound(const FiniteDistribution& dist, const CodeBook& codebook, double q,
                                       size_t trials, std::uint64_t seed, double radius = kSampleRadius);

}  // namespace simplex
