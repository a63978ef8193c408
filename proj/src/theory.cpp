#include <algorithm>
#include <cmath>
#include <iomanip>
#include <random>
#include <sstream>

#include "simplex/experiment.hpp"
#include "simplex/relaxation.hpp"

namespace simplex {

namespace {

constexpr int kMaxPoints = 8;
constexpr size_t kSamplesPerDistribution = 2;
constexpr size_t kNoiseSamples = 20;
constexpr double kNearDeterministicTop = 0.9;
constexpr double kNoiseOrders[] = {0.5, 1.0, 4.0};

const char* verdict(bool ok) { return ok ? "PASS" : "FAIL"; }

}  // namespace

TheoryReport verify_theory(int classes, std::uint64_t seed, size_t trials) {
  require(classes >= 2, ErrorCode::config, "verify-theory needs T >= 2");
  require(trials >= 1, ErrorCode::config, "verify-theory needs at least one trial");
  const CodeBook codebook(classes);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> point_count(1, kMaxPoints);

  std::vector<FiniteDistribution> dists;
  dists.reserve(trials);
  for (size_t t = 0; t < trials; ++t) dists.push_back(random_distribution(classes, point_count(rng), rng));

  TheoryReport report;
  std::ostringstream os;
  os << std::setprecision(6);
  os << "T = " << classes << ", seed = " << seed << ", distributions = " << trials << '\n';

  for (const LossKind kind : {LossKind::s_ls, LossKind::sc_svm, LossKind::sh_svm}) {
    size_t checked = 0, ties = 0, mismatches = 0;
    double worst = 0.0;
    bool fisher_ok = true;
    ComparisonReport total;
    for (size_t t = 0; t < trials; ++t) {
      const std::uint64_t trial_seed = seed * 1000003 + t;
      const auto fisher = check_fisher_consistency(dists[t], codebook, kind, trial_seed);
      fisher_ok = fisher_ok && fisher.passed;
      checked += fisher.checked;
      ties += fisher.skipped_ties;
      mismatches += fisher.mismatches;
      worst = std::min(worst, fisher.worst_decrease);
      const auto cmp = check_comparison_inequality(dists[t], codebook, kind, kSamplesPerDistribution, trial_seed);
      total.passed = total.passed && cmp.passed;
      total.samples += cmp.samples;
      total.violations += cmp.violations;
      total.minimizer_violations += cmp.minimizer_violations;
      total.max_ratio = std::max(total.max_ratio, cmp.max_ratio);
    }
    report.passed = report.passed && fisher_ok && total.passed;
    os << "[" << verdict(fisher_ok) << "] fisher " << to_string(kind) << ": points " << checked << ", ties skipped "
       << ties << ", mismatches " << mismatches << ", largest decrease " << worst << '\n';
    os << "[" << verdict(total.passed) << "] comparison " << to_string(kind)
       << ": C_T = " << comparison_constant(kind, classes) << ", alpha = " << comparison_exponent(kind)
       << ", samples " << total.samples << ", violations " << total.violations << ", minimizer violations "
       << total.minimizer_violations << ", max ratio " << total.max_ratio << '\n';
  }

  const size_t noise_trials = std::max<size_t>(1, trials / 10);
  for (const double q : kNoiseOrders) {
    const double exponent = (q + 1.0) / (q + 2.0);
    bool ok = exponent > comparison_exponent(LossKind::s_ls);
    size_t samples = 0, violations = 0, rejected = 0;
    double max_ratio = 0.0, max_bq = 0.0;
    std::mt19937_64 noise_rng(seed ^ (0x9e3779b97f4a7c15ULL + static_cast<std::uint64_t>(q * 1000)));
    for (size_t t = 0; t < noise_trials; ++t) {
      const auto dist =
          near_deterministic_distribution(classes, point_count(noise_rng), kNearDeterministicTop, noise_rng);
      const auto r = check_noise_improved_bound(dist, codebook, q, kNoiseSamples, seed * 7919 + t);
      if (r.rejected) {
        ++rejected;
        continue;
      }
      ok = ok && r.passed;
      samples += r.samples;
      violations += r.violations;
      max_ratio = std::max(max_ratio, r.max_ratio);
      max_bq = std::max(max_bq, r.bq);
    }
    report.passed = report.passed && ok;
    os << "[" << verdict(ok) << "] noise bound q = " << q << ": exponent " << exponent << " > 1/2, distributions "
       << noise_trials << " (rejected " << rejected << "), samples " << samples << ", violations " << violations
       << ", max B_q " << max_bq << ", max ratio " << max_ratio << '\n';
  }

  if (classes == 2) {
    // With codes +1/-1 the S-LS target is rho_1 - rho_2 and the margin is its
    // absolute value; the comparison bound above is then psi(t) = sqrt(t).
    double worst = 0.0;
    for (const auto& dist : dists) {
      const auto target = target_function(dist, codebook, LossKind::s_ls).target;
      const Eigen::VectorXd margins = noise_margins(dist, codebook);
      for (Eigen::Index x = 0; x < dist.points(); ++x) {
        worst = std::max(worst, std::abs(margins(x) - std::abs(target(x, 0))));
      }
    }
    const bool ok = worst <= 1e-12;
    report.passed = report.passed && ok;
    os << "[" << verdict(ok) << "] binary reduction: margin = |f_rho| within " << worst
       << ", S-LS bound is sqrt(t) with C_T = " << comparison_constant(LossKind::s_ls, 2) << '\n';
  }

  os << (report.passed ? "all checks passed" : "some checks FAILED") << '\n';
  report.text = os.str();
  return report;
}

}  // namespace simplex
