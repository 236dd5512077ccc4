#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "screenlab/bayes.hpp"
#include "screenlab/errors.hpp"

// Serial confirmation testing: how many consecutive positive results lift the
// posterior back over a target predictive value.

namespace screenlab {

// Posterior within this distance of the target counts as having attained it.
inline constexpr double kPosteriorTolerance = 1e-12;

// Raw iteration counts this close under an integer are not rounded up:
// n = ceil(raw - kCeilingNudge), clamped to >= 0. Keeps exact-boundary cases
// (raw an integer up to float noise) from demanding a spurious extra test.
inline constexpr double kCeilingNudge = 1e-9;

struct IterationPlan {
  double target_ppv;                // the posterior being chased
  int iterations;                   // minimal count n >= 0
  std::vector<double> per_step_ppv; // posterior after 1..n positives
  double omega;                     // sqrt of the positive likelihood ratio
};

namespace detail {

// Posterior after `positives` consecutive positive results, via odds:
// odds_n = [phi / (1 - phi)] * L^n. Accepts n = 0 (returns the prior).
inline double serial_posterior(const TestCharacteristics& test, double phi,
                               int positives) {
  const double odds = phi / (1.0 - phi) *
                      std::pow(test.positive_likelihood_ratio(), positives);
  if (std::isinf(odds)) return 1.0;
  return odds / (1.0 + odds);
}

inline int ceil_with_nudge(double raw) {
  const double n = std::ceil(raw - kCeilingNudge);
  if (!(n > 0.0)) return 0;
  return static_cast<int>(n);
}

// Closed-form count: smallest integer n with posterior(n) >= rho, from
// n = ln[ rho (phi - 1) / (phi (rho - 1)) ] / ln L.
inline int required_iterations(double phi, double rho, double lr) {
  const double raw =
      std::log(rho * (phi - 1.0) / (phi * (rho - 1.0))) / std::log(lr);
  return ceil_with_nudge(raw);
}

}  // namespace detail

// PPV after `positives` consecutive positive tests at prior prevalence phi.
// Strictly increasing in the count for an informative test with b < 1.
inline double serial_ppv(const TestCharacteristics& test, Prevalence phi,
                         int positives) {
  const double p = phi.value();
  if (!(p > 0.0) || !(p < 1.0))
    throw DomainError("serial testing requires prevalence in (0, 1)");
  if (positives < 1) throw DomainError("iteration count must be positive");
  return detail::serial_posterior(test, p, positives);
}

// Minimal number of consecutive positives to reach `target` PPV from phi.
// Returns 0 when the prior already meets the target. The closed form lands
// within one of the answer; the result is then nudged so the minimality
// invariant holds under the posterior tolerance exactly.
inline IterationPlan iterations_to_target(const TestCharacteristics& test,
                                          Prevalence phi, double target) {
  const double p = phi.value();
  if (!(p > 0.0) || !(p < 1.0))
    throw DomainError("serial testing requires prevalence in (0, 1)");
  if (!(target > 0.0) || !(target < 1.0))
    throw DomainError("target ppv must lie in (0, 1)");
  const double lr = test.positive_likelihood_ratio();
  if (!(lr > 1.0))
    throw UnreachableTarget(
        "a positive likelihood ratio <= 1 cannot raise the posterior");

  int n = detail::required_iterations(p, target, lr);
  while (n > 0 &&
         detail::serial_posterior(test, p, n - 1) >= target - kPosteriorTolerance)
    --n;
  while (detail::serial_posterior(test, p, n) < target - kPosteriorTolerance)
    ++n;

  IterationPlan plan;
  plan.target_ppv = target;
  plan.iterations = n;
  plan.omega = test.sqrt_positive_likelihood_ratio();
  plan.per_step_ppv.reserve(static_cast<std::size_t>(n));
  for (int j = 1; j <= n; ++j)
    plan.per_step_ppv.push_back(detail::serial_posterior(test, p, j));
  return plan;
}

// Iterations needed to lift the posterior back to the threshold PPV
// rho(phi_e) = phi_e * omega after prevalence has fallen to phi_k. Computes
// the count through two algebraic routes (the general target formula and the
// direct omega/phi_e arrangement) and refuses to return silently if they
// ever disagree.
inline IterationPlan iterations_to_threshold(const TestCharacteristics& test,
                                             Prevalence phi_k) {
  const double target = ppv_at_threshold(test);
  const double p = phi_k.value();
  if (!(p > 0.0) || !(p < 1.0))
    throw DomainError("serial testing requires prevalence in (0, 1)");
  if (!(target < 1.0))
    throw DomainError("threshold ppv must be below 1");

  const double w = test.sqrt_positive_likelihood_ratio();
  const double phi_e = prevalence_threshold(test);
  const double raw_direct =
      std::log((w * phi_e * p - w * phi_e) / (w * phi_e * p - p)) /
      (2.0 * std::log(w));
  const int n_direct = detail::ceil_with_nudge(raw_direct);
  const int n_general =
      detail::required_iterations(p, target, test.positive_likelihood_ratio());
  if (n_direct != n_general)
    throw std::logic_error("iteration-count routes disagree");

  return iterations_to_target(test, phi_k, target);
}

}  // namespace screenlab
