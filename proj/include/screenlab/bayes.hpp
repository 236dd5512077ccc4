#pragma once

#include <cmath>
#include <string>

#include "screenlab/errors.hpp"

// Bayesian screening arithmetic: positive predictive value as a function of
// prevalence, the predictive-value loss ratio under a prevalence reduction,
// and the prevalence threshold below which predictive value collapses.
//
// Conventions used throughout:
//   a      sensitivity, P(T+ | D+)
//   b      specificity, P(T- | D-)
//   phi    prevalence, P(D+)
//   J      Youden index, a + b - 1 (strictly positive for an informative test)
//   L      positive likelihood ratio, a / (1 - b)
//   omega  sqrt(L)

namespace screenlab {

// Ties closer than this are reported as boundary cases by the scenario
// classifier rather than silently ordered.
inline constexpr double kScenarioBoundaryTolerance = 1e-9;

// A screening test that carries information: J = a + b - 1 > 0 is enforced
// at construction so downstream formulas never divide by a non-positive J.
class TestCharacteristics {
 public:
  TestCharacteristics(double sensitivity, double specificity)
      : sensitivity_(sensitivity), specificity_(specificity) {
    if (!(sensitivity > 0.0) || !(sensitivity <= 1.0))
      throw DomainError("sensitivity must lie in (0, 1]");
    if (!(specificity > 0.0) || !(specificity <= 1.0))
      throw DomainError("specificity must lie in (0, 1]");
    if (!(youden_j() > 0.0))
      throw DomainError(
          "uninformative test: sensitivity + specificity must exceed 1");
  }

  double sensitivity() const { return sensitivity_; }
  double specificity() const { return specificity_; }
  double youden_j() const { return sensitivity_ + specificity_ - 1.0; }

  double positive_likelihood_ratio() const {
    if (specificity_ == 1.0)
      throw DomainError(
          "positive likelihood ratio is infinite at perfect specificity");
    return sensitivity_ / (1.0 - specificity_);
  }

  // omega: the per-positive-test amplification of root-odds.
  double sqrt_positive_likelihood_ratio() const {
    return std::sqrt(positive_likelihood_ratio());
  }

 private:
  double sensitivity_;
  double specificity_;
};

class Prevalence {
 public:
  explicit Prevalence(double value) : value_(value) {
    if (!(value >= 0.0) || !(value <= 1.0))
      throw DomainError("prevalence must lie in [0, 1]");
  }

  double value() const { return value_; }

 private:
  double value_;
};

// A drop in prevalence from a baseline: phi_k = phi0 - reduction.
// The reduction is additive and must leave the shifted prevalence positive.
class PrevalenceShift {
 public:
  PrevalenceShift(Prevalence baseline, double reduction)
      : baseline_(baseline), reduction_(reduction) {
    if (!(reduction >= 0.0) || !(reduction < baseline.value()))
      throw DomainError(
          "reduction must satisfy 0 <= reduction < baseline prevalence");
  }

  Prevalence baseline() const { return baseline_; }
  double reduction() const { return reduction_; }
  Prevalence shifted() const {
    return Prevalence(baseline_.value() - reduction_);
  }

 private:
  Prevalence baseline_;
  double reduction_;
};

// Where the prevalence threshold phi_e sits relative to the pair
// (phi_k <= phi0) under study.
enum class Scenario {
  kThresholdAboveBoth,  // phi_e >= phi0: screening already past the cliff
  kThresholdBelowBoth,  // phi_e <= phi_k: predictive value stays serviceable
  kThresholdBetween,    // phi_k < phi_e < phi0: the shift crosses the cliff
};

inline const char* to_string(Scenario s) {
  switch (s) {
    case Scenario::kThresholdAboveBoth:
      return "ThresholdAboveBoth";
    case Scenario::kThresholdBelowBoth:
      return "ThresholdBelowBoth";
    case Scenario::kThresholdBetween:
      return "ThresholdBetween";
  }
  return "Unknown";
}

struct PrevalenceScenario {
  Scenario ordering;
  bool boundary;  // some pair among {phi0, phi_k, phi_e} ties within 1e-9
};

// Positive predictive value P(D+ | T+) at prevalence phi.
// Indeterminate only at phi = 0 with b = 1 (no positives can occur).
inline double ppv(const TestCharacteristics& test, Prevalence phi) {
  const double p = phi.value();
  const double false_positive_rate = 1.0 - test.specificity();
  if (p == 0.0 && false_positive_rate == 0.0)
    throw IndeterminateForm(
        "ppv is 0/0 at zero prevalence with perfect specificity");
  const double true_positive_mass = test.sensitivity() * p;
  return true_positive_mass /
         (true_positive_mass + false_positive_rate * (1.0 - p));
}

// False discovery rate, 1 - ppv.
inline double fdr(const TestCharacteristics& test, Prevalence phi) {
  return 1.0 - ppv(test, phi);
}

namespace detail {

// Loss ratio ppv(phi0 - k) / ppv(phi0) in the simplified closed form
//   [phi_k (1-b) + J phi0 phi_k] / [phi0 (1-b) + J phi0 phi_k].
// At k = 0 numerator and denominator are the same expression, so the
// quotient is exactly 1.0 in floating point, not merely in exact math.
inline double zeta_value(const TestCharacteristics& test, double phi0,
                         double reduction) {
  const double false_positive_rate = 1.0 - test.specificity();
  const double phi_k = phi0 - reduction;
  const double cross = test.youden_j() * phi0 * phi_k;
  return (phi_k * false_positive_rate + cross) /
         (phi0 * false_positive_rate + cross);
}

}  // namespace detail

// Prevalence threshold phi_e = (sqrt(a(1-b)) + b - 1) / J: the prevalence at
// which the PPV curve's slope equals 1; below it predictive value drops off
// sharply. For an informative test phi_e lies in (0, 1); a perfect-specificity
// test never dips, so phi_e = 0 there.
inline double prevalence_threshold(const TestCharacteristics& test) {
  const double false_positive_rate = 1.0 - test.specificity();
  if (false_positive_rate == 0.0) return 0.0;
  return (std::sqrt(test.sensitivity() * false_positive_rate) -
          false_positive_rate) /
         test.youden_j();
}

// PPV evaluated at the threshold collapses to rho(phi_e) = phi_e * omega.
// Undefined at b = 1 (omega is infinite and phi_e is the degenerate 0).
inline double ppv_at_threshold(const TestCharacteristics& test) {
  return prevalence_threshold(test) * test.sqrt_positive_likelihood_ratio();
}

// Classifies raw prevalence values against a threshold. Total on
// phi_k <= phi0: ties go to the Above/Below arms and raise the boundary flag.
inline PrevalenceScenario classify_ordering(double phi0, double phi_k,
                                            double phi_e) {
  const bool boundary =
      std::abs(phi0 - phi_e) < kScenarioBoundaryTolerance ||
      std::abs(phi_k - phi_e) < kScenarioBoundaryTolerance ||
      std::abs(phi0 - phi_k) < kScenarioBoundaryTolerance;
  Scenario ordering;
  if (phi_e >= phi0)
    ordering = Scenario::kThresholdAboveBoth;
  else if (phi_e <= phi_k)
    ordering = Scenario::kThresholdBelowBoth;
  else
    ordering = Scenario::kThresholdBetween;
  return {ordering, boundary};
}

inline PrevalenceScenario classify_scenario(const TestCharacteristics& test,
                                            const PrevalenceShift& shift) {
  return classify_ordering(shift.baseline().value(), shift.shifted().value(),
                           prevalence_threshold(test));
}

struct ZetaReport {
  double zeta;          // shifted_ppv / baseline_ppv, in (0, 1] for k >= 0
  double baseline_ppv;  // ppv at phi0
  double shifted_ppv;   // ppv at phi_k
  double threshold;     // phi_e for this test
  PrevalenceScenario scenario;
};

// Predictive-value loss ratio for a prevalence drop of k from phi0.
// zeta = 1 exactly at k = 0 and decreases strictly in k when b < 1
// (with b = 1 the PPV is constant 1, so zeta stays 1 for every k).
inline ZetaReport zeta(const TestCharacteristics& test,
                       const PrevalenceShift& shift) {
  const double phi0 = shift.baseline().value();
  if (phi0 == 0.0)
    throw DomainError("loss ratio requires a positive baseline prevalence");
  ZetaReport report{
      detail::zeta_value(test, phi0, shift.reduction()),
      ppv(test, shift.baseline()),
      ppv(test, shift.shifted()),
      prevalence_threshold(test),
      classify_scenario(test, shift),
  };
  return report;
}

// Same quantity in the expanded arrangement
//   (phi-k) [a phi + (1-b)(1-phi)] / ( phi [a(phi-k) + (1-b)(1+k-phi)] ).
// Kept as a cross-check against the simplified form; the two must agree to
// 1e-12 everywhere in the domain.
inline double zeta_expanded(const TestCharacteristics& test,
                            const PrevalenceShift& shift) {
  const double phi = shift.baseline().value();
  if (phi == 0.0)
    throw DomainError("loss ratio requires a positive baseline prevalence");
  const double k = shift.reduction();
  const double a = test.sensitivity();
  const double false_positive_rate = 1.0 - test.specificity();
  const double numerator =
      (phi - k) * (a * phi + false_positive_rate * (1.0 - phi));
  const double denominator =
      phi * (a * (phi - k) + false_positive_rate * (1.0 + k - phi));
  return numerator / denominator;
}

struct ZetaPartials {
  double d_phi0;  // sensitivity of the loss ratio to the baseline prevalence
  double d_k;     // sensitivity to the reduction; negative away from k = 0
};

// Central finite differences of the loss ratio. The default step balances
// truncation against cancellation for 64-bit doubles; both stencil arms must
// stay inside {0 < phi_k, phi0 <= 1, k >= 0}.
inline ZetaPartials zeta_partials(const TestCharacteristics& test,
                                  const PrevalenceShift& shift,
                                  double step = 1e-6) {
  const double phi0 = shift.baseline().value();
  const double k = shift.reduction();
  const double h = step;
  if (!(h > 0.0)) throw DomainError("finite-difference step must be positive");
  if (!(k - h >= 0.0) || !(k + h < phi0) || !(phi0 + h <= 1.0) ||
      !(phi0 - h > k))
    throw DomainError("finite-difference stencil leaves the valid domain");
  const double d_phi0 = (detail::zeta_value(test, phi0 + h, k) -
                         detail::zeta_value(test, phi0 - h, k)) /
                        (2.0 * h);
  const double d_k = (detail::zeta_value(test, phi0, k + h) -
                      detail::zeta_value(test, phi0, k - h)) /
                     (2.0 * h);
  return {d_phi0, d_k};
}

}  // namespace screenlab
