#pragma once

#include <cmath>
#include <cstdint>

#include "screenlab/bayes.hpp"
#include "screenlab/dynamics.hpp"
#include "screenlab/errors.hpp"

// Independent verification routes for the closed-form results: direct
// confusion-matrix sampling, chained Bayes updating, and agent-count
// simulation of the prevalence step. Everything here is deterministic per
// (inputs, seed) pair.

namespace screenlab {

inline constexpr const char* kRngAlgorithm = "splitmix64";

// splitmix64: 64-bit counter-based mixer with a single word of state.
// Chosen for exact reproducibility across platforms and trivial seeding.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1) with full 53-bit mantissa resolution.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform01() < p; }

 private:
  std::uint64_t state_;
};

struct McEstimate {
  double estimate;
  double standard_error;  // binomial: sqrt(p(1-p)/n) on the relevant count
  std::uint64_t samples;
  std::uint64_t seed;
};

// Estimates PPV by sampling disease status and test outcome per individual
// and reporting the fraction of positives that are true positives. The
// standard error is computed on the positive count, not the sample count.
inline McEstimate mc_ppv(const TestCharacteristics& test, Prevalence phi,
                         std::uint64_t samples, std::uint64_t seed) {
  if (samples < 10'000)
    throw DomainError("monte carlo ppv needs at least 10^4 samples");
  SplitMix64 rng(seed);
  const double p = phi.value();
  const double a = test.sensitivity();
  const double false_positive_rate = 1.0 - test.specificity();

  std::uint64_t positives = 0;
  std::uint64_t true_positives = 0;
  for (std::uint64_t i = 0; i < samples; ++i) {
    const bool diseased = rng.bernoulli(p);
    const bool positive =
        diseased ? rng.bernoulli(a) : rng.bernoulli(false_positive_rate);
    if (positive) {
      ++positives;
      if (diseased) ++true_positives;
    }
  }
  if (positives < 100)
    throw InsufficientPositives(
        "fewer than 100 positive draws; increase samples or prevalence");

  const double estimate =
      static_cast<double>(true_positives) / static_cast<double>(positives);
  const double standard_error = std::sqrt(estimate * (1.0 - estimate) /
                                          static_cast<double>(positives));
  return {estimate, standard_error, samples, seed};
}

// Exact serial-testing check: applies the single-test Bayes update n times,
// feeding each posterior back in as the next prior. Must agree with the
// closed-form power expression to within accumulated rounding (<= 1e-12).
inline double chained_serial_ppv(const TestCharacteristics& test,
                                 Prevalence phi, int positives) {
  const double p = phi.value();
  if (!(p > 0.0) || !(p < 1.0))
    throw DomainError("chained updating requires prevalence in (0, 1)");
  if (positives < 1) throw DomainError("iteration count must be positive");
  if (test.specificity() == 1.0)
    throw DomainError("chained updating is degenerate at perfect specificity");
  double posterior = p;
  for (int i = 0; i < positives; ++i)
    posterior = ppv(test, Prevalence(posterior));
  return posterior;
}

// Agent-count check of one prevalence step: every individual is sampled
// through disease status, screening, test result, and treatment. Matches the
// deterministic law in expectation when incidence is a probability (<= 1).
inline McEstimate mc_one_step_prevalence(const ProgramConfig& config,
                                         Prevalence phi_t,
                                         std::uint64_t individuals,
                                         std::uint64_t seed) {
  config.validate();
  if (individuals < 100'000)
    throw DomainError("agent-count oracle needs at least 10^5 individuals");
  if (!(config.incidence <= 1.0))
    throw DomainError(
        "agent-count oracle treats incidence as a per-individual probability");
  SplitMix64 rng(seed);
  const double p = phi_t.value();

  std::uint64_t diseased_after = 0;
  for (std::uint64_t i = 0; i < individuals; ++i) {
    if (rng.bernoulli(p)) {
      // No short-circuiting: the draw count per individual stays fixed.
      const bool screened = rng.bernoulli(config.coverage);
      const bool detected = rng.bernoulli(config.test.sensitivity());
      const bool cured = rng.bernoulli(config.treatment_efficacy);
      if (!(screened && detected && cured)) ++diseased_after;
    } else {
      if (rng.bernoulli(config.incidence)) ++diseased_after;
    }
  }

  const double estimate =
      static_cast<double>(diseased_after) / static_cast<double>(individuals);
  const double standard_error = std::sqrt(estimate * (1.0 - estimate) /
                                          static_cast<double>(individuals));
  return {estimate, standard_error, individuals, seed};
}

}  // namespace screenlab
