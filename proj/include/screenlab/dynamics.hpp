#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "screenlab/bayes.hpp"
#include "screenlab/errors.hpp"
#include "screenlab/serial.hpp"

// Screen-and-treat program dynamics. Each step removes treated cases and
// adds new ones:
//
//   phi_{t+1} = clamp(phi_t - coverage * a * efficacy * phi_t
//                           + incidence * (1 - phi_t), 0, 1)
//
// The paradox under study: the better the program works, the lower the
// prevalence, and the worse every individual positive result becomes.

namespace screenlab {

struct ProgramConfig {
  TestCharacteristics test;
  Prevalence initial_prevalence;   // must be strictly inside (0, 1)
  double coverage = 0.0;           // fraction screened per step, [0, 1]
  double treatment_efficacy = 0.0; // cure probability given detection, [0, 1]
  double incidence = 0.0;          // new-case inflow per step, >= 0
  int steps = 0;                   // steps to simulate; records 0..steps
  bool stop_at_threshold = false;  // halt once prevalence < phi_e

  void validate() const {
    const double phi0 = initial_prevalence.value();
    if (!(phi0 > 0.0) || !(phi0 < 1.0))
      throw DomainError("initial prevalence must lie strictly in (0, 1)");
    if (!(coverage >= 0.0) || !(coverage <= 1.0))
      throw DomainError("coverage must lie in [0, 1]");
    if (!(treatment_efficacy >= 0.0) || !(treatment_efficacy <= 1.0))
      throw DomainError("treatment efficacy must lie in [0, 1]");
    if (!(incidence >= 0.0))
      throw DomainError("incidence must be non-negative");
    if (steps < 0) throw DomainError("steps must be non-negative");
  }
};

struct TrajectoryRecord {
  int step;
  double prevalence;
  double ppv;               // NaN only at the phi = 0, b = 1 corner
  double fdr;
  double zeta_vs_baseline;  // ppv here / ppv at the initial prevalence
  PrevalenceScenario scenario;
  std::optional<int> pti_required;  // absent when phi is outside (0,1) or b=1
  bool below_threshold;
};

struct ParadoxSummary {
  std::optional<int> first_crossing_step;  // first record with phi < phi_e
  double total_zeta_loss;                  // last ppv / first ppv
  std::optional<int> max_pti_required;
  PrevalenceScenario final_scenario;
};

// One application of the update law. Pure in phi_t given a valid config.
inline Prevalence step_prevalence(const ProgramConfig& config,
                                  Prevalence phi_t) {
  config.validate();
  const double p = phi_t.value();
  const double removed =
      config.coverage * config.test.sensitivity() * config.treatment_efficacy * p;
  const double inflow = config.incidence * (1.0 - p);
  return Prevalence(std::clamp(p - removed + inflow, 0.0, 1.0));
}

// Runs the program for config.steps steps, recording step 0 (the initial
// state) through the final step, or stopping early at the first record below
// the threshold when stop_at_threshold is set. Degenerate per-step values
// (the 0/0 PPV corner, iteration counts at phi outside (0,1) or b = 1) are
// recorded as NaN/absent in that record rather than aborting the run.
inline std::vector<TrajectoryRecord> run_trajectory(
    const ProgramConfig& config) {
  config.validate();
  const double phi0 = config.initial_prevalence.value();
  const double phi_e = prevalence_threshold(config.test);
  const double baseline_ppv = ppv(config.test, config.initial_prevalence);

  std::vector<TrajectoryRecord> records;
  records.reserve(static_cast<std::size_t>(config.steps) + 1);

  double phi_t = phi0;
  for (int t = 0; t <= config.steps; ++t) {
    TrajectoryRecord rec;
    rec.step = t;
    rec.prevalence = phi_t;
    try {
      rec.ppv = ppv(config.test, Prevalence(phi_t));
    } catch (const IndeterminateForm&) {
      rec.ppv = std::numeric_limits<double>::quiet_NaN();
    }
    rec.fdr = 1.0 - rec.ppv;
    rec.zeta_vs_baseline = rec.ppv / baseline_ppv;
    rec.scenario = classify_ordering(phi0, phi_t, phi_e);
    rec.below_threshold = phi_t < phi_e;
    if (phi_t > 0.0 && phi_t < 1.0 && config.test.specificity() < 1.0) {
      try {
        rec.pti_required =
            iterations_to_threshold(config.test, Prevalence(phi_t)).iterations;
      } catch (const DomainError&) {
        rec.pti_required.reset();
      }
    }
    records.push_back(rec);

    if (config.stop_at_threshold && rec.below_threshold) break;
    if (t < config.steps)
      phi_t = step_prevalence(config, Prevalence(phi_t)).value();
  }
  return records;
}

inline ParadoxSummary paradox_summary(
    const std::vector<TrajectoryRecord>& records) {
  if (records.empty())
    throw EmptyTrajectory("paradox summary requires at least one record");
  ParadoxSummary summary;
  summary.total_zeta_loss = records.back().ppv / records.front().ppv;
  summary.final_scenario = records.back().scenario;
  for (const auto& rec : records) {
    if (!summary.first_crossing_step && rec.below_threshold)
      summary.first_crossing_step = rec.step;
    if (rec.pti_required &&
        (!summary.max_pti_required ||
         *rec.pti_required > *summary.max_pti_required))
      summary.max_pti_required = rec.pti_required;
  }
  return summary;
}

}  // namespace screenlab
