#pragma once

#include <array>
#include <charconv>
#include <cstdint>
#include <cstdlib>
#include <ctime>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "screenlab/bayes.hpp"
#include "screenlab/dynamics.hpp"
#include "screenlab/errors.hpp"
#include "screenlab/version.hpp"

// Serialization helpers shared by the command-line tool and its tests.
// All numeric output goes through std::to_chars: locale-independent,
// correctly rounded, reproducible byte-for-byte.

namespace screenlab {

// 12 significant digits, general format. The CSV data contract.
inline std::string format_value(double v) {
  std::array<char, 40> buf;
  auto [ptr, ec] =
      std::to_chars(buf.data(), buf.data() + buf.size(), v,
                    std::chars_format::general, 12);
  return std::string(buf.data(), ptr);
}

// Shortest representation that round-trips exactly. Used for parameters in
// manifests so a reader can reproduce runs bit-for-bit.
inline std::string format_exact(double v) {
  std::array<char, 40> buf;
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

inline std::string csv_label(const PrevalenceScenario& scenario) {
  std::string label = to_string(scenario.ordering);
  if (scenario.boundary) label += "*";
  return label;
}

// ISO-8601 UTC timestamp. Honors SOURCE_DATE_EPOCH (seconds since the epoch)
// so that archived outputs can be byte-identical across reruns.
inline std::string utc_timestamp() {
  std::time_t t = 0;
  if (const char* pinned = std::getenv("SOURCE_DATE_EPOCH");
      pinned != nullptr && *pinned != '\0') {
    t = static_cast<std::time_t>(std::strtoll(pinned, nullptr, 10));
  } else {
    t = std::time(nullptr);
  }
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Everything needed to reproduce a run: tool version, subcommand, the
// resolved parameter values, and the seed when randomness is involved.
struct RunManifest {
  std::string tool_version;
  std::string subcommand;
  std::string timestamp;
  std::vector<std::pair<std::string, std::string>> parameters;
  std::optional<std::uint64_t> seed;

  static RunManifest make(std::string subcommand) {
    RunManifest m;
    m.tool_version = kVersion;
    m.subcommand = std::move(subcommand);
    m.timestamp = utc_timestamp();
    return m;
  }

  void add(const std::string& key, const std::string& value) {
    parameters.emplace_back(key, value);
  }
  void add(const std::string& key, double value) {
    parameters.emplace_back(key, format_exact(value));
  }
  void add(const std::string& key, int value) {
    parameters.emplace_back(key, std::to_string(value));
  }
  void add(const std::string& key, std::uint64_t value) {
    parameters.emplace_back(key, std::to_string(value));
  }
  void add(const std::string& key, bool value) {
    parameters.emplace_back(key, value ? "true" : "false");
  }
};

// Manifest rows ride along as '#'-prefixed comment lines so every CSV is
// self-describing without breaking naive readers.
inline void write_manifest(std::ostream& os, const RunManifest& manifest) {
  os << "# tool_version=" << manifest.tool_version << "\n";
  os << "# subcommand=" << manifest.subcommand << "\n";
  os << "# timestamp=" << manifest.timestamp << "\n";
  if (manifest.seed) {
    os << "# rng=splitmix64\n";
    os << "# seed=" << *manifest.seed << "\n";
  }
  for (const auto& [key, value] : manifest.parameters)
    os << "# " << key << "=" << value << "\n";
}

struct CurvePoint {
  double phi;
  double ppv;
  double fdr;
};

// Uniform prevalence grid, endpoints included. The grid expression is part
// of the output contract: phi_i = lo + i * (hi - lo) / (points - 1), so a
// reader holding the manifest can regenerate every row bit-for-bit.
inline std::vector<CurvePoint> sample_curve(const TestCharacteristics& test,
                                            double phi_min, double phi_max,
                                            int points) {
  if (!(phi_min >= 0.0) || !(phi_max <= 1.0) || !(phi_min < phi_max))
    throw DomainError("curve range must satisfy 0 <= min < max <= 1");
  if (points < 2) throw DomainError("curve needs at least 2 points");

  std::vector<CurvePoint> curve;
  curve.reserve(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) {
    const double phi =
        phi_min + static_cast<double>(i) * (phi_max - phi_min) /
                      static_cast<double>(points - 1);
    CurvePoint point{phi, 0.0, 0.0};
    try {
      point.ppv = ppv(test, Prevalence(phi));
      point.fdr = 1.0 - point.ppv;
    } catch (const IndeterminateForm&) {
      point.ppv = std::numeric_limits<double>::quiet_NaN();
      point.fdr = std::numeric_limits<double>::quiet_NaN();
    }
    curve.push_back(point);
  }
  return curve;
}

inline void write_curve_csv(std::ostream& os, const RunManifest& manifest,
                            const TestCharacteristics& test,
                            const std::vector<CurvePoint>& curve) {
  write_manifest(os, manifest);
  os << "# phi_e=" << format_value(prevalence_threshold(test)) << "\n";
  double rho_e = std::numeric_limits<double>::quiet_NaN();
  if (test.specificity() < 1.0) rho_e = ppv_at_threshold(test);
  os << "# ppv_at_phi_e=" << format_value(rho_e) << "\n";
  os << "phi,ppv,fdr\n";
  for (const auto& point : curve)
    os << format_value(point.phi) << "," << format_value(point.ppv) << ","
       << format_value(point.fdr) << "\n";
}

inline void write_trajectory_csv(std::ostream& os, const RunManifest& manifest,
                                 const std::vector<TrajectoryRecord>& records) {
  write_manifest(os, manifest);
  os << "step,prevalence,ppv,fdr,zeta_vs_baseline,scenario,pti_required,"
        "below_threshold\n";
  for (const auto& rec : records) {
    os << rec.step << "," << format_value(rec.prevalence) << ","
       << format_value(rec.ppv) << "," << format_value(rec.fdr) << ","
       << format_value(rec.zeta_vs_baseline) << "," << csv_label(rec.scenario)
       << ",";
    if (rec.pti_required) os << *rec.pti_required;
    os << "," << (rec.below_threshold ? "true" : "false") << "\n";
  }
}

}  // namespace screenlab
