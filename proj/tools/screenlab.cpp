// screenlab: screening analytics at the command line.
//
// Verbs: curve, zeta, threshold, iterations, simulate, verify.
// Exit status: 0 on success, 1 on domain/usage errors, 2 when verification
// fails. Numeric defaults may come from a `key = value` config file given
// via --config or the SCREENLAB_CONFIG environment variable; explicit flags
// always win.

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "screenlab/screenlab.hpp"

namespace {

using namespace screenlab;

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

// `key = value` lines; '#' starts a comment; blank lines ignored.
std::map<std::string, std::string> load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open config file: " + path);
  std::map<std::string, std::string> values;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos)
      line.erase(hash);
    const std::string stripped = trim(line);
    if (stripped.empty()) continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos)
      throw DomainError("config line " + std::to_string(lineno) +
                        " is not `key = value`: " + stripped);
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (key.empty() || value.empty())
      throw DomainError("config line " + std::to_string(lineno) +
                        " is not `key = value`: " + stripped);
    values[key] = value;
  }
  return values;
}

// The config path must be known before CLI11 parses anything, so it is
// scanned straight out of argv.
std::string find_config_path(int argc, char** argv) {
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if ((arg == "--config" || arg == "-c") && i + 1 < argc)
      return argv[i + 1];
    if (arg.rfind("--config=", 0) == 0) return arg.substr(9);
  }
  if (const char* env = std::getenv("SCREENLAB_CONFIG");
      env != nullptr && *env != '\0')
    return env;
  return "";
}

// Registers an option that is required unless the config file supplies a
// default for it. Config keys are the long flag names without the dashes.
class ConfigDefaults {
 public:
  explicit ConfigDefaults(std::map<std::string, std::string> values)
      : values_(std::move(values)) {}

  template <typename T>
  CLI::Option* add(CLI::App& cmd, const std::string& flag, T& var,
                   const std::string& desc, bool required) {
    CLI::Option* opt = cmd.add_option(flag, var, desc);
    const auto it = values_.find(flag.substr(2));
    if (it != values_.end()) {
      if (!CLI::detail::lexical_cast(it->second, var))
        throw DomainError("config value for " + flag.substr(2) +
                          " is not parseable: " + it->second);
    } else if (required) {
      opt->required();
    }
    return opt;
  }

 private:
  std::map<std::string, std::string> values_;
};

// Sink that targets stdout by default and a file when --csv is given.
class CsvSink {
 public:
  explicit CsvSink(const std::string& path) {
    if (!path.empty()) {
      file_.open(path, std::ios::binary);  // LF line endings everywhere
      if (!file_) throw DomainError("cannot open output file: " + path);
    }
  }
  bool to_file() const { return file_.is_open(); }
  std::ostream& stream() { return to_file() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

std::optional<double> safe_ppv_at_threshold(const TestCharacteristics& test) {
  if (test.specificity() == 1.0) return std::nullopt;
  return ppv_at_threshold(test);
}

std::string opt_text(const std::optional<double>& v) {
  return v ? format_value(*v) : "undefined (perfect specificity)";
}

std::string opt_cell(const std::optional<double>& v) {
  return v ? format_value(*v) : "nan";
}

// ---------------------------------------------------------------------------

struct CurveArgs {
  double sensitivity = 0, specificity = 0;
  double phi_min = 0.0, phi_max = 1.0;
  int points = 101;
  std::string csv;
};

int cmd_curve(const CurveArgs& args) {
  const TestCharacteristics test(args.sensitivity, args.specificity);
  const auto curve =
      sample_curve(test, args.phi_min, args.phi_max, args.points);

  RunManifest manifest = RunManifest::make("curve");
  manifest.add("sensitivity", args.sensitivity);
  manifest.add("specificity", args.specificity);
  manifest.add("phi_min", args.phi_min);
  manifest.add("phi_max", args.phi_max);
  manifest.add("points", args.points);

  CsvSink sink(args.csv);
  write_curve_csv(sink.stream(), manifest, test, curve);
  return 0;
}

struct ZetaArgs {
  double sensitivity = 0, specificity = 0;
  double prevalence = 0, reduction = 0;
  std::string csv;
};

int cmd_zeta(const ZetaArgs& args) {
  const TestCharacteristics test(args.sensitivity, args.specificity);
  const PrevalenceShift shift(Prevalence(args.prevalence), args.reduction);
  const ZetaReport report = zeta(test, shift);

  std::optional<ZetaPartials> partials;
  try {
    partials = zeta_partials(test, shift);
  } catch (const DomainError&) {
    // Stencil leaves the domain at k = 0 or near the edges; report without.
  }

  std::cout << "predictive value loss for prevalence "
            << format_value(args.prevalence) << " -> "
            << format_value(shift.shifted().value()) << " (reduction "
            << format_value(args.reduction) << ")\n";
  std::cout << "  test          : sensitivity " << format_value(args.sensitivity)
            << ", specificity " << format_value(args.specificity)
            << " (youden j " << format_value(test.youden_j()) << ")\n";
  std::cout << "  baseline ppv  : " << format_value(report.baseline_ppv) << "\n";
  std::cout << "  shifted ppv   : " << format_value(report.shifted_ppv) << "\n";
  std::cout << "  zeta          : " << format_value(report.zeta) << "\n";
  if (partials) {
    std::cout << "  d zeta / d phi0 : " << format_value(partials->d_phi0)
              << "\n";
    std::cout << "  d zeta / d k    : " << format_value(partials->d_k) << "\n";
  } else {
    std::cout << "  partials      : unavailable here (finite-difference "
                 "stencil leaves the domain)\n";
  }
  std::cout << "  threshold     : " << format_value(report.threshold)
            << " (ppv there " << opt_text(safe_ppv_at_threshold(test))
            << ")\n";
  std::cout << "  scenario      : " << csv_label(report.scenario) << "\n";

  if (!args.csv.empty()) {
    RunManifest manifest = RunManifest::make("zeta");
    manifest.add("sensitivity", args.sensitivity);
    manifest.add("specificity", args.specificity);
    manifest.add("prevalence", args.prevalence);
    manifest.add("reduction", args.reduction);
    CsvSink sink(args.csv);
    auto& os = sink.stream();
    write_manifest(os, manifest);
    os << "phi0,reduction,phi_k,baseline_ppv,shifted_ppv,zeta,"
          "d_zeta_d_phi0,d_zeta_d_k,phi_e,ppv_at_phi_e,scenario\n";
    os << format_value(args.prevalence) << ","
       << format_value(args.reduction) << ","
       << format_value(shift.shifted().value()) << ","
       << format_value(report.baseline_ppv) << ","
       << format_value(report.shifted_ppv) << "," << format_value(report.zeta)
       << "," << (partials ? format_value(partials->d_phi0) : "nan") << ","
       << (partials ? format_value(partials->d_k) : "nan") << ","
       << format_value(report.threshold) << ","
       << opt_cell(safe_ppv_at_threshold(test)) << ","
       << csv_label(report.scenario) << "\n";
  }
  return 0;
}

struct ThresholdArgs {
  double sensitivity = 0, specificity = 0;
  std::string csv;
};

int cmd_threshold(const ThresholdArgs& args) {
  const TestCharacteristics test(args.sensitivity, args.specificity);
  const double phi_e = prevalence_threshold(test);
  const auto rho_e = safe_ppv_at_threshold(test);
  const bool perfect = test.specificity() == 1.0;

  std::cout << "prevalence threshold for sensitivity "
            << format_value(args.sensitivity) << ", specificity "
            << format_value(args.specificity) << "\n";
  std::cout << "  youden j     : " << format_value(test.youden_j()) << "\n";
  std::cout << "  lr+          : "
            << (perfect ? "undefined (perfect specificity)"
                        : format_value(test.positive_likelihood_ratio()))
            << "\n";
  std::cout << "  omega        : "
            << (perfect ? "undefined (perfect specificity)"
                        : format_value(test.sqrt_positive_likelihood_ratio()))
            << "\n";
  std::cout << "  phi_e        : " << format_value(phi_e) << "\n";
  std::cout << "  ppv at phi_e : " << opt_text(rho_e) << "\n";

  if (!args.csv.empty()) {
    RunManifest manifest = RunManifest::make("threshold");
    manifest.add("sensitivity", args.sensitivity);
    manifest.add("specificity", args.specificity);
    CsvSink sink(args.csv);
    auto& os = sink.stream();
    write_manifest(os, manifest);
    os << "sensitivity,specificity,youden_j,lr_positive,omega,phi_e,"
          "ppv_at_phi_e\n";
    os << format_value(args.sensitivity) << ","
       << format_value(args.specificity) << ","
       << format_value(test.youden_j()) << ","
       << (perfect ? "nan" : format_value(test.positive_likelihood_ratio()))
       << ","
       << (perfect ? "nan"
                   : format_value(test.sqrt_positive_likelihood_ratio()))
       << "," << format_value(phi_e) << "," << opt_cell(rho_e) << "\n";
  }
  return 0;
}

struct IterationsArgs {
  double sensitivity = 0, specificity = 0;
  double prevalence = 0;
  double target = std::numeric_limits<double>::quiet_NaN();
  bool to_threshold = false;
  std::string csv;
};

int cmd_iterations(const IterationsArgs& args) {
  const TestCharacteristics test(args.sensitivity, args.specificity);
  const Prevalence phi(args.prevalence);
  const IterationPlan plan =
      args.to_threshold ? iterations_to_threshold(test, phi)
                        : iterations_to_target(test, phi, args.target);

  std::cout << "serial testing plan at prevalence "
            << format_value(args.prevalence) << "\n";
  std::cout << "  target ppv : " << format_value(plan.target_ppv)
            << (args.to_threshold ? " (prevalence threshold ppv)"
                                  : " (requested)")
            << "\n";
  std::cout << "  omega      : " << format_value(plan.omega) << "\n";
  std::cout << "  iterations : " << plan.iterations << "\n";
  if (plan.iterations == 0) {
    std::cout << "  the prior already meets the target\n";
  } else {
    std::cout << "  posterior after each consecutive positive:\n";
    const int shown = std::min<int>(plan.iterations, 64);
    for (int i = 0; i < shown; ++i)
      std::cout << "    " << (i + 1) << ": "
                << format_value(plan.per_step_ppv[static_cast<std::size_t>(i)])
                << "\n";
    if (shown < plan.iterations)
      std::cout << "    ... (" << (plan.iterations - shown) << " more)\n";
  }

  if (!args.csv.empty()) {
    RunManifest manifest = RunManifest::make("iterations");
    manifest.add("sensitivity", args.sensitivity);
    manifest.add("specificity", args.specificity);
    manifest.add("prevalence", args.prevalence);
    manifest.add("to_threshold", args.to_threshold);
    manifest.add("target_ppv", plan.target_ppv);
    manifest.add("iterations", plan.iterations);
    CsvSink sink(args.csv);
    auto& os = sink.stream();
    write_manifest(os, manifest);
    os << "n,serial_ppv\n";
    for (std::size_t i = 0; i < plan.per_step_ppv.size(); ++i)
      os << (i + 1) << "," << format_value(plan.per_step_ppv[i]) << "\n";
  }
  return 0;
}

struct SimulateArgs {
  double sensitivity = 0, specificity = 0;
  double prevalence = 0;
  double coverage = 0.0, efficacy = 0.0, incidence = 0.0;
  int steps = 10;
  bool stop_at_threshold = false;
  std::string csv;
};

int cmd_simulate(const SimulateArgs& args) {
  ProgramConfig config{TestCharacteristics(args.sensitivity, args.specificity),
                       Prevalence(args.prevalence)};
  config.coverage = args.coverage;
  config.treatment_efficacy = args.efficacy;
  config.incidence = args.incidence;
  config.steps = args.steps;
  config.stop_at_threshold = args.stop_at_threshold;
  const auto records = run_trajectory(config);

  RunManifest manifest = RunManifest::make("simulate");
  manifest.add("sensitivity", args.sensitivity);
  manifest.add("specificity", args.specificity);
  manifest.add("prevalence", args.prevalence);
  manifest.add("coverage", args.coverage);
  manifest.add("efficacy", args.efficacy);
  manifest.add("incidence", args.incidence);
  manifest.add("steps", args.steps);
  manifest.add("stop_at_threshold", args.stop_at_threshold);

  CsvSink sink(args.csv);
  write_trajectory_csv(sink.stream(), manifest, records);
  return 0;
}

struct VerifyArgs {
  std::uint64_t samples = 1'000'000;
  std::uint64_t seed = 1;
  bool inject_error = false;
  std::string csv;
};

struct VerifyCheck {
  std::string name;
  std::string kind;  // "3se" or "abs"
  double estimate;
  double reference;
  double deviation;  // in SE units or absolute, per kind
  double tolerance;
  bool pass;
};

int cmd_verify(const VerifyArgs& args) {
  if (args.samples < 100'000)
    throw DomainError("verify needs --samples of at least 100000");

  std::vector<VerifyCheck> checks;
  std::uint64_t seed = args.seed;

  struct PpvCase {
    const char* name;
    double a, b, phi;
  };
  const PpvCase ppv_cases[] = {
      {"ppv a=0.85 b=0.90 phi=0.38", 0.85, 0.90, 0.38},
      {"ppv a=0.85 b=0.90 phi=0.18", 0.85, 0.90, 0.18},
      {"ppv a=0.95 b=0.95 phi=0.05", 0.95, 0.95, 0.05},
      {"ppv a=0.70 b=0.80 phi=0.30", 0.70, 0.80, 0.30},
      {"ppv a=0.99 b=0.90 phi=0.02", 0.99, 0.90, 0.02},
      {"ppv a=0.85 b=0.90 phi=0.2554", 0.85, 0.90, 0.2553967929896867},
  };
  bool first = true;
  for (const auto& c : ppv_cases) {
    const TestCharacteristics test(c.a, c.b);
    const auto estimate = mc_ppv(test, Prevalence(c.phi), args.samples, seed++);
    double reference = ppv(test, Prevalence(c.phi));
    if (args.inject_error && first) reference += 0.05;  // test hook
    first = false;
    const double dev =
        std::abs(estimate.estimate - reference) / estimate.standard_error;
    checks.push_back({c.name, "3se", estimate.estimate, reference, dev, 3.0,
                      dev <= 3.0});
  }

  struct SerialCase {
    const char* name;
    double a, b, phi;
    int n;
  };
  const SerialCase serial_cases[] = {
      {"serial a=0.85 b=0.90 phi=0.18 n=2", 0.85, 0.90, 0.18, 2},
      {"serial a=0.85 b=0.90 phi=0.18 n=4", 0.85, 0.90, 0.18, 4},
      {"serial a=0.95 b=0.95 phi=0.01 n=3", 0.95, 0.95, 0.01, 3},
      {"serial a=0.70 b=0.80 phi=0.30 n=5", 0.70, 0.80, 0.30, 5},
  };
  for (const auto& c : serial_cases) {
    const TestCharacteristics test(c.a, c.b);
    const double chained = chained_serial_ppv(test, Prevalence(c.phi), c.n);
    const double closed = serial_ppv(test, Prevalence(c.phi), c.n);
    const double dev = std::abs(chained - closed);
    checks.push_back({c.name, "abs", chained, closed, dev, 1e-12, dev <= 1e-12});
  }

  {
    ProgramConfig config{TestCharacteristics(0.85, 0.90), Prevalence(0.38)};
    config.coverage = 0.5;
    config.treatment_efficacy = 0.8;
    config.incidence = 0.0;
    config.steps = 1;
    const struct {
      const char* name;
      double incidence;
      double phi;
    } step_cases[] = {
        {"step coverage=0.5 efficacy=0.8 phi=0.38", 0.0, 0.38},
        {"step with incidence=0.02 phi=0.38", 0.02, 0.38},
        {"step with incidence=0.02 phi=0.10", 0.02, 0.10},
    };
    for (const auto& c : step_cases) {
      ProgramConfig current = config;
      current.incidence = c.incidence;
      const double law = step_prevalence(current, Prevalence(c.phi)).value();
      const auto estimate = mc_one_step_prevalence(current, Prevalence(c.phi),
                                                   args.samples, seed++);
      const double dev =
          std::abs(estimate.estimate - law) / estimate.standard_error;
      checks.push_back(
          {c.name, "3se", estimate.estimate, law, dev, 3.0, dev <= 3.0});
    }
  }

  int failures = 0;
  for (const auto& check : checks) {
    if (!check.pass) ++failures;
    std::cout << (check.pass ? "[ok]   " : "[FAIL] ") << check.name
              << ": estimate=" << format_value(check.estimate)
              << " reference=" << format_value(check.reference)
              << " deviation=" << format_value(check.deviation)
              << (check.kind == "3se" ? " se" : "")
              << " (tolerance " << format_value(check.tolerance)
              << (check.kind == "3se" ? " se" : "") << ")\n";
  }
  if (failures == 0)
    std::cout << "verification passed (" << checks.size() << " checks, "
              << args.samples << " samples, seed " << args.seed << ")\n";
  else
    std::cout << "verification FAILED (" << failures << " of " << checks.size()
              << " checks)\n";

  if (!args.csv.empty()) {
    RunManifest manifest = RunManifest::make("verify");
    manifest.add("samples", args.samples);
    manifest.add("inject_error", args.inject_error);
    manifest.seed = args.seed;
    CsvSink sink(args.csv);
    auto& os = sink.stream();
    write_manifest(os, manifest);
    os << "check,kind,estimate,reference,deviation,tolerance,pass\n";
    for (const auto& check : checks)
      os << check.name << "," << check.kind << ","
         << format_value(check.estimate) << ","
         << format_value(check.reference) << ","
         << format_value(check.deviation) << ","
         << format_value(check.tolerance) << ","
         << (check.pass ? "true" : "false") << "\n";
  }
  return failures == 0 ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    ConfigDefaults config(
        [&] {
          const std::string path = find_config_path(argc, argv);
          return path.empty() ? std::map<std::string, std::string>{}
                              : load_config(path);
        }());

    CLI::App app{
        "screening analytics: predictive values under falling prevalence,\n"
        "loss ratios, prevalence thresholds, serial-testing plans, and\n"
        "screen-and-treat trajectories"};
    app.require_subcommand(1);
    app.set_version_flag("--version", screenlab::kVersion);
    std::string config_path;  // consumed by the pre-scan; registered for help
    app.add_option("--config,-c", config_path,
                   "key = value defaults file (env: SCREENLAB_CONFIG)");

    CurveArgs curve_args;
    auto* curve_cmd = app.add_subcommand(
        "curve", "sample the ppv/fdr curve over a prevalence grid");
    config.add(*curve_cmd, "--sensitivity", curve_args.sensitivity,
               "test sensitivity in (0,1]", true);
    config.add(*curve_cmd, "--specificity", curve_args.specificity,
               "test specificity in (0,1]", true);
    config.add(*curve_cmd, "--phi-min", curve_args.phi_min,
               "grid start (default 0)", false);
    config.add(*curve_cmd, "--phi-max", curve_args.phi_max,
               "grid end (default 1)", false);
    config.add(*curve_cmd, "--points", curve_args.points,
               "grid size (default 101)", false);
    config.add(*curve_cmd, "--csv", curve_args.csv,
               "write CSV here instead of stdout", false);
    curve_cmd->add_option("--config,-c", config_path,
                          "key = value defaults file");

    ZetaArgs zeta_args;
    auto* zeta_cmd = app.add_subcommand(
        "zeta", "loss ratio and partials for a prevalence reduction");
    config.add(*zeta_cmd, "--sensitivity", zeta_args.sensitivity,
               "test sensitivity in (0,1]", true);
    config.add(*zeta_cmd, "--specificity", zeta_args.specificity,
               "test specificity in (0,1]", true);
    config.add(*zeta_cmd, "--prevalence", zeta_args.prevalence,
               "baseline prevalence phi0", true);
    config.add(*zeta_cmd, "--reduction", zeta_args.reduction,
               "prevalence reduction k, 0 <= k < phi0", true);
    config.add(*zeta_cmd, "--csv", zeta_args.csv, "also write a CSV row here",
               false);
    zeta_cmd->add_option("--config,-c", config_path,
                         "key = value defaults file");

    ThresholdArgs threshold_args;
    auto* threshold_cmd = app.add_subcommand(
        "threshold", "prevalence threshold and the ppv collapse point");
    config.add(*threshold_cmd, "--sensitivity", threshold_args.sensitivity,
               "test sensitivity in (0,1]", true);
    config.add(*threshold_cmd, "--specificity", threshold_args.specificity,
               "test specificity in (0,1]", true);
    config.add(*threshold_cmd, "--csv", threshold_args.csv,
               "also write a CSV row here", false);
    threshold_cmd->add_option("--config,-c", config_path,
                              "key = value defaults file");

    IterationsArgs iterations_args;
    auto* iterations_cmd = app.add_subcommand(
        "iterations", "serial positives needed to reach a target ppv");
    config.add(*iterations_cmd, "--sensitivity", iterations_args.sensitivity,
               "test sensitivity in (0,1]", true);
    config.add(*iterations_cmd, "--specificity", iterations_args.specificity,
               "test specificity in (0,1]", true);
    config.add(*iterations_cmd, "--prevalence", iterations_args.prevalence,
               "current prevalence", true);
    auto* target_opt =
        config.add(*iterations_cmd, "--target", iterations_args.target,
                   "target ppv in (0,1)", false);
    auto* to_threshold_opt = iterations_cmd->add_flag(
        "--to-threshold", iterations_args.to_threshold,
        "aim for the prevalence-threshold ppv");
    config.add(*iterations_cmd, "--csv", iterations_args.csv,
               "also write the posterior ladder here", false);
    iterations_cmd->add_option("--config,-c", config_path,
                               "key = value defaults file");

    SimulateArgs simulate_args;
    auto* simulate_cmd = app.add_subcommand(
        "simulate", "run a screen-and-treat program trajectory");
    config.add(*simulate_cmd, "--sensitivity", simulate_args.sensitivity,
               "test sensitivity in (0,1]", true);
    config.add(*simulate_cmd, "--specificity", simulate_args.specificity,
               "test specificity in (0,1]", true);
    config.add(*simulate_cmd, "--prevalence", simulate_args.prevalence,
               "initial prevalence in (0,1)", true);
    config.add(*simulate_cmd, "--coverage", simulate_args.coverage,
               "fraction screened per step (default 0)", false);
    config.add(*simulate_cmd, "--efficacy", simulate_args.efficacy,
               "cure probability given detection (default 0)", false);
    config.add(*simulate_cmd, "--incidence", simulate_args.incidence,
               "new-case inflow per step (default 0)", false);
    config.add(*simulate_cmd, "--steps", simulate_args.steps,
               "steps to simulate (default 10)", false);
    simulate_cmd->add_flag(
        "--stop-at-threshold", simulate_args.stop_at_threshold,
        "halt at the first step below the prevalence threshold");
    config.add(*simulate_cmd, "--csv", simulate_args.csv,
               "write CSV here instead of stdout", false);
    simulate_cmd->add_option("--config,-c", config_path,
                             "key = value defaults file");

    VerifyArgs verify_args;
    auto* verify_cmd = app.add_subcommand(
        "verify", "cross-check closed forms against stochastic oracles");
    config.add(*verify_cmd, "--samples", verify_args.samples,
               "samples per stochastic check (default 1000000)", false);
    config.add(*verify_cmd, "--seed", verify_args.seed,
               "base rng seed (default 1)", false);
    verify_cmd
        ->add_flag("--inject-error", verify_args.inject_error,
                   "corrupt one reference value; verification must fail")
        ->group("");  // test hook, hidden from help
    config.add(*verify_cmd, "--csv", verify_args.csv,
               "also write per-check rows here", false);
    verify_cmd->add_option("--config,-c", config_path,
                           "key = value defaults file");

    try {
      app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
      return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
      return app.exit(e);
    } catch (const CLI::ParseError& e) {
      app.exit(e);
      return 1;
    }

    if (curve_cmd->parsed()) return cmd_curve(curve_args);
    if (zeta_cmd->parsed()) return cmd_zeta(zeta_args);
    if (threshold_cmd->parsed()) return cmd_threshold(threshold_args);
    if (iterations_cmd->parsed()) {
      // Explicit flags win over config-file defaults.
      const bool target_given =
          target_opt->count() > 0 || !std::isnan(iterations_args.target);
      if (target_opt->count() > 0 && to_threshold_opt->count() > 0)
        throw DomainError(
            "iterations needs exactly one of --target or --to-threshold");
      if (to_threshold_opt->count() > 0)
        iterations_args.to_threshold = true;
      else if (!target_given)
        throw DomainError(
            "iterations needs one of --target or --to-threshold");
      return cmd_iterations(iterations_args);
    }
    if (simulate_cmd->parsed()) return cmd_simulate(simulate_args);
    if (verify_cmd->parsed()) return cmd_verify(verify_args);
    return 1;
  } catch (const screenlab::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
}
