#include <catch2/catch_amalgamated.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

#include "screenlab/screenlab.hpp"

// End-to-end tests of the command-line binary: exit-status contract,
// self-describing CSV output, config-file defaulting, and byte-level
// reproducibility. The binary path comes from SCREENLAB_BIN or the build.

namespace fs = std::filesystem;
using namespace screenlab;

namespace {

std::string binary() {
  if (const char* env = std::getenv("SCREENLAB_BIN"); env && *env) return env;
  return SCREENLAB_BIN_PATH;
}

const fs::path& work_dir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() /
                 ("screenlab_cli_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct RunResult {
  int status;
  std::string out;
  std::string err;
};

// `env` is a raw prefix like "SOURCE_DATE_EPOCH=42 ".
RunResult run(const std::string& args, const std::string& env = "") {
  const fs::path out = work_dir() / "stdout.txt";
  const fs::path err = work_dir() / "stderr.txt";
  const std::string command = env + "\"" + binary() + "\" " + args + " > \"" +
                              out.string() + "\" 2> \"" + err.string() + "\"";
  const int rc = std::system(command.c_str());
  REQUIRE(rc != -1);
  return {WEXITSTATUS(rc), slurp(out), slurp(err)};
}

std::map<std::string, std::string> parse_manifest(const std::string& text) {
  std::map<std::string, std::string> params;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("# ", 0) != 0) break;
    const auto eq = line.find('=');
    REQUIRE(eq != std::string::npos);
    params[line.substr(2, eq - 2)] = line.substr(eq + 1);
  }
  return params;
}

std::vector<std::string> data_rows(const std::string& text) {
  std::vector<std::string> rows;
  std::istringstream in(text);
  std::string line;
  bool past_header = false;
  while (std::getline(in, line)) {
    if (line.rfind("#", 0) == 0) continue;
    if (!past_header) {
      past_header = true;  // column header
      continue;
    }
    rows.push_back(line);
  }
  return rows;
}

}  // namespace

TEST_CASE("curve csv carries a manifest that reproduces it bit for bit") {
  const fs::path csv = work_dir() / "curve.csv";
  const auto result =
      run("curve --sensitivity 0.85 --specificity 0.9 --phi-min 0.013 "
          "--phi-max 0.911 --points 37 --csv \"" +
              csv.string() + "\"",
          "SOURCE_DATE_EPOCH=42 ");
  REQUIRE(result.status == 0);
  REQUIRE(result.out.empty());

  const std::string text = slurp(csv);
  const auto params = parse_manifest(text);
  REQUIRE(params.at("tool_version") == kVersion);
  REQUIRE(params.at("subcommand") == "curve");

  // Rebuild the entire file from nothing but the manifest parameters.
  const TestCharacteristics test(std::stod(params.at("sensitivity")),
                                 std::stod(params.at("specificity")));
  const double phi_min = std::stod(params.at("phi_min"));
  const double phi_max = std::stod(params.at("phi_max"));
  const int points = std::stoi(params.at("points"));
  const auto curve = sample_curve(test, phi_min, phi_max, points);

  setenv("SOURCE_DATE_EPOCH", "42", 1);
  RunManifest manifest = RunManifest::make("curve");
  unsetenv("SOURCE_DATE_EPOCH");
  manifest.add("sensitivity", std::stod(params.at("sensitivity")));
  manifest.add("specificity", std::stod(params.at("specificity")));
  manifest.add("phi_min", phi_min);
  manifest.add("phi_max", phi_max);
  manifest.add("points", points);
  std::ostringstream rebuilt;
  write_curve_csv(rebuilt, manifest, test, curve);

  REQUIRE(rebuilt.str() == text);
  REQUIRE(data_rows(text).size() == 37);
}

TEST_CASE("curve defaults to the documented grid on stdout") {
  const auto result = run("curve --sensitivity 0.85 --specificity 0.9",
                          "SOURCE_DATE_EPOCH=42 ");
  REQUIRE(result.status == 0);
  REQUIRE(data_rows(result.out).size() == 101);
  REQUIRE(result.out.find("# phi_e=0.25539679299\n") != std::string::npos);
  REQUIRE(result.out.find("# ppv_at_phi_e=0.74460320701\n") !=
          std::string::npos);
  REQUIRE(result.out.find("phi,ppv,fdr\n") != std::string::npos);
  REQUIRE(result.out.find("0,0,1\n") != std::string::npos);
  REQUIRE(result.out.find("1,1,0\n") != std::string::npos);
}

TEST_CASE("simulate csv round-trips through its manifest") {
  const fs::path csv = work_dir() / "simulate.csv";
  const auto result =
      run("simulate --sensitivity 0.85 --specificity 0.9 --prevalence 0.38 "
          "--coverage 0.5 --efficacy 0.8 --incidence 0.02 --steps 9 --csv \"" +
              csv.string() + "\"",
          "SOURCE_DATE_EPOCH=7777 ");
  REQUIRE(result.status == 0);

  const std::string text = slurp(csv);
  const auto params = parse_manifest(text);

  ProgramConfig config{TestCharacteristics(std::stod(params.at("sensitivity")),
                                           std::stod(params.at("specificity"))),
                       Prevalence(std::stod(params.at("prevalence")))};
  config.coverage = std::stod(params.at("coverage"));
  config.treatment_efficacy = std::stod(params.at("efficacy"));
  config.incidence = std::stod(params.at("incidence"));
  config.steps = std::stoi(params.at("steps"));
  config.stop_at_threshold = params.at("stop_at_threshold") == "true";

  setenv("SOURCE_DATE_EPOCH", "7777", 1);
  RunManifest manifest = RunManifest::make("simulate");
  unsetenv("SOURCE_DATE_EPOCH");
  manifest.add("sensitivity", config.test.sensitivity());
  manifest.add("specificity", config.test.specificity());
  manifest.add("prevalence", config.initial_prevalence.value());
  manifest.add("coverage", config.coverage);
  manifest.add("efficacy", config.treatment_efficacy);
  manifest.add("incidence", config.incidence);
  manifest.add("steps", config.steps);
  manifest.add("stop_at_threshold", config.stop_at_threshold);
  std::ostringstream rebuilt;
  write_trajectory_csv(rebuilt, manifest, run_trajectory(config));

  REQUIRE(rebuilt.str() == text);
  REQUIRE(data_rows(text).size() == 10);
}

TEST_CASE("simulate honors zero steps and the stop flag") {
  const auto single =
      run("simulate --sensitivity 0.85 --specificity 0.9 --prevalence 0.38 "
          "--steps 0");
  REQUIRE(single.status == 0);
  REQUIRE(data_rows(single.out).size() == 1);

  const auto stopped =
      run("simulate --sensitivity 0.85 --specificity 0.9 --prevalence 0.38 "
          "--coverage 0.5 --efficacy 0.8 --steps 50 --stop-at-threshold");
  REQUIRE(stopped.status == 0);
  const auto rows = data_rows(stopped.out);
  REQUIRE(rows.size() == 2);
  REQUIRE(rows.back().rfind("1,0.2508,", 0) == 0);
  REQUIRE(rows.back().find(",true") != std::string::npos);
}

TEST_CASE("zeta prints the loss report") {
  const auto result =
      run("zeta --sensitivity 0.85 --specificity 0.9 --prevalence 0.38 "
          "--reduction 0.2");
  REQUIRE(result.status == 0);
  REQUIRE(result.out.find("zeta          : 0.776035834267\n") !=
          std::string::npos);
  REQUIRE(result.out.find("scenario      : ThresholdBetween\n") !=
          std::string::npos);
  REQUIRE(result.out.find("d zeta / d phi0 : 1.30415863581\n") !=
          std::string::npos);
  REQUIRE(result.out.find("d zeta / d k    : -1.83460008102\n") !=
          std::string::npos);

  // k = 0: the ratio is exactly one and the stencil leaves the domain.
  const auto identity =
      run("zeta --sensitivity 0.85 --specificity 0.9 --prevalence 0.38 "
          "--reduction 0");
  REQUIRE(identity.status == 0);
  REQUIRE(identity.out.find("zeta          : 1\n") != std::string::npos);
  REQUIRE(identity.out.find("partials      : unavailable") !=
          std::string::npos);
}

TEST_CASE("threshold verb reports the collapse point") {
  const fs::path csv = work_dir() / "threshold.csv";
  const auto result = run("threshold --sensitivity 0.85 --specificity 0.9 "
                          "--csv \"" + csv.string() + "\"",
                          "SOURCE_DATE_EPOCH=1 ");
  REQUIRE(result.status == 0);
  REQUIRE(result.out.find("phi_e        : 0.25539679299\n") !=
          std::string::npos);
  REQUIRE(result.out.find("ppv at phi_e : 0.74460320701\n") !=
          std::string::npos);
  const auto rows = data_rows(slurp(csv));
  REQUIRE(rows.size() == 1);
  REQUIRE(rows[0] ==
          "0.85,0.9,0.75,8.5,2.91547594742,0.25539679299,0.74460320701");

  // Perfect specificity: threshold degenerates, ratio quantities undefined.
  const auto perfect = run("threshold --sensitivity 0.85 --specificity 1.0");
  REQUIRE(perfect.status == 0);
  REQUIRE(perfect.out.find("phi_e        : 0\n") != std::string::npos);
  REQUIRE(perfect.out.find("undefined (perfect specificity)") !=
          std::string::npos);
}

TEST_CASE("iterations verb plans the posterior ladder") {
  const fs::path csv = work_dir() / "iterations.csv";
  const auto result =
      run("iterations --sensitivity 0.85 --specificity 0.9 --prevalence 0.18 "
          "--to-threshold --csv \"" + csv.string() + "\"",
          "SOURCE_DATE_EPOCH=1 ");
  REQUIRE(result.status == 0);
  REQUIRE(result.out.find("iterations : 2\n") != std::string::npos);
  REQUIRE(result.out.find("1: 0.651063829787\n") != std::string::npos);
  REQUIRE(result.out.find("2: 0.94068716094\n") != std::string::npos);
  const auto rows = data_rows(slurp(csv));
  REQUIRE(rows.size() == 2);
  REQUIRE(rows[0] == "1,0.651063829787");
  REQUIRE(rows[1] == "2,0.94068716094");

  const auto one =
      run("iterations --sensitivity 0.85 --specificity 0.9 --prevalence 0.38 "
          "--target 0.5");
  REQUIRE(one.status == 0);
  REQUIRE(one.out.find("iterations : 1\n") != std::string::npos);

  const auto zero =
      run("iterations --sensitivity 0.85 --specificity 0.9 --prevalence 0.38 "
          "--target 0.3");
  REQUIRE(zero.status == 0);
  REQUIRE(zero.out.find("iterations : 0\n") != std::string::npos);
  REQUIRE(zero.out.find("prior already meets the target") !=
          std::string::npos);
}

TEST_CASE("exit status separates success, usage, and verification failure") {
  REQUIRE(run("verify --samples 200000 --seed 1").status == 0);
  REQUIRE(run("verify --samples 200000 --seed 1 --inject-error").status == 2);
  REQUIRE(run("verify --samples 5000").status == 1);
  REQUIRE(run("curve --sensitivity 0.3 --specificity 0.6").status == 1);
  REQUIRE(run("zeta --sensitivity 0.85 --specificity 0.9 --prevalence 0.38 "
              "--reduction 0.5")
              .status == 1);
  REQUIRE(run("curve --specificity 0.9").status == 1);  // missing required
  REQUIRE(run("iterations --sensitivity 0.85 --specificity 0.9 "
              "--prevalence 0.18")
              .status == 1);
  REQUIRE(run("iterations --sensitivity 0.85 --specificity 0.9 "
              "--prevalence 0.18 --target 0.9 --to-threshold")
              .status == 1);
  REQUIRE(run("curve --sensitivity 0.85 --specificity 0.9 --phi-min 0.9 "
              "--phi-max 0.1")
              .status == 1);
  REQUIRE(run("").status == 1);            // a subcommand is required
  REQUIRE(run("--help").status == 0);
  REQUIRE(run("--version").status == 0);
  REQUIRE(run("nonsense").status == 1);
}

TEST_CASE("verify writes per-check csv rows") {
  const fs::path csv = work_dir() / "verify.csv";
  const auto result = run("verify --samples 200000 --seed 1 --csv \"" +
                              csv.string() + "\"",
                          "SOURCE_DATE_EPOCH=9 ");
  REQUIRE(result.status == 0);
  REQUIRE(result.out.find("verification passed (13 checks") !=
          std::string::npos);
  const std::string text = slurp(csv);
  const auto params = parse_manifest(text);
  REQUIRE(params.at("rng") == "splitmix64");
  REQUIRE(params.at("seed") == "1");
  REQUIRE(params.at("samples") == "200000");
  const auto rows = data_rows(text);
  REQUIRE(rows.size() == 13);
  for (const auto& row : rows) {
    REQUIRE(row.find(",true") == row.size() - 5);
  }

  const auto injected = run("verify --samples 200000 --seed 1 --inject-error");
  REQUIRE(injected.status == 2);
  REQUIRE(injected.out.find("[FAIL]") != std::string::npos);
  REQUIRE(injected.out.find("verification FAILED") != std::string::npos);
}

TEST_CASE("outputs are byte-identical across reruns under a pinned epoch") {
  const std::string epoch = "SOURCE_DATE_EPOCH=1234567890 ";

  const auto curve_a = run("curve --sensitivity 0.85 --specificity 0.9", epoch);
  const auto curve_b = run("curve --sensitivity 0.85 --specificity 0.9", epoch);
  REQUIRE(curve_a.out == curve_b.out);

  const std::string simulate_args =
      "simulate --sensitivity 0.85 --specificity 0.9 --prevalence 0.38 "
      "--coverage 0.5 --efficacy 0.8 --steps 12";
  REQUIRE(run(simulate_args, epoch).out == run(simulate_args, epoch).out);

  const fs::path csv_a = work_dir() / "verify_a.csv";
  const fs::path csv_b = work_dir() / "verify_b.csv";
  REQUIRE(run("verify --samples 200000 --seed 3 --csv \"" + csv_a.string() +
                  "\"",
              epoch)
              .status == 0);
  REQUIRE(run("verify --samples 200000 --seed 3 --csv \"" + csv_b.string() +
                  "\"",
              epoch)
              .status == 0);
  REQUIRE(slurp(csv_a) == slurp(csv_b));
  REQUIRE(!slurp(csv_a).empty());
}

TEST_CASE("config files supply defaults that flags override") {
  const fs::path cfg = work_dir() / "defaults.cfg";
  std::ofstream(cfg) << "sensitivity = 0.85\n"
                     << "specificity = 0.90  # reference test\n"
                     << "\n"
                     << "prevalence = 0.38\n"
                     << "reduction = 0.2\n";

  const auto from_config = run("zeta --config \"" + cfg.string() + "\"");
  REQUIRE(from_config.status == 0);
  const auto from_flags =
      run("zeta --sensitivity 0.85 --specificity 0.9 --prevalence 0.38 "
          "--reduction 0.2");
  REQUIRE(from_config.out == from_flags.out);

  const auto overridden =
      run("zeta -c \"" + cfg.string() + "\" --reduction 0.3");
  REQUIRE(overridden.status == 0);
  REQUIRE(overridden.out.find("zeta          : 0.506578947368\n") !=
          std::string::npos);

  const auto via_env =
      run("zeta", "SCREENLAB_CONFIG=\"" + cfg.string() + "\" ");
  REQUIRE(via_env.out == from_flags.out);

  REQUIRE(run("zeta --config /nonexistent.cfg").status == 1);

  const fs::path broken = work_dir() / "broken.cfg";
  std::ofstream(broken) << "sensitivity 0.85\n";
  REQUIRE(run("zeta --config \"" + broken.string() + "\"").status == 1);

  const fs::path garbage = work_dir() / "garbage.cfg";
  std::ofstream(garbage) << "sensitivity = pretty-high\n";
  REQUIRE(run("zeta --config \"" + garbage.string() + "\"").status == 1);
}
