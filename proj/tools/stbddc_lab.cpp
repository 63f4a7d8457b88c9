// stbddc-lab: experiment runner, property battery and Table 1 sweep.
//
// Exit codes: 0 success, 1 solver failure (or failed property), 2 config error.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "stbddc/harness/experiment.hpp"
#include "stbddc/harness/properties.hpp"

using namespace stbddc;

namespace {

constexpr int kOk = 0;
constexpr int kSolverFailure = 1;
constexpr int kConfigFailure = 2;

bool write_outputs(const ExperimentConfig& config, const std::vector<ResultRow>& rows, const std::string& path) {
  std::ofstream csv(path);
  if (!csv) {
    std::cerr << "error: cannot write " << path << "\n";
    return false;
  }
  write_csv(csv, rows);
  const std::string side = sidecar_path(path);
  std::ofstream js(side);
  if (!js) {
    std::cerr << "error: cannot write " << side << "\n";
    return false;
  }
  js << sidecar_json(config, rows) << '\n';
  std::cerr << "wrote " << path << " and " << side << "\n";
  return true;
}

int all_converged(const std::vector<ResultRow>& rows) {
  for (const auto& r : rows)
    if (!r.converged) return kSolverFailure;
  return kOk;
}

int cmd_run(const std::string& config_path, std::string output, bool quiet) {
  ExperimentConfig config;
  std::vector<ResultRow> rows;
  try {
    config = load_config(config_path);
    if (output.empty()) output = config.output.empty() ? config.name + ".csv" : config.output;
    rows = run_experiment(config, quiet ? nullptr : &std::cerr);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == ErrorCode::kConfig || e.code() == ErrorCode::kInvalidPartition ||
                   e.code() == ErrorCode::kInvalidArgument
               ? kConfigFailure
               : kSolverFailure;
  }
  write_csv(std::cout, rows);
  if (!write_outputs(config, rows, output)) return kConfigFailure;
  return all_converged(rows);
}

int cmd_verify(unsigned seed, const std::string& flip) {
  VerifyHooks hooks;
  if (flip == "initial") hooks.signs.initial = -1.0;
  if (flip == "final") hooks.signs.final = -1.0;
  bool ok = true;
  for (const PropertyResult& r : verify_suite(seed, hooks)) {
    std::printf("%s %-28s %s (%.2f s)\n", r.passed ? "PASS" : "FAIL", r.name.c_str(), r.detail.c_str(), r.seconds);
    ok = ok && r.passed;
  }
  return ok ? kOk : kSolverFailure;
}

int cmd_table1(int rows_wanted, std::string output) {
  const ExperimentConfig config = table1_config(rows_wanted);
  std::vector<ResultRow> rows;
  try {
    rows = run_experiment(config, &std::cerr);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfigFailure;
  }
  std::printf("%-12s %8s %10s %10s %s\n", "P", "nu", "iters", "reference", "within tolerance");
  for (const auto& r : rows) {
    const auto ref = table1_reference(r.alpha, r.nu);
    char part[32];
    std::snprintf(part, sizeof part, "(%dx%d)x%d", r.px, r.py, r.pt);
    if (ref) {
      const double tol = std::max(0.3 * *ref, 4.0);
      std::printf("%-12s %8.0e %10d %10d %s\n", part, r.nu, r.linear_iterations, *ref,
                  std::abs(r.linear_iterations - *ref) <= tol ? "yes" : "no");
    } else {
      std::printf("%-12s %8.0e %10d %10s %s\n", part, r.nu, r.linear_iterations, "-", "-");
    }
  }
  if (output.empty()) output = "table1.csv";
  if (!write_outputs(config, rows, output)) return kConfigFailure;
  return all_converged(rows);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Space-time BDDC laboratory for transient convection-diffusion-reaction problems"};
  app.require_subcommand(1);
  app.footer("Set STBDDC_NUM_THREADS to override the thread count of any config.");

  std::string config_path, output, flip;
  bool quiet = false;
  unsigned seed = 1;
  int rows = 2;

  auto* run = app.add_subcommand("run", "run the sweep described by a JSON config");
  run->add_option("config", config_path, "config file")->required();
  run->add_option("-o,--output", output, "CSV path (default: config 'output', else <name>.csv)");
  run->add_flag("-q,--quiet", quiet, "no progress lines");

  auto* verify = app.add_subcommand("verify", "run the algebraic property battery");
  verify->add_option("--seed", seed, "seed of the random inputs");
  verify->add_option("--inject-sign-flip", flip, "flip one perturbation sign (mutation check)")
      ->check(CLI::IsMember({"initial", "final"}));

  auto* table1 = app.add_subcommand("table1", "CDR iteration-count sweep");
  table1->add_option("--rows", rows, "number of scaling rows")->check(CLI::PositiveNumber);
  table1->add_option("-o,--output", output, "CSV path (default table1.csv)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigFailure;
  }

  if (*run) return cmd_run(config_path, output, quiet);
  if (*verify) return cmd_verify(seed, flip);
  if (*table1) return cmd_table1(rows, output);
  return kConfigFailure;
}
