#include <gtest/gtest.h>

#include <cstdlib>
#include <sstream>

#include "stbddc/harness/experiment.hpp"
#include "stbddc/harness/properties.hpp"

using namespace stbddc;

namespace {

ExperimentConfig small_sweep() {
  return parse_config(R"({
    "name": "small",
    "domain": {"lx": 1, "ly": 1, "T": 0.5},
    "mesh": {"cells_per_subdomain": 4, "steps_per_slab": 3},
    "partition": {"px": 2, "py": 2, "pt": 2},
    "scaling": [1, 2],
    "physics": {"nu": [0.1, 0.01], "beta": [1, 0.5], "sigma": 0.1, "forcing": "sinusoidal", "supg": true}
  })");
}

std::string without_timings(const std::string& line) {
  std::stringstream in(line);
  std::string cell, out;
  for (int col = 0; std::getline(in, cell, ','); ++col)
    if (col != 13 && col != 14) out += cell + ",";
  return out;
}

}  // namespace

TEST(Config, ParsesAndRoundTrips) {
  const ExperimentConfig c = small_sweep();
  EXPECT_EQ(c.px, 2);
  EXPECT_EQ(c.cells_per_subdomain, 4);
  EXPECT_EQ(c.nu_values.size(), 2u);
  EXPECT_EQ(c.forcing.kind, FieldSpec::Kind::kSinusoidal);
  EXPECT_EQ(c.tau, TauFormula::kInverseRateSum);
  const ExperimentConfig again = parse_config(config_to_json(c));
  EXPECT_EQ(config_to_json(again), config_to_json(c));
}

TEST(Config, ErrorsCarryLineOrKey) {
  try {
    parse_config("{\n  \"name\": \"x\",\n  \"mesh\": {\"h\": 0.1 \"dt\": 0.1}\n}");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kConfig);
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
  try {
    parse_config(R"({"mesh": {"h": 0.1, "dt": 0.1}, "physics": {"nuu": 1}})");
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("nuu"), std::string::npos);
  }
  EXPECT_THROW(parse_config(R"({"mesh": {"h": 0.1}})"), Error);
  EXPECT_THROW(parse_config(R"({"mesh": {"h": 0.1, "dt": 0.1}, "scaling": [0]})"), Error);
  EXPECT_THROW(parse_config(R"({"mesh": {"h": 0.1, "dt": 0.1}, "picard": {"relaxation": 0}})"), Error);
  EXPECT_THROW(parse_config(R"({"mesh": {"h": "a", "dt": 0.1}})"), Error);
}

TEST(Experiment, EmptySweepGivesHeaderOnly) {
  const ExperimentConfig c = parse_config(R"({"mesh": {"h": 0.1, "dt": 0.1}, "scaling": []})");
  const auto rows = run_experiment(c);
  std::ostringstream out;
  write_csv(out, rows);
  EXPECT_EQ(out.str(), csv_header() + "\n");
  EXPECT_EQ(csv_header().substr(0, 26), "alpha,px,py,pt,subdomains,");
}

TEST(Experiment, IndivisibleGridIsRejectedBeforeSolving) {
  const ExperimentConfig c = parse_config(R"({"mesh": {"h": 0.1, "dt": 0.1}, "partition": {"px": 3}})");
  EXPECT_THROW(run_experiment(c), Error);
  const ExperimentConfig d = parse_config(R"({"mesh": {"h": 0.3, "dt": 0.1}})");
  try {
    run_experiment(d);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kConfig);
  }
}

TEST(Experiment, ScalingKeepsCflConstantAndRowsAreDeterministic) {
  const ExperimentConfig c = small_sweep();
  const auto rows = run_experiment(c);
  ASSERT_EQ(rows.size(), 4u);
  for (const auto& r : rows) {
    EXPECT_TRUE(r.converged) << r.message;
    // recomputed from the config alone: h = 1 / (px H/h), dt = T / (pt K_n)
    const double h = 1.0 / (2 * 4), dt = 0.5 / (2 * 3), beta = std::sqrt(1.25);
    EXPECT_NEAR(r.cfl_beta, beta * dt / h, 1e-12);
    EXPECT_NEAR(r.cfl_nu, r.nu * dt / (h * h), 1e-12);
    EXPECT_NEAR(r.peclet, beta * h / (2 * r.nu), 1e-12);
    EXPECT_EQ(r.cells_per_subdomain, 4);
    EXPECT_EQ(r.steps_per_slab, 3);
    EXPECT_EQ(r.px, 2 * r.alpha);
    EXPECT_EQ(r.pt, 2 * r.alpha);
    EXPECT_EQ(r.subdomains, r.px * r.py * r.pt);
    EXPECT_TRUE(r.l2_error.has_value());
  }
  EXPECT_EQ(rows[0].cfl_nu, rows[2].cfl_nu);
  const auto again = run_experiment(c);
  for (std::size_t i = 0; i < rows.size(); ++i)
    EXPECT_EQ(without_timings(csv_line(rows[i])), without_timings(csv_line(again[i])));
}

TEST(Experiment, TimeOnlyScalesTimeAndSlabs) {
  const ExperimentConfig c = parse_config(R"({
    "mode": "time_only",
    "mesh": {"cells_per_subdomain": 6, "steps_per_slab": 4},
    "scaling": [1, 3],
    "physics": {"nu": 1, "forcing": "sinusoidal"}
  })");
  const auto rows = run_experiment(c);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[1].pt, 3);
  EXPECT_EQ(rows[1].px, 1);
  EXPECT_EQ(rows[1].num_steps, 12);
  EXPECT_EQ(rows[1].nx, 6);
  EXPECT_DOUBLE_EQ(rows[1].dt, rows[0].dt);
  EXPECT_EQ(rows[0].linear_iterations, 1);
}

TEST(Experiment, ModesAgreeOnTheError) {
  // same problem, four solvers: the error at T must coincide
  std::vector<double> errors;
  for (const char* mode : {"spacetime", "sequential", "oracle", "time_only"}) {
    ExperimentConfig c = parse_config(std::string(R"({"mode": ")") + mode + R"(",
      "mesh": {"h": 0.125, "dt": 0.0625}, "domain": {"T": 0.5},
      "partition": {"px": 2, "py": 2, "pt": 2},
      "solver": {"tolerance": 1e-12},
      "physics": {"nu": 0.5, "forcing": "sinusoidal"}})");
    const auto rows = run_experiment(c);
    ASSERT_EQ(rows.size(), 1u);
    ASSERT_TRUE(rows[0].converged) << mode;
    errors.push_back(*rows[0].l2_error);
  }
  for (double e : errors) EXPECT_NEAR(e, errors[2], 1e-9 * errors[2]);
}

TEST(Experiment, SidecarCarriesResolvedConfig) {
  const ExperimentConfig c = parse_config(R"({"name": "s", "mesh": {"h": 0.25, "dt": 0.25}})");
  const auto rows = run_experiment(c);
  const std::string js = sidecar_json(c, rows);
  EXPECT_NE(js.find("\"initial_guess\": \"auto\""), std::string::npos);
  EXPECT_NE(js.find("\"threads\""), std::string::npos);
  EXPECT_EQ(sidecar_path("out/run.csv"), "out/run.json");
}

TEST(Experiment, ThreadEnvironmentVariableWins) {
  ExperimentConfig c = parse_config(R"({"mesh": {"h": 0.25, "dt": 0.25}, "solver": {"threads": 3}})");
  setenv("STBDDC_NUM_THREADS", "2", 1);
  const std::string with_env = sidecar_json(c, {});
  unsetenv("STBDDC_NUM_THREADS");
  const std::string without = sidecar_json(c, {});
  EXPECT_NE(with_env.find("\"threads\": 2"), std::string::npos);
  EXPECT_NE(without.find("\"threads\": 3"), std::string::npos);
}

TEST(Table1, ConfigAndReferences) {
  const ExperimentConfig c = table1_config(2);
  EXPECT_EQ(c.scaling, (std::vector<int>{1, 2}));
  EXPECT_EQ(table1_reference(1, 1.0), 18);
  EXPECT_EQ(table1_reference(2, 1e-6), 11);
  EXPECT_FALSE(table1_reference(3, 1.0).has_value());
  // H/h = 30, K_n = 30, convective CFL 1
  EXPECT_NEAR(c.length_x / c.h / c.px, 30.0, 1e-9);
  EXPECT_NEAR(c.final_time / c.dt / c.pt, 30.0, 1e-9);
  EXPECT_NEAR(c.beta_x * c.dt / c.h, 1.0, 1e-12);
}

TEST(Verify, PassesForSeveralSeedsAndCatchesSignFlips) {
  for (unsigned seed = 1; seed <= 5; ++seed) {
    EXPECT_TRUE(check_assembly_equivalence(seed, {}, 10).passed);
    EXPECT_TRUE(check_positivity(seed, 50).passed);
    EXPECT_TRUE(check_energy_identity(seed, 5).passed);
  }
  VerifyHooks initial, final;
  initial.signs.initial = -1.0;
  final.signs.final = -1.0;
  EXPECT_FALSE(check_assembly_equivalence(1, initial, 3).passed);
  EXPECT_FALSE(check_assembly_equivalence(1, final, 3).passed);
}
