#include "stbddc/harness/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace stbddc {

using json = nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorCode::kConfig, what); }

void check_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) bad(where + ": expected an object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!ok.count(it.key())) bad(where + ": unknown key '" + it.key() + "'");
}

template <class T>
T get(const json& obj, const char* key, const std::string& where, T fallback) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    bad(where + "." + key + ": wrong type");
  }
}

FieldSpec parse_field(const json& obj, const char* key, FieldSpec fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  FieldSpec f;
  if (v.is_number()) {
    f.kind = FieldSpec::Kind::kConstant;
    f.value = v.get<double>();
  } else if (v.is_string() && (v == "x+y" || v == "x_plus_y")) {
    f.kind = FieldSpec::Kind::kXPlusY;
  } else if (v.is_string() && v == "sinusoidal") {
    f.kind = FieldSpec::Kind::kSinusoidal;
  } else {
    bad(std::string("physics.") + key + ": expected a number, \"x+y\" or \"sinusoidal\"");
  }
  return f;
}

json field_json(const FieldSpec& f) {
  switch (f.kind) {
    case FieldSpec::Kind::kXPlusY: return "x+y";
    case FieldSpec::Kind::kSinusoidal: return "sinusoidal";
    default: return f.value;
  }
}

RunMode parse_mode(const std::string& s) {
  if (s == "spacetime") return RunMode::kSpaceTime;
  if (s == "time_only") return RunMode::kTimeOnly;
  if (s == "sequential") return RunMode::kSequential;
  if (s == "oracle") return RunMode::kOracle;
  bad("mode: unknown value '" + s + "'");
}

int line_of(const std::string& text, std::size_t byte) {
  int line = 1;
  for (std::size_t i = 0; i < std::min(byte, text.size()); ++i)
    if (text[i] == '\n') ++line;
  return line;
}

void validate(const ExperimentConfig& c) {
  if (c.length_x <= 0 || c.length_y <= 0 || c.final_time <= 0) bad("domain: extents must be positive");
  if (c.px < 1 || c.py < 1 || c.pt < 1) bad("partition: px, py, pt must be >= 1");
  const bool direct = c.h > 0 && c.dt > 0;
  const bool relative = c.cells_per_subdomain > 0 && c.steps_per_slab > 0;
  if (direct == relative) bad("mesh: give either h and dt, or cells_per_subdomain and steps_per_slab");
  for (int a : c.scaling)
    if (a < 1) bad("scaling: factors must be integers >= 1");
  if (c.solver.gmres.relative_tolerance <= 0 || c.solver.gmres.max_iterations < 1)
    bad("solver: tolerance must be positive and max_iterations >= 1");
  if (c.picard.relaxation <= 0 || c.picard.relaxation > 1) bad("picard.relaxation must lie in (0, 1]");
  if (c.picard.tolerance <= 0) bad("picard.tolerance must be positive");
  if (c.threads < 1) bad("solver.threads must be >= 1");
}

}  // namespace

std::string to_string(RunMode mode) {
  switch (mode) {
    case RunMode::kSpaceTime: return "spacetime";
    case RunMode::kTimeOnly: return "time_only";
    case RunMode::kSequential: return "sequential";
    case RunMode::kOracle: return "oracle";
  }
  return "?";
}

ExperimentConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    bad("parse error at line " + std::to_string(line_of(text, e.byte)) + ": " + e.what());
  }
  check_keys(j, "config",
             {"name", "mode", "domain", "mesh", "partition", "scaling", "physics", "solver", "picard", "output", "seed"});
  ExperimentConfig c;
  c.name = get<std::string>(j, "name", "config", c.name);
  c.mode = parse_mode(get<std::string>(j, "mode", "config", "spacetime"));
  if (j.contains("domain")) {
    const json& d = j["domain"];
    check_keys(d, "domain", {"lx", "ly", "T"});
    c.length_x = get<double>(d, "lx", "domain", c.length_x);
    c.length_y = get<double>(d, "ly", "domain", c.length_y);
    c.final_time = get<double>(d, "T", "domain", c.final_time);
  }
  if (j.contains("mesh")) {
    const json& m = j["mesh"];
    check_keys(m, "mesh", {"h", "dt", "cells_per_subdomain", "steps_per_slab"});
    c.h = get<double>(m, "h", "mesh", 0.0);
    c.dt = get<double>(m, "dt", "mesh", 0.0);
    c.cells_per_subdomain = get<int>(m, "cells_per_subdomain", "mesh", 0);
    c.steps_per_slab = get<int>(m, "steps_per_slab", "mesh", 0);
  }
  if (j.contains("partition")) {
    const json& p = j["partition"];
    check_keys(p, "partition", {"px", "py", "pt"});
    c.px = get<int>(p, "px", "partition", 1);
    c.py = get<int>(p, "py", "partition", c.px);
    c.pt = get<int>(p, "pt", "partition", 1);
  }
  c.scaling = get<std::vector<int>>(j, "scaling", "config", c.scaling);
  if (j.contains("physics")) {
    const json& ph = j["physics"];
    check_keys(ph, "physics",
               {"nu", "beta", "sigma", "forcing", "dirichlet", "initial", "supg", "tau", "nonlinear"});
    if (ph.contains("nu")) {
      if (ph["nu"].is_array()) {
        c.nu_values = get<std::vector<double>>(ph, "nu", "physics", {});
      } else {
        c.nu_values = {get<double>(ph, "nu", "physics", 1.0)};
      }
    }
    const auto beta = get<std::vector<double>>(ph, "beta", "physics", {0.0, 0.0});
    if (beta.size() != 2) bad("physics.beta: expected [bx, by]");
    c.beta_x = beta[0];
    c.beta_y = beta[1];
    c.sigma = get<double>(ph, "sigma", "physics", 0.0);
    c.forcing = parse_field(ph, "forcing", c.forcing);
    c.dirichlet = parse_field(ph, "dirichlet", c.dirichlet);
    c.initial = parse_field(ph, "initial", c.initial);
    if (c.dirichlet.kind == FieldSpec::Kind::kSinusoidal || c.initial.kind == FieldSpec::Kind::kSinusoidal) {
      // the manufactured solution vanishes on the boundary and at t = 0
      bad("physics: \"sinusoidal\" is only meaningful for the forcing");
    }
    c.supg = get<bool>(ph, "supg", "physics", false);
    const std::string tau = get<std::string>(ph, "tau", "physics", "dt");
    if (tau == "dt") {
      c.tau = TauFormula::kInverseRateSum;
    } else if (tau == "coth") {
      c.tau = TauFormula::kCoth;
    } else {
      bad("physics.tau: expected \"dt\" or \"coth\"");
    }
    if (ph.contains("nonlinear")) {
      const json& nl = ph["nonlinear"];
      check_keys(nl, "physics.nonlinear", {"nu0", "p"});
      c.nonlinear = true;
      c.nu0 = get<double>(nl, "nu0", "physics.nonlinear", 1.0);
      c.p = get<double>(nl, "p", "physics.nonlinear", 0.0);
      if (c.nu0 <= 0 || c.p < 0) bad("physics.nonlinear: needs nu0 > 0 and p >= 0");
    }
  }
  if (j.contains("solver")) {
    const json& s = j["solver"];
    check_keys(s, "solver", {"tolerance", "max_iterations", "restart", "coarse", "initial_guess", "threads"});
    c.solver.gmres.relative_tolerance = get<double>(s, "tolerance", "solver", 1e-6);
    c.solver.gmres.max_iterations = get<int>(s, "max_iterations", "solver", 1000);
    c.solver.gmres.restart = get<int>(s, "restart", "solver", 0);
    const std::string coarse = get<std::string>(s, "coarse", "solver", "corners_edges");
    if (coarse == "corners_edges") {
      c.solver.stbddc.variant = CoarseVariant::kCornersEdges;
    } else if (coarse == "corners") {
      c.solver.stbddc.variant = CoarseVariant::kCorners;
    } else {
      bad("solver.coarse: expected \"corners\" or \"corners_edges\"");
    }
    const std::string guess = get<std::string>(s, "initial_guess", "solver", "auto");
    if (guess == "auto") {
      c.solver.initial_guess = InitialGuess::kAuto;
    } else if (guess == "zero") {
      c.solver.initial_guess = InitialGuess::kZero;
    } else if (guess == "interior_correction") {
      c.solver.initial_guess = InitialGuess::kInteriorCorrection;
    } else {
      bad("solver.initial_guess: expected \"auto\", \"zero\" or \"interior_correction\"");
    }
    c.threads = get<int>(s, "threads", "solver", 1);
  }
  if (j.contains("picard")) {
    const json& p = j["picard"];
    check_keys(p, "picard", {"relaxation", "tolerance", "relative", "max_iterations", "stall_window"});
    c.picard.relaxation = get<double>(p, "relaxation", "picard", c.picard.relaxation);
    c.picard.tolerance = get<double>(p, "tolerance", "picard", c.picard.tolerance);
    c.picard.relative = get<bool>(p, "relative", "picard", c.picard.relative);
    c.picard.max_iterations = get<int>(p, "max_iterations", "picard", c.picard.max_iterations);
    c.picard.stall_window = get<int>(p, "stall_window", "picard", c.picard.stall_window);
  }
  c.output = get<std::string>(j, "output", "config", "");
  c.seed = get<unsigned>(j, "seed", "config", 1u);
  validate(c);
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) bad("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string config_to_json(const ExperimentConfig& c) {
  json j;
  j["name"] = c.name;
  j["mode"] = to_string(c.mode);
  j["domain"] = {{"lx", c.length_x}, {"ly", c.length_y}, {"T", c.final_time}};
  if (c.h > 0) {
    j["mesh"] = {{"h", c.h}, {"dt", c.dt}};
  } else {
    j["mesh"] = {{"cells_per_subdomain", c.cells_per_subdomain}, {"steps_per_slab", c.steps_per_slab}};
  }
  j["partition"] = {{"px", c.px}, {"py", c.py}, {"pt", c.pt}};
  j["scaling"] = c.scaling;
  json ph;
  ph["nu"] = c.nu_values;
  ph["beta"] = {c.beta_x, c.beta_y};
  ph["sigma"] = c.sigma;
  ph["forcing"] = field_json(c.forcing);
  ph["dirichlet"] = field_json(c.dirichlet);
  ph["initial"] = field_json(c.initial);
  ph["supg"] = c.supg;
  ph["tau"] = c.tau == TauFormula::kCoth ? "coth" : "dt";
  if (c.nonlinear) ph["nonlinear"] = {{"nu0", c.nu0}, {"p", c.p}};
  j["physics"] = ph;
  const char* guess = c.solver.initial_guess == InitialGuess::kZero                  ? "zero"
                      : c.solver.initial_guess == InitialGuess::kInteriorCorrection ? "interior_correction"
                                                                                     : "auto";
  j["solver"] = {{"tolerance", c.solver.gmres.relative_tolerance},
                 {"max_iterations", c.solver.gmres.max_iterations},
                 {"restart", c.solver.gmres.restart},
                 {"coarse", c.solver.stbddc.variant == CoarseVariant::kCorners ? "corners" : "corners_edges"},
                 {"initial_guess", guess},
                 {"threads", c.threads}};
  j["picard"] = {{"relaxation", c.picard.relaxation},
                 {"tolerance", c.picard.tolerance},
                 {"relative", c.picard.relative},
                 {"max_iterations", c.picard.max_iterations},
                 {"stall_window", c.picard.stall_window}};
  j["output"] = c.output;
  j["seed"] = c.seed;
  return j.dump(2);
}

}  // namespace stbddc
