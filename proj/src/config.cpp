#include "dmnls/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

#include "dmnls/analysis.hpp"
#include "dmnls/baselines.hpp"
#include "dmnls/errors.hpp"
#include "dmnls/io.hpp"

namespace dmnls {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& msg) { throw ConfigError(msg); }

void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed,
                         const std::string& where) {
  for (const auto& item : obj.items())
    if (allowed.find(item.key()) == allowed.end())
      fail("unknown key '" + item.key() + "' in " + where);
}

double require_number(const json& obj, const std::string& key, const std::string& where) {
  if (!obj.contains(key)) fail(where + " is missing required key '" + key + "'");
  if (!obj[key].is_number()) fail(where + " key '" + key + "' must be a number");
  return obj[key].get<double>();
}

double number_or(const json& obj, const std::string& key, double fallback,
                 const std::string& where) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number()) fail(where + " key '" + key + "' must be a number");
  return obj[key].get<double>();
}

std::size_t positive_integer_or(const json& obj, const std::string& key,
                                std::size_t fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number_integer() || obj[key].get<std::int64_t>() < 1)
    fail(where + " key '" + key + "' must be a positive integer");
  return static_cast<std::size_t>(obj[key].get<std::int64_t>());
}

InitialDatum parse_initial(const json& obj) {
  if (!obj.is_object()) fail("'initial' must be an object");
  if (!obj.contains("kind") || !obj["kind"].is_string())
    fail("'initial' needs a string key 'kind'");
  const std::string kind = obj["kind"].get<std::string>();

  if (kind == "from_file") {
    reject_unknown_keys(obj, {"kind", "path"}, "'initial'");
    if (!obj.contains("path") || !obj["path"].is_string())
      fail("file datum needs a string key 'path'");
    return InitialDatum(FileDatum{obj["path"].get<std::string>()});
  }

  reject_unknown_keys(obj, {"kind", "amplitude", "width", "center", "velocity"},
                      "'initial'");
  const double amplitude = number_or(obj, "amplitude", 1.0, "'initial'");
  const double width = number_or(obj, "width", 1.0, "'initial'");
  const double center = number_or(obj, "center", 0.0, "'initial'");
  const double velocity = number_or(obj, "velocity", 0.0, "'initial'");
  try {
    if (kind == "gaussian")
      return InitialDatum(GaussianDatum{amplitude, width, center, velocity});
    if (kind == "sech") return InitialDatum(SechDatum{amplitude, width, center, velocity});
  } catch (const std::invalid_argument& e) {
    fail(std::string("invalid 'initial': ") + e.what());
  }
  fail("'initial' kind must be gaussian, sech, or from_file");
}

std::vector<double> parse_h_list(const json& grid) {
  if (!grid.contains("h_list") || !grid["h_list"].is_array() || grid["h_list"].empty())
    fail("'grid' needs a nonempty array 'h_list'");
  std::vector<double> h_list;
  for (const auto& v : grid["h_list"]) {
    if (!v.is_number()) fail("'h_list' entries must be numbers");
    h_list.push_back(v.get<double>());
  }
  for (double h : h_list)
    if (!(h > 0.0) || !(h <= 1.0)) fail("'h_list' entries must lie in (0, 1]");
  for (std::size_t i = 1; i < h_list.size(); ++i)
    if (!(h_list[i] < h_list[i - 1])) fail("'h_list' must be strictly decreasing");
  return h_list;
}

json resolved_echo(const RunConfig& cfg) {
  json problem{{"p", cfg.p}, {"d_av", cfg.d_av}};
  problem["kind"] = cfg.kind == SymbolKind::discrete ? "discrete" : "continuum";

  json grid{{"L_target", cfg.l_target}};
  if (cfg.mode == RunMode::simulate) grid["h"] = cfg.h;
  if (cfg.mode != RunMode::simulate) grid["h_list"] = cfg.h_list;
  if (cfg.mode == RunMode::converge) grid["h_ref"] = cfg.h_ref;

  json echo{{"mode", cfg.mode == RunMode::simulate
                         ? "simulate"
                         : (cfg.mode == RunMode::converge ? "converge" : "verify")},
            {"problem", problem},
            {"grid", grid},
            {"output", cfg.output}};
  if (cfg.mode != RunMode::verify) {
    echo["time"] = json{{"T", cfg.horizon},
                        {"dt", cfg.dt},
                        {"snapshot_every", cfg.snapshot_every}};
    const auto& shape = cfg.initial->shape();
    json initial;
    if (const auto* g = std::get_if<GaussianDatum>(&shape))
      initial = json{{"kind", "gaussian"},
                     {"amplitude", g->amplitude},
                     {"width", g->width},
                     {"center", g->center},
                     {"velocity", g->velocity}};
    else if (const auto* s = std::get_if<SechDatum>(&shape))
      initial = json{{"kind", "sech"},
                     {"amplitude", s->amplitude},
                     {"width", s->width},
                     {"center", s->center},
                     {"velocity", s->velocity}};
    else
      initial = json{{"kind", "from_file"}, {"path", std::get<FileDatum>(shape).path}};
    echo["initial"] = initial;
  }
  if (cfg.quadrature_nodes.has_value())
    echo["quadrature"] = *cfg.quadrature_nodes;
  else
    echo["quadrature"] = "auto";
  if (cfg.mode == RunMode::verify) {
    echo["seed"] = cfg.seed;
    echo["samples"] = cfg.samples;
  }
  if (cfg.mode == RunMode::converge) echo["slope_min"] = cfg.slope_min;
  return echo;
}

}  // namespace

RunConfig parse_config_text(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(std::string("configuration is not valid JSON: ") + e.what());
  }
  if (!root.is_object()) fail("configuration must be a JSON object");

  reject_unknown_keys(root,
                      {"mode", "problem", "grid", "time", "quadrature", "initial",
                       "output", "seed", "samples", "slope_min"},
                      "the configuration");

  RunConfig cfg;

  if (!root.contains("mode") || !root["mode"].is_string())
    fail("configuration needs a string key 'mode'");
  const std::string mode = root["mode"].get<std::string>();
  if (mode == "simulate")
    cfg.mode = RunMode::simulate;
  else if (mode == "converge")
    cfg.mode = RunMode::converge;
  else if (mode == "verify")
    cfg.mode = RunMode::verify;
  else
    fail("'mode' must be simulate, converge, or verify");

  if (!root.contains("problem") || !root["problem"].is_object())
    fail("configuration needs an object key 'problem'");
  const json& problem = root["problem"];
  reject_unknown_keys(problem, {"p", "d_av", "kind"}, "'problem'");
  cfg.p = require_number(problem, "p", "'problem'");
  cfg.d_av = require_number(problem, "d_av", "'problem'");
  if (!(cfg.p > 1.0) || !std::isfinite(cfg.p))
    fail("'problem.p' must be a finite number > 1");
  if (!std::isfinite(cfg.d_av)) fail("'problem.d_av' must be finite");
  if (problem.contains("kind")) {
    if (!problem["kind"].is_string()) fail("'problem.kind' must be a string");
    const std::string kind = problem["kind"].get<std::string>();
    if (kind == "discrete")
      cfg.kind = SymbolKind::discrete;
    else if (kind == "continuum")
      cfg.kind = SymbolKind::continuum;
    else
      fail("'problem.kind' must be discrete or continuum");
  }

  if (!root.contains("grid") || !root["grid"].is_object())
    fail("configuration needs an object key 'grid'");
  const json& grid = root["grid"];
  cfg.l_target = number_or(grid, "L_target", 32.0, "'grid'");
  if (!(cfg.l_target >= 8.0)) fail("'grid.L_target' must be at least 8");

  if (cfg.mode == RunMode::simulate) {
    reject_unknown_keys(grid, {"h", "L_target"}, "'grid'");
    cfg.h = require_number(grid, "h", "'grid'");
    if (!(cfg.h > 0.0) || !(cfg.h <= 1.0)) fail("'grid.h' must lie in (0, 1]");
  } else if (cfg.mode == RunMode::converge) {
    reject_unknown_keys(grid, {"h_list", "h_ref", "L_target"}, "'grid'");
    cfg.h_list = parse_h_list(grid);
    cfg.h_ref = require_number(grid, "h_ref", "'grid'");
    const double h_min = *std::min_element(cfg.h_list.begin(), cfg.h_list.end());
    if (!(cfg.h_ref > 0.0) || cfg.h_ref > h_min / 4.0)
      fail("'grid.h_ref' must be positive and at most min(h_list)/4");
  } else {
    reject_unknown_keys(grid, {"h_list", "L_target"}, "'grid'");
    if (grid.contains("h_list"))
      cfg.h_list = parse_h_list(grid);
    else
      cfg.h_list = {1.0, 0.5, 0.25, 0.125};
  }

  if (cfg.mode != RunMode::verify) {
    if (!root.contains("time") || !root["time"].is_object())
      fail("configuration needs an object key 'time'");
    const json& time = root["time"];
    reject_unknown_keys(time, {"T", "dt", "snapshot_every"}, "'time'");
    cfg.horizon = require_number(time, "T", "'time'");
    cfg.dt = number_or(time, "dt", 5.0e-3, "'time'");
    cfg.snapshot_every = positive_integer_or(time, "snapshot_every", 20, "'time'");
    if (!(cfg.horizon > 0.0) || !std::isfinite(cfg.horizon))
      fail("'time.T' must be a finite positive number");
    if (!(cfg.dt > 0.0) || !std::isfinite(cfg.dt))
      fail("'time.dt' must be a finite positive number");

    if (!root.contains("initial"))
      fail("simulate and converge configurations need an 'initial' datum");
    cfg.initial = parse_initial(root["initial"]);
  } else if (root.contains("time") || root.contains("initial")) {
    fail("verify configurations take neither 'time' nor 'initial'");
  }

  if (root.contains("quadrature")) {
    const json& q = root["quadrature"];
    if (q.is_string()) {
      if (q.get<std::string>() != "auto") fail("'quadrature' must be \"auto\" or an integer");
    } else if (q.is_number_integer()) {
      const auto m = q.get<std::int64_t>();
      if (m < 1 || m > 512) fail("'quadrature' must lie in [1, 512]");
      cfg.quadrature_nodes = static_cast<std::size_t>(m);
    } else {
      fail("'quadrature' must be \"auto\" or an integer");
    }
  }

  if (root.contains("output")) {
    if (!root["output"].is_string() || root["output"].get<std::string>().empty())
      fail("'output' must be a nonempty string");
    cfg.output = root["output"].get<std::string>();
  }
  if (root.contains("seed")) {
    if (!root["seed"].is_number_integer() || root["seed"].get<std::int64_t>() < 0)
      fail("'seed' must be a nonnegative integer");
    cfg.seed = root["seed"].get<std::uint64_t>();
  }
  cfg.samples = positive_integer_or(root, "samples", 1000, "the configuration");
  cfg.slope_min = number_or(root, "slope_min", 0.45, "the configuration");
  if (!std::isfinite(cfg.slope_min)) fail("'slope_min' must be finite");

  if (!admissible_exponent(cfg.p, cfg.d_av))
    std::fprintf(stderr,
                 "warning: p=%g with d_av=%g lies outside the a-priori H^1 regime\n",
                 cfg.p, cfg.d_av);
  if (cfg.mode != RunMode::verify && cfg.d_av == 0.0 && cfg.initial->analytic()) {
    const double l2 = cfg.initial->l2_norm();
    const double dl2 = cfg.initial->derivative_l2_norm();
    if (l2 > 0.0 && dl2 > 0.0) {
      const double t_star = barrier_lifespan(l2, dl2, cfg.p);
      if (cfg.horizon >= t_star)
        std::fprintf(stderr,
                     "warning: horizon %g reaches the d_av=0 growth-bound lifespan "
                     "T* = %.6g\n",
                     cfg.horizon, t_star);
    }
  }

  cfg.echo = resolved_echo(cfg).dump(2) + "\n";
  return cfg;
}

RunConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open configuration file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

std::string resolve_output_dir(const RunConfig& cfg) {
  if (const char* env = std::getenv("DMNLS_OUTPUT_DIR"); env != nullptr && *env != '\0')
    return env;
  return cfg.output;
}

namespace {

namespace fs = std::filesystem;

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::string snapshot_name(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "snapshot_%06zu.csv", index);
  return buf;
}

json json_double_array(const std::vector<double>& v) {
  json arr = json::array();
  for (double x : v) arr.push_back(x);
  return arr;
}

int run_simulate(const RunConfig& cfg, const fs::path& outdir) {
  const Lattice lat = make_lattice(cfg.h, cfg.l_target);
  const LatticeField phi = cfg.kind == SymbolKind::discrete
                               ? discretize(*cfg.initial, lat)
                               : sample_pointwise(*cfg.initial, lat);

  std::size_t nodes;
  if (cfg.quadrature_nodes.has_value()) {
    nodes = *cfg.quadrature_nodes;
    const std::size_t needed = effective_quadrature_nodes(phi, cfg.kind, 1);
    if (needed > nodes)
      std::fprintf(stderr,
                   "warning: pinned quadrature (%zu nodes) is below the %zu nodes the "
                   "populated band calls for\n",
                   nodes, needed);
  } else {
    nodes = effective_quadrature_nodes(phi, cfg.kind, 32);
  }
  const QuadratureRule quad = gauss_legendre(nodes);

  const ProblemSpec spec{cfg.p, cfg.d_av, cfg.kind};
  EvolveOptions eo;
  eo.horizon = cfg.horizon;
  eo.dt = cfg.dt;
  eo.snapshot_every = cfg.snapshot_every;
  if (cfg.d_av == 0.0) {
    double l2, dl2;
    if (cfg.initial->analytic()) {
      l2 = cfg.initial->l2_norm();
      dl2 = cfg.initial->derivative_l2_norm();
    } else {
      l2 = lp_norm(phi, 2.0);
      dl2 = lp_norm(forward_diff(phi), 2.0);
    }
    if (l2 > 0.0 && dl2 > 0.0) eo.barrier = BarrierParams{l2, dl2};
  }

  auto write_outputs = [&](const Trajectory& traj) {
    write_diagnostics_csv((outdir / "diagnostics.csv").string(), traj.diagnostics);
    for (std::size_t k = 0; k < traj.snapshots.size(); ++k)
      write_field_csv((outdir / snapshot_name(k)).string(), traj.snapshots[k]);
  };

  try {
    const Trajectory traj = evolve(phi, spec, quad, eo);
    write_outputs(traj);
  } catch (const EvolveAbort& abort) {
    write_outputs(abort.partial());
    std::fprintf(stderr, "trajectory aborted at t=%.6g: %s\n", abort.time(), abort.what());
    return 2;
  }
  return 0;
}

int run_converge(const RunConfig& cfg, const fs::path& outdir, std::size_t workers,
                 const std::string& report_override) {
  StudyOptions sopts;
  sopts.h_list = cfg.h_list;
  sopts.h_ref = cfg.h_ref;
  sopts.l_target = cfg.l_target;
  sopts.horizon = cfg.horizon;
  sopts.dt = cfg.dt;
  sopts.snapshot_every = cfg.snapshot_every;
  if (cfg.quadrature_nodes.has_value()) {
    sopts.quadrature_base = *cfg.quadrature_nodes;
    sopts.quadrature_escalate = false;
  }
  sopts.workers = workers;

  const ProblemSpec spec{cfg.p, cfg.d_av, SymbolKind::discrete};
  StudyResult result;
  try {
    result = convergence_study(*cfg.initial, spec, sopts);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("refinement study rejected the configuration: ") +
                      e.what());
  } catch (const EvolveAbort& abort) {
    std::fprintf(stderr, "study member aborted at t=%.6g: %s\n", abort.time(),
                 abort.what());
    return 2;
  }

  json report{{"h_list", json_double_array(result.h_list)},
              {"errors", json_double_array(result.errors)},
              {"slope", result.slope},
              {"intercept", result.intercept},
              {"T", cfg.horizon},
              {"h_ref", result.h_ref},
              {"config_echo", json::parse(cfg.echo)}};
  const fs::path report_path =
      report_override.empty() ? outdir / "convergence_report.json"
                              : fs::path(report_override);
  write_text(report_path, report.dump(2) + "\n");

  bool monotone = true;
  for (std::size_t i = 1; i < result.errors.size(); ++i)
    if (!(result.errors[i] < result.errors[i - 1])) monotone = false;
  if (!monotone || !(result.slope >= cfg.slope_min)) {
    std::fprintf(stderr,
                 "threshold failure: slope %.4f (minimum %.4f), errors %s\n",
                 result.slope, cfg.slope_min, monotone ? "monotone" : "non-monotone");
    return 3;
  }
  return 0;
}

int run_verify(const RunConfig& cfg, const fs::path& outdir, std::size_t workers,
               const std::string& report_override) {
  VerifyOptions vopts;
  vopts.h_list = cfg.h_list;
  vopts.l_target = cfg.l_target;
  vopts.samples = cfg.samples;
  vopts.seed = cfg.seed;
  vopts.p = cfg.p;
  vopts.quadrature_nodes = cfg.quadrature_nodes.value_or(32);
  vopts.workers = workers;

  std::vector<InequalityReport> reports;
  try {
    reports = verify_inequalities(vopts);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("verification rejected the configuration: ") + e.what());
  }

  json arr = json::array();
  bool all_pass = true;
  for (const auto& r : reports) {
    arr.push_back(json{{"name", r.name},
                       {"samples", r.samples},
                       {"worst_ratio", r.worst_ratio},
                       {"bound", r.bound},
                       {"pass", r.pass}});
    all_pass = all_pass && r.pass;
  }
  json report{{"inequalities", arr}, {"config_echo", json::parse(cfg.echo)}};
  const fs::path report_path = report_override.empty()
                                   ? outdir / "inequality_report.json"
                                   : fs::path(report_override);
  write_text(report_path, report.dump(2) + "\n");

  if (!all_pass) {
    for (const auto& r : reports)
      if (!r.pass)
        std::fprintf(stderr, "inequality '%s' failed: worst ratio %.12g > bound %.12g\n",
                     r.name.c_str(), r.worst_ratio, r.bound);
    return 3;
  }
  return 0;
}

}  // namespace

int run(const RunConfig& cfg, std::size_t workers) {
  return run_with_report(cfg, workers, "");
}

int run_with_report(const RunConfig& cfg, std::size_t workers,
                    const std::string& report_path) {
  const fs::path outdir = resolve_output_dir(cfg);
  std::error_code ec;
  fs::create_directories(outdir, ec);
  if (ec) throw ConfigError("cannot create output directory " + outdir.string());
  write_text(outdir / "config_echo.json", cfg.echo);

  switch (cfg.mode) {
    case RunMode::simulate:
      return run_simulate(cfg, outdir);
    case RunMode::converge:
      return run_converge(cfg, outdir, workers, report_path);
    case RunMode::verify:
      return run_verify(cfg, outdir, workers, report_path);
  }
  throw ConfigError("unreachable mode");
}

}  // namespace dmnls
