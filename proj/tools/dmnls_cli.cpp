// Command-line front end: simulate | converge | verify, each driven by a JSON
// configuration. Exit codes: 0 success, 1 configuration error, 2 trajectory
// abort, 3 threshold failure.

#include <cstdio>
#include <exception>
#include <string>

#include "CLI11.hpp"

#include "dmnls/config.hpp"
#include "dmnls/errors.hpp"

namespace {

struct SubArgs {
  std::string config_path;
  std::string report_path;  // optional override for report JSON
};

int dispatch(const std::string& subcommand, const SubArgs& args, std::size_t workers) {
  try {
    const dmnls::RunConfig cfg = dmnls::parse_config(args.config_path);
    const std::string mode = cfg.mode == dmnls::RunMode::simulate
                                 ? "simulate"
                                 : (cfg.mode == dmnls::RunMode::converge ? "converge"
                                                                         : "verify");
    if (mode != subcommand)
      throw dmnls::ConfigError("configuration mode '" + mode +
                               "' does not match subcommand '" + subcommand + "'");
    return dmnls::run_with_report(cfg, workers, args.report_path);
  } catch (const dmnls::ConfigError& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dispersion-averaged lattice Schrodinger simulator"};
  app.require_subcommand(1);

  std::size_t workers = 1;
  app.add_option("--workers", workers, "worker threads for sweeps")
      ->check(CLI::PositiveNumber);

  SubArgs sim_args, conv_args, ver_args;
  CLI::App* sim = app.add_subcommand("simulate", "integrate one trajectory");
  sim->add_option("config", sim_args.config_path, "JSON configuration")->required();
  CLI::App* conv = app.add_subcommand("converge", "grid-refinement study");
  conv->add_option("config", conv_args.config_path, "JSON configuration")->required();
  conv->add_option("--report", conv_args.report_path, "path for the report JSON");
  CLI::App* ver = app.add_subcommand("verify", "inequality sweeps");
  ver->add_option("config", ver_args.config_path, "JSON configuration")->required();
  ver->add_option("--report", ver_args.report_path, "path for the report JSON");

  CLI11_PARSE(app, argc, argv);

  if (sim->parsed()) return dispatch("simulate", sim_args, workers);
  if (conv->parsed()) return dispatch("converge", conv_args, workers);
  return dispatch("verify", ver_args, workers);
}
