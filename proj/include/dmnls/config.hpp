#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dmnls/evolution.hpp"
#include "dmnls/lattice.hpp"

namespace dmnls {

enum class RunMode { simulate, converge, verify };

/// Fully resolved run description: parsed keys plus defaults. `echo` holds
/// the resolved configuration serialized as sorted-key JSON; it is written
/// next to the outputs and embedded in reports so every artifact names the
/// run that produced it.
struct RunConfig {
  RunMode mode = RunMode::simulate;
  double p = 3.0;
  double d_av = 1.0;
  SymbolKind kind = SymbolKind::discrete;
  std::optional<InitialDatum> initial;  // simulate / converge
  double h = 0.0;                       // simulate
  std::vector<double> h_list;           // converge / verify
  double h_ref = 0.0;                   // converge
  double l_target = 32.0;
  double horizon = 0.0;  // simulate / converge
  double dt = 5.0e-3;
  std::size_t snapshot_every = 20;
  std::optional<std::size_t> quadrature_nodes;  // empty = automatic
  std::string output = "out";
  std::uint64_t seed = 12345;   // verify ensemble
  std::size_t samples = 1000;   // verify ensemble
  double slope_min = 0.45;      // converge acceptance threshold
  std::string echo;
};

/// Parses and validates a JSON run configuration. Unknown keys, malformed
/// values, and out-of-range numbers raise ConfigError. Inadmissible
/// exponent/dispersion combinations and d_av = 0 horizons at or beyond the
/// growth-bound lifespan are accepted with a warning on stderr.
RunConfig parse_config(const std::string& path);
RunConfig parse_config_text(const std::string& text);

/// Output directory: the DMNLS_OUTPUT_DIR environment variable when set,
/// otherwise the config's `output` entry.
std::string resolve_output_dir(const RunConfig& cfg);

/// Executes the configured run, writing artifacts under the output
/// directory. Returns the process exit code: 0 success, 2 trajectory abort
/// (non-finite / ceiling), 3 threshold failure (slope below slope_min,
/// non-monotone errors, or an inequality sweep violation).
int run(const RunConfig& cfg, std::size_t workers = 1);

/// Same as run(), but redirects the converge / verify report JSON to an
/// explicit path instead of the default file under the output directory.
int run_with_report(const RunConfig& cfg, std::size_t workers,
                    const std::string& report_path);

}  // namespace dmnls
