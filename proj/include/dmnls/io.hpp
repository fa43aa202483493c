#pragma once

#include <string>
#include <utility>
#include <vector>

#include "dmnls/evolution.hpp"
#include "dmnls/lattice.hpp"

namespace dmnls {

/// Formats a double with 17 significant digits, enough to round-trip exactly.
std::string format_double(double v);

/// Snapshot CSV: header "x,re,im", one row per lattice point.
void write_field_csv(const std::string& path, const LatticeField& f);

/// Reads the columns of a snapshot CSV (no lattice reconstruction).
std::pair<std::vector<double>, std::vector<Complex>> read_field_columns(const std::string& path);

/// Reads a snapshot CSV and validates it against an expected lattice.
LatticeField read_field_csv(const std::string& path, const Lattice& lat);

/// Diagnostics CSV: header "t,mass,energy,h1,dplus,barrier"; the barrier
/// column is left empty for records without a bound value.
void write_diagnostics_csv(const std::string& path, const std::vector<DiagnosticsRecord>& recs);

}  // namespace dmnls
