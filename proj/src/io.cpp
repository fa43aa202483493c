#include "dmnls/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace dmnls {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

void write_field_csv(const std::string& path, const LatticeField& f) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << "x,re,im\n";
  for (std::size_t m = 0; m < f.lattice.n; ++m) {
    out << format_double(f.lattice.point(m)) << ',' << format_double(f.values[m].real())
        << ',' << format_double(f.values[m].imag()) << '\n';
  }
  if (!out) throw std::runtime_error("write failed for " + path);
}

namespace {

double parse_cell(const std::string& cell, const std::string& path) {
  const char* begin = cell.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end == begin || (end != nullptr && *end != '\0'))
    throw std::runtime_error(path + ": malformed numeric cell '" + cell + "'");
  return v;
}

}  // namespace

std::pair<std::vector<double>, std::vector<Complex>> read_field_columns(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line != "x,re,im")
    throw std::runtime_error(path + ": expected header 'x,re,im'");
  std::vector<double> xs;
  std::vector<Complex> vals;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream row(line);
    std::string cx, cre, cim;
    if (!std::getline(row, cx, ',') || !std::getline(row, cre, ',') ||
        !std::getline(row, cim))
      throw std::runtime_error(path + ": expected three comma-separated columns");
    xs.push_back(parse_cell(cx, path));
    vals.emplace_back(parse_cell(cre, path), parse_cell(cim, path));
  }
  return {std::move(xs), std::move(vals)};
}

LatticeField read_field_csv(const std::string& path, const Lattice& lat) {
  auto [xs, vals] = read_field_columns(path);
  if (vals.size() != lat.n)
    throw std::runtime_error(path + ": row count does not match the lattice");
  for (std::size_t m = 0; m < lat.n; ++m) {
    if (std::abs(xs[m] - lat.point(m)) > 1.0e-9 * std::max(1.0, std::abs(lat.point(m))))
      throw std::runtime_error(path + ": x column does not match the lattice nodes");
  }
  return LatticeField{lat, std::move(vals)};
}

void write_diagnostics_csv(const std::string& path,
                           const std::vector<DiagnosticsRecord>& recs) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << "t,mass,energy,h1,dplus,barrier\n";
  for (const auto& r : recs) {
    out << format_double(r.t) << ',' << format_double(r.mass) << ','
        << format_double(r.energy) << ',' << format_double(r.h1) << ','
        << format_double(r.dplus) << ',';
    if (r.barrier.has_value()) {
      if (std::isfinite(*r.barrier))
        out << format_double(*r.barrier);
      else
        out << "inf";
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error("write failed for " + path);
}

}  // namespace dmnls
