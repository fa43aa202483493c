#pragma once

// Brute-force reference implementations used to cross-check the production
// code on small grids: direct O(n^2) transform sums and the literal
// average-then-invert composition for the dispersion-averaged nonlinearity.

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include "dmnls/evolution.hpp"
#include "dmnls/lattice.hpp"
#include "dmnls/quadrature.hpp"
#include "dmnls/spectral.hpp"

namespace oracle {

using dmnls::Complex;
using dmnls::Lattice;
using dmnls::LatticeField;
using dmnls::SpectrumField;

inline constexpr double pi = 3.14159265358979323846;

inline SpectrumField dft(const LatticeField& f) {
  const std::size_t n = f.lattice.n;
  const double L = f.lattice.length;
  SpectrumField out{f.lattice, std::vector<Complex>(n)};
  const auto half = static_cast<std::ptrdiff_t>(n / 2);
  for (std::size_t r = 0; r < n; ++r) {
    const double xi =
        2.0 * pi * static_cast<double>(static_cast<std::ptrdiff_t>(r) - half) / L;
    Complex acc{0.0, 0.0};
    for (std::size_t m = 0; m < n; ++m) {
      const double x = f.lattice.point(m);
      acc += f.values[m] * std::polar(1.0, -x * xi);
    }
    out.coeffs[r] = f.lattice.h / std::sqrt(2.0 * pi) * acc;
  }
  return out;
}

inline LatticeField idft(const SpectrumField& s) {
  const std::size_t n = s.lattice.n;
  LatticeField out{s.lattice, std::vector<Complex>(n)};
  const double dxi = s.frequency_step();
  for (std::size_t m = 0; m < n; ++m) {
    const double x = s.lattice.point(m);
    Complex acc{0.0, 0.0};
    for (std::size_t r = 0; r < n; ++r)
      acc += s.coeffs[r] * std::polar(1.0, x * s.frequency(r));
    out.values[m] = dxi / std::sqrt(2.0 * pi) * acc;
  }
  return out;
}

inline LatticeField propagate(const LatticeField& f, double r, dmnls::SymbolKind kind) {
  SpectrumField s = oracle::dft(f);
  for (std::size_t i = 0; i < s.coeffs.size(); ++i)
    s.coeffs[i] *= std::polar(1.0, r * dmnls::symbol(s.frequency(i), s.lattice.h, kind));
  return oracle::idft(s);
}

inline LatticeField averaged_nonlinearity(const LatticeField& f,
                                          const dmnls::ProblemSpec& spec,
                                          const dmnls::QuadratureRule& quad) {
  LatticeField acc = dmnls::zero_field(f.lattice);
  for (std::size_t j = 0; j < quad.size(); ++j) {
    LatticeField g = oracle::propagate(f, quad.nodes[j], spec.kind);
    for (auto& z : g.values) z = dmnls::nonlinearity_pointwise(z, spec.p);
    const LatticeField back = oracle::propagate(g, -quad.nodes[j], spec.kind);
    for (std::size_t i = 0; i < acc.values.size(); ++i)
      acc.values[i] += quad.weights[j] * back.values[i];
  }
  return acc;
}

inline double max_abs_diff(const LatticeField& a, const LatticeField& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i)
    worst = std::max(worst, std::abs(a.values[i] - b.values[i]));
  return worst;
}

inline double max_abs(const LatticeField& a) {
  double worst = 0.0;
  for (const auto& z : a.values) worst = std::max(worst, std::abs(z));
  return worst;
}

/// Deterministic complex test field with O(1) entries.
inline LatticeField random_field(const Lattice& lat, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto u = [&rng] {
    return static_cast<double>(rng() >> 11) * 0x1.0p-52 - 1.0;  // [-1, 1)
  };
  LatticeField f = dmnls::zero_field(lat);
  for (auto& z : f.values) z = Complex{u(), u()};
  return f;
}

/// Composite Simpson rule for |fn|-type real integrands on [a, b].
template <typename Fn>
double simpson(Fn&& fn, double a, double b, std::size_t intervals) {
  if (intervals % 2 == 1) ++intervals;
  const double dx = (b - a) / static_cast<double>(intervals);
  double acc = fn(a) + fn(b);
  for (std::size_t i = 1; i < intervals; ++i)
    acc += fn(a + dx * static_cast<double>(i)) * (i % 2 == 1 ? 4.0 : 2.0);
  return acc * dx / 3.0;
}

}  // namespace oracle
