#pragma once

#include <vector>

#include "dmnls/lattice.hpp"

namespace dmnls {

/// Discrete Fourier coefficients of a lattice field, stored against the
/// frequencies xi_k = 2*pi*k/L, k = -n/2 .. n/2 - 1 (ascending). The forward
/// transform uses the convention
///   fhat(xi_k) = (h / sqrt(2*pi)) * sum_m f(x_m) e^{-i x_m xi_k},
/// for which the inverse is the frequency-step-weighted sum and the discrete
/// Plancherel identity dxi * sum |fhat|^2 = h * sum |f|^2 holds exactly.
struct SpectrumField {
  Lattice lattice;
  std::vector<Complex> coeffs;  // ascending-frequency order

  std::size_t size() const { return coeffs.size(); }
  double frequency_step() const { return 2.0 * 3.14159265358979323846 / lattice.length; }
  double frequency(std::size_t idx) const {
    const auto half = static_cast<std::ptrdiff_t>(lattice.n / 2);
    return frequency_step() * static_cast<double>(static_cast<std::ptrdiff_t>(idx) - half);
  }
};

SpectrumField dft(const LatticeField& f);
LatticeField idft(const SpectrumField& s);

enum class SymbolKind { discrete, continuum };

/// Fourier symbol of the second-difference operator: -(4/h^2) sin^2(h*xi/2).
/// Rejects frequencies outside [-pi/h, pi/h].
double discrete_symbol(double xi, double h);

/// Symbol dispatch: the lattice symbol above, or -xi^2 for the continuum kind.
double symbol(double xi, double h, SymbolKind kind);

/// Unitary one-parameter group e^{i r symbol}: multiplies each Fourier
/// coefficient by e^{i r sigma(xi)}. Mass, the H^1 norm, and all frequency-
/// weighted norms are preserved exactly.
LatticeField propagate(const LatticeField& f, double r, SymbolKind kind);
SpectrumField propagate(const SpectrumField& s, double r, SymbolKind kind);

/// Sobolev norm of order s >= 0 via the frequency sum
///   sum dxi (1 + xi^2)^s |fhat(xi)|^2   (homogeneous: xi^{2s} weight).
double hs_norm(const LatticeField& f, double s, bool homogeneous = false);
double hs_norm(const SpectrumField& s_field, double s, bool homogeneous = false);

}  // namespace dmnls
