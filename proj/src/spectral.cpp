#include "dmnls/spectral.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <unordered_map>
#include <vector>

namespace dmnls {

namespace {

constexpr double k_pi = std::numbers::pi;

// Twiddle factors e^{-2 pi i k / n}, k < n/2, cached per transform size.
// thread_local keeps concurrent refinement runs lock-free.
const std::vector<Complex>& roots_for(std::size_t n) {
  thread_local std::unordered_map<std::size_t, std::vector<Complex>> cache;
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  std::vector<Complex> roots(n / 2);
  for (std::size_t k = 0; k < n / 2; ++k)
    roots[k] = std::polar(1.0, -2.0 * k_pi * static_cast<double>(k) / static_cast<double>(n));
  return cache.emplace(n, std::move(roots)).first->second;
}

// Iterative radix-2 transform; n must be a power of two (Lattice guarantees it).
void fft_inplace(std::vector<Complex>& a, bool inverse) {
  const std::size_t n = a.size();
  if (n == 0 || (n & (n - 1)) != 0)
    throw std::invalid_argument("transform size must be a power of two");
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  const auto& roots = roots_for(n);
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t stride = n / len;
    const std::size_t half = len / 2;
    for (std::size_t start = 0; start < n; start += len) {
      for (std::size_t k = 0; k < half; ++k) {
        Complex w = roots[k * stride];
        if (inverse) w = std::conj(w);
        const Complex u = a[start + k];
        const Complex t = w * a[start + k + half];
        a[start + k] = u + t;
        a[start + k + half] = u - t;
      }
    }
  }
  if (inverse) {
    const double s = 1.0 / static_cast<double>(n);
    for (auto& z : a) z *= s;
  }
}

void check_consistent(const LatticeField& f) {
  if (f.values.size() != f.lattice.n || f.lattice.n == 0)
    throw std::invalid_argument("field size does not match its lattice");
}

void check_consistent(const SpectrumField& s) {
  if (s.coeffs.size() != s.lattice.n || s.lattice.n == 0)
    throw std::invalid_argument("spectrum size does not match its lattice");
}

}  // namespace

SpectrumField dft(const LatticeField& f) {
  check_consistent(f);
  const std::size_t n = f.lattice.n;
  std::vector<Complex> a = f.values;
  fft_inplace(a, false);
  // With x_m = -L/2 + m h the continuous-kernel coefficient picks up the
  // phase e^{i (L/2) xi_k} = (-1)^k relative to the index-space transform.
  const double scale = f.lattice.h / std::sqrt(2.0 * k_pi);
  std::vector<Complex> coeffs(n);
  const std::size_t half = n / 2;
  for (std::size_t r = 0; r < n; ++r) {
    const std::size_t j = (r + half) % n;  // natural index of frequency r - n/2
    const double sign = (j & 1) ? -1.0 : 1.0;
    coeffs[r] = scale * sign * a[j];
  }
  return SpectrumField{f.lattice, std::move(coeffs)};
}

LatticeField idft(const SpectrumField& s) {
  check_consistent(s);
  const std::size_t n = s.lattice.n;
  const std::size_t half = n / 2;
  const double scale = std::sqrt(2.0 * k_pi) / s.lattice.h;
  std::vector<Complex> a(n);
  for (std::size_t r = 0; r < n; ++r) {
    const std::size_t j = (r + half) % n;
    const double sign = (j & 1) ? -1.0 : 1.0;
    a[j] = scale * sign * s.coeffs[r];
  }
  fft_inplace(a, true);
  return LatticeField{s.lattice, std::move(a)};
}

double discrete_symbol(double xi, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("spacing must be positive");
  const double zone = k_pi / h;
  if (std::abs(xi) > zone * (1.0 + 1.0e-12))
    throw std::invalid_argument("frequency outside the fundamental zone [-pi/h, pi/h]");
  const double s = std::sin(0.5 * xi * h);
  return -4.0 / (h * h) * s * s;
}

double symbol(double xi, double h, SymbolKind kind) {
  return kind == SymbolKind::discrete ? discrete_symbol(xi, h) : -xi * xi;
}

SpectrumField propagate(const SpectrumField& s, double r, SymbolKind kind) {
  check_consistent(s);
  if (!std::isfinite(r)) throw std::invalid_argument("propagation parameter must be finite");
  SpectrumField out = s;
  if (r == 0.0) return out;
  for (std::size_t i = 0; i < out.coeffs.size(); ++i) {
    const double sigma = symbol(out.frequency(i), out.lattice.h, kind);
    out.coeffs[i] *= std::polar(1.0, r * sigma);
  }
  return out;
}

LatticeField propagate(const LatticeField& f, double r, SymbolKind kind) {
  if (r == 0.0) {
    check_consistent(f);
    return f;
  }
  return idft(propagate(dft(f), r, kind));
}

double hs_norm(const SpectrumField& s_field, double s, bool homogeneous) {
  check_consistent(s_field);
  if (!(s >= 0.0)) throw std::invalid_argument("Sobolev order must be nonnegative");
  const double dxi = s_field.frequency_step();
  double acc = 0.0;
  for (std::size_t i = 0; i < s_field.coeffs.size(); ++i) {
    const double xi = s_field.frequency(i);
    double w;
    if (s == 0.0)
      w = 1.0;  // |xi|^0 with the 0^0 = 1 convention
    else if (s == 1.0)
      w = homogeneous ? xi * xi : 1.0 + xi * xi;
    else
      w = homogeneous ? std::pow(std::abs(xi), 2.0 * s) : std::pow(1.0 + xi * xi, s);
    acc += dxi * w * std::norm(s_field.coeffs[i]);
  }
  return std::sqrt(acc);
}

double hs_norm(const LatticeField& f, double s, bool homogeneous) {
  return hs_norm(dft(f), s, homogeneous);
}

}  // namespace dmnls
