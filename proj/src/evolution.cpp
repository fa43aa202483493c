#include "dmnls/evolution.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <memory>
#include <numbers>
#include <stdexcept>
#include <unordered_map>

#include "dmnls/analysis.hpp"

namespace dmnls {

namespace {

constexpr double k_pi = std::numbers::pi;

bool check_spec(const ProblemSpec& spec) {
  if (!(spec.p > 1.0) || !std::isfinite(spec.p))
    throw std::invalid_argument("nonlinearity exponent must be a finite number > 1");
  if (!std::isfinite(spec.d_av))
    throw std::invalid_argument("average dispersion must be finite");
  return true;
}

// e^{i r_j sigma(xi_i)} for every quadrature node, cached per
// (lattice, symbol kind, node count). Nodes of a given count are canonical,
// so the count identifies the rule. thread_local avoids locking when
// refinement runs fan out across threads.
using MultiplierTable = std::vector<std::vector<Complex>>;

struct MultKey {
  std::size_t n;
  std::uint64_t h_bits;
  int kind;
  std::size_t m;
  bool operator==(const MultKey&) const = default;
};

struct MultKeyHash {
  std::size_t operator()(const MultKey& k) const {
    std::size_t h = k.n;
    h = h * 1000003u ^ static_cast<std::size_t>(k.h_bits);
    h = h * 1000003u ^ static_cast<std::size_t>(k.kind);
    h = h * 1000003u ^ k.m;
    return h;
  }
};

std::uint64_t double_bits(double v) {
  std::uint64_t out;
  static_assert(sizeof out == sizeof v);
  std::memcpy(&out, &v, sizeof out);
  return out;
}

const MultiplierTable& node_multipliers(const Lattice& lat, SymbolKind kind,
                                        const QuadratureRule& quad) {
  thread_local std::unordered_map<MultKey, std::unique_ptr<MultiplierTable>, MultKeyHash>
      cache;
  const MultKey key{lat.n, double_bits(lat.h), static_cast<int>(kind), quad.size()};
  auto it = cache.find(key);
  if (it != cache.end()) return *it->second;

  auto table = std::make_unique<MultiplierTable>(quad.size());
  SpectrumField probe{lat, std::vector<Complex>(lat.n)};
  for (std::size_t j = 0; j < quad.size(); ++j) {
    auto& row = (*table)[j];
    row.resize(lat.n);
    for (std::size_t i = 0; i < lat.n; ++i)
      row[i] = std::polar(1.0, quad.nodes[j] * symbol(probe.frequency(i), lat.h, kind));
  }
  return *cache.emplace(key, std::move(table)).first->second;
}

void apply_nonlinearity(std::vector<Complex>& values, double p) {
  if (p == 3.0) {
    for (auto& z : values) z *= std::norm(z);
    return;
  }
  for (auto& z : values) {
    const double a = std::abs(z);
    z = a > 0.0 ? std::pow(a, p - 1.0) * z : Complex{0.0, 0.0};
  }
}

// <Q> acting on Fourier coefficients: for each node j, transfer to physical
// space under e^{i r_j L}, apply N, transfer back, and accumulate weights.
SpectrumField averaged_nonlinearity_spectral(const SpectrumField& in,
                                             const ProblemSpec& spec,
                                             const QuadratureRule& quad) {
  const auto& mult = node_multipliers(in.lattice, spec.kind, quad);
  const std::size_t n = in.lattice.n;
  SpectrumField acc{in.lattice, std::vector<Complex>(n, Complex{0.0, 0.0})};
  SpectrumField work{in.lattice, std::vector<Complex>(n)};
  for (std::size_t j = 0; j < quad.size(); ++j) {
    const auto& row = mult[j];
    for (std::size_t i = 0; i < n; ++i) work.coeffs[i] = row[i] * in.coeffs[i];
    LatticeField g = idft(work);
    apply_nonlinearity(g.values, spec.p);
    const SpectrumField ghat = dft(g);
    const double w = quad.weights[j];
    for (std::size_t i = 0; i < n; ++i)
      acc.coeffs[i] += w * std::conj(row[i]) * ghat.coeffs[i];
  }
  return acc;
}

}  // namespace

bool admissible_exponent(double p, double d_av) {
  if (!(p > 1.0)) return false;
  if (d_av > 0.0) return p < 9.0;
  if (d_av < 0.0) return true;
  return p < 5.0;
}

Complex nonlinearity_pointwise(Complex z, double p) {
  if (!(p >= 1.0)) throw std::invalid_argument("nonlinearity exponent must be >= 1");
  const double a = std::abs(z);
  if (a == 0.0) return Complex{0.0, 0.0};
  if (p == 3.0) return std::norm(z) * z;
  return std::pow(a, p - 1.0) * z;
}

LatticeField averaged_nonlinearity(const LatticeField& f, const ProblemSpec& spec,
                                   const QuadratureRule& quad) {
  check_spec(spec);
  if (quad.size() == 0) throw std::invalid_argument("empty quadrature rule");
  return idft(averaged_nonlinearity_spectral(dft(f), spec, quad));
}

double mass(const LatticeField& f) {
  double s = 0.0;
  for (const auto& z : f.values) s += std::norm(z);
  return f.lattice.h * s;
}

double energy(const LatticeField& f, const ProblemSpec& spec, const QuadratureRule& quad) {
  check_spec(spec);
  double dterm;
  if (spec.kind == SymbolKind::discrete) {
    const double d = lp_norm(forward_diff(f), 2.0);
    dterm = d * d;
  } else {
    const double d = hs_norm(f, 1.0, /*homogeneous=*/true);
    dterm = d * d;
  }

  const SpectrumField fhat = dft(f);
  const auto& mult = node_multipliers(f.lattice, spec.kind, quad);
  const std::size_t n = f.lattice.n;
  SpectrumField work{f.lattice, std::vector<Complex>(n)};
  const double q = spec.p + 1.0;
  double pterm = 0.0;
  for (std::size_t j = 0; j < quad.size(); ++j) {
    const auto& row = mult[j];
    for (std::size_t i = 0; i < n; ++i) work.coeffs[i] = row[i] * fhat.coeffs[i];
    const LatticeField g = idft(work);
    double s = 0.0;
    if (spec.p == 3.0) {
      for (const auto& z : g.values) {
        const double a2 = std::norm(z);
        s += a2 * a2;
      }
    } else {
      for (const auto& z : g.values) s += std::pow(std::abs(z), q);
    }
    pterm += quad.weights[j] * f.lattice.h * s;
  }
  return 0.5 * spec.d_av * dterm - pterm / q;
}

LatticeField rhs_interaction(const LatticeField& v, double t, const ProblemSpec& spec,
                             const QuadratureRule& quad) {
  check_spec(spec);
  if (!std::isfinite(t)) throw std::invalid_argument("time must be finite");
  SpectrumField vhat = dft(v);
  const double r = spec.d_av * t;
  if (r != 0.0) vhat = propagate(vhat, r, spec.kind);
  SpectrumField out = averaged_nonlinearity_spectral(vhat, spec, quad);
  if (r != 0.0) out = propagate(out, -r, spec.kind);
  const Complex i_unit{0.0, 1.0};
  for (auto& c : out.coeffs) c *= i_unit;
  return idft(out);
}

namespace {

LatticeField axpy(const LatticeField& base, double a, const LatticeField& dir) {
  LatticeField out = base;
  for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] += a * dir.values[i];
  return out;
}

}  // namespace

LatticeField step_rk4(const LatticeField& v, double t, double dt, const ProblemSpec& spec,
                      const QuadratureRule& quad) {
  if (dt == 0.0 || !std::isfinite(dt)) throw std::invalid_argument("step size must be finite and nonzero");
  const LatticeField k1 = rhs_interaction(v, t, spec, quad);
  const LatticeField k2 = rhs_interaction(axpy(v, 0.5 * dt, k1), t + 0.5 * dt, spec, quad);
  const LatticeField k3 = rhs_interaction(axpy(v, 0.5 * dt, k2), t + 0.5 * dt, spec, quad);
  const LatticeField k4 = rhs_interaction(axpy(v, dt, k3), t + dt, spec, quad);
  LatticeField out = v;
  const double c = dt / 6.0;
  for (std::size_t i = 0; i < out.values.size(); ++i)
    out.values[i] += c * (k1.values[i] + 2.0 * k2.values[i] + 2.0 * k3.values[i] +
                          k4.values[i]);
  return out;
}

std::size_t effective_quadrature_nodes(const LatticeField& f, SymbolKind kind,
                                       std::size_t base, std::size_t cap) {
  if (base == 0) throw std::invalid_argument("quadrature base must be at least 1");
  if (cap < base) throw std::invalid_argument("quadrature cap below the base");
  const SpectrumField s = dft(f);
  double peak = 0.0;
  for (const auto& c : s.coeffs) peak = std::max(peak, std::abs(c));
  if (peak == 0.0) return base;
  const double thresh = 1.0e-8 * peak;
  double xi_eff = 0.0;
  for (std::size_t i = 0; i < s.coeffs.size(); ++i)
    if (std::abs(s.coeffs[i]) >= thresh) xi_eff = std::max(xi_eff, std::abs(s.frequency(i)));
  const double sigma = std::abs(symbol(xi_eff, f.lattice.h, kind));
  // Keep the per-subinterval phase increment |sigma|/m below pi/2.
  const auto required = static_cast<std::size_t>(std::ceil(2.0 * sigma / k_pi));
  std::size_t m = std::max(base, std::max<std::size_t>(required, 1));
  if (m > cap) {
    std::fprintf(stderr,
                 "warning: dispersion average needs %zu nodes for the populated band; "
                 "capping at %zu\n",
                 m, cap);
    m = cap;
  }
  return m;
}

Trajectory evolve(const LatticeField& phi, const ProblemSpec& spec, const QuadratureRule& quad,
                  const EvolveOptions& opts) {
  check_spec(spec);
  if (!(opts.horizon > 0.0) || !std::isfinite(opts.horizon))
    throw std::invalid_argument("horizon must be a finite positive time");
  if (!(opts.dt > 0.0) || !std::isfinite(opts.dt))
    throw std::invalid_argument("dt must be a finite positive step");
  if (opts.snapshot_every == 0)
    throw std::invalid_argument("snapshot cadence must be at least 1");
  if (!all_finite(phi)) throw std::invalid_argument("initial field has non-finite values");

  if (!admissible_exponent(spec.p, spec.d_av))
    std::fprintf(stderr,
                 "warning: exponent p=%g with d_av=%g is outside the a-priori H^1 regime; "
                 "continuing\n",
                 spec.p, spec.d_av);
  if (spec.d_av == 0.0 && opts.barrier.has_value()) {
    const double t_star =
        barrier_lifespan(opts.barrier->datum_l2, opts.barrier->datum_deriv_l2, spec.p);
    if (opts.horizon >= t_star)
      std::fprintf(stderr,
                   "warning: horizon %g reaches the H^1 growth-bound lifespan T* = %g\n",
                   opts.horizon, t_star);
  }

  const auto steps = static_cast<std::size_t>(std::ceil(opts.horizon / opts.dt - 1.0e-12));
  const double h1_initial = hs_norm(phi, 1.0);
  const double ceiling = opts.blowup_factor * h1_initial;

  Trajectory traj;
  traj.quadrature_nodes = quad.size();

  auto record = [&](double t, const LatticeField& v) {
    const double r = spec.d_av * t;
    const LatticeField u = r != 0.0 ? propagate(v, r, spec.kind) : v;
    DiagnosticsRecord rec;
    rec.t = t;
    rec.mass = mass(u);
    rec.energy = energy(u, spec, quad);
    rec.h1 = hs_norm(u, 1.0);
    rec.dplus = spec.kind == SymbolKind::discrete ? lp_norm(forward_diff(u), 2.0)
                                                  : hs_norm(u, 1.0, /*homogeneous=*/true);
    if (spec.d_av == 0.0 && opts.barrier.has_value())
      rec.barrier = barrier_bound(t, opts.barrier->datum_l2, opts.barrier->datum_deriv_l2,
                                  spec.p);
    traj.snapshot_times.push_back(t);
    traj.snapshots.push_back(u);
    traj.diagnostics.push_back(rec);
  };

  LatticeField v = phi;
  record(0.0, v);
  for (std::size_t k = 1; k <= steps; ++k) {
    const double t_prev = static_cast<double>(k - 1) * opts.dt;
    const double t_next = k == steps ? opts.horizon : static_cast<double>(k) * opts.dt;
    if (opts.nonlinearity_enabled) {
      const double dt_k = t_next - t_prev;
      v = step_rk4(v, t_prev, dt_k, spec, quad);
      if (!all_finite(v))
        throw EvolveAbort("trajectory produced non-finite values", t_next,
                          std::make_shared<Trajectory>(traj));
      if (h1_initial > 0.0 && hs_norm(v, 1.0) > ceiling)
        throw EvolveAbort("H^1 norm exceeded the blow-up ceiling", t_next,
                          std::make_shared<Trajectory>(traj));
    }
    if (k % opts.snapshot_every == 0 || k == steps) record(t_next, v);
  }
  return traj;
}

}  // namespace dmnls
