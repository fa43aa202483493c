#include "dmnls/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <limits>
#include <mutex>
#include <numbers>
#include <numeric>
#include <random>
#include <stdexcept>
#include <thread>

#include "dmnls/baselines.hpp"

namespace dmnls {

namespace {

constexpr double k_pi = std::numbers::pi;

// Index-strided work distribution; deterministic results because every item
// writes its own slot or feeds an order-independent max-reduction.
void parallel_for(std::size_t count, std::size_t workers,
                  const std::function<void(std::size_t)>& fn) {
  workers = std::min(std::max<std::size_t>(workers, 1), std::max<std::size_t>(count, 1));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::mutex err_mutex;
  std::exception_ptr first_error;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < count; i += workers) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace

double l2_error(const LatticeField& coarse, const ContinuumField& reference) {
  const Lattice& fine = reference.samples.lattice;
  if (!(fine.h < coarse.lattice.h))
    throw std::invalid_argument("reference grid must be strictly finer");
  const ContinuumField lifted = interpolate(coarse, fine);
  double s = 0.0;
  for (std::size_t i = 0; i < fine.n; ++i)
    s += std::norm(lifted.samples.values[i] - reference.samples.values[i]);
  return std::sqrt(fine.h * s);
}

namespace {

FitResult loglog_lsq(const std::vector<double>& h, const std::vector<double>& errors) {
  const std::size_t n = h.size();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += std::log(h[i]);
    my += std::log(errors[i]);
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = std::log(h[i]) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(errors[i]) - my);
  }
  FitResult fit;
  fit.slope = sxy / sxx;
  fit.intercept = std::exp(my - fit.slope * mx);
  return fit;
}

}  // namespace

FitResult fit_loglog_slope(const std::vector<double>& h, const std::vector<double>& errors) {
  if (h.size() != errors.size()) throw std::invalid_argument("mismatched fit inputs");
  if (h.size() < 3) throw std::invalid_argument("slope fit needs at least three points");
  for (std::size_t i = 0; i < h.size(); ++i)
    if (!(h[i] > 0.0) || !(errors[i] > 0.0) || !std::isfinite(h[i]) ||
        !std::isfinite(errors[i]))
      throw std::invalid_argument("slope fit needs positive finite points");
  const auto [mn, mx] = std::minmax_element(h.begin(), h.end());
  if (*mn == *mx) throw std::invalid_argument("slope fit needs distinct spacings");
  return loglog_lsq(h, errors);
}

double barrier_lifespan(double datum_l2, double datum_deriv_l2, double p) {
  if (!(datum_l2 > 0.0) || !(datum_deriv_l2 > 0.0))
    throw std::invalid_argument("growth bound needs positive datum norms");
  if (!(p > 1.0)) throw std::invalid_argument("growth bound needs p > 1");
  const double e = 0.5 * (p - 1.0);
  return (2.0 / (p - 1.0)) * std::pow(datum_l2 * datum_deriv_l2, -e);
}

double barrier_bound(double t, double datum_l2, double datum_deriv_l2, double p) {
  if (!(t >= 0.0) || !std::isfinite(t))
    throw std::invalid_argument("growth bound needs a finite time t >= 0");
  if (!(datum_l2 > 0.0) || !(datum_deriv_l2 > 0.0))
    throw std::invalid_argument("growth bound needs positive datum norms");
  if (!(p > 1.0)) throw std::invalid_argument("growth bound needs p > 1");
  const double e = 0.5 * (p - 1.0);
  const double base = std::pow(datum_deriv_l2, -e) - e * std::pow(datum_l2, e) * t;
  if (base <= 0.0) return std::numeric_limits<double>::infinity();
  return std::pow(base, -1.0 / e);
}

// ---------------------------------------------------------------------------
// Random band-limited ensemble
// ---------------------------------------------------------------------------

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

double uniform01(std::mt19937_64& rng) {
  return (static_cast<double>(rng() >> 11) + 1.0) * 0x1.0p-53;  // in (0, 1]
}

// Box-Muller; hand-rolled so streams are identical across standard libraries.
std::pair<double, double> gauss_pair(std::mt19937_64& rng) {
  const double u1 = uniform01(rng);
  const double u2 = uniform01(rng);
  const double r = std::sqrt(-2.0 * std::log(u1));
  return {r * std::cos(2.0 * k_pi * u2), r * std::sin(2.0 * k_pi * u2)};
}

}  // namespace

double BandSample::continuum_l2() const {
  double s = 0.0;
  for (const auto& c : coeffs) s += std::norm(c);
  return std::sqrt(length * s);
}

double BandSample::continuum_deriv_l2() const {
  double s = 0.0;
  for (std::size_t i = 0; i < coeffs.size(); ++i)
    s += frequencies[i] * frequencies[i] * std::norm(coeffs[i]);
  return std::sqrt(length * s);
}

namespace {

LatticeField realize(const BandSample& sample, const Lattice& lat, bool cell_averaged) {
  if (std::abs(lat.length - sample.length) > 1.0e-9 * sample.length)
    throw std::invalid_argument("sample and lattice periods differ");
  const std::size_t half = lat.n / 2;
  SpectrumField spec{lat, std::vector<Complex>(lat.n, Complex{0.0, 0.0})};
  const double scale = lat.length / std::sqrt(2.0 * k_pi);
  for (std::size_t i = 0; i < sample.coeffs.size(); ++i) {
    const double xi = sample.frequencies[i];
    // mode index k = xi L / (2 pi), exact for ensemble frequencies
    const auto k = static_cast<std::ptrdiff_t>(std::llround(xi * lat.length / (2.0 * k_pi)));
    if (k < -static_cast<std::ptrdiff_t>(half) || k >= static_cast<std::ptrdiff_t>(half))
      throw std::invalid_argument("lattice too coarse for the sample band");
    Complex factor{1.0, 0.0};
    if (cell_averaged && xi != 0.0) {
      // cell average of e^{i xi x} over [x, x+h]: (e^{i xi h} - 1) / (i xi h)
      const Complex num = std::polar(1.0, xi * lat.h) - Complex{1.0, 0.0};
      factor = num / Complex{0.0, xi * lat.h};
    }
    spec.coeffs[static_cast<std::size_t>(k + static_cast<std::ptrdiff_t>(half))] =
        scale * sample.coeffs[i] * factor;
  }
  return idft(spec);
}

}  // namespace

LatticeField BandSample::realize_cell_average(const Lattice& lat) const {
  return realize(*this, lat, true);
}

LatticeField BandSample::realize_pointwise(const Lattice& lat) const {
  return realize(*this, lat, false);
}

BandSample band_sample(double length, std::uint64_t seed, std::uint64_t index) {
  if (!(length >= 8.0)) throw std::invalid_argument("ensemble period must be at least 8");
  // Keep every mode strictly inside the coarsest (h = 1) frequency zone so the
  // same trigonometric polynomial is uniquely representable on every lattice.
  const auto k_max = static_cast<std::ptrdiff_t>(std::ceil(length / 2.0)) - 1;
  std::mt19937_64 rng(splitmix64(seed ^ splitmix64(index + 1)));
  BandSample sample;
  sample.length = length;
  for (std::ptrdiff_t k = -k_max; k <= k_max; ++k) {
    const double xi = 2.0 * k_pi * static_cast<double>(k) / length;
    const auto [g1, g2] = gauss_pair(rng);
    const double amp = std::pow(1.0 + std::abs(xi), -2.0);
    sample.frequencies.push_back(xi);
    sample.coeffs.push_back(amp / std::sqrt(2.0) * Complex{g1, g2});
  }
  return sample;
}

// ---------------------------------------------------------------------------
// Inequality verification
// ---------------------------------------------------------------------------

namespace {

struct RatioTracker {
  double worst = 0.0;
  std::size_t counted = 0;

  void feed(double lhs, double rhs) {
    if (!(rhs > 0.0)) return;  // degenerate sample for this ratio
    worst = std::max(worst, lhs / rhs);
    ++counted;
  }
  void merge(const RatioTracker& o) {
    worst = std::max(worst, o.worst);
    counted += o.counted;
  }
};

constexpr std::size_t k_num_inequalities = 8;

}  // namespace

std::vector<InequalityReport> verify_inequalities(const VerifyOptions& opts) {
  if (opts.h_list.empty()) throw std::invalid_argument("verification needs spacings");
  if (opts.samples == 0) throw std::invalid_argument("verification needs samples");
  if (!(opts.p > 1.0)) throw std::invalid_argument("verification needs p > 1");

  std::vector<Lattice> lattices;
  for (double h : opts.h_list) lattices.push_back(make_lattice(h, opts.l_target));
  for (const auto& lat : lattices)
    if (std::abs(lat.length - lattices.front().length) > 1.0e-9 * lat.length)
      throw std::invalid_argument("verification spacings must share one period");
  const double length = lattices.front().length;

  const QuadratureRule quad = gauss_legendre(opts.quadrature_nodes);
  const ProblemSpec qspec{opts.p, 0.0, SymbolKind::discrete};

  std::vector<RatioTracker> total(k_num_inequalities);

  for (const auto& lat : lattices) {
    const std::size_t workers = std::max<std::size_t>(opts.workers, 1);
    std::vector<std::vector<RatioTracker>> local(
        workers, std::vector<RatioTracker>(k_num_inequalities));
    parallel_for(opts.samples, workers, [&](std::size_t idx) {
      // parallel_for strides indices by the worker count, so idx % workers
      // identifies the executing thread and the slots stay disjoint.
      const std::size_t slot = idx % workers;
      auto& t = local[slot];
      const BandSample sample = band_sample(length, opts.seed, idx);
      const LatticeField f = sample.realize_cell_average(lat);

      const double n_l2 = lp_norm(f, 2.0);
      const double n_inf = lp_norm(f, std::numeric_limits<double>::infinity());
      const double n_dplus = lp_norm(forward_diff(f), 2.0);
      const double n_h1dot = hs_norm(f, 1.0, /*homogeneous=*/true);
      const double n_h1 = hs_norm(f, 1.0);

      t[0].feed(n_dplus, n_h1dot);
      t[1].feed((2.0 / k_pi) * n_h1dot, n_dplus);
      t[2].feed(n_inf, std::sqrt(n_l2 * n_dplus));
      t[3].feed(n_l2, sample.continuum_l2());
      t[4].feed(n_dplus, sample.continuum_deriv_l2());

      double l8_avg = 0.0;
      for (std::size_t j = 0; j < quad.size(); ++j) {
        const LatticeField g = propagate(f, quad.nodes[j], SymbolKind::discrete);
        const double n8 = lp_norm(g, 8.0);
        l8_avg += quad.weights[j] * std::pow(n8, 8.0);
      }
      t[5].feed(l8_avg, std::pow(n_l2, 7.0) * n_dplus);

      const LatticeField q = averaged_nonlinearity(f, qspec, quad);
      t[6].feed(hs_norm(q, 1.0), std::pow(n_h1, opts.p));
      t[7].feed(n_inf, n_h1);
    });
    for (auto& per_worker : local)
      for (std::size_t i = 0; i < k_num_inequalities; ++i) total[i].merge(per_worker[i]);
  }

  struct Meta {
    const char* name;
    double bound;
  };
  const Meta metas[k_num_inequalities] = {
      {"deriv_vs_spectral_upper", 1.0},
      {"deriv_vs_spectral_lower", 1.0},
      {"interp_endpoint_sup", 1.0},
      {"cell_average_l2", 1.0},
      {"cell_average_deriv", 1.0},
      {"averaged_smoothing_l8", baselines::strichartz_l8_ratio},
      {"averaged_nonlinearity_h1", baselines::averaged_nonlinearity_h1_ratio},
      {"embedding_sup_h1", baselines::embedding_sup_ratio},
  };

  std::vector<InequalityReport> reports;
  for (std::size_t i = 0; i < k_num_inequalities; ++i) {
    InequalityReport r;
    r.name = metas[i].name;
    r.samples = total[i].counted;
    r.worst_ratio = total[i].worst;
    r.bound = metas[i].bound;
    r.pass = total[i].counted > 0 && r.worst_ratio <= r.bound * (1.0 + opts.slack);
    reports.push_back(std::move(r));
  }
  return reports;
}

// ---------------------------------------------------------------------------
// Refinement study
// ---------------------------------------------------------------------------

namespace {

RunSummary summarize(double h, const Trajectory& traj) {
  RunSummary s;
  s.h = h;
  s.quadrature_nodes = traj.quadrature_nodes;
  if (traj.diagnostics.empty()) return s;
  const double m0 = traj.diagnostics.front().mass;
  const double e0 = traj.diagnostics.front().energy;
  // drifts are relative to the initial value; absolute when that value is zero
  const double m_scale = m0 != 0.0 ? std::abs(m0) : 1.0;
  const double e_scale = e0 != 0.0 ? std::abs(e0) : 1.0;
  for (const auto& rec : traj.diagnostics) {
    s.mass_drift = std::max(s.mass_drift, std::abs(rec.mass - m0) / m_scale);
    s.energy_drift = std::max(s.energy_drift, std::abs(rec.energy - e0) / e_scale);
    s.sup_h1 = std::max(s.sup_h1, rec.h1);
  }
  return s;
}

double sup_snapshot_error(const Trajectory& run, const Trajectory& ref) {
  if (run.snapshots.size() != ref.snapshots.size())
    throw std::logic_error("reference and run disagree on snapshot times");
  double worst = 0.0;
  for (std::size_t k = 0; k < run.snapshots.size(); ++k)
    worst = std::max(worst,
                     l2_error(run.snapshots[k], ContinuumField{ref.snapshots[k]}));
  return worst;
}

}  // namespace

StudyResult convergence_study(const InitialDatum& datum, const ProblemSpec& spec,
                              const StudyOptions& opts) {
  if (!datum.analytic())
    throw std::invalid_argument("refinement studies need an analytic datum");
  if (opts.h_list.empty()) throw std::invalid_argument("study needs spacings");
  double h_min = opts.h_list.front();
  for (double h : opts.h_list) {
    if (!(h > 0.0) || !(h <= 1.0))
      throw std::invalid_argument("study spacings must lie in (0, 1]");
    h_min = std::min(h_min, h);
  }
  if (!(opts.h_ref > 0.0) || opts.h_ref > h_min / 4.0)
    throw std::invalid_argument("reference spacing must be at most min(h)/4");

  std::optional<BarrierParams> barrier;
  if (spec.d_av == 0.0) {
    barrier = BarrierParams{datum.l2_norm(), datum.derivative_l2_norm()};
    if (barrier->datum_l2 > 0.0 && barrier->datum_deriv_l2 > 0.0) {
      const double t_star =
          barrier_lifespan(barrier->datum_l2, barrier->datum_deriv_l2, spec.p);
      if (opts.horizon >= t_star)
        throw std::invalid_argument(
            "study horizon reaches the d_av = 0 growth-bound lifespan");
    } else {
      barrier.reset();
    }
  }

  auto evolve_options = [&]() {
    EvolveOptions eo;
    eo.horizon = opts.horizon;
    eo.dt = opts.dt;
    eo.snapshot_every = opts.snapshot_every;
    eo.nonlinearity_enabled = opts.nonlinearity_enabled;
    eo.barrier = barrier;
    return eo;
  }();

  auto quad_for = [&](const LatticeField& f, SymbolKind kind) {
    const std::size_t m = opts.quadrature_escalate
                              ? effective_quadrature_nodes(f, kind, opts.quadrature_base)
                              : opts.quadrature_base;
    return gauss_legendre(m);
  };

  auto run_reference = [&](double h_ref) {
    const Lattice lat = make_lattice(h_ref, opts.l_target);
    const LatticeField phi = sample_pointwise(datum, lat);
    ProblemSpec ref_spec = spec;
    ref_spec.kind = SymbolKind::continuum;
    return evolve(phi, ref_spec, quad_for(phi, SymbolKind::continuum), evolve_options);
  };

  Trajectory ref = run_reference(opts.h_ref);
  double h_ref_used = opts.h_ref;

  std::vector<Trajectory> runs(opts.h_list.size());
  parallel_for(opts.h_list.size(), opts.workers, [&](std::size_t i) {
    const Lattice lat = make_lattice(opts.h_list[i], opts.l_target);
    const LatticeField phi = discretize(datum, lat);
    ProblemSpec run_spec = spec;
    run_spec.kind = SymbolKind::discrete;
    runs[i] = evolve(phi, run_spec, quad_for(phi, SymbolKind::discrete), evolve_options);
  });

  auto all_errors = [&](const Trajectory& reference) {
    std::vector<double> errors(runs.size());
    parallel_for(runs.size(), opts.workers,
                 [&](std::size_t i) { errors[i] = sup_snapshot_error(runs[i], reference); });
    return errors;
  };
  std::vector<double> errors = all_errors(ref);

  // When the finest run stops improving, the bottleneck may be the reference
  // itself; refine it once and re-measure.
  if (errors.size() >= 2) {
    std::vector<std::size_t> order(errors.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return opts.h_list[a] > opts.h_list[b]; });
    const std::size_t last = order[order.size() - 1];
    const std::size_t prev = order[order.size() - 2];
    if (opts.h_list[last] < opts.h_list[prev] && errors[last] >= errors[prev]) {
      ref = run_reference(opts.h_ref / 2.0);
      h_ref_used = opts.h_ref / 2.0;
      errors = all_errors(ref);
    }
  }

  StudyResult result;
  result.h_list = opts.h_list;
  result.errors = errors;
  result.h_ref = h_ref_used;
  result.reference = summarize(h_ref_used, ref);
  for (std::size_t i = 0; i < runs.size(); ++i)
    result.runs.push_back(summarize(opts.h_list[i], runs[i]));

  std::vector<double> fit_h, fit_e;
  for (std::size_t i = 0; i < errors.size(); ++i) {
    if (errors[i] > 0.0) {
      fit_h.push_back(opts.h_list[i]);
      fit_e.push_back(errors[i]);
    }
  }
  const auto [mn, mx] = fit_h.empty()
                            ? std::pair<double, double>{0.0, 0.0}
                            : std::pair<double, double>{
                                  *std::min_element(fit_h.begin(), fit_h.end()),
                                  *std::max_element(fit_h.begin(), fit_h.end())};
  if (fit_h.size() >= 2 && mn < mx) {
    const FitResult fit = loglog_lsq(fit_h, fit_e);
    result.slope = fit.slope;
    result.intercept = fit.intercept;
  } else {
    result.slope = std::numeric_limits<double>::quiet_NaN();
    result.intercept = std::numeric_limits<double>::quiet_NaN();
  }
  return result;
}

}  // namespace dmnls
