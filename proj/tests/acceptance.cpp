// End-to-end acceptance gate. Runs the headline refinement study, the seeded
// inequality sweeps, the zero-dispersion derivative-growth check, the
// integrator-order probe, and the toy-scale brute-force comparisons, printing
// one PASS/FAIL line per criterion. Exits nonzero if any criterion fails.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "dmnls/analysis.hpp"
#include "dmnls/baselines.hpp"
#include "dmnls/evolution.hpp"
#include "dmnls/lattice.hpp"
#include "dmnls/spectral.hpp"
#include "oracles.hpp"

using namespace dmnls;

namespace {

int failures = 0;

void report(int index, const char* label, bool pass, const std::string& detail) {
  std::printf("%s  %d. %-34s %s\n", pass ? "PASS" : "FAIL", index, label, detail.c_str());
  if (!pass) ++failures;
}

std::size_t worker_count() {
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 2 : std::min<unsigned>(hw, 8);
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

}  // namespace

int main() {
  const std::size_t workers = worker_count();
  const InitialDatum headline_datum(GaussianDatum{1.0, 1.0, 0.0, 0.0});
  const ProblemSpec headline_spec{3.0, 1.0, SymbolKind::discrete};

  // ---- headline refinement study (criteria 1-3 and half of 5) ----
  std::optional<StudyResult> study;
  std::string study_error;
  try {
    StudyOptions opts;
    opts.h_list = {0.5, 0.25, 0.125, 0.0625};
    opts.h_ref = 1.0 / 128.0;
    opts.l_target = 32.0;
    opts.horizon = 1.0;
    opts.dt = 2.0e-3;
    opts.snapshot_every = 20;
    opts.quadrature_base = 32;
    opts.quadrature_escalate = true;
    opts.workers = workers;
    study = convergence_study(headline_datum, headline_spec, opts);
  } catch (const std::exception& e) {
    study_error = e.what();
  }

  double study_sup_h1 = 0.0;
  if (study) {
    bool decreasing = true;
    for (std::size_t i = 1; i < study->errors.size(); ++i)
      decreasing = decreasing && study->errors[i] < study->errors[i - 1];
    report(1, "continuum-limit convergence order", study->slope >= 0.45 && decreasing,
           fmt("slope %.3f (need >= 0.45), errors ", study->slope) +
               (decreasing ? "decreasing" : "NON-MONOTONE"));

    double worst_mass = 0.0, worst_energy = 0.0;
    for (const auto& run : study->runs) {
      worst_mass = std::max(worst_mass, run.mass_drift);
      worst_energy = std::max(worst_energy, run.energy_drift);
      study_sup_h1 = std::max(study_sup_h1, run.sup_h1);
    }
    report(2, "mass conservation", worst_mass <= 1e-8,
           fmt("worst relative drift %.3e (tolerance 1e-8)", worst_mass));
    report(3, "dispersion-consistent energy", worst_energy <= 1e-6,
           fmt("worst relative drift %.3e (tolerance 1e-6)", worst_energy));
  } else {
    report(1, "continuum-limit convergence order", false, "study failed: " + study_error);
    report(2, "mass conservation", false, "study failed");
    report(3, "dispersion-consistent energy", false, "study failed");
  }

  // ---- seeded ensemble sweeps (criterion 4 and the ratio half of 5) ----
  std::vector<InequalityReport> sweeps;
  std::string sweep_error;
  try {
    VerifyOptions vopts;
    vopts.workers = workers;
    sweeps = verify_inequalities(vopts);
  } catch (const std::exception& e) {
    sweep_error = e.what();
  }

  if (!sweeps.empty()) {
    bool exact_ok = true;
    double exact_worst = 0.0;
    bool frozen_ok = true;
    std::string frozen_detail;
    for (const auto& r : sweeps) {
      const bool exact_constant = r.name == "deriv_vs_spectral_upper" ||
                                  r.name == "deriv_vs_spectral_lower" ||
                                  r.name == "interp_endpoint_sup" ||
                                  r.name == "cell_average_l2" ||
                                  r.name == "cell_average_deriv";
      if (exact_constant) {
        exact_ok = exact_ok && r.pass;
        if (r.name != "deriv_vs_spectral_lower")
          exact_worst = std::max(exact_worst, r.worst_ratio);
      } else {
        frozen_ok = frozen_ok && r.pass;
        frozen_detail += fmt("%.4f/%.4f ", r.worst_ratio, r.bound);
      }
    }
    report(4, "exact-constant inequalities", exact_ok,
           fmt("zero violations over 1000 fields x 4 spacings, worst ratio %.6f",
               exact_worst));

    const bool sup_ok = study && study_sup_h1 <= baselines::headline_sup_h1;
    const std::string sup_detail =
        study ? fmt("sup-in-time H^1 %.3f vs %.3f; ratios ", study_sup_h1,
                    baselines::headline_sup_h1)
              : std::string("study failed; ratios ");
    report(5, "uniform-in-spacing bounds", frozen_ok && sup_ok, sup_detail + frozen_detail);
  } else {
    report(4, "exact-constant inequalities", false, "sweep failed: " + sweep_error);
    report(5, "uniform-in-spacing bounds", false, "sweep failed");
  }

  // ---- zero-dispersion derivative growth stays under the closed-form bound ----
  {
    // amplitude chosen so the bound's lifespan is 2; run to 0.9 * lifespan
    const InitialDatum datum(GaussianDatum{0.6316187777460647, 1.0, 0.0, 0.0});
    const ProblemSpec spec{3.0, 0.0, SymbolKind::discrete};
    const BarrierParams barrier{datum.l2_norm(), datum.derivative_l2_norm()};
    const double t_star = barrier_lifespan(barrier.datum_l2, barrier.datum_deriv_l2, 3.0);
    bool ok = std::abs(t_star - 2.0) < 0.05;
    double worst_margin = 1e300;
    std::string detail;
    try {
      for (double h : {0.25, 0.125}) {
        const Lattice lat = make_lattice(h, 32.0);
        const LatticeField phi = discretize(datum, lat);
        EvolveOptions eo;
        eo.horizon = 0.9 * t_star;
        eo.dt = 2.0e-3;
        eo.snapshot_every = 20;
        eo.barrier = barrier;
        const std::size_t nodes =
            effective_quadrature_nodes(phi, SymbolKind::discrete, 32);
        const Trajectory traj = evolve(phi, spec, gauss_legendre(nodes), eo);
        for (const auto& rec : traj.diagnostics) {
          if (!rec.barrier || !(rec.dplus <= *rec.barrier)) ok = false;
          if (rec.barrier) worst_margin = std::min(worst_margin, *rec.barrier - rec.dplus);
        }
      }
      detail = fmt("lifespan %.3f, horizon 0.9x, min bound margin %.3e", t_star,
                   worst_margin);
    } catch (const std::exception& e) {
      ok = false;
      detail = std::string("run failed: ") + e.what();
    }
    report(6, "zero-dispersion growth bound", ok, detail);
  }

  // ---- integrator order by step doubling on the headline trajectory ----
  {
    const Lattice lat = make_lattice(0.25, 32.0);
    const LatticeField phi = discretize(headline_datum, lat);
    const QuadratureRule quad = gauss_legendre(32);
    auto integrate = [&](double dt, int steps) {
      LatticeField v = phi;
      for (int k = 0; k < steps; ++k)
        v = step_rk4(v, dt * static_cast<double>(k), dt, headline_spec, quad);
      return v;
    };
    const double T = 1.0;
    const LatticeField u1 = integrate(T / 50.0, 50);
    const LatticeField u2 = integrate(T / 100.0, 100);
    const LatticeField u4 = integrate(T / 200.0, 200);
    double d12 = 0.0, d24 = 0.0;
    for (std::size_t i = 0; i < u1.values.size(); ++i) {
      d12 = std::max(d12, std::abs(u1.values[i] - u2.values[i]));
      d24 = std::max(d24, std::abs(u2.values[i] - u4.values[i]));
    }
    const double order = std::log2(d12 / d24);
    report(7, "time-integrator order", order > 3.7 && order < 4.3,
           fmt("step-doubling order %.3f (need 3.7 .. 4.3)", order));
  }

  // ---- toy-scale agreement with direct-summation references ----
  {
    Lattice lat{0.5, 8, 4.0};
    const LatticeField f = oracle::random_field(lat, 2026);
    double worst = 0.0;
    auto rel = [](double diff, double scale) { return scale > 0.0 ? diff / scale : diff; };

    const SpectrumField fast_hat = dft(f);
    const SpectrumField slow_hat = oracle::dft(f);
    double scale = 0.0, diff = 0.0;
    for (std::size_t i = 0; i < fast_hat.coeffs.size(); ++i) {
      scale = std::max(scale, std::abs(slow_hat.coeffs[i]));
      diff = std::max(diff, std::abs(fast_hat.coeffs[i] - slow_hat.coeffs[i]));
    }
    worst = std::max(worst, rel(diff, scale));

    const LatticeField fast_back = idft(fast_hat);
    const LatticeField slow_back = oracle::idft(slow_hat);
    worst = std::max(worst, rel(oracle::max_abs_diff(fast_back, slow_back),
                                oracle::max_abs(slow_back)));

    const LatticeField fast_prop = propagate(f, 0.37, SymbolKind::discrete);
    const LatticeField slow_prop = oracle::propagate(f, 0.37, SymbolKind::discrete);
    worst = std::max(worst, rel(oracle::max_abs_diff(fast_prop, slow_prop),
                                oracle::max_abs(slow_prop)));

    const QuadratureRule quad = gauss_legendre(8);
    const ProblemSpec spec{3.0, 1.0, SymbolKind::discrete};
    const LatticeField fast_q = averaged_nonlinearity(f, spec, quad);
    const LatticeField slow_q = oracle::averaged_nonlinearity(f, spec, quad);
    worst = std::max(worst, rel(oracle::max_abs_diff(fast_q, slow_q),
                                oracle::max_abs(slow_q)));

    report(8, "brute-force oracle equivalence", worst <= 1e-12,
           fmt("worst relative deviation %.3e (tolerance 1e-12)", worst));
  }

  std::printf("%s: %d of 8 criteria failed\n", failures == 0 ? "SUCCESS" : "FAILURE",
              failures);
  return failures == 0 ? 0 : 1;
}
