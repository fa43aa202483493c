// One-shot calibration for the committed baseline constants. Runs the seeded
// ensemble ratio sweeps, the Gaussian interpolation-defect family, and the
// headline refinement study, then prints the measured maxima next to the
// currently committed values. Re-run after any change that legitimately moves
// these quantities and update baselines.hpp by hand.

#include <algorithm>
#include <cstdio>
#include <cstring>
#include <limits>
#include <vector>

#include "dmnls/analysis.hpp"
#include "dmnls/baselines.hpp"
#include "dmnls/evolution.hpp"
#include "dmnls/lattice.hpp"
#include "dmnls/spectral.hpp"

namespace {

void ensemble_ratios(std::size_t workers) {
  dmnls::VerifyOptions opts;
  opts.workers = workers;
  const auto reports = dmnls::verify_inequalities(opts);
  std::printf("ensemble ratio maxima (1000 samples, seed %llu, h in {1,1/2,1/4,1/8}):\n",
              static_cast<unsigned long long>(opts.seed));
  for (const auto& r : reports)
    std::printf("  %-28s measured %.12g  committed %.12g\n", r.name.c_str(),
                r.worst_ratio, r.bound);
}

void interpolation_defect() {
  // ||p_h f_h - f||_{L^2} / (h ||f||_{H^1}) over a Gaussian family, measured
  // against a fine pointwise reference.
  double worst = 0.0;
  const dmnls::Lattice fine = dmnls::make_lattice(1.0 / 256.0, 32.0);
  for (double width : {0.5, 1.0, 2.0}) {
    for (double center : {0.0, 0.3}) {
      for (double velocity : {0.0, 1.0}) {
        const dmnls::InitialDatum datum(
            dmnls::GaussianDatum{1.0, width, center, velocity});
        const dmnls::LatticeField ref = dmnls::sample_pointwise(datum, fine);
        const double h1 = dmnls::hs_norm(ref, 1.0);
        for (double h : {1.0, 0.5, 0.25, 0.125}) {
          const dmnls::Lattice lat = dmnls::make_lattice(h, 32.0);
          const dmnls::LatticeField fh = dmnls::discretize(datum, lat);
          const double err = dmnls::l2_error(fh, dmnls::ContinuumField{ref});
          worst = std::max(worst, err / (h * h1));
        }
      }
    }
  }
  std::printf("interpolation defect ratio:  measured %.12g  committed %.12g\n", worst,
              dmnls::baselines::interpolation_defect_ratio);
}

void headline_sup_h1(std::size_t workers) {
  dmnls::StudyOptions opts;
  opts.h_list = {0.5, 0.25, 0.125, 0.0625};
  opts.h_ref = 1.0 / 128.0;
  opts.l_target = 32.0;
  opts.horizon = 1.0;
  opts.dt = 2.0e-3;
  opts.snapshot_every = 20;
  opts.workers = workers;
  const dmnls::InitialDatum datum(dmnls::GaussianDatum{1.0, 1.0, 0.0, 0.0});
  const dmnls::ProblemSpec spec{3.0, 1.0, dmnls::SymbolKind::discrete};
  const dmnls::StudyResult result = dmnls::convergence_study(datum, spec, opts);
  double finest_sup = 0.0;
  double finest_h = std::numeric_limits<double>::infinity();
  for (const auto& run : result.runs) {
    if (run.h < finest_h) {
      finest_h = run.h;
      finest_sup = run.sup_h1;
    }
  }
  std::printf("headline study:\n");
  for (std::size_t i = 0; i < result.h_list.size(); ++i)
    std::printf("  h=%-8g error %.12g\n", result.h_list[i], result.errors[i]);
  std::printf("  slope %.6f  intercept %.6g  h_ref %g\n", result.slope, result.intercept,
              result.h_ref);
  for (const auto& run : result.runs)
    std::printf("  h=%-8g mass_drift %.3e energy_drift %.3e sup_h1 %.12g nodes %zu\n",
                run.h, run.mass_drift, run.energy_drift, run.sup_h1,
                run.quadrature_nodes);
  std::printf("sup-in-time H^1 at finest h: measured %.12g  x1.5 = %.12g  committed %.12g\n",
              finest_sup, 1.5 * finest_sup, dmnls::baselines::headline_sup_h1);
}

}  // namespace

int main(int argc, char** argv) {
  std::size_t workers = 4;
  bool quick = false;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--quick") == 0) quick = true;
    if (std::strncmp(argv[i], "--workers=", 10) == 0)
      workers = static_cast<std::size_t>(std::strtoul(argv[i] + 10, nullptr, 10));
  }
  ensemble_ratios(workers);
  interpolation_defect();
  if (!quick) headline_sup_h1(workers);
  return 0;
}
