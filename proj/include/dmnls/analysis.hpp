#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dmnls/evolution.hpp"
#include "dmnls/lattice.hpp"

namespace dmnls {

/// L^2 distance on the reference grid between the piecewise-linear extension
/// of a coarse field and a reference profile sampled on that grid.
double l2_error(const LatticeField& coarse, const ContinuumField& reference);

struct FitResult {
  double slope = 0.0;
  double intercept = 0.0;  // multiplicative constant C in e ~ C * h^slope
};

/// Least-squares line through (log h_i, log e_i); needs >= 3 points with
/// positive coordinates.
FitResult fit_loglog_slope(const std::vector<double>& h, const std::vector<double>& errors);

/// Closed-form H^1 growth bound for d_av = 0:
///   B(t) = (||phi'||^{-(p-1)/2} - (p-1)/2 * ||phi||^{(p-1)/2} t)^{-2/(p-1)},
/// finite for t < T* and +infinity beyond.
double barrier_bound(double t, double datum_l2, double datum_deriv_l2, double p);

/// Lifespan T* = 2/(p-1) * (||phi|| * ||phi'||)^{-(p-1)/2} of the bound above.
double barrier_lifespan(double datum_l2, double datum_deriv_l2, double p);

// ---------------------------------------------------------------------------
// Refinement study
// ---------------------------------------------------------------------------

struct StudyOptions {
  std::vector<double> h_list;  // coarse spacings, conventionally decreasing
  double h_ref = 1.0 / 128.0;  // reference spacing, <= min(h_list)/4
  double l_target = 32.0;
  double horizon = 1.0;
  double dt = 5.0e-3;
  std::size_t snapshot_every = 20;
  std::size_t quadrature_base = 32;   // escalated per run as the band requires
  bool quadrature_escalate = true;    // false pins the rule at quadrature_base
  bool nonlinearity_enabled = true;
  std::size_t workers = 1;
};

struct RunSummary {
  double h = 0.0;
  double mass_drift = 0.0;    // max_t |m(t) - m(0)| / |m(0)|  (absolute if m(0) = 0)
  double energy_drift = 0.0;  // max_t |E(t) - E(0)| / |E(0)|  (absolute if E(0) = 0)
  double sup_h1 = 0.0;        // max_t ||u(t)||_{H^1}
  std::size_t quadrature_nodes = 0;
};

struct StudyResult {
  std::vector<double> h_list;
  std::vector<double> errors;  // sup over snapshot times of the L^2 gap
  double slope = 0.0;
  double intercept = 0.0;
  double h_ref = 0.0;  // reference spacing actually used (may be refined once)
  std::vector<RunSummary> runs;
  RunSummary reference;
};

/// Runs the lattice model at every h in h_list against a fine-grid
/// continuum-symbol reference from the same datum, measures sup-in-time L^2
/// errors, and fits the log-log slope. If the error at the smallest h fails
/// to improve on the previous one, the reference is refined to h_ref/2 once
/// and the comparison repeated.
StudyResult convergence_study(const InitialDatum& datum, const ProblemSpec& spec,
                              const StudyOptions& opts);

// ---------------------------------------------------------------------------
// Random band-limited ensemble
// ---------------------------------------------------------------------------

/// Trigonometric polynomial sum_k c_k e^{i xi_k x} with xi_k = 2*pi*k/L
/// confined to |xi_k| <= pi (the band shared by every lattice with h <= 1),
/// with coefficient law c_k = (1 + |xi_k|)^{-2} * standard complex Gaussian.
struct BandSample {
  double length = 0.0;
  std::vector<double> frequencies;
  std::vector<Complex> coeffs;

  double continuum_l2() const;        // sqrt(L * sum |c_k|^2)
  double continuum_deriv_l2() const;  // sqrt(L * sum xi_k^2 |c_k|^2)

  /// Exact cell averages on a lattice of period `length`: multiply each mode
  /// by (e^{i xi h} - 1)/(i xi h).
  LatticeField realize_cell_average(const Lattice& lat) const;

  /// Exact nodal samples on a lattice of period `length`.
  LatticeField realize_pointwise(const Lattice& lat) const;
};

/// Deterministic sample #index of the seeded ensemble on a period-L box.
BandSample band_sample(double length, std::uint64_t seed, std::uint64_t index);

// ---------------------------------------------------------------------------
// Inequality verification
// ---------------------------------------------------------------------------

struct InequalityReport {
  std::string name;
  std::size_t samples = 0;
  double worst_ratio = 0.0;  // max over samples of LHS/RHS
  double bound = 1.0;        // inequality passes while worst_ratio <= bound
  bool pass = false;
};

struct VerifyOptions {
  std::vector<double> h_list{1.0, 0.5, 0.25, 0.125};
  double l_target = 32.0;
  std::size_t samples = 1000;
  std::uint64_t seed = 12345;
  double p = 3.0;                     // exponent for the averaged nonlinearity
  std::size_t quadrature_nodes = 32;  // rule for the dispersion averages
  double slack = 1.0e-12;             // relative tolerance on the exact bounds
  std::size_t workers = 1;
};

/// Sweeps the seeded ensemble through the functional inequalities at every h:
/// exact-constant bounds (derivative/spectral norm sandwich, the end-point
/// interpolation inequality with constant one, discretization contraction)
/// and ratio bounds with committed baseline constants (averaged smoothing
/// L^8 bound, averaged-nonlinearity H^1 bound, embedding sup bound).
std::vector<InequalityReport> verify_inequalities(const VerifyOptions& opts);

}  // namespace dmnls
