#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "dmnls/errors.hpp"
#include "dmnls/lattice.hpp"
#include "dmnls/quadrature.hpp"
#include "dmnls/spectral.hpp"

namespace dmnls {

/// Parameters of the averaged model i u_t + d_av Laplacian u + <Q>(u) = 0
/// with power nonlinearity |u|^{p-1} u inside the dispersion average.
struct ProblemSpec {
  double p = 3.0;
  double d_av = 1.0;
  SymbolKind kind = SymbolKind::discrete;
};

/// True when (p, d_av) lies in the regime where the a-priori H^1 theory
/// applies: p in (1,9) for d_av > 0, p > 1 for d_av < 0, p in (1,5) for
/// d_av = 0. Outside the regime runs proceed with a warning.
bool admissible_exponent(double p, double d_av);

/// |z|^{p-1} z, with the removable singularity at z = 0 evaluated as 0.
Complex nonlinearity_pointwise(Complex z, double p);

/// Dispersion-averaged nonlinearity
///   <Q>(f) = sum_j w_j T_{r_j}^{-1} N(T_{r_j} f),
/// the quadrature discretization of integral_0^1 T_r^{-1} N(T_r f) dr with
/// T_r = e^{i r Laplacian} of the chosen symbol kind and N(z) = |z|^{p-1} z.
LatticeField averaged_nonlinearity(const LatticeField& f, const ProblemSpec& spec,
                                   const QuadratureRule& quad);

/// Squared L^2 norm h * sum |f|^2 (the conserved mass).
double mass(const LatticeField& f);

/// Hamiltonian of the truncated flow:
///   E(f) = (d_av/2) ||Df||^2 - 1/(p+1) sum_j w_j ||T_{r_j} f||^{p+1}_{p+1},
/// where ||Df|| is the forward-difference norm for the lattice symbol and the
/// spectral derivative norm for the continuum one. Uses the same quadrature
/// rule as the evolution so the truncated flow conserves it exactly.
double energy(const LatticeField& f, const ProblemSpec& spec, const QuadratureRule& quad);

/// Interaction-picture right-hand side at time t for v = e^{-i d_av t L} u:
///   dv/dt = i e^{-i d_av t L} <Q>(e^{i d_av t L} v).
LatticeField rhs_interaction(const LatticeField& v, double t, const ProblemSpec& spec,
                             const QuadratureRule& quad);

/// One classical Runge-Kutta step of size dt (dt may be negative to run the
/// flow backward) on the interaction-picture variable.
LatticeField step_rk4(const LatticeField& v, double t, double dt, const ProblemSpec& spec,
                      const QuadratureRule& quad);

/// Smallest quadrature size resolving the phase e^{i r sigma(xi)} over the
/// populated band of f: frequencies with |fhat| >= 1e-8 * max |fhat| must see
/// less than pi/2 of phase per subinterval. Returns max(base, required),
/// capped at `cap` (with a warning when the cap binds).
std::size_t effective_quadrature_nodes(const LatticeField& f, SymbolKind kind,
                                       std::size_t base, std::size_t cap = 512);

struct BarrierParams {
  double datum_l2 = 0.0;        // ||phi||_{L^2}
  double datum_deriv_l2 = 0.0;  // ||phi'||_{L^2}
};

struct EvolveOptions {
  double horizon = 1.0;  // integrate over [0, horizon]
  double dt = 5.0e-3;
  std::size_t snapshot_every = 20;  // steps between recorded snapshots
  bool nonlinearity_enabled = true;
  double blowup_factor = 1.0e3;  // H^1 ceiling relative to the initial datum
  std::optional<BarrierParams> barrier;  // populates the d_av = 0 bound column
};

struct DiagnosticsRecord {
  double t = 0.0;
  double mass = 0.0;
  double energy = 0.0;
  double h1 = 0.0;
  double dplus = 0.0;
  std::optional<double> barrier;  // only for d_av = 0 runs with known norms
};

struct Trajectory {
  std::vector<double> snapshot_times;
  std::vector<LatticeField> snapshots;  // physical variable u at those times
  std::vector<DiagnosticsRecord> diagnostics;
  std::size_t quadrature_nodes = 0;
};

/// Trajectory abort carrying everything recorded before the failure, so
/// callers can still write partial diagnostics.
class EvolveAbort : public BlowupError {
public:
  EvolveAbort(const std::string& what, double t, std::shared_ptr<const Trajectory> partial)
      : BlowupError(what, t), partial_(std::move(partial)) {}
  const Trajectory& partial() const { return *partial_; }

private:
  std::shared_ptr<const Trajectory> partial_;
};

/// Integrates the averaged model from phi over [0, horizon], recording
/// snapshots and diagnostics every snapshot_every steps and at the endpoint.
/// Throws BlowupError on non-finite values or when the H^1 norm exceeds
/// blowup_factor times its initial value.
Trajectory evolve(const LatticeField& phi, const ProblemSpec& spec, const QuadratureRule& quad,
                  const EvolveOptions& opts);

}  // namespace dmnls
