#pragma once

#include <complex>
#include <functional>
#include <string>
#include <variant>
#include <vector>

namespace dmnls {

using Complex = std::complex<double>;

/// Uniform periodic grid on [-L/2, L/2) with spacing h and n = 2^k points,
/// so the total length L = n*h. Point m sits at x_m = -L/2 + m*h.
struct Lattice {
  double h = 0.0;
  std::size_t n = 0;
  double length = 0.0;

  double point(std::size_t m) const { return -0.5 * length + h * static_cast<double>(m); }
  bool operator==(const Lattice& other) const = default;
};

/// Builds the smallest power-of-two lattice of spacing h whose period covers
/// l_target. Requires 0 < h <= 1 and l_target >= 8; refuses grids beyond
/// 2^22 points.
Lattice make_lattice(double h, double l_target);

/// Complex samples attached to a lattice.
struct LatticeField {
  Lattice lattice;
  std::vector<Complex> values;

  std::size_t size() const { return values.size(); }
};

LatticeField zero_field(const Lattice& lat);
bool all_finite(const LatticeField& f);

/// lp norm (h * sum |f|^p)^(1/p); pass p = infinity for the sup norm.
double lp_norm(const LatticeField& f, double p);

/// h * sum f * conj(g); conjugate-linear in the second argument.
Complex inner_product(const LatticeField& f, const LatticeField& g);

/// (f(x+h) - f(x)) / h with periodic wrap-around.
LatticeField forward_diff(const LatticeField& f);

/// (f(x) - f(x-h)) / h with periodic wrap-around.
LatticeField backward_diff(const LatticeField& f);

/// (f(x+h) + f(x-h) - 2 f(x)) / h^2; equals both D- D+ and D+ D-.
LatticeField discrete_laplacian(const LatticeField& f);

/// A field interpreted as pointwise samples of a continuum profile on a fine
/// reference grid (used as the comparison target in refinement studies).
struct ContinuumField {
  LatticeField samples;
};

/// Piecewise-linear extension of a coarse field evaluated on a finer nested
/// grid of the same period. The fine spacing must divide the coarse one.
ContinuumField interpolate(const LatticeField& coarse, const Lattice& fine);

// ---------------------------------------------------------------------------
// Initial data
// ---------------------------------------------------------------------------

struct GaussianDatum {
  double amplitude = 1.0;
  double width = 1.0;
  double center = 0.0;
  double velocity = 0.0;
};

struct SechDatum {
  double amplitude = 1.0;
  double width = 1.0;
  double center = 0.0;
  double velocity = 0.0;
};

struct FileDatum {
  std::string path;
};

/// Initial profile phi: Gaussian amplitude*exp(-((x-center)/width)^2),
/// sech amplitude*sech((x-center)/width), both with chirp e^{i v (x-center)},
/// or samples loaded from a CSV file. Amplitude must be >= 0, width > 0.
class InitialDatum {
public:
  explicit InitialDatum(GaussianDatum g);
  explicit InitialDatum(SechDatum s);
  explicit InitialDatum(FileDatum f);

  const std::variant<GaussianDatum, SechDatum, FileDatum>& shape() const { return shape_; }
  bool analytic() const { return !std::holds_alternative<FileDatum>(shape_); }

  /// Pointwise evaluation; only available for the analytic kinds.
  Complex operator()(double x) const;

  /// Closed-form continuum norms ||phi||_{L^2} and ||phi'||_{L^2}
  /// (analytic kinds only).
  double l2_norm() const;
  double derivative_l2_norm() const;

private:
  std::variant<GaussianDatum, SechDatum, FileDatum> shape_;
};

/// Cell averages (1/h) * integral_{x}^{x+h} fn, for each lattice cell.
LatticeField cell_average(const std::function<Complex(double)>& fn, const Lattice& lat);

/// Cell-average discretization of an initial profile. Rejects profiles that
/// do not decay below 1e-10 of their peak at the domain boundary.
LatticeField discretize(const InitialDatum& datum, const Lattice& lat);

/// Pointwise sampling at lattice nodes (same boundary-decay check); used to
/// realize the continuum comparison target on a fine grid.
LatticeField sample_pointwise(const InitialDatum& datum, const Lattice& lat);

}  // namespace dmnls
