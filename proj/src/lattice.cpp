#include "dmnls/lattice.hpp"

#include <gsl/gsl_integration.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>
#include <stdexcept>

#include "dmnls/io.hpp"

namespace dmnls {

namespace {

constexpr std::size_t k_max_points = std::size_t{1} << 22;
constexpr double k_boundary_decay = 1.0e-10;

void check_same_lattice(const LatticeField& f, const LatticeField& g) {
  if (!(f.lattice == g.lattice) || f.values.size() != g.values.size())
    throw std::invalid_argument("fields live on different lattices");
}

void check_consistent(const LatticeField& f) {
  if (f.values.size() != f.lattice.n)
    throw std::invalid_argument("field size does not match its lattice");
}

}  // namespace

Lattice make_lattice(double h, double l_target) {
  if (!(h > 0.0) || !(h <= 1.0))
    throw std::invalid_argument("lattice spacing must lie in (0, 1]");
  if (!(l_target >= 8.0))
    throw std::invalid_argument("target period must be at least 8");
  std::size_t n = 4;
  while (static_cast<double>(n) * h < l_target) {
    if (n >= k_max_points)
      throw std::invalid_argument("lattice would exceed the 2^22-point budget");
    n <<= 1;
  }
  return Lattice{h, n, static_cast<double>(n) * h};
}

LatticeField zero_field(const Lattice& lat) {
  return LatticeField{lat, std::vector<Complex>(lat.n, Complex{0.0, 0.0})};
}

bool all_finite(const LatticeField& f) {
  for (const auto& z : f.values)
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  return true;
}

double lp_norm(const LatticeField& f, double p) {
  check_consistent(f);
  if (std::isinf(p) && p > 0.0) {
    double m = 0.0;
    for (const auto& z : f.values) m = std::max(m, std::abs(z));
    return m;
  }
  if (!(p >= 1.0)) throw std::invalid_argument("lp_norm requires p >= 1");
  if (p == 2.0) {
    double s = 0.0;
    for (const auto& z : f.values) s += std::norm(z);
    return std::sqrt(f.lattice.h * s);
  }
  double s = 0.0;
  for (const auto& z : f.values) s += std::pow(std::abs(z), p);
  return std::pow(f.lattice.h * s, 1.0 / p);
}

Complex inner_product(const LatticeField& f, const LatticeField& g) {
  check_consistent(f);
  check_same_lattice(f, g);
  Complex s{0.0, 0.0};
  for (std::size_t i = 0; i < f.values.size(); ++i) s += f.values[i] * std::conj(g.values[i]);
  return f.lattice.h * s;
}

LatticeField forward_diff(const LatticeField& f) {
  check_consistent(f);
  const std::size_t n = f.lattice.n;
  const double inv_h = 1.0 / f.lattice.h;
  LatticeField out{f.lattice, std::vector<Complex>(n)};
  for (std::size_t i = 0; i < n; ++i)
    out.values[i] = (f.values[(i + 1) % n] - f.values[i]) * inv_h;
  return out;
}

LatticeField backward_diff(const LatticeField& f) {
  check_consistent(f);
  const std::size_t n = f.lattice.n;
  const double inv_h = 1.0 / f.lattice.h;
  LatticeField out{f.lattice, std::vector<Complex>(n)};
  for (std::size_t i = 0; i < n; ++i)
    out.values[i] = (f.values[i] - f.values[(i + n - 1) % n]) * inv_h;
  return out;
}

LatticeField discrete_laplacian(const LatticeField& f) {
  check_consistent(f);
  const std::size_t n = f.lattice.n;
  const double inv_h2 = 1.0 / (f.lattice.h * f.lattice.h);
  LatticeField out{f.lattice, std::vector<Complex>(n)};
  for (std::size_t i = 0; i < n; ++i) {
    const Complex& left = f.values[(i + n - 1) % n];
    const Complex& right = f.values[(i + 1) % n];
    out.values[i] = (right + left - 2.0 * f.values[i]) * inv_h2;
  }
  return out;
}

ContinuumField interpolate(const LatticeField& coarse, const Lattice& fine) {
  check_consistent(coarse);
  const Lattice& cl = coarse.lattice;
  if (fine.n == 0 || fine.n % cl.n != 0)
    throw std::invalid_argument("interpolation target must be a nested refinement");
  if (std::abs(fine.length - cl.length) > 1.0e-9 * cl.length)
    throw std::invalid_argument("interpolation target has a different period");
  const std::size_t ratio = fine.n / cl.n;
  LatticeField out{fine, std::vector<Complex>(fine.n)};
  // Exact rational cell positions: fine node j sits at fraction (j mod ratio)/ratio
  // of coarse cell j/ratio, so no floating-point coordinate round-trip is needed.
  for (std::size_t j = 0; j < fine.n; ++j) {
    const std::size_t q = j / ratio;
    const std::size_t rem = j % ratio;
    if (rem == 0) {
      out.values[j] = coarse.values[q];
      continue;
    }
    const double theta = static_cast<double>(rem) / static_cast<double>(ratio);
    out.values[j] =
        (1.0 - theta) * coarse.values[q] + theta * coarse.values[(q + 1) % cl.n];
  }
  return ContinuumField{std::move(out)};
}

// ---------------------------------------------------------------------------
// Initial data
// ---------------------------------------------------------------------------

namespace {

void check_bump(double amplitude, double width, double center, double velocity) {
  if (!(amplitude >= 0.0) || !std::isfinite(amplitude))
    throw std::invalid_argument("datum amplitude must be a finite nonnegative number");
  if (!(width > 0.0) || !std::isfinite(width))
    throw std::invalid_argument("datum width must be a finite positive number");
  if (!std::isfinite(center) || !std::isfinite(velocity))
    throw std::invalid_argument("datum center and velocity must be finite");
}

}  // namespace

InitialDatum::InitialDatum(GaussianDatum g) : shape_(g) {
  check_bump(g.amplitude, g.width, g.center, g.velocity);
}

InitialDatum::InitialDatum(SechDatum s) : shape_(s) {
  check_bump(s.amplitude, s.width, s.center, s.velocity);
}

InitialDatum::InitialDatum(FileDatum f) : shape_(std::move(f)) {
  if (std::get<FileDatum>(shape_).path.empty())
    throw std::invalid_argument("file datum needs a nonempty path");
}

Complex InitialDatum::operator()(double x) const {
  if (const auto* g = std::get_if<GaussianDatum>(&shape_)) {
    const double u = (x - g->center) / g->width;
    return std::polar(g->amplitude * std::exp(-u * u), g->velocity * (x - g->center));
  }
  if (const auto* s = std::get_if<SechDatum>(&shape_)) {
    const double u = (x - s->center) / s->width;
    return std::polar(s->amplitude / std::cosh(u), s->velocity * (x - s->center));
  }
  throw std::logic_error("file-based data cannot be evaluated pointwise");
}

double InitialDatum::l2_norm() const {
  if (const auto* g = std::get_if<GaussianDatum>(&shape_))
    return std::sqrt(g->amplitude * g->amplitude * g->width *
                     std::sqrt(std::numbers::pi / 2.0));
  if (const auto* s = std::get_if<SechDatum>(&shape_))
    return std::sqrt(2.0 * s->amplitude * s->amplitude * s->width);
  throw std::logic_error("closed-form norms are only available for analytic data");
}

double InitialDatum::derivative_l2_norm() const {
  if (const auto* g = std::get_if<GaussianDatum>(&shape_)) {
    const double a2 = g->amplitude * g->amplitude;
    return std::sqrt(a2 * std::sqrt(std::numbers::pi / 2.0) *
                     (1.0 / g->width + g->velocity * g->velocity * g->width));
  }
  if (const auto* s = std::get_if<SechDatum>(&shape_)) {
    const double a2 = s->amplitude * s->amplitude;
    return std::sqrt(a2 * (2.0 / (3.0 * s->width) +
                           2.0 * s->velocity * s->velocity * s->width));
  }
  throw std::logic_error("closed-form norms are only available for analytic data");
}

namespace {

// Shared 8-point Gauss-Legendre table for per-cell averages.
const gsl_integration_glfixed_table* cell_rule() {
  static gsl_integration_glfixed_table* table = gsl_integration_glfixed_table_alloc(8);
  return table;
}

LatticeField boundary_checked(LatticeField f) {
  if (!all_finite(f)) throw std::invalid_argument("datum produced non-finite samples");
  double peak = 0.0;
  for (const auto& z : f.values) peak = std::max(peak, std::abs(z));
  if (peak > 0.0) {
    const double edge =
        std::max(std::abs(f.values.front()), std::abs(f.values.back()));
    if (edge > k_boundary_decay * peak)
      throw std::invalid_argument(
          "datum does not decay to 1e-10 of its peak at the domain boundary; "
          "enlarge L_target");
  }
  return f;
}

}  // namespace

LatticeField cell_average(const std::function<Complex(double)>& fn, const Lattice& lat) {
  const auto* table = cell_rule();
  LatticeField out = zero_field(lat);
  for (std::size_t m = 0; m < lat.n; ++m) {
    const double a = lat.point(m);
    const double b = a + lat.h;
    Complex acc{0.0, 0.0};
    for (std::size_t q = 0; q < table->n; ++q) {
      double xq = 0.0, wq = 0.0;
      gsl_integration_glfixed_point(a, b, q, &xq, &wq,
                                    const_cast<gsl_integration_glfixed_table*>(table));
      acc += wq * fn(xq);
    }
    out.values[m] = acc / lat.h;
  }
  return out;
}

LatticeField discretize(const InitialDatum& datum, const Lattice& lat) {
  if (const auto* file = std::get_if<FileDatum>(&datum.shape()))
    return boundary_checked(read_field_csv(file->path, lat));

  if (const auto* g = std::get_if<GaussianDatum>(&datum.shape());
      g != nullptr && g->velocity == 0.0) {
    // Chirp-free Gaussian cells integrate in closed form:
    //   (1/h) * int_x^{x+h} a e^{-((y-c)/w)^2} dy
    //   = a w sqrt(pi)/2 * (erf((x+h-c)/w) - erf((x-c)/w)) / h.
    LatticeField out = zero_field(lat);
    const double pref = g->amplitude * g->width * std::sqrt(std::numbers::pi) / 2.0;
    for (std::size_t m = 0; m < lat.n; ++m) {
      const double lo = (lat.point(m) - g->center) / g->width;
      const double hi = lo + lat.h / g->width;
      out.values[m] = pref * (std::erf(hi) - std::erf(lo)) / lat.h;
    }
    return boundary_checked(std::move(out));
  }

  const InitialDatum& d = datum;
  return boundary_checked(cell_average([&d](double x) { return d(x); }, lat));
}

LatticeField sample_pointwise(const InitialDatum& datum, const Lattice& lat) {
  if (!datum.analytic())
    throw std::invalid_argument("pointwise sampling needs an analytic datum");
  LatticeField out = zero_field(lat);
  for (std::size_t m = 0; m < lat.n; ++m) out.values[m] = datum(lat.point(m));
  return boundary_checked(std::move(out));
}

}  // namespace dmnls
