#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "dmnls/lattice.hpp"
#include "oracles.hpp"

using namespace dmnls;

namespace {
constexpr double inf = std::numeric_limits<double>::infinity();
}

TEST_CASE("make_lattice picks the smallest covering power of two") {
  const Lattice a = make_lattice(0.5, 32.0);
  CHECK(a.n == 64);
  CHECK(a.length == doctest::Approx(32.0));

  const Lattice b = make_lattice(1.0, 8.0);
  CHECK(b.n == 8);
  CHECK(b.length == doctest::Approx(8.0));

  // covering 33 needs 128 cells of 0.5
  const Lattice c = make_lattice(0.5, 33.0);
  CHECK(c.n == 128);
  CHECK(c.length == doctest::Approx(64.0));

  // n*h must reach L_target even when L_target/h is just above a power of two
  const Lattice d = make_lattice(0.25, 32.1);
  CHECK(d.n == 256);
}

TEST_CASE("make_lattice rejects out-of-range requests") {
  CHECK_THROWS_AS(make_lattice(0.0, 32.0), std::invalid_argument);
  CHECK_THROWS_AS(make_lattice(-0.5, 32.0), std::invalid_argument);
  CHECK_THROWS_AS(make_lattice(1.5, 32.0), std::invalid_argument);
  CHECK_THROWS_AS(make_lattice(0.5, 7.9), std::invalid_argument);
  // 2^22-point budget: h = 2^-12 over L >= 8 * 2^10 would need 2^23 points
  CHECK_THROWS_AS(make_lattice(1.0 / 4096.0, 8192.0), std::invalid_argument);
}

TEST_CASE("lp norms match hand-computed values") {
  Lattice lat{0.5, 4, 2.0};
  LatticeField f{lat, {Complex{1, 0}, Complex{1, 0}, Complex{0, 0}, Complex{0, 0}}};
  CHECK(lp_norm(f, 2.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(lp_norm(f, inf) == doctest::Approx(1.0).epsilon(1e-14));

  // single spike of height 3: (h * 3^p)^(1/p)
  Lattice lat4{0.25, 4, 1.0};
  LatticeField spike = zero_field(lat4);
  spike.values[2] = Complex{0.0, 3.0};
  CHECK(lp_norm(spike, 4.0) == doctest::Approx(std::pow(0.25 * 81.0, 0.25)).epsilon(1e-14));
  CHECK(lp_norm(spike, inf) == doctest::Approx(3.0));
  CHECK(lp_norm(zero_field(lat4), 2.0) == 0.0);

  CHECK_THROWS_AS(lp_norm(f, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(lp_norm(f, -2.0), std::invalid_argument);
}

TEST_CASE("inner product is conjugate-linear in the second slot") {
  Lattice lat{0.25, 8, 2.0};
  LatticeField f = zero_field(lat);
  LatticeField g = zero_field(lat);
  f.values[3] = Complex{1.0, 0.0};
  g.values[3] = Complex{1.0, 0.0};
  CHECK(inner_product(f, g).real() == doctest::Approx(0.25));
  CHECK(inner_product(f, g).imag() == doctest::Approx(0.0));

  // disjoint spikes
  g.values[3] = 0.0;
  g.values[5] = Complex{2.0, 1.0};
  CHECK(std::abs(inner_product(f, g)) == doctest::Approx(0.0));

  // <f, i f> = -i ||f||^2
  LatticeField fi = f;
  for (auto& z : fi.values) z *= Complex{0.0, 1.0};
  const Complex v = inner_product(f, fi);
  CHECK(v.real() == doctest::Approx(0.0));
  CHECK(v.imag() == doctest::Approx(-0.25));

  // <f, f> = ||f||^2 for a random field
  const LatticeField r = oracle::random_field(lat, 7);
  const double n2 = lp_norm(r, 2.0);
  CHECK(inner_product(r, r).real() == doctest::Approx(n2 * n2).epsilon(1e-13));

  Lattice other{0.5, 8, 4.0};
  CHECK_THROWS_AS(inner_product(f, zero_field(other)), std::invalid_argument);
}

TEST_CASE("difference operators: stencils, wrap-around, adjoint") {
  Lattice lat{1.0, 8, 8.0};
  LatticeField c = zero_field(lat);
  for (auto& z : c.values) z = Complex{3.7, -1.2};
  CHECK(oracle::max_abs(forward_diff(c)) == doctest::Approx(0.0));
  CHECK(oracle::max_abs(backward_diff(c)) == doctest::Approx(0.0));

  LatticeField spike = zero_field(lat);
  spike.values[4] = Complex{1.0, 0.0};
  const LatticeField dp = forward_diff(spike);
  CHECK(dp.values[3].real() == doctest::Approx(1.0));
  CHECK(dp.values[4].real() == doctest::Approx(-1.0));
  const LatticeField dm = backward_diff(spike);
  CHECK(dm.values[4].real() == doctest::Approx(1.0));
  CHECK(dm.values[5].real() == doctest::Approx(-1.0));

  // periodic wrap: spike at the last node spills onto the first
  LatticeField edge = zero_field(lat);
  edge.values[7] = Complex{1.0, 0.0};
  CHECK(forward_diff(edge).values[7].real() == doctest::Approx(-1.0));
  CHECK(backward_diff(edge).values[0].real() == doctest::Approx(-1.0));

  // <D+ f, g> = -<f, D- g> on random fields
  Lattice lat2{0.5, 16, 8.0};
  const LatticeField f = oracle::random_field(lat2, 11);
  const LatticeField g = oracle::random_field(lat2, 12);
  const Complex lhs = inner_product(forward_diff(f), g);
  const Complex rhs = -inner_product(f, backward_diff(g));
  CHECK(std::abs(lhs - rhs) < 1e-12);
}

TEST_CASE("forward difference acts on single modes by its symbol") {
  // D+ e^{i xi x} = (e^{i xi h} - 1)/h * e^{i xi x}
  Lattice lat{0.5, 16, 8.0};
  const double xi = 2.0 * std::numbers::pi * 3.0 / lat.length;
  LatticeField mode = zero_field(lat);
  for (std::size_t m = 0; m < lat.n; ++m)
    mode.values[m] = std::polar(1.0, xi * lat.point(m));
  const Complex factor = (std::polar(1.0, xi * lat.h) - Complex{1.0, 0.0}) / lat.h;
  const LatticeField d = forward_diff(mode);
  double worst = 0.0;
  for (std::size_t m = 0; m < lat.n; ++m)
    worst = std::max(worst, std::abs(d.values[m] - factor * mode.values[m]));
  CHECK(worst < 1e-13);
}

TEST_CASE("discrete laplacian: stencil scaling and factorization") {
  Lattice lat{1.0, 8, 8.0};
  LatticeField spike = zero_field(lat);
  spike.values[4] = Complex{1.0, 0.0};
  LatticeField lap = discrete_laplacian(spike);
  CHECK(lap.values[4].real() == doctest::Approx(-2.0));
  CHECK(lap.values[3].real() == doctest::Approx(1.0));
  CHECK(lap.values[5].real() == doctest::Approx(1.0));

  Lattice lat2{0.5, 8, 4.0};
  LatticeField spike2 = zero_field(lat2);
  spike2.values[4] = Complex{1.0, 0.0};
  lap = discrete_laplacian(spike2);
  CHECK(lap.values[4].real() == doctest::Approx(-8.0));
  CHECK(lap.values[3].real() == doctest::Approx(4.0));
  CHECK(lap.values[5].real() == doctest::Approx(4.0));

  LatticeField c = zero_field(lat2);
  for (auto& z : c.values) z = Complex{2.0, 5.0};
  CHECK(oracle::max_abs(discrete_laplacian(c)) == doctest::Approx(0.0));

  // D- D+ = D+ D- = Laplacian
  Lattice lat3{0.25, 32, 8.0};
  const LatticeField f = oracle::random_field(lat3, 21);
  const LatticeField a = backward_diff(forward_diff(f));
  const LatticeField b = forward_diff(backward_diff(f));
  const LatticeField l = discrete_laplacian(f);
  CHECK(oracle::max_abs_diff(a, l) < 1e-12);
  CHECK(oracle::max_abs_diff(b, l) < 1e-12);
}

TEST_CASE("cell averages: constants pass through, Gaussian matches quadrature") {
  const Lattice lat = make_lattice(0.5, 32.0);
  const Complex cval{1.3, -0.4};
  const LatticeField cf = cell_average([&](double) { return cval; }, lat);
  double worst = 0.0;
  for (const auto& z : cf.values) worst = std::max(worst, std::abs(z - cval));
  CHECK(worst < 1e-14);

  // closed-form cell average of the unit Gaussian at the cell [0, 1/2)
  const InitialDatum datum(GaussianDatum{1.0, 1.0, 0.0, 0.0});
  const LatticeField fh = discretize(datum, lat);
  const double expected =
      std::sqrt(std::numbers::pi) / 2.0 * (std::erf(0.5) - std::erf(0.0)) / 0.5;
  CHECK(fh.values[lat.n / 2].real() == doctest::Approx(expected).epsilon(1e-12));
  CHECK(fh.values[lat.n / 2].imag() == doctest::Approx(0.0));

  // erf-free path (chirped Gaussian) agrees with dense Simpson cell integrals
  const InitialDatum chirped(GaussianDatum{0.8, 1.3, 0.2, 1.5});
  const LatticeField gh = discretize(chirped, lat);
  const std::size_t m = lat.n / 2 + 1;
  const double a = lat.point(m);
  const auto re = oracle::simpson([&](double x) { return chirped(x).real(); }, a,
                                  a + lat.h, 200) / lat.h;
  const auto im = oracle::simpson([&](double x) { return chirped(x).imag(); }, a,
                                  a + lat.h, 200) / lat.h;
  CHECK(gh.values[m].real() == doctest::Approx(re).epsilon(1e-10));
  CHECK(gh.values[m].imag() == doctest::Approx(im).epsilon(1e-10));
}

TEST_CASE("discretization contracts the L2 and derivative norms") {
  std::mt19937_64 rng(99);
  auto uni = [&rng](double lo, double hi) {
    return lo + (hi - lo) * static_cast<double>(rng() >> 11) * 0x1.0p-53;
  };
  std::size_t violations = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const GaussianDatum g{uni(0.2, 2.0), uni(0.5, 2.0), uni(-2.0, 2.0), uni(-2.0, 2.0)};
    const InitialDatum datum(g);
    for (double h : {1.0, 0.25}) {
      const Lattice lat = make_lattice(h, 32.0);
      const LatticeField fh = discretize(datum, lat);
      if (lp_norm(fh, 2.0) > datum.l2_norm() * (1.0 + 1e-12)) ++violations;
      if (lp_norm(forward_diff(fh), 2.0) > datum.derivative_l2_norm() * (1.0 + 1e-12))
        ++violations;
    }
  }
  CHECK(violations == 0);
}

TEST_CASE("discretize rejects data that reach the boundary") {
  const InitialDatum datum(GaussianDatum{1.0, 1.0, 0.0, 0.0});
  // on a period-8 box the Gaussian is ~1e-7 of its peak at the edge
  CHECK_THROWS_AS(discretize(datum, make_lattice(1.0, 8.0)), std::invalid_argument);
  CHECK_NOTHROW(discretize(datum, make_lattice(1.0, 32.0)));
}

TEST_CASE("interpolation: constants, midpoints, ramps, nodes") {
  Lattice coarse{1.0, 8, 8.0};
  Lattice fine{0.25, 32, 8.0};

  LatticeField c = zero_field(coarse);
  for (auto& z : c.values) z = Complex{0.7, 0.2};
  const ContinuumField lifted = interpolate(c, fine);
  double worst = 0.0;
  for (const auto& z : lifted.samples.values)
    worst = std::max(worst, std::abs(z - Complex{0.7, 0.2}));
  CHECK(worst < 1e-14);

  // f(0) = 0, f(1) = 2 -> value 1 at the midpoint x = 1/2
  LatticeField step = zero_field(coarse);
  step.values[5] = Complex{2.0, 0.0};  // x = 1
  Lattice half{0.5, 16, 8.0};
  const ContinuumField mid = interpolate(step, half);
  CHECK(mid.samples.values[9].real() == doctest::Approx(1.0));  // x = 0.5

  // linear ramp reproduced exactly away from the wrap cell
  LatticeField ramp = zero_field(coarse);
  for (std::size_t m = 0; m < coarse.n; ++m)
    ramp.values[m] = Complex{coarse.point(m), 0.0};
  const ContinuumField r = interpolate(ramp, fine);
  const std::size_t ratio = fine.n / coarse.n;
  for (std::size_t j = 0; j < fine.n; ++j) {
    if (j / ratio == coarse.n - 1 && j % ratio != 0) continue;  // periodic wrap cell
    CHECK(r.samples.values[j].real() == doctest::Approx(fine.point(j)).epsilon(1e-14));
  }

  // nested-grid requirement
  Lattice alien{0.3, 32, 9.6};
  CHECK_THROWS_AS(interpolate(c, alien), std::invalid_argument);
}

TEST_CASE("initial datum closed-form norms match dense quadrature") {
  const GaussianDatum g{1.3, 0.8, 0.4, 1.7};
  const InitialDatum dg(g);
  auto g_sq = [&](double x) { return std::norm(dg(x)); };
  auto g_dsq = [&](double x) {
    const double u = x - g.center;
    const Complex dlog{-2.0 * u / (g.width * g.width), g.velocity};
    return std::norm(dlog * dg(x));
  };
  const double l2 = std::sqrt(oracle::simpson(g_sq, -20.0, 20.0, 4000));
  const double dl2 = std::sqrt(oracle::simpson(g_dsq, -20.0, 20.0, 4000));
  CHECK(dg.l2_norm() == doctest::Approx(l2).epsilon(1e-10));
  CHECK(dg.derivative_l2_norm() == doctest::Approx(dl2).epsilon(1e-10));

  const SechDatum s{0.9, 1.4, -0.3, 0.6};
  const InitialDatum ds(s);
  auto s_sq = [&](double x) { return std::norm(ds(x)); };
  auto s_dsq = [&](double x) {
    const double u = (x - s.center) / s.width;
    const Complex dlog{-std::tanh(u) / s.width, s.velocity};
    return std::norm(dlog * ds(x));
  };
  const double sl2 = std::sqrt(oracle::simpson(s_sq, -40.0, 40.0, 8000));
  const double sdl2 = std::sqrt(oracle::simpson(s_dsq, -40.0, 40.0, 8000));
  CHECK(ds.l2_norm() == doctest::Approx(sl2).epsilon(1e-10));
  CHECK(ds.derivative_l2_norm() == doctest::Approx(sdl2).epsilon(1e-10));
}

TEST_CASE("initial datum construction guards") {
  CHECK_THROWS_AS(InitialDatum(GaussianDatum{-1.0, 1.0, 0.0, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(InitialDatum(GaussianDatum{1.0, 0.0, 0.0, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(InitialDatum(SechDatum{1.0, -2.0, 0.0, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(InitialDatum(FileDatum{""}), std::invalid_argument);
  CHECK_NOTHROW(InitialDatum(GaussianDatum{0.0, 1.0, 0.0, 0.0}));  // zero datum is legal

  const InitialDatum file(FileDatum{"nonexistent.csv"});
  CHECK_THROWS(file.l2_norm());
  CHECK_THROWS(file(0.0));
}

TEST_CASE("pointwise sampling hits the datum exactly at the nodes") {
  const InitialDatum datum(GaussianDatum{1.0, 2.0, 0.5, 0.7});
  const Lattice lat = make_lattice(0.25, 64.0);
  const LatticeField f = sample_pointwise(datum, lat);
  for (std::size_t m : {std::size_t{0}, lat.n / 2, lat.n / 2 + 3, lat.n - 1})
    CHECK(std::abs(f.values[m] - datum(lat.point(m))) < 1e-15);
}
