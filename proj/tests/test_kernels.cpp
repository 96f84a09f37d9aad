#include <doctest.h>
#include <gsl/gsl_sf_laguerre.h>

#include <cmath>
#include <numbers>
#include <random>

#include "magdirac/kernels.hpp"
#include "magdirac/level_series.hpp"
#include "magdirac/propagators.hpp"
#include "support.hpp"

using namespace magdirac;
using kernels::cplx;
constexpr double kPi = std::numbers::pi;

namespace {

std::vector<cplx> random_vector(std::size_t n, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> g;
  std::vector<cplx> v(n);
  for (auto& x : v) x = {g(rng), g(rng)};
  return v;
}

}  // namespace

TEST_CASE("serial and parallel modal transforms agree exactly") {
  const auto& b = test::small_basis();
  const kernels::ModalLayout lay{b.K(), b.L(), b.grid().Nr()};
  const auto coeffs = random_vector(b.mode_count(), 1);
  std::vector<cplx> r1((2 * b.K() + 1) * b.grid().Nr()), r2(r1.size());
  kernels::serial::modes_to_radial(lay, b.all_profiles(), coeffs, r1);
  kernels::parallel::modes_to_radial(lay, b.all_profiles(), coeffs, r2);
  CHECK(r1 == r2);

  std::vector<double> area(b.grid().Nr());
  for (int i = 0; i < b.grid().Nr(); ++i) area[i] = b.grid().weights()[i] * b.grid().r()[i];
  std::vector<cplx> c1(b.mode_count()), c2(b.mode_count());
  kernels::serial::radial_to_modes(lay, b.all_profiles(), area, r1, c1);
  kernels::parallel::radial_to_modes(lay, b.all_profiles(), area, r1, c2);
  CHECK(c1 == c2);
  for (std::size_t f = 0; f < c1.size(); ++f) CHECK(std::abs(c1[f] - coeffs[f]) < 1e-9);
}

TEST_CASE("level series against the Laguerre polynomials") {
  const auto a = random_vector(40, 2);
  std::vector<double> s{0.0, 0.3, 2.0, 11.0, 35.0, 80.0};
  std::vector<cplx> o1(s.size()), o2(s.size());
  kernels::serial::level_series(a, s, o1);
  kernels::parallel::level_series(a, s, o2);
  CHECK(o1 == o2);
  for (std::size_t i = 0; i < s.size(); ++i) {
    cplx ref = 0.0;
    for (int n = 0; n < 40; ++n) ref += a[n] * gsl_sf_laguerre_n(n, 0.0, s[i]);
    ref *= std::exp(-s[i] / 2);
    CHECK(std::abs(o1[i] - ref) < 1e-10 * (1 + std::abs(ref)));
  }
}

TEST_CASE("Mehler quadrature serial and parallel agree") {
  const auto grid = build_polar_grid(8.0, 96, 16);
  std::vector<cplx> f(grid.size());
  for (int i = 0; i < grid.Nr(); ++i)
    for (int j = 0; j < grid.Ntheta(); ++j)
      f[i * grid.Ntheta() + j] = std::exp(-grid.r()[i] * grid.r()[i]) * std::polar(1.0, j * 0.3);
  std::vector<kernels::Point> targets{{0.0, 0.0}, {0.5, -0.2}, {1.5, 1.0}};
  std::vector<cplx> o1(targets.size()), o2(targets.size());
  kernels::serial::mehler_apply(0.4, 1.0, grid, f, targets, o1);
  kernels::parallel::mehler_apply(0.4, 1.0, grid, f, targets, o2);
  CHECK(o1 == o2);
}

TEST_CASE("level-resolved kernel equals brute-force mode sums") {
  const auto& b = test::small_basis();
  const auto pairs = probe_pairs(1.5, 1.0, 6);
  const int nlev = b.K() + b.L() + 1;
  std::vector<cplx> s(pairs.size() * nlev), p(s.size());
  kernels::serial::level_resolved_kernel(b, pairs, nlev, s);
  kernels::parallel::level_resolved_kernel(b, pairs, nlev, p);
  CHECK(s == p);
  for (std::size_t q = 0; q < pairs.size(); ++q) {
    std::vector<cplx> ref(nlev);
    for (std::size_t f = 0; f < b.mode_count(); ++f) {
      const auto idx = b.index(f);
      const auto vx = b.eval(idx, pairs[q].x[0], pairs[q].x[1]);
      const auto vy = b.eval(idx, pairs[q].y[0], pairs[q].y[1]);
      ref[kernels::landau_level(idx)] += vx * std::conj(vy);
    }
    for (int n = 0; n < nlev; ++n) CHECK(std::abs(s[q * nlev + n] - ref[n]) < 1e-12);
  }
}

TEST_CASE("level series reproduces the 2D kernel modulus") {
  // |sum over a complete level of V(x) conj V(y)| depends only on |x - y|.
  const auto& b = test::reference_basis();
  const auto pairs = probe_pairs(1.0, 1.5, 8);
  const int nlev = 6;
  std::vector<cplx> lev(pairs.size() * nlev);
  kernels::parallel::level_resolved_kernel(b, pairs, nlev, lev);
  for (std::size_t q = 0; q < pairs.size(); ++q) {
    const double dx = pairs[q].x[0] - pairs[q].y[0];
    const double dy = pairs[q].x[1] - pairs[q].y[1];
    const double r = std::hypot(dx, dy);
    for (int n = 0; n < nlev; ++n) {
      std::vector<cplx> a(nlev, 0.0);
      a[n] = 1.0;
      const auto k = level_kernel(a, 1.0, std::span(&r, 1))[0];
      CHECK(std::abs(std::abs(lev[q * nlev + n]) - std::abs(k)) < 1e-9);
    }
  }
  CHECK(level_kernel(std::vector<cplx>{1.0}, 1.0, std::vector<double>{0.0})[0].real() ==
        doctest::Approx(1.0 / (2 * kPi)));
}

TEST_CASE("radial sector evaluation") {
  const auto nodes = build_polar_grid(10.0, 64, 8);
  const RadialSector sec(-2, 5, 1.0, nodes);
  const auto& b = test::small_basis();
  std::vector<cplx> c{1.0, {0.0, 2.0}, 0.0, -0.5, 0.0, 0.25};
  std::vector<cplx> out(nodes.Nr());
  sec.evaluate(c, out);
  for (int i = 0; i < nodes.Nr(); i += 7) {
    cplx ref = 0.0;
    for (int l = 0; l <= 5; ++l) ref += c[l] * b.normalized_radial({-2, l}, nodes.r()[i]);
    CHECK(std::abs(out[i] - ref) < 1e-10);
  }
}
