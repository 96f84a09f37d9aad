#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "magdirac/error.hpp"
#include "magdirac/propagators.hpp"
#include "support.hpp"

using namespace magdirac;
using doctest::Approx;
constexpr double kPi = std::numbers::pi;

namespace {

SpectralCoefficients random_coeffs(const FieldParams& p, int K, int L, int modes, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_int_distribution<int> dk(-K, K), dl(0, L);
  std::normal_distribution<double> g;
  SpectralCoefficients c(p, K, L);
  for (int i = 0; i < modes; ++i) c(dk(rng), dl(rng)) = {g(rng), g(rng)};
  return c;
}

}  // namespace

TEST_CASE("Mehler kernel values") {
  const FieldParams p{1.0, 0.0};
  CHECK(heat_mehler_kernel(1.0, {0.3, 0.2}, {0.3, 0.2}, p).real() ==
        Approx(1.0 / (4 * kPi * std::sinh(1.0))).epsilon(1e-14));
  const double t = 30.0;
  CHECK(std::abs(heat_mehler_kernel(t, {0, 0}, {0, 0}, p)) ==
        Approx(std::exp(-t) / (2 * kPi)).epsilon(1e-12));
  // Magnetic phase: x = (1,0), y = (0,1), B0 = 2.
  const auto k = heat_mehler_kernel(0.7, {1, 0}, {0, 1}, {2.0, 0.0});
  CHECK(std::abs(std::arg(k) - (-1.0)) < 1e-12);
}

TEST_CASE("spectral heat flow") {
  const FieldParams p{1.0, 0.0};
  SpectralCoefficients c(p, 3, 3);
  c(0, 0) = 1.0;
  CHECK(std::abs(heat_apply(1.0, c)(0, 0) - std::exp(-1.0)) < 1e-15);
  const auto r = random_coeffs(p, 4, 4, 10, 1);
  CHECK((heat_apply(1e-8, r) - r).l2_norm() < 1e-6 * r.l2_norm());
  const auto a = heat_apply(0.3, heat_apply(0.45, r));
  CHECK((a - heat_apply(0.75, r)).l2_norm() < 1e-12 * r.l2_norm());
}

TEST_CASE("heat flow: spectral route vs Mehler kernel route") {
  const auto& b = test::small_basis();
  const auto c = random_coeffs(b.params(), b.K(), 3, 10, 2);
  SpectralCoefficients cc(b.params(), b.K(), b.L());
  for (int k = -b.K(); k <= b.K(); ++k)
    for (int l = 0; l <= 3; ++l) cc(k, l) = c(k, l);
  const auto f = synthesize(cc, b);
  const auto spectral = heat_apply(0.5, f, b, HeatRoute::Spectral);
  const auto& g = b.grid();
  std::vector<Point> targets;
  std::vector<cplx> want;
  for (int i = 0; i < g.Nr(); i += 37)
    for (int j = 0; j < g.Ntheta(); j += 11) {
      targets.push_back({g.r()[i] * std::cos(g.theta(j)), g.r()[i] * std::sin(g.theta(j))});
      want.push_back(spectral(i, j));
    }
  const auto kern = heat_apply_kernel_at(0.5, f, b.params(), targets);
  double err = 0.0;
  for (std::size_t q = 0; q < targets.size(); ++q) err = std::max(err, std::abs(kern[q] - want[q]));
  CHECK(err < 1e-5);
}

TEST_CASE("heat flow layout check") {
  const auto& b = test::small_basis();
  auto other = std::make_shared<const PolarGrid>(build_polar_grid(5.0, 64, 8));
  try {
    heat_apply(0.5, GridField(other), b, HeatRoute::Spectral);
    FAIL("expected GridMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::GridMismatch);
  }
}

TEST_CASE("Schroedinger flow") {
  const FieldParams p{1.0, 0.0};
  CHECK(schrodinger_kernel_sup(kPi / 2, p) == Approx(1.0 / (4 * kPi)).epsilon(1e-15));
  try {
    schrodinger_kernel_sup(kPi, p);
    FAIL("expected ResonantTime");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::ResonantTime);
  }
  const auto c = random_coeffs({1.3, 0.0}, 5, 5, 12, 3);
  const auto u = schrodinger_apply(kPi / 1.3, c);
  CHECK((u + c).l2_norm() < 1e-12 * c.l2_norm());
  CHECK(schrodinger_apply(0.37, c).l2_norm() == Approx(c.l2_norm()).epsilon(1e-12));
  const auto a = schrodinger_apply(0.2, schrodinger_apply(-1.1, c));
  CHECK((a - schrodinger_apply(-0.9, c)).l2_norm() < 1e-12 * c.l2_norm());
  // Opposite signs are inverse to each other.
  const auto back = schrodinger_apply(0.8, schrodinger_apply(0.8, c), PhaseSign::Positive);
  CHECK((back - c).l2_norm() < 1e-12 * c.l2_norm());
}

TEST_CASE("half-wave flows") {
  const FieldParams p{1.0, 0.0};
  const auto c = random_coeffs({1.0, 0.7}, 5, 5, 12, 4);
  CHECK((halfwave_apply(0.0, c, Spin::Up) - c).l2_norm() == 0.0);
  for (Spin s : {Spin::Up, Spin::Down}) {
    CHECK(halfwave_apply(2.3, c, s).l2_norm() == Approx(c.l2_norm()).epsilon(1e-12));
    const auto a = halfwave_apply(0.4, halfwave_apply(1.5, c, s), s);
    CHECK((a - halfwave_apply(1.9, c, s)).l2_norm() < 1e-12 * c.l2_norm());
  }
  SpectralCoefficients z(p, 3, 3);
  z(-2, 0) = 1.0;
  for (double t : {0.5, 3.0, 40.0}) CHECK((halfwave_apply(t, z, Spin::Up) - z).l2_norm() == 0.0);
}

TEST_CASE("subordination identity") {
  SubordinationSample s;
  s.x_tilde = 4.0;
  s.y = 2.0;
  CHECK(std::exp(-4.0) == Approx(0.0183156).epsilon(1e-5));
  CHECK(subordination_residual(s) < 1e-8);
  s.x_tilde = 1.0;
  s.y = 1.0;
  CHECK(subordination_residual(s) < 1e-8);
  s.x_tilde = 9.0;
  s.y = cplx(0.1, -5.0);
  CHECK(subordination_residual(s) < 1e-6);
  s.y = cplx(-1.0, 0.0);
  CHECK_THROWS_AS(subordination_residual(s), Error);
}

TEST_CASE("oscillatory integral") {
  const auto lim = oscillatory_I_limit(4.0, 4.0);
  CHECK(std::isfinite(std::abs(lim.value)));
  CHECK(lim.change < 1e-4);
  const auto a = oscillatory_I(4.0, 4.0, 0.05);
  const auto b = oscillatory_I(4.0, 4.0, 0.025);
  CHECK(std::abs(a - b) < 0.1 * std::abs(b));
  for (double eps : {0.5, 0.1, 0.02})
    for (auto [x, t] : {std::pair{1.0, 1.0}, std::pair{3.0, 8.0}, std::pair{20.0, 2.5}}) {
      const auto v = oscillatory_I(x, t, eps);
      const auto ref = oscillatory_I_closed_form(x, t, eps);
      CHECK(std::abs(v - ref) < 1e-9 * std::abs(ref));
    }
  for (int j : {-2, 0, 2}) {
    const auto lhs = oscillatory_I_limit(3.0, 5.0).value;
    const auto rhs = std::pow(2.0, j / 2.0) * oscillatory_I_limit(std::ldexp(3.0, -j), std::ldexp(5.0, j)).value;
    CHECK(std::abs(lhs - rhs) < 1e-4 * std::abs(lhs));
  }
}

TEST_CASE("oscillatory integral modulus does not depend on a") {
  // |I(a,t)| = 2 sqrt(pi/t) in the limit, so moving the stationary point far
  // from the window does not shrink it.
  for (double ratio : {1.0, 100.0}) {
    const double t = 4.0;
    const auto v = oscillatory_I_limit(ratio * t, t).value;
    CHECK(std::abs(v) == Approx(2 * std::sqrt(kPi / t)).epsilon(1e-6));
  }
}
