#include <doctest.h>

#include <cmath>

#include "magdirac/error.hpp"
#include "magdirac/multipliers.hpp"

using namespace magdirac;
using doctest::Approx;

namespace {

SpectralCoefficients ones(const FieldParams& p, int K, int L) {
  SpectralCoefficients c(p, K, L);
  for (auto& v : c.data()) v = 1.0;
  return c;
}

}  // namespace

TEST_CASE("bump values and support") {
  CHECK(bump_phi(0.1) == 0.0);
  CHECK(bump_phi(0.5) == 0.0);
  CHECK(bump_phi(2.0) == 0.0);
  CHECK(bump_phi(3.0) == 0.0);
  CHECK(bump_phi(1.0) > 0.0);
  CHECK(bump_phi0(0.25) == 1.0);
  CHECK(bump_phi0(-1.0) == 1.0);
  CHECK(bump_phi0(2.5) == 0.0);
  for (double x = 0.01; x < 3.0; x += 0.0173) {
    CHECK(bump_phi(x) >= 0.0);
    CHECK(bump_phi(x) <= 1.0);
  }
}

TEST_CASE("partition of unity") {
  double sum = 0.0;
  for (int j = -30; j <= 30; ++j) sum += bump_phi(std::ldexp(3.7, -j));
  CHECK(sum == Approx(1.0).epsilon(1e-12));
  for (double x : {0.6, 1.0, 1.9, 7.3, 123.0}) {
    double s = bump_phi0(x);
    for (int j = 1; j <= 40; ++j) s += bump_phi(std::ldexp(x, -j));
    CHECK(s == Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("partition of unity at every eigenvalue of a truncation") {
  const FieldParams p{0.7, 0.0};
  const auto c = ones(p, 6, 30);
  auto total = lp_project_low(c);
  for (int j = 1; j <= lp_max_level(c); ++j) total += lp_project(j, c);
  CHECK((total - c).l2_norm() < 1e-12 * c.l2_norm());
}

TEST_CASE("multipliers act diagonally") {
  const FieldParams p{1.0, 0.5};
  const auto c = ones(p, 4, 4);
  const auto id = apply_multiplier([](double) { return 1.0; }, c, MultiplierArgument::SqrtH);
  CHECK((id - c).l2_norm() == 0.0);
  const auto sq = apply_multiplier([](double x) { return x * x; }, c, MultiplierArgument::SqrtH);
  for (std::size_t f = 0; f < c.size(); ++f)
    CHECK(sq.data()[f].real() == Approx(c.eigenvalue_at(f)).epsilon(1e-14));
  const auto up = apply_multiplier([](double w) { return w; }, c, MultiplierArgument::KgUp);
  CHECK(up(2, 1).real() == Approx(kg_frequency({2, 1}, p, Spin::Up)));
  try {
    apply_multiplier([](double x) { return 1.0 / (x - 1.0); }, c, MultiplierArgument::SqrtH);
    FAIL("expected NonFiniteMultiplier");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::NonFiniteMultiplier);
  }
}

TEST_CASE("dyadic projection of single modes") {
  const FieldParams p{1.0, 0.0};
  // (k, l) = (0, 12): sqrt(lambda) = 5 = 1.25 * 4.
  SpectralCoefficients c(p, 2, 20);
  c(0, 12) = 1.0;
  CHECK(std::abs(lp_project(2, c)(0, 12) - bump_phi(1.25)) < 1e-15);
  CHECK(std::abs(lp_project(2, c)(0, 12)) > 0.0);
  // (0, 4): sqrt(lambda) = 3 = 3 * 2^0, outside [1/2, 2].
  SpectralCoefficients d(p, 2, 20);
  d(0, 4) = 1.0;
  CHECK(lp_project(0, d).l2_norm() == 0.0);
}

TEST_CASE("projections two or more levels apart annihilate each other") {
  const auto c = ones({1.0, 0.0}, 5, 40);
  for (int j = 0; j <= 4; ++j)
    for (int i = j + 2; i <= 6; ++i) CHECK(lp_project(i, lp_project(j, c)).l2_norm() == 0.0);
}

TEST_CASE("square-function consistency on coefficients") {
  const auto c = ones({1.0, 0.0}, 6, 30);
  double sum = std::pow(lp_project_low(c).l2_norm(), 2);
  for (int j = 1; j <= lp_max_level(c); ++j) sum += std::pow(lp_project(j, c).l2_norm(), 2);
  const double total = std::pow(c.l2_norm(), 2);
  CHECK(sum <= total * (1 + 1e-12));
  CHECK(sum >= 0.5 * total);
}
