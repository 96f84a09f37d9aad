#include <doctest.h>

#include <cmath>
#include <numbers>

#include "magdirac/error.hpp"
#include "magdirac/estimates.hpp"
#include "magdirac/multipliers.hpp"
#include "support.hpp"

using namespace magdirac;
using doctest::Approx;

namespace {

Errc code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return Errc::CheckFailed;
}

}  // namespace

TEST_CASE("admissible pairs") {
  auto a = admissible_check(HUGE_VAL, 2.0);
  CHECK(a.admissible);
  CHECK(a.s == 0.0);
  a = admissible_check(8.0, 4.0);
  CHECK(a.admissible);
  CHECK(a.s == 0.375);
  CHECK_FALSE(admissible_check(2.0, 4.0).admissible);
}

TEST_CASE("Keel-Tao exponent") {
  for (int k = 0; k <= 6; ++k)
    CHECK(keel_tao_bound(1.5, 0.5, 8.0, 4.0, std::ldexp(1.0, -k)) == Approx(std::pow(2.0, 3.0 * k / 8)).epsilon(1e-15));
  for (double h : {0.01, 0.5, 3.0}) CHECK(keel_tao_bound(1.5, 0.5, HUGE_VAL, 2.0, h) == 1.0);
  CHECK(keel_tao_bound(1.5, 0.5, 8.0, 4.0, 1.0) == 1.0);
  for (auto [q, p] : {std::pair{8.0, 4.0}, std::pair{4.0, 8.0}, std::pair{HUGE_VAL, 2.0}, std::pair{12.0, 3.5}}) {
    const double lhs = -(1.5 + 0.5) * (0.5 - 1.0 / p) + (std::isinf(q) ? 0.0 : 1.0 / q);
    const double rhs = -(2.0 * (0.5 - 1.0 / p) - (std::isinf(q) ? 0.0 : 1.0 / q));
    CHECK(std::abs(lhs - rhs) <= 1e-15);
  }
}

TEST_CASE("least-squares line") {
  const std::vector<double> x{0, 1, 2, 3}, y{1, 3, 5, 7};
  const auto f = fit_line(x, y);
  CHECK(f.slope == Approx(2.0));
  CHECK(f.intercept == Approx(1.0));
  CHECK(f.residual < 1e-14);
  CHECK(f.points == 4);
}

TEST_CASE("decay kernel at small time matches the Bernstein kernel supremum") {
  const std::vector<int> js{2, 3, 4};
  const std::vector<std::pair<double, double>> pairs{{1.0, HUGE_VAL}};
  const auto b = bernstein_scan(js, pairs, {});
  for (std::size_t i = 0; i < js.size(); ++i) {
    const double d = decay_kernel_sup(js[i], 1e-6, {}, Spin::Up);
    CHECK(d == Approx(b[i].measured).epsilon(0.01));
  }
}

TEST_CASE("decay scan rows") {
  const std::vector<int> js{3};
  const auto grid = log_time_grid(1.0, 64.0, 7);
  const auto scan = decay_scan(js, grid, {}, Spin::Down);
  REQUIRE(scan.rows.size() == 7);
  for (const auto& r : scan.rows) {
    CHECK(r.bound == Approx(64.0 / std::sqrt(1.0 + 8.0 * r.t)));
    CHECK(r.ratio == Approx(r.measured / r.bound));
    CHECK(r.measured > 0.0);
  }
  CHECK(scan.rows.front().t == Approx(1.0 / 8));
  CHECK(scan.fit.points > 0);
  const auto rep = to_report(scan);
  CHECK(rep.csv().rfind("j,t,B0,m,spin,measured,bound,ratio\n", 0) == 0);
  DecayOptions tight;
  tight.max_levels = 10;
  CHECK(code_of([&] { decay_kernel_sup(5, 1.0, {}, Spin::Up, tight); }) == Errc::TruncationTooSmall);
}

TEST_CASE("decay scan is independent of the thread schedule") {
  const std::vector<int> js{3, 4};
  const auto grid = log_time_grid(2.0, 32.0, 5);
  const auto a = to_report(decay_scan(js, grid, {1.0, 1.0}, Spin::Up)).csv();
  const auto b = to_report(decay_scan(js, grid, {1.0, 1.0}, Spin::Up)).csv();
  CHECK(a == b);
}

TEST_CASE("Bernstein scan") {
  const std::vector<int> js{2, 3, 4, 5, 6};
  const std::vector<std::pair<double, double>> pairs{{1.0, HUGE_VAL}, {2.0, HUGE_VAL}, {2.0, 2.0}};
  const auto rows = bernstein_scan(js, pairs, {});
  for (const auto& r : rows)
    if (r.q == 2.0 && r.p == 2.0) CHECK(r.measured <= 1.0);
  CHECK(ratio_spread(rows, 1.0, HUGE_VAL) < 10.0);
  CHECK(ratio_spread(rows, 2.0, HUGE_VAL) < 10.0);
  CHECK(to_report(rows).csv().rfind("j,q,p,measured,scale,ratio\n", 0) == 0);
  const std::vector<std::pair<double, double>> bad{{1.0, 2.0}};
  CHECK(code_of([&] { bernstein_scan(js, bad, {}); }) == Errc::UnsupportedPair);
}

TEST_CASE("square function") {
  const auto& b = test::small_basis();
  SpectralCoefficients c(b.params(), b.K(), b.L());
  c(0, 4) = 1.0;  // sqrt(lambda) = 3
  c(-2, 4) = 0.5;
  const auto piece = lp_project(1, c);
  const auto one = square_function_check(synthesize(piece, b), 4.0, b);
  CHECK(one.ratio >= 1 / std::sqrt(2.0));
  CHECK(one.ratio <= std::sqrt(2.0));
  const auto fam = random_family(b.params(), b.K(), b.L(), 5, 6, 11);
  for (const auto& f : fam) {
    const auto r = square_function_check(synthesize(f, b), 2.0, b);
    CHECK(r.ratio * r.ratio >= 0.5 - 1e-10);
    CHECK(r.ratio * r.ratio <= 1.0 + 1e-10);
  }
}

TEST_CASE("random families are reproducible and normalized") {
  const auto a = random_family({}, 6, 6, 4, 5, 42);
  const auto b = random_family({}, 6, 6, 4, 5, 42);
  REQUIRE(a.size() == 4);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK((a[i] - b[i]).l2_norm() == 0.0);
    CHECK(a[i].l2_norm() == Approx(1.0).epsilon(1e-14));
    int nz = 0;
    for (const auto& v : a[i].data()) nz += v != cplx(0.0);
    CHECK(nz == 5);
  }
  CHECK((random_family({}, 6, 6, 1, 5, 43)[0] - a[0]).l2_norm() > 0.0);
}

TEST_CASE("norm equivalence") {
  const auto& b = test::small_basis();
  SpectralCoefficients one(b.params(), b.K(), b.L());
  one(1, 2) = 1.0;  // lambda = 7
  const auto rows1 = norm_equivalence_scan(std::span(&one, 1), 0.5, b);
  double acc = std::pow(bump_phi0(std::sqrt(7.0)), 2);
  for (int j = 1; j <= 4; ++j) acc += std::pow(2.0, j) * std::pow(bump_phi(std::ldexp(std::sqrt(7.0), -j)), 2);
  CHECK(rows1[0].besov == Approx(std::sqrt(acc)).epsilon(1e-10));
  CHECK(rows1[0].sobolev_hom == Approx(std::pow(7.0, 0.25)).epsilon(1e-14));

  const auto fam = random_family(b.params(), b.K(), b.L(), 20, 6, 1);
  const auto rows = norm_equivalence_scan(fam, 0.0, b);
  for (const auto& r : rows) {
    CHECK(r.sobolev_hom == Approx(1.0).epsilon(1e-14));
    CHECK(r.ratio1 <= 1.0 + 1e-12);
    CHECK(r.ratio1 >= 1 / std::sqrt(2.0) - 1e-12);
  }
  CHECK(to_report(rows).csv().rfind("id,s,besov,sobolev_hom,sobolev_inhom,ratio1,ratio2\n", 0) == 0);
}

TEST_CASE("Strichartz norms") {
  const FieldParams p{};
  const auto f = point_source(3, p);
  for (Flow flow : {Flow::HalfwaveUp, Flow::HalfwaveDown, Flow::Dirac}) {
    const auto r = strichartz_norm(HUGE_VAL, 2.0, 3, 1.0, f, flow);
    CHECK(r.ratio == Approx(1.0).epsilon(1e-10));
    CHECK(r.time_nodes >= 65);
  }
  const auto short_t = strichartz_norm(8.0, 4.0, 3, 0.5, f, Flow::HalfwaveUp);
  const auto long_t = strichartz_norm(8.0, 4.0, 3, 1.0, f, Flow::HalfwaveUp);
  CHECK(long_t.measured >= short_t.measured);
  const auto d = strichartz_norm(8.0, 4.0, 3, 1.0, f, Flow::Dirac);
  CHECK(std::isfinite(d.sobolev_ratio));
  CHECK(d.s == 0.375);
  CHECK(code_of([&] { strichartz_norm(2.0, 4.0, 3, 1.0, f, Flow::Dirac); }) == Errc::NotAdmissible);
  const std::vector<StrichartzRow> rows{d};
  CHECK(to_report(rows).csv().rfind("q,p,s,j,T,flow,measured,reference,ratio\n", 0) == 0);
}
