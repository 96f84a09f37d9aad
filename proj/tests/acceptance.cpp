// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <fmt/format.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

#include "magdirac/dirac.hpp"
#include "magdirac/error.hpp"
#include "magdirac/estimates.hpp"
#include "magdirac/multipliers.hpp"
#include "magdirac/propagators.hpp"

using namespace magdirac;

namespace {

constexpr double kPi = std::numbers::pi;

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::shared_ptr<const PolarGrid> grid_for(double B0, int K, int L, int Nr, int Ntheta) {
  return std::make_shared<const PolarGrid>(
      build_polar_grid(default_radius(B0, K, L), Nr, effective_ntheta(Ntheta, K)));
}

const ModeBasis& basis8() {
  static const ModeBasis b = ModeBasis::build({}, 8, 8, grid_for(1.0, 8, 8, 512, 64));
  return b;
}

const ModeBasis& basis24() {
  static const ModeBasis b = ModeBasis::build({}, 24, 24, grid_for(1.0, 24, 24, 512, 64));
  return b;
}

std::string sci(double v) { return fmt::format("{:.3g}", v); }

double spread(const std::vector<double>& v) {
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return *hi / *lo;
}

Verdict eigen_residuals() {
  const auto& b = basis8();
  double worst = 0.0;
  for (int k = -8; k <= 8; ++k)
    for (int l = 0; l <= 8; ++l) {
      SpectralCoefficients c(b.params(), b.K(), b.L());
      c(k, l) = 1.0;
      worst = std::max(worst, eigen_residual(synthesize(c, b), eigenvalue({k, l}, b.params()), b.params()));
    }
  return {worst < 1e-6, "max relative residual " + sci(worst) + " (limit 1e-6)"};
}

Verdict orthonormality() {
  const auto& b = basis8();
  const auto& g = b.grid();
  double off = 0.0;
  for (int k = -8; k <= 8; ++k)
    for (int l1 = 0; l1 <= 8; ++l1)
      for (int l2 = l1 + 1; l2 <= 8; ++l2) {
        const auto p1 = b.profile({k, l1});
        const auto p2 = b.profile({k, l2});
        double ip = 0.0;
        for (int i = 0; i < g.Nr(); ++i) ip += 2 * kPi * g.weights()[i] * g.r()[i] * p1[i] * p2[i];
        off = std::max(off, std::abs(ip));
      }
  return {off < 1e-8, "max off-diagonal Gram entry " + sci(off) + " (limit 1e-8)"};
}

Verdict mehler() {
  const auto pairs = probe_pairs(2.0, 1.5, 24);
  double worst = 0.0;
  for (double t : {0.25, 0.5, 1.0}) worst = std::max(worst, heat_kernel_crosscheck(t, basis24(), pairs).max_rel_error);
  return {worst < 1e-5, "max pointwise relative error " + sci(worst) + " over 24 pairs (limit 1e-5)"};
}

Verdict schrodinger() {
  const auto pairs = probe_pairs(2.0, 2.0, 24);
  double worst = 0.0;
  for (double t : {0.3, 0.7, 1.2}) worst = std::max(worst, schrodinger_kernel_crosscheck(t, basis24(), pairs).rel_error);
  const auto fam = random_family({}, 24, 24, 3, 12, 5);
  double anti = 0.0;
  for (const auto& c : fam) anti = std::max(anti, (schrodinger_apply(kPi, c) + c).l2_norm());
  return {worst < 1e-3 && anti < 1e-12,
          "sup error " + sci(worst) + " (limit 1e-3), anti-periodicity " + sci(anti) + " (limit 1e-12)"};
}

Verdict subordination() {
  double real_worst = 0.0, cplx_worst = 0.0;
  for (auto [x, y] : {std::pair{1.0, 1.0}, std::pair{4.0, 2.0}, std::pair{9.0, 0.5}}) {
    SubordinationSample s;
    s.x_tilde = x;
    s.y = y;
    real_worst = std::max(real_worst, subordination_residual(s));
  }
  for (double x : {1.0, 4.0, 9.0}) {
    SubordinationSample s;
    s.x_tilde = x;
    s.y = cplx(0.1, -5.0);
    cplx_worst = std::max(cplx_worst, subordination_residual(s));
  }
  return {real_worst < 1e-8 && cplx_worst < 1e-6,
          "real y " + sci(real_worst) + " (limit 1e-8), y = 0.1-5i " + sci(cplx_worst) + " (limit 1e-6)"};
}

Verdict oscillatory_scaling() {
  double worst = 0.0;
  for (auto [a, t] : {std::pair{4.0, 4.0}, std::pair{1.0, 8.0}, std::pair{6.0, 2.0}}) {
    const cplx base = oscillatory_I_limit(a, t).value;
    for (int j : {-2, 0, 2}) {
      const cplx scaled = std::pow(2.0, 0.5 * j) * oscillatory_I_limit(std::ldexp(a, -j), std::ldexp(t, j)).value;
      worst = std::max(worst, std::abs(scaled - base) / std::abs(base));
    }
  }
  return {worst < 1e-4, "max relative mismatch " + sci(worst) + " (limit 1e-4)"};
}

Verdict squaring() {
  double sq = 0.0, eig = 0.0;
  for (double m : {0.0, 1.0, 2.5}) {
    const FieldParams p{1.0, m};
    const auto t = ladder_coefficients(ModeBasis::build(p, 8, 8, basis8().grid_ptr()));
    for (int k = -8; k <= 8; ++k)
      for (int l = 0; l <= 8; ++l) {
        if (!is_interior({k, l}, 8, 8)) continue;
        for (bool upper : {true, false}) {
          SpinorCoefficients s(p, 8, 8);
          (upper ? s.upper : s.lower)(k, l) = 1.0;
          sq = std::max(sq, squaring_residual(s, t));
        }
      }
    for (int k = -3; k <= 3; ++k) {
      const auto M = sector_matrix(k, 6, t, m);
      Eigen::MatrixXcd A(M.dim, M.dim);
      for (int i = 0; i < M.dim; ++i)
        for (int j = 0; j < M.dim; ++j) A(i, j) = M.a[i * M.dim + j];
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(A, Eigen::EigenvaluesOnly);
      std::vector<double> want;
      for (int l = 0; l <= 6; ++l) {
        if (k <= 0 && l == 0) {
          want.push_back(m);
          continue;
        }
        const double w = kg_frequency({k, l}, p, Spin::Up);
        want.push_back(w);
        want.push_back(-w);
      }
      std::sort(want.begin(), want.end());
      if (static_cast<int>(want.size()) != M.dim) return {false, "sector dimension mismatch"};
      for (int i = 0; i < M.dim; ++i) eig = std::max(eig, std::abs(es.eigenvalues()[i] - want[i]));
    }
  }
  return {sq < 1e-6 && eig < 1e-8,
          "squaring residual " + sci(sq) + " (limit 1e-6), sector eigenvalues " + sci(eig) + " (limit 1e-8)"};
}

Verdict zero_modes() {
  const auto t = ladder_coefficients(basis8());
  double image = 0.0, drift = 0.0;
  for (int k = -8; k <= 0; ++k) {
    SpinorCoefficients s({}, 8, 8);
    s.upper(k, 0) = 1.0;
    image = std::max(image, apply_dirac(s, t).norm());
    for (int i = 0; i <= 40; ++i) drift = std::max(drift, (evolve_dirac(0.25 * i, s, t) - s).norm());
  }
  return {image < 1e-8 && drift < 1e-8,
          "||D f|| " + sci(image) + ", evolution drift on [0,10] " + sci(drift) + " (limit 1e-8)"};
}

Verdict unitarity() {
  const FieldParams p{1.0, 0.6};
  const auto fam = random_family(p, 8, 8, 4, 10, 17);
  const auto table = ladder_coefficients_exact(p, 8, 8);
  double norm_drift = 0.0, group = 0.0;
  const double t1 = 0.7, t2 = 1.9;
  for (const auto& c : fam) {
    const double n = c.l2_norm();
    auto check = [&](const std::function<SpectralCoefficients(double, const SpectralCoefficients&)>& U, bool unitary) {
      if (unitary) norm_drift = std::max(norm_drift, std::abs(U(t1, c).l2_norm() - n) / n);
      group = std::max(group, (U(t1, U(t2, c)) - U(t1 + t2, c)).l2_norm() / n);
    };
    check([](double t, const SpectralCoefficients& x) { return heat_apply(t, x); }, false);
    check([](double t, const SpectralCoefficients& x) { return schrodinger_apply(t, x); }, true);
    check([](double t, const SpectralCoefficients& x) { return halfwave_apply(t, x, Spin::Up); }, true);
    check([](double t, const SpectralCoefficients& x) { return halfwave_apply(t, x, Spin::Down); }, true);
    SpinorCoefficients s(p, 8, 8);
    s.upper = c;
    s.lower = lp_project(1, c);
    // The Dirac operator only closes on modes whose ladder images stay inside the truncation.
    for (int k = -8; k <= 8; ++k)
      for (int l = 0; l <= 8; ++l)
        if (!is_interior({k, l}, 8, 8)) s.upper(k, l) = s.lower(k, l) = 0.0;
    const double ns = s.norm();
    norm_drift = std::max(norm_drift, std::abs(evolve_dirac(t1, s, table).norm() - ns) / ns);
    group = std::max(group, (evolve_dirac(t1, evolve_dirac(t2, s, table), table) -
                             evolve_dirac(t1 + t2, s, table)).norm() / ns);
  }
  return {norm_drift < 1e-10 && group < 1e-12,
          "norm drift " + sci(norm_drift) + " (limit 1e-10), group law " + sci(group) + " (limit 1e-12)"};
}

Verdict decay() {
  const std::vector<int> js{3, 4, 5};
  const auto grid = log_time_grid(1.0, 64.0, 13);
  bool ok = true;
  std::string detail;
  for (double m : {0.0, 1.0})
    for (Spin s : {Spin::Up, Spin::Down}) {
      const auto scan = decay_scan(js, grid, {1.0, m}, s);
      const bool good = std::abs(scan.fit.slope + 0.5) <= 0.1 && scan.ratio_spread < 10.0;
      ok = ok && good;
      detail += fmt::format("{}m={} {}: slope {:.3f}, spread {:.2f}", detail.empty() ? "" : "; ", m,
                            to_string(s), scan.fit.slope, scan.ratio_spread);
    }
  return {ok, detail + " (slope -0.5 +- 0.1, spread < 10)"};
}

Verdict bernstein() {
  const std::vector<int> js{2, 3, 4, 5, 6};
  const std::vector<std::pair<double, double>> pairs{{1.0, HUGE_VAL}, {2.0, HUGE_VAL}};
  const auto rows = bernstein_scan(js, pairs, {});
  const double s1 = ratio_spread(rows, 1.0, HUGE_VAL);
  const double s2 = ratio_spread(rows, 2.0, HUGE_VAL);
  return {s1 < 10 && s2 < 10, fmt::format("spreads (1,inf) {:.4f}, (2,inf) {:.4f} (limit 10)", s1, s2)};
}

Verdict norms_and_square() {
  const auto& b = basis24();
  const auto fam = random_family(b.params(), 24, 24, 20, 6, 2024);
  double worst = 0.0;
  for (double s : {0.0, 0.5, 1.0}) {
    std::vector<double> r1, r2;
    for (const auto& r : norm_equivalence_scan(fam, s, b)) {
      r1.push_back(r.ratio1);
      r2.push_back(r.ratio2);
    }
    worst = std::max({worst, spread(r1), spread(r2)});
  }
  double sq = 0.0;
  for (double p : {2.0, 4.0}) {
    std::vector<double> r;
    for (const auto& c : fam) r.push_back(square_function_check(synthesize(c, b), p, b).ratio);
    sq = std::max(sq, spread(r));
  }
  return {worst < 10 && sq < 10,
          fmt::format("norm-equivalence spread {:.3f}, square-function spread {:.3f} (limit 10)", worst, sq)};
}

Verdict strichartz() {
  const FieldParams p{};
  double worst_spread = 0.0, unit = 0.0;
  for (Flow flow : {Flow::HalfwaveUp, Flow::HalfwaveDown, Flow::Dirac}) {
    std::vector<double> ratios;
    for (int j : {3, 4, 5}) {
      const auto f = point_source(j, p);
      ratios.push_back(strichartz_norm(8.0, 4.0, j, 1.0, f, flow).ratio);
      unit = std::max(unit, std::abs(strichartz_norm(HUGE_VAL, 2.0, j, 1.0, f, flow).ratio - 1.0));
    }
    worst_spread = std::max(worst_spread, spread(ratios));
  }
  double kt = 0.0;
  for (auto [q, pp] : {std::pair{8.0, 4.0}, std::pair{HUGE_VAL, 2.0}, std::pair{4.0, 8.0}, std::pair{6.0, 6.0}})
    for (int k = 0; k <= 8; ++k) {
      const double h = std::ldexp(1.0, -k);
      const double iq = std::isinf(q) ? 0.0 : 1.0 / q;
      const double want = std::pow(h, -(2.0 * (0.5 - 1.0 / pp) - iq));
      kt = std::max(kt, std::abs(keel_tao_bound(1.5, 0.5, q, pp, h) - want) / want);
    }
  return {worst_spread < 3 && unit < 1e-10 && kt < 1e-15,
          fmt::format("(8,4) spread {:.4f} (limit 3), (inf,2) ratio error {} (limit 1e-10), Keel-Tao {} (limit 1e-15)",
                      worst_spread, sci(unit), sci(kt))};
}

Verdict multiplicity() {
  std::string detail;
  bool ok = true;
  for (double lam : {1.0, 3.0, 5.0, 7.0, 9.0}) {
    const int f = multiplicity_formula(lam, {}, 8);
    const int b = multiplicity_brute(lam, {}, 8, 8);
    ok = ok && f == b;
    detail += fmt::format("{}{}:{}/{}", detail.empty() ? "" : " ", lam, f, b);
  }
  return {ok, "lambda:formula/brute " + detail};
}

Verdict deficiency() {
  const auto v = deficiency_window_check();
  const bool ok = v.window1 == std::vector<int>{0} && v.window2 == std::vector<int>{-1} && v.intersection.empty();
  return {ok, fmt::format("windows {{{}}}, {{{}}}, intersection size {}", fmt::join(v.window1, " "),
                          fmt::join(v.window2, " "), v.intersection.size())};
}

}  // namespace

int main() {
  const std::pair<const char*, Verdict (*)()> criteria[] = {
      {"eigen-residuals", eigen_residuals},
      {"orthonormality", orthonormality},
      {"Mehler cross-check", mehler},
      {"Schroedinger dispersive constant", schrodinger},
      {"subordination identity", subordination},
      {"oscillatory integral scaling", oscillatory_scaling},
      {"squaring identity and sector spectra", squaring},
      {"massless zero modes", zero_modes},
      {"unitarity and group law", unitarity},
      {"dyadic decay estimate", decay},
      {"Bernstein inequality", bernstein},
      {"norm equivalence and square function", norms_and_square},
      {"Strichartz estimate", strichartz},
      {"multiplicity", multiplicity},
      {"deficiency windows", deficiency},
  };
  int failed = 0;
  int n = 0;
  for (const auto& [name, fn] : criteria) {
    ++n;
    Verdict v;
    try {
      v = fn();
    } catch (const std::exception& e) {
      v = {false, std::string("error: ") + e.what()};
    }
    failed += !v.pass;
    fmt::print("{} {:2d} {}: {}\n", v.pass ? "PASS" : "FAIL", n, name, v.detail);
    std::fflush(stdout);
  }
  fmt::print("{} of {} criteria passed\n", n - failed, n);
  return failed ? 1 : 0;
}
