#include "magdirac/kernels.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include "magdirac/specfun.hpp"

namespace magdirac::kernels {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

cplx radial_sum(ModalLayout lay, std::span<const double> profiles, std::span<const cplx> coeffs,
                int kk, int i) {
  const std::size_t row0 = static_cast<std::size_t>(kk) * (lay.L + 1);
  cplx acc = 0.0;
  for (int l = 0; l <= lay.L; ++l)
    acc += coeffs[row0 + l] * profiles[(row0 + l) * lay.Nr + i];
  return acc;
}

cplx projection(ModalLayout lay, std::span<const double> profiles, std::span<const double> area_w,
                std::span<const cplx> radial, int kk, int l) {
  const std::size_t row = static_cast<std::size_t>(kk) * (lay.L + 1) + l;
  const double* prof = &profiles[row * lay.Nr];
  const cplx* g = &radial[static_cast<std::size_t>(kk) * lay.Nr];
  cplx acc = 0.0;
  for (int i = 0; i < lay.Nr; ++i) acc += (area_w[i] * prof[i]) * g[i];
  return kTwoPi * acc;
}

// sum_n a_n L_n(s) e^{-s/2}, with a rescaled recurrence so e^{-s/2} cannot
// underflow for large s.
cplx series_at(std::span<const cplx> a, double s) {
  if (a.empty()) return 0.0;
  double log_scale = -0.5 * s;
  double scale = std::exp(log_scale);
  double prev = 0.0;
  double cur = 1.0;
  cplx acc = a[0] * (cur * scale);
  for (std::size_t n = 0; n + 1 < a.size(); ++n) {
    const double dn = static_cast<double>(n);
    const double next = ((2.0 * dn + 1.0 - s) * cur - dn * prev) / (dn + 1.0);
    prev = cur;
    cur = next;
    if (std::abs(cur) > 1e150) {
      prev *= 1e-150;
      cur *= 1e-150;
      log_scale += 150.0 * std::log(10.0);
      scale = std::exp(log_scale);
    }
    acc += a[n + 1] * (cur * scale);
  }
  return acc;
}

struct MehlerConst {
  double amp;
  double gauss;
  double half_b;
};

MehlerConst mehler_const(double t, double B0) {
  return {B0 / (4.0 * std::numbers::pi * std::sinh(B0 * t)), B0 / (4.0 * std::tanh(B0 * t)),
          0.5 * B0};
}

cplx mehler_at(const MehlerConst& mc, const PolarGrid& g, std::span<const cplx> f, Point x) {
  const int Nr = g.Nr();
  const int Nt = g.Ntheta();
  const auto r = g.r();
  const auto w = g.weights();
  const double dth = g.dtheta();
  std::vector<double> ct(Nt);
  std::vector<double> st(Nt);
  for (int j = 0; j < Nt; ++j) {
    ct[j] = std::cos(g.theta(j));
    st[j] = std::sin(g.theta(j));
  }
  cplx acc = 0.0;
  for (int i = 0; i < Nr; ++i) {
    cplx row = 0.0;
    for (int j = 0; j < Nt; ++j) {
      const double y1 = r[i] * ct[j];
      const double y2 = r[i] * st[j];
      const double d1 = x[0] - y1;
      const double d2 = x[1] - y2;
      const double mod = std::exp(-mc.gauss * (d1 * d1 + d2 * d2));
      const double phase = -mc.half_b * (x[0] * y2 - x[1] * y1);
      row += std::polar(mod, phase) * f[static_cast<std::size_t>(i) * Nt + j];
    }
    acc += (w[i] * r[i] * dth) * row;
  }
  return mc.amp * acc;
}

void pair_levels(const ModeBasis& basis, const PointPair& pp, int nlevels, std::span<cplx> out) {
  const std::size_t n = basis.mode_count();
  std::vector<cplx> vx(n);
  std::vector<cplx> vy(n);
  eval_all_modes(basis, pp.x, vx);
  eval_all_modes(basis, pp.y, vy);
  for (int lv = 0; lv < nlevels; ++lv) out[lv] = 0.0;
  for (std::size_t f = 0; f < n; ++f) {
    const int lv = landau_level(basis.index(f));
    if (lv < nlevels) out[lv] += vx[f] * std::conj(vy[f]);
  }
}

}  // namespace

void eval_all_modes(const ModeBasis& basis, Point x, std::span<cplx> out) {
  const int K = basis.K();
  const int L = basis.L();
  const double B0 = basis.params().B0;
  const double r = std::hypot(x[0], x[1]);
  const double theta = (r > 0.0) ? std::atan2(x[1], x[0]) : 0.0;
  const double s = 0.5 * B0 * r * r;
  std::vector<double> P(L + 1);
  for (int k = -K; k <= K; ++k) {
    double env = 0.0;
    if (r > 0.0) {
      env = std::exp(std::abs(k) * std::log(r) - 0.5 * s);
    } else if (k == 0) {
      env = 1.0;
    }
    laguerre_P_sequence(k, s, P);
    const cplx ang = std::polar(1.0, -k * theta);
    for (int l = 0; l <= L; ++l) {
      const std::size_t f = basis.flat({k, l});
      out[f] = (env * P[l] / basis.norm_constant({k, l})) * ang;
    }
  }
}

namespace serial {

void modes_to_radial(ModalLayout lay, std::span<const double> profiles,
                     std::span<const cplx> coeffs, std::span<cplx> radial) {
  for (int kk = 0; kk < 2 * lay.K + 1; ++kk)
    for (int i = 0; i < lay.Nr; ++i)
      radial[static_cast<std::size_t>(kk) * lay.Nr + i] = radial_sum(lay, profiles, coeffs, kk, i);
}

void radial_to_modes(ModalLayout lay, std::span<const double> profiles,
                     std::span<const double> area_w, std::span<const cplx> radial,
                     std::span<cplx> coeffs) {
  for (int kk = 0; kk < 2 * lay.K + 1; ++kk)
    for (int l = 0; l <= lay.L; ++l)
      coeffs[static_cast<std::size_t>(kk) * (lay.L + 1) + l] =
          projection(lay, profiles, area_w, radial, kk, l);
}

void level_series(std::span<const cplx> a, std::span<const double> s, std::span<cplx> out) {
  for (std::size_t i = 0; i < s.size(); ++i) out[i] = series_at(a, s[i]);
}

void mehler_apply(double t, double B0, const PolarGrid& grid, std::span<const cplx> f,
                  std::span<const Point> targets, std::span<cplx> out) {
  const auto mc = mehler_const(t, B0);
  for (std::size_t p = 0; p < targets.size(); ++p) out[p] = mehler_at(mc, grid, f, targets[p]);
}

void level_resolved_kernel(const ModeBasis& basis, std::span<const PointPair> pairs, int nlevels,
                           std::span<cplx> out) {
  for (std::size_t p = 0; p < pairs.size(); ++p)
    pair_levels(basis, pairs[p], nlevels, out.subspan(p * nlevels, nlevels));
}

}  // namespace serial

namespace parallel {

void modes_to_radial(ModalLayout lay, std::span<const double> profiles,
                     std::span<const cplx> coeffs, std::span<cplx> radial) {
  const int nk = 2 * lay.K + 1;
#pragma omp parallel for collapse(2) schedule(static)
  for (int kk = 0; kk < nk; ++kk)
    for (int i = 0; i < lay.Nr; ++i)
      radial[static_cast<std::size_t>(kk) * lay.Nr + i] = radial_sum(lay, profiles, coeffs, kk, i);
}

void radial_to_modes(ModalLayout lay, std::span<const double> profiles,
                     std::span<const double> area_w, std::span<const cplx> radial,
                     std::span<cplx> coeffs) {
  const int nk = 2 * lay.K + 1;
#pragma omp parallel for collapse(2) schedule(static)
  for (int kk = 0; kk < nk; ++kk)
    for (int l = 0; l <= lay.L; ++l)
      coeffs[static_cast<std::size_t>(kk) * (lay.L + 1) + l] =
          projection(lay, profiles, area_w, radial, kk, l);
}

void level_series(std::span<const cplx> a, std::span<const double> s, std::span<cplx> out) {
  const auto n = static_cast<std::ptrdiff_t>(s.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = series_at(a, s[i]);
}

void mehler_apply(double t, double B0, const PolarGrid& grid, std::span<const cplx> f,
                  std::span<const Point> targets, std::span<cplx> out) {
  const auto mc = mehler_const(t, B0);
  const auto n = static_cast<std::ptrdiff_t>(targets.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t p = 0; p < n; ++p) out[p] = mehler_at(mc, grid, f, targets[p]);
}

void level_resolved_kernel(const ModeBasis& basis, std::span<const PointPair> pairs, int nlevels,
                           std::span<cplx> out) {
  const auto n = static_cast<std::ptrdiff_t>(pairs.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t p = 0; p < n; ++p)
    pair_levels(basis, pairs[p], nlevels, out.subspan(p * nlevels, nlevels));
}

}  // namespace parallel

}  // namespace magdirac::kernels
