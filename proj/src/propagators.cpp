#include "magdirac/propagators.hpp"

#include <gsl/gsl_integration.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "magdirac/error.hpp"
#include "magdirac/multipliers.hpp"

namespace magdirac {

namespace {

constexpr double kPi = std::numbers::pi;
const cplx I{0.0, 1.0};

double shift_of(const FieldParams& p, SpinShift shift) {
  switch (shift) {
    case SpinShift::None: return 0.0;
    case SpinShift::Up: return p.m * p.m - p.B0;
    case SpinShift::Down: return p.m * p.m + p.B0;
  }
  return 0.0;
}

// Gauss-Legendre rule on [-1, 1], nodes ascending.
struct GlRule {
  std::vector<double> x;
  std::vector<double> w;
};

const GlRule& gl_rule(int n) {
  auto make = [](int n) {
    GlRule r;
    auto* t = gsl_integration_glfixed_table_alloc(static_cast<size_t>(n));
    r.x.resize(n);
    r.w.resize(n);
    for (int i = 0; i < n; ++i)
      gsl_integration_glfixed_point(-1.0, 1.0, static_cast<size_t>(i), &r.x[i], &r.w[i], t);
    gsl_integration_glfixed_table_free(t);
    return r;
  };
  static const GlRule r16 = make(16);
  static const GlRule r24 = make(24);
  return n == 16 ? r16 : r24;
}

// int_{lo}^{hi} g by panels of width h with an n-point rule.
template <class G>
cplx panel_quadrature(G&& g, double lo, double hi, double h, int n) {
  const GlRule& rule = gl_rule(n);
  const long panels = std::max(1L, static_cast<long>(std::ceil((hi - lo) / h)));
  const double width = (hi - lo) / panels;
  cplx acc = 0.0;
  for (long p = 0; p < panels; ++p) {
    const double a = lo + p * width;
    const double mid = a + 0.5 * width;
    cplx part = 0.0;
    for (int i = 0; i < n; ++i) part += rule.w[i] * g(mid + 0.5 * width * rule.x[i]);
    acc += 0.5 * width * part;
  }
  return acc;
}

}  // namespace

cplx heat_mehler_kernel(double t, Point x, Point y, const FieldParams& params, SpinShift shift) {
  const double B = params.B0;
  const double d1 = x[0] - y[0];
  const double d2 = x[1] - y[1];
  const double amp = B / (4.0 * kPi * std::sinh(B * t)) * std::exp(-t * shift_of(params, shift));
  const double mod = std::exp(-B * (d1 * d1 + d2 * d2) / (4.0 * std::tanh(B * t)));
  const double phase = -0.5 * B * (x[0] * y[1] - x[1] * y[0]);
  return std::polar(amp * mod, phase);
}

SpectralCoefficients heat_apply(double t, const SpectralCoefficients& c) {
  return apply_multiplier([t](double lam) { return std::exp(-t * lam); }, c,
                          MultiplierArgument::PlainLambda);
}

GridField heat_apply(double t, const GridField& f, const ModeBasis& basis, HeatRoute route) {
  if (!f.grid().same_layout(basis.grid()))
    throw Error(Errc::GridMismatch, "field grid differs from basis grid");
  if (route == HeatRoute::Spectral) return synthesize(heat_apply(t, analyze(f, basis)), basis);
  const PolarGrid& g = f.grid();
  std::vector<Point> targets;
  targets.reserve(g.size());
  for (int i = 0; i < g.Nr(); ++i)
    for (int j = 0; j < g.Ntheta(); ++j)
      targets.push_back({g.r()[i] * std::cos(g.theta(j)), g.r()[i] * std::sin(g.theta(j))});
  const auto vals = heat_apply_kernel_at(t, f, basis.params(), targets);
  GridField out(f.grid_ptr());
  std::copy(vals.begin(), vals.end(), out.data().begin());
  return out;
}

std::vector<cplx> heat_apply_kernel_at(double t, const GridField& f, const FieldParams& params,
                                       std::span<const Point> targets) {
  if (!(t > 0.0)) throw Error(Errc::InvalidArgument, "heat flow needs t > 0");
  // The kernel restricted to a circle of radius r behaves like e^{a cos + i b sin}
  // with a = B0 r |x| / (2 tanh(B0 t)) and b = B0 r |x| / 2; its Fourier tail
  // falls below 1e-16 past about 9 sqrt(a) + b modes, so the angular rule is
  // refined until the product with f is resolved.
  double xmax = 0.0;
  for (const auto& x : targets) xmax = std::max(xmax, std::hypot(x[0], x[1]));
  const double rx = params.B0 * f.grid().R() * xmax;
  const double a = rx / (2.0 * std::tanh(params.B0 * t));
  const double need = f.grid().Ntheta() / 2 + 9.0 * std::sqrt(a) + 0.5 * rx + 16.0;
  int Nt = f.grid().Ntheta();
  while (Nt < 2.0 * need && Nt < (1 << 14)) Nt *= 2;
  const GridField fine = resample_angular(f, Nt);
  std::vector<cplx> out(targets.size());
  kernels::parallel::mehler_apply(t, params.B0, fine.grid(), fine.data(), targets, out);
  return out;
}

SpectralCoefficients schrodinger_apply(double t, const SpectralCoefficients& c, PhaseSign sign) {
  const double sg = static_cast<double>(sign);
  return apply_multiplier([=](double lam) { return std::polar(1.0, sg * t * lam); }, c,
                          MultiplierArgument::PlainLambda);
}

double schrodinger_kernel_sup(double t, const FieldParams& params) {
  const double x = params.B0 * t / kPi;
  if (std::abs(x - std::round(x)) < 1e-9)
    throw Error(Errc::ResonantTime, "t is a multiple of pi/B0; the kernel is not a function");
  return params.B0 / (4.0 * kPi * std::abs(std::sin(params.B0 * t)));
}

SpectralCoefficients halfwave_apply(double t, const SpectralCoefficients& c, Spin spin,
                                    PhaseSign sign) {
  const double sg = static_cast<double>(sign);
  const auto arg = (spin == Spin::Up) ? MultiplierArgument::KgUp : MultiplierArgument::KgDown;
  return apply_multiplier([=](double w) { return std::polar(1.0, sg * t * w); }, c, arg);
}

int complete_levels(const ModeBasis& basis) { return std::min(basis.L(), basis.K()); }

std::vector<PointPair> probe_pairs(double spread, double max_sep, int count) {
  std::vector<PointPair> out;
  out.reserve(count);
  const double golden = kPi * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < count; ++i) {
    const double a = spread * std::sqrt((i + 0.5) / count);
    const double th = golden * i;
    const double d = max_sep * ((i * 7) % count + 0.5) / count;
    const double ph = 2.0 * golden * i + 1.0;
    const Point x{a * std::cos(th), a * std::sin(th)};
    out.push_back({x, {x[0] + d * std::cos(ph), x[1] + d * std::sin(ph)}});
  }
  return out;
}

KernelCheck heat_kernel_crosscheck(double t, const ModeBasis& basis,
                                   std::span<const PointPair> pairs) {
  const int nlev = basis.K() + basis.L() + 1;
  std::vector<cplx> lev(pairs.size() * nlev);
  kernels::parallel::level_resolved_kernel(basis, pairs, nlev, lev);
  KernelCheck out;
  out.pairs = pairs.size();
  const double B = basis.params().B0;
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    cplx acc = 0.0;
    for (int n = nlev - 1; n >= 0; --n) acc += std::exp(-t * (2.0 * n + 1.0) * B) * lev[p * nlev + n];
    const cplx ref = heat_mehler_kernel(t, pairs[p].x, pairs[p].y, basis.params());
    const double err = std::abs(acc - ref);
    out.max_abs_error = std::max(out.max_abs_error, err);
    out.max_rel_error = std::max(out.max_rel_error, err / std::abs(ref));
  }
  return out;
}

SchrodingerCheck schrodinger_kernel_crosscheck(double t, const ModeBasis& basis,
                                               std::span<const PointPair> pairs) {
  SchrodingerCheck out;
  out.formula = schrodinger_kernel_sup(t, basis.params());
  const int nlev = complete_levels(basis) + 1;
  out.levels = nlev;
  std::vector<cplx> lev(pairs.size() * nlev);
  kernels::parallel::level_resolved_kernel(basis, pairs, nlev, lev);
  const double B = basis.params().B0;
  const cplx q = std::polar(1.0, -2.0 * t * B);
  const cplx pre = std::polar(1.0, -t * B);
  out.measured_min = std::numeric_limits<double>::infinity();
  std::vector<cplx> d(nlev);
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    std::copy_n(&lev[p * nlev], nlev, d.begin());
    cplx naive = 0.0;
    cplx qn = 1.0;
    for (int n = 0; n < nlev; ++n, qn *= q) naive += qn * d[n];
    // Euler transform: sum_n q^n a_n = sum_k q^k (Delta^k a)_0 / (1-q)^{k+1},
    // truncated at the smallest term since roundoff in Delta^k grows with k.
    cplx sum = 0.0;
    cplx factor = 1.0 / (1.0 - q);
    const cplx ratio = q / (1.0 - q);
    double best = std::numeric_limits<double>::infinity();
    cplx best_sum = 0.0;
    for (int k = 0; k < nlev; ++k) {
      const cplx term = factor * d[0];
      sum += term;
      if (std::abs(term) < best) {
        best = std::abs(term);
        best_sum = sum;
      }
      factor *= ratio;
      for (int i = 0; i + 1 < nlev - k; ++i) d[i] = d[i + 1] - d[i];
    }
    const double val = std::abs(pre * best_sum);
    out.measured_sup = std::max(out.measured_sup, val);
    out.measured_min = std::min(out.measured_min, val);
    out.naive_sup = std::max(out.naive_sup, std::abs(pre * naive));
  }
  out.rel_error = std::abs(out.measured_sup - out.formula) / out.formula;
  return out;
}

void SubordinationSample::validate() const {
  if (!(x_tilde > 0.0)) throw Error(Errc::InvalidArgument, "x_tilde must be > 0");
  if (!(y.real() > 0.0)) throw Error(Errc::InvalidArgument, "Re y must be > 0");
  if (!(u_max > u_min)) throw Error(Errc::InvalidArgument, "empty u range");
  if (min_doublings < 1 || max_doublings < min_doublings)
    throw Error(Errc::InvalidArgument, "bad doubling limits");
}

QuadratureResult subordination_rhs(const SubordinationSample& s) {
  s.validate();
  const double xt = s.x_tilde;
  const cplx y = s.y;
  auto g = [&](double u) {
    const double sig = std::exp(u);
    return std::exp(-y * (sig * xt + 0.25 / sig) - 0.5 * u);
  };
  const double span = s.u_max - s.u_min;
  long n = 1;
  double h = span;
  cplx sum = 0.5 * (g(s.u_min) + g(s.u_max));
  cplx T = h * sum;
  const cplx pre = std::sqrt(y) / (2.0 * std::sqrt(kPi));
  QuadratureResult res;
  for (int d = 1; d <= s.max_doublings; ++d) {
    cplx mid = 0.0;
    for (long i = 0; i < n; ++i) mid += g(s.u_min + (i + 0.5) * h);
    sum += mid;
    n *= 2;
    h *= 0.5;
    const cplx T2 = h * sum;
    res.last_change = std::abs(pre * (T2 - T));
    T = T2;
    res.value = pre * T;
    res.nodes = n + 1;
    if (d >= s.min_doublings && res.last_change <= s.tol * std::abs(res.value)) return res;
  }
  if (res.last_change > 1e-6 * std::abs(res.value))
    throw Error(Errc::QuadratureFailure, "trapezoid refinement stalled at relative change " +
                                             std::to_string(res.last_change / std::abs(res.value)));
  return res;
}

double subordination_residual(const SubordinationSample& s) {
  const cplx lhs = std::exp(-s.y * std::sqrt(s.x_tilde));
  return std::abs(lhs - subordination_rhs(s).value) / std::abs(lhs);
}

cplx oscillatory_I_closed_form(double a, double t, double eps) {
  const cplx y{eps, -t};
  return 2.0 * std::sqrt(kPi) / std::sqrt(y) * std::exp(-y * std::sqrt(a / t));
}

cplx oscillatory_I(double a, double t, double eps) {
  if (!(a > 0.0) || !(t > 0.0) || !(eps > 0.0))
    throw Error(Errc::InvalidArgument, "oscillatory_I needs a, t, eps > 0");
  const double xt = a / t;
  const cplx y{eps, -t};
  const double sig0 = 0.5 / std::sqrt(xt);  // stationary point of x~ s + 1/(4s)
  // sigma >= sig0 directly; sigma < sig0 through tau = 1/sigma.
  auto upper = [&](double s) { return std::exp(-y * (xt * s + 0.25 / s)) / (s * std::sqrt(s)); };
  auto lower = [&](double tau) { return std::exp(-y * (xt / tau + 0.25 * tau)) / std::sqrt(tau); };
  const double damp = 40.0;
  const double s_end = std::max(4.0 * sig0, damp / (eps * xt));
  const double tau0 = 1.0 / sig0;
  const double tau_end = std::max(4.0 * tau0, 4.0 * damp / eps);
  const double h_up = std::min(sig0, kPi / (t * xt));
  const double h_lo = std::min(tau0, 4.0 * kPi / t);
  auto total = [&](int n) {
    return panel_quadrature(upper, sig0, s_end, h_up, n) +
           panel_quadrature(lower, tau0, tau_end, h_lo, n);
  };
  const cplx v16 = total(16);
  const cplx v24 = total(24);
  if (std::abs(v24 - v16) > 1e-10 * std::abs(v24))
    throw Error(Errc::NoConvergence, "oscillatory_I: panel orders disagree");
  return v24;
}

OscillatoryLimit oscillatory_I_limit(double a, double t, double eps0, int levels) {
  if (levels < 2) throw Error(Errc::InvalidArgument, "need at least two eps levels");
  std::vector<std::vector<cplx>> T(levels);
  for (int k = 0; k < levels; ++k) {
    T[k].push_back(oscillatory_I(a, t, std::ldexp(eps0, -k)));
    for (int m = 1; m <= k; ++m)
      T[k].push_back(T[k][m - 1] + (T[k][m - 1] - T[k - 1][m - 1]) / (std::ldexp(1.0, m) - 1.0));
  }
  OscillatoryLimit out;
  out.value = T[levels - 1][levels - 1];
  out.change = std::abs(out.value - T[levels - 2][levels - 2]) / std::abs(out.value);
  out.levels = levels;
  if (out.change > 1e-4)
    throw Error(Errc::NoConvergence, "Richardson extrapolation in eps did not settle");
  return out;
}

}  // namespace magdirac
