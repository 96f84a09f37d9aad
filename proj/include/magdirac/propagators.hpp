#pragma once

#include <complex>
#include <span>
#include <vector>

#include "magdirac/fields.hpp"
#include "magdirac/kernels.hpp"

namespace magdirac {

using kernels::Point;
using kernels::PointPair;

/// Sign of the exponent: Negative gives e^{-itX}, the solution operator of
/// i d_t u = X u; Positive gives the conjugate e^{+itX}.
enum class PhaseSign { Negative = -1, Positive = +1 };

enum class SpinShift { None, Up, Down };

enum class HeatRoute { Spectral, Kernel };

/// e^{-t(H + m^2 -/+ B0)}(x, y) for Up/Down; no shift for None.
cplx heat_mehler_kernel(double t, Point x, Point y, const FieldParams& params,
                        SpinShift shift = SpinShift::None);

/// Coefficients times e^{-t lambda}.
SpectralCoefficients heat_apply(double t, const SpectralCoefficients& c);

/// Heat flow of a grid field. Spectral: analyze, damp, synthesize. Kernel:
/// Mehler kernel quadrature at every node (cost Nr^2 Ntheta^2). GridMismatch
/// if f and basis live on different grids.
GridField heat_apply(double t, const GridField& f, const ModeBasis& basis, HeatRoute route);

/// Mehler quadrature of f at arbitrary targets.
std::vector<cplx> heat_apply_kernel_at(double t, const GridField& f, const FieldParams& params,
                                       std::span<const Point> targets);

/// Coefficients times e^{sign * i t lambda}.
SpectralCoefficients schrodinger_apply(double t, const SpectralCoefficients& c,
                                       PhaseSign sign = PhaseSign::Negative);

/// B0 / (4 pi |sin(B0 t)|); ResonantTime when t is within 1e-9 of a multiple of pi/B0.
double schrodinger_kernel_sup(double t, const FieldParams& params);

/// Coefficients times e^{sign * i t kg_frequency(spin)}.
SpectralCoefficients halfwave_apply(double t, const SpectralCoefficients& c, Spin spin,
                                    PhaseSign sign = PhaseSign::Positive);

/// Spectral-sum heat kernel sum_modes e^{-t lambda} V~(x) conj V~(y) at the
/// given pairs against the Mehler formula.
struct KernelCheck {
  double max_rel_error = 0.0;
  double max_abs_error = 0.0;
  std::size_t pairs = 0;
};
KernelCheck heat_kernel_crosscheck(double t, const ModeBasis& basis,
                                   std::span<const PointPair> pairs);

/// Deterministic probe pairs: x within radius `spread` of the origin and
/// |x - y| <= max_sep.
std::vector<PointPair> probe_pairs(double spread, double max_sep, int count);

/// Schrodinger kernel from the basis. The plain sum over Landau levels does
/// not converge pointwise, so the level series sum_n q^n a_n (q = e^{-2itB0},
/// a_n the level-n projector kernel) is Euler-summed; the truncated plain sum
/// is reported for comparison.
struct SchrodingerCheck {
  double formula = 0.0;
  double measured_sup = 0.0;  // Euler-summed, max over the pairs
  double measured_min = 0.0;
  double naive_sup = 0.0;     // plain truncated sum
  double rel_error = 0.0;     // |measured_sup - formula| / formula
  int levels = 0;
};
SchrodingerCheck schrodinger_kernel_crosscheck(double t, const ModeBasis& basis,
                                               std::span<const PointPair> pairs);

/// Highest Landau level whose modes inside the |k| <= K window are all in the
/// basis: min(L, K). Modes with k < -K are missing at every level; their
/// profiles peak near r = sqrt(2|k|/B0), far from the probe points.
int complete_levels(const ModeBasis& basis);

struct SubordinationSample {
  double x_tilde = 1.0;
  cplx y = 1.0;
  double u_min = -30.0;  // trapezoid range in u = log sigma
  double u_max = 10.0;
  int min_doublings = 8;
  int max_doublings = 22;
  double tol = 1e-14;

  void validate() const;
};

struct QuadratureResult {
  cplx value = 0.0;
  long nodes = 0;
  double last_change = 0.0;
};

/// (y/2 sqrt pi) int_0^inf e^{-s x~ - y^2/(4s)} s^{-3/2} ds on the rotated
/// path s = y sigma, by the trapezoid rule in u = log sigma with doubling.
/// QuadratureFailure if refinement stalls above 1e-6.
QuadratureResult subordination_rhs(const SubordinationSample& sample);

/// |e^{-y sqrt x~} - rhs| / |e^{-y sqrt x~}|.
double subordination_residual(const SubordinationSample& sample);

/// I_eps(a,t) = int_0^inf e^{-(eps - it)(x~ r + 1/(4r))} r^{-3/2} dr, x~ = a/t,
/// by composite Gauss-Legendre panels one oscillation long, split at the
/// stationary point and continued until the eps-damping is below 1e-17.
/// NoConvergence if two panel orders disagree beyond 1e-10 relative.
cplx oscillatory_I(double a, double t, double eps);

struct OscillatoryLimit {
  cplx value = 0.0;
  double change = 0.0;  // last Richardson correction, relative
  int levels = 0;
};

/// eps -> 0 limit of oscillatory_I by Richardson extrapolation over
/// eps0, eps0/2, ... ; NoConvergence if the last correction exceeds 1e-4.
OscillatoryLimit oscillatory_I_limit(double a, double t, double eps0 = 0.1, int levels = 6);

/// Closed form 2 sqrt(pi) y^{-1/2} e^{-y sqrt(a/t)}, y = eps - it; test oracle.
cplx oscillatory_I_closed_form(double a, double t, double eps);

}  // namespace magdirac
