#pragma once

// Hot loops in two versions: `serial` is the plain reference kept for tests,
// `parallel` is the OpenMP version the library uses. Both produce identical
// results (each output element is reduced in a fixed order by one thread).

#include <array>
#include <complex>
#include <span>

#include "magdirac/grid.hpp"
#include "magdirac/spectrum.hpp"

namespace magdirac::kernels {

using cplx = std::complex<double>;
using Point = std::array<double, 2>;

struct PointPair {
  Point x;
  Point y;
};

/// Shape of the per-angular-mode radial data: 2K+1 angular indices, L+1 radial
/// indices, Nr radial nodes. Profiles are (2K+1)(L+1) rows of Nr samples.
struct ModalLayout {
  int K = 0;
  int L = 0;
  int Nr = 0;
};

namespace serial {

/// radial[(k+K)*Nr + i] = sum_l coeffs[(k+K)(L+1)+l] * profile_{k,l}(r_i)
void modes_to_radial(ModalLayout lay, std::span<const double> profiles,
                     std::span<const cplx> coeffs, std::span<cplx> radial);

/// coeffs[(k+K)(L+1)+l] = 2 pi sum_i area_w[i] radial[(k+K)*Nr + i] profile_{k,l}(r_i)
void radial_to_modes(ModalLayout lay, std::span<const double> profiles,
                     std::span<const double> area_w, std::span<const cplx> radial,
                     std::span<cplx> coeffs);

/// out[i] = sum_n a[n] L_n(s[i]) e^{-s[i]/2}
void level_series(std::span<const cplx> a, std::span<const double> s, std::span<cplx> out);

/// Quadrature of the Mehler heat kernel e^{-tH}(x, y) against samples f on
/// the grid, at every target x.
void mehler_apply(double t, double B0, const PolarGrid& grid, std::span<const cplx> f,
                  std::span<const Point> targets, std::span<cplx> out);

/// out[p * nlevels + n] = sum over basis modes on Landau level n of
/// V~(x_p) conj(V~(y_p)).
void level_resolved_kernel(const ModeBasis& basis, std::span<const PointPair> pairs, int nlevels,
                           std::span<cplx> out);

}  // namespace serial

namespace parallel {

void modes_to_radial(ModalLayout lay, std::span<const double> profiles,
                     std::span<const cplx> coeffs, std::span<cplx> radial);
void radial_to_modes(ModalLayout lay, std::span<const double> profiles,
                     std::span<const double> area_w, std::span<const cplx> radial,
                     std::span<cplx> coeffs);
void level_series(std::span<const cplx> a, std::span<const double> s, std::span<cplx> out);
void mehler_apply(double t, double B0, const PolarGrid& grid, std::span<const cplx> f,
                  std::span<const Point> targets, std::span<cplx> out);
void level_resolved_kernel(const ModeBasis& basis, std::span<const PointPair> pairs, int nlevels,
                           std::span<cplx> out);

}  // namespace parallel

/// Normalized values V~_{k,l}(x) of every basis mode, flat basis layout.
void eval_all_modes(const ModeBasis& basis, Point x, std::span<cplx> out);

/// Landau level n of mode (k,l): lambda = (2n+1) B0.
inline int landau_level(ModeIndex idx) { return (2 * idx.ell + (idx.k < 0 ? -idx.k : idx.k) + idx.k) / 2; }

}  // namespace magdirac::kernels
