#pragma once

// Functions of H through their Landau-level amplitudes. Magnetic translations
// commute with H, so |F(H)(x, y)| depends only on |x - y| and equals
//   |F(H)(x - y, 0)| = (B0 / 2 pi) |sum_n F((2n+1) B0) L_n(rho) e^{-rho/2}|,
// rho = B0 |x - y|^2 / 2. Only the k = 0 radial modes enter, which keeps
// high dyadic blocks (thousands of levels) cheap.

#include <complex>
#include <span>
#include <vector>

#include "magdirac/grid.hpp"

namespace magdirac {

using cplx = std::complex<double>;

/// (B0/2pi) sum_n a_n L_n(B0 r^2/2) e^{-B0 r^2/4} at each r.
std::vector<cplx> level_kernel(std::span<const cplx> a, double B0, std::span<const double> r);

struct KernelSup {
  double value = 0.0;
  double r = 0.0;
};

/// sup over r in [0, r_max] of |level_kernel|: uniform scan with step dr,
/// then golden-section refinement around the largest local maxima.
KernelSup level_kernel_sup(std::span<const cplx> a, double B0, double r_max, double dr);

/// Normalized radial functions R~_{k,l}(r) = sqrt(B0/2pi) psi_l^{(|k|)}(B0 r^2/2),
/// l = 0..L, sampled on Gauss nodes of [0, r_max]; evaluates single-angular-index
/// expansions along a ray.
class RadialSector {
 public:
  RadialSector(int k, int L, double B0, const PolarGrid& radial_nodes);

  int k() const { return k_; }
  int L() const { return L_; }
  /// out[i] = sum_l c[l] R~_{k,l}(r_i)
  void evaluate(std::span<const cplx> c, std::span<cplx> out) const;

 private:
  int k_;
  int L_;
  int Nr_;
  std::vector<double> table_;  // Nr x (L+1)
};

}  // namespace magdirac
