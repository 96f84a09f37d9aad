#pragma once

#include <cmath>
#include <complex>
#include <concepts>
#include <string>

#include "magdirac/error.hpp"
#include "magdirac/fields.hpp"

namespace magdirac {

/// Smooth step: 1 on [0,1], 0 on [2,inf), built from e^{-1/x}.
double smooth_step(double x);

/// phi(x) = psi(x) - psi(2x), supported in [1/2, 2].
double bump_phi(double x);

/// phi_0(x) = sum_{j <= 0} phi(2^{-j} x), summing only the nonzero terms.
double bump_phi0(double x);

enum class MultiplierArgument { SqrtH, KgUp, KgDown, PlainLambda };

/// The number the multiplier is evaluated at for mode idx.
double multiplier_argument(ModeIndex idx, const FieldParams& params, MultiplierArgument arg);

/// Multiplies each coefficient by F(argument(mode)). F may return a real or a
/// complex value; non-finite values raise NonFiniteMultiplier.
template <class F>
SpectralCoefficients apply_multiplier(F&& fn, const SpectralCoefficients& c,
                                      MultiplierArgument arg) {
  SpectralCoefficients out = c;
  auto d = out.data();
  for (std::size_t f = 0; f < d.size(); ++f) {
    const ModeIndex idx = c.index(f);
    const std::complex<double> v = fn(multiplier_argument(idx, c.params(), arg));
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw Error(Errc::NonFiniteMultiplier,
                  "multiplier is not finite at mode (" + std::to_string(idx.k) + "," +
                      std::to_string(idx.ell) + ")");
    d[f] *= v;
  }
  return out;
}

/// phi(2^{-j} sqrt H) c.
SpectralCoefficients lp_project(int j, const SpectralCoefficients& c);

/// phi_0(sqrt H) c.
SpectralCoefficients lp_project_low(const SpectralCoefficients& c);

/// Highest j for which phi(2^{-j} sqrt lambda) can be nonzero on the truncation.
int lp_max_level(const SpectralCoefficients& c);

}  // namespace magdirac
