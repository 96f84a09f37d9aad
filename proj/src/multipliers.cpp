#include "magdirac/multipliers.hpp"

#include <algorithm>
#include <cmath>

namespace magdirac {

namespace {

double mollifier(double u) { return u > 0.0 ? std::exp(-1.0 / u) : 0.0; }

}  // namespace

double smooth_step(double x) {
  if (x <= 1.0) return 1.0;
  if (x >= 2.0) return 0.0;
  const double a = mollifier(2.0 - x);
  const double b = mollifier(x - 1.0);
  return a / (a + b);
}

double bump_phi(double x) { return smooth_step(x) - smooth_step(2.0 * x); }

double bump_phi0(double x) {
  if (x <= 0.0) return 1.0;  // limit x -> 0+
  if (x >= 2.0) return 0.0;
  // phi(2^n x), n >= 0, vanishes unless 2^n x lies in (1/2, 2).
  const int n_lo = std::max(0, static_cast<int>(std::floor(std::log2(0.5 / x))));
  const int n_hi = static_cast<int>(std::ceil(std::log2(2.0 / x)));
  double acc = 0.0;
  for (int n = n_lo; n <= n_hi; ++n) acc += bump_phi(std::ldexp(x, n));
  return acc;
}

double multiplier_argument(ModeIndex idx, const FieldParams& params, MultiplierArgument arg) {
  switch (arg) {
    case MultiplierArgument::SqrtH: return std::sqrt(eigenvalue(idx, params));
    case MultiplierArgument::KgUp: return kg_frequency(idx, params, Spin::Up);
    case MultiplierArgument::KgDown: return kg_frequency(idx, params, Spin::Down);
    case MultiplierArgument::PlainLambda: return eigenvalue(idx, params);
  }
  return 0.0;
}

SpectralCoefficients lp_project(int j, const SpectralCoefficients& c) {
  return apply_multiplier([j](double x) { return bump_phi(std::ldexp(x, -j)); }, c,
                          MultiplierArgument::SqrtH);
}

SpectralCoefficients lp_project_low(const SpectralCoefficients& c) {
  return apply_multiplier([](double x) { return bump_phi0(x); }, c, MultiplierArgument::SqrtH);
}

int lp_max_level(const SpectralCoefficients& c) {
  const double lam_max = (2.0 * c.L() + 1.0 + 2.0 * c.K()) * c.params().B0;
  return std::max(0, static_cast<int>(std::ceil(std::log2(2.0 * std::sqrt(lam_max)))));
}

}  // namespace magdirac
