#pragma once

#include <span>

namespace magdirac {

struct SeriesTolerance {
  double abs_tol = 1e-14;
  int max_terms = 10000;

  void validate() const;
};

/// Rising factorial (a)_n, with (a)_0 = 1.
double pochhammer(double a, unsigned n);

/// Confluent hypergeometric series M(a,b,s) = sum (a)_n/(b)_n s^n/n!.
/// Throws InvalidB for b in {0,-1,-2,...}, NoConvergence when the tail test
/// does not pass within tol.max_terms terms.
double kummer_M(double a, double b, double s, const SeriesTolerance& tol = {});

/// Terminating series P_{k,l}(r) = M(-l, 1+|k|, r), summed term by term with
/// compensated summation. When cancellation would cost more than three digits
/// the value comes from the three-term recurrence instead.
double laguerre_P(int k, int ell, double r);

/// P_{k,0..n}(s) by the three-term recurrence in l, written to out[0..n].
/// Agrees with laguerre_P and stays stable where the series cancels badly.
void laguerre_P_sequence(int k, double s, std::span<double> out);

/// Orthonormal Laguerre functions for angular order a = |k|:
///   psi_l(s) = sqrt(l!/(l+a)!) s^{a/2} e^{-s/2} L_l^{(a)}(s),  l = 0..out.size()-1,
/// so that int_0^inf psi_l psi_m ds = delta_lm.
void laguerre_functions(int a, double s, std::span<double> out);

}  // namespace magdirac
