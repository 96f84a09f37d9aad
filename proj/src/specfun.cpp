#include "magdirac/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>

#include "magdirac/error.hpp"

namespace magdirac {

namespace {

// Neumaier's variant of Kahan summation.
struct CompensatedSum {
  double sum = 0.0;
  double comp = 0.0;

  void add(double x) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x)) {
      comp += (sum - t) + x;
    } else {
      comp += (x - t) + sum;
    }
    sum = t;
  }
  double value() const { return sum + comp; }
};

bool is_nonpositive_integer(double b) { return b <= 0.0 && b == std::floor(b); }

}  // namespace

void SeriesTolerance::validate() const {
  if (!(abs_tol > 0.0)) throw Error(Errc::InvalidArgument, "abs_tol must be positive");
  if (max_terms < 1) throw Error(Errc::InvalidArgument, "max_terms must be >= 1");
}

double pochhammer(double a, unsigned n) {
  double p = 1.0;
  for (unsigned i = 0; i < n; ++i) p *= a + static_cast<double>(i);
  return p;
}

double kummer_M(double a, double b, double s, const SeriesTolerance& tol) {
  tol.validate();
  if (is_nonpositive_integer(b)) {
    throw Error(Errc::InvalidB, "b = " + std::to_string(b) + " is a non-positive integer");
  }
  CompensatedSum acc;
  double term = 1.0;
  acc.add(term);
  for (int n = 0; n < tol.max_terms; ++n) {
    const double next = term * (a + n) / (b + n) * s / (n + 1.0);
    if (next == 0.0) return acc.value();  // terminating series
    acc.add(next);
    const double ratio = std::abs(next / term);
    term = next;
    if (std::abs(term) < tol.abs_tol && ratio < 0.5) return acc.value();
  }
  throw Error(Errc::NoConvergence, "kummer_M: tail test failed after " +
                                       std::to_string(tol.max_terms) + " terms");
}

double laguerre_P(int k, int ell, double r) {
  const double b = 1.0 + std::abs(k);
  CompensatedSum acc;
  double term = 1.0;
  double biggest = 1.0;
  acc.add(term);
  for (int n = 0; n < ell; ++n) {
    term *= (n - ell) / (b + n) * r / (n + 1.0);
    biggest = std::max(biggest, std::abs(term));
    acc.add(term);
  }
  // Rounding in the terms themselves is not compensated; once the sum is far
  // below the largest term, the three-term recurrence is the accurate route.
  if (biggest <= 1e3 * std::abs(acc.value())) return acc.value();
  const double a = b - 1.0;
  double prev = 1.0;
  double cur = 1.0 - r / b;
  for (int l = 1; l < ell; ++l) {
    const double next = ((2.0 * l + 1.0 + a - r) * cur - l * prev) / (a + l + 1.0);
    prev = cur;
    cur = next;
  }
  return cur;
}

void laguerre_P_sequence(int k, double s, std::span<double> out) {
  if (out.empty()) return;
  const double a = std::abs(k);
  out[0] = 1.0;
  if (out.size() == 1) return;
  out[1] = 1.0 - s / (a + 1.0);
  for (std::size_t l = 1; l + 1 < out.size(); ++l) {
    const double dl = static_cast<double>(l);
    out[l + 1] = ((2.0 * dl + 1.0 + a - s) * out[l] - dl * out[l - 1]) / (a + dl + 1.0);
  }
}

void laguerre_functions(int a, double s, std::span<double> out) {
  if (out.empty()) return;
  const double da = a;
  if (s <= 0.0) {
    // Only a = 0 survives at the origin: L_l(0) = 1.
    for (double& v : out) v = (a == 0) ? 1.0 : 0.0;
    return;
  }
  // Run the recurrence on a rescaled sequence so that e^{-s/2} cannot
  // underflow for large s; log_scale carries the factor back.
  double log_scale = 0.5 * da * std::log(s) - 0.5 * s - 0.5 * std::lgamma(da + 1.0);
  double prev = 0.0;
  double cur = 1.0;
  out[0] = std::exp(log_scale);
  for (std::size_t l = 0; l + 1 < out.size(); ++l) {
    const double dl = static_cast<double>(l);
    const double next = ((2.0 * dl + 1.0 + da - s) * cur - std::sqrt(dl * (dl + da)) * prev) /
                        std::sqrt((dl + 1.0) * (dl + 1.0 + da));
    prev = cur;
    cur = next;
    if (std::abs(cur) > 1e150) {
      prev *= 1e-150;
      cur *= 1e-150;
      log_scale += 150.0 * std::log(10.0);
    }
    out[l + 1] = (cur == 0.0) ? 0.0 : std::copysign(std::exp(std::log(std::abs(cur)) + log_scale), cur);
  }
}

}  // namespace magdirac
