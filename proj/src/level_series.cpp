#include "magdirac/level_series.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "magdirac/kernels.hpp"
#include "magdirac/specfun.hpp"

namespace magdirac {

namespace {

double modulus_at(std::span<const cplx> a, double B0, double r) {
  const double s = 0.5 * B0 * r * r;
  cplx out;
  kernels::serial::level_series(a, std::span<const double>(&s, 1), std::span<cplx>(&out, 1));
  return std::abs(out) * B0 / (2.0 * std::numbers::pi);
}

}  // namespace

std::vector<cplx> level_kernel(std::span<const cplx> a, double B0, std::span<const double> r) {
  std::vector<double> s(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) s[i] = 0.5 * B0 * r[i] * r[i];
  std::vector<cplx> out(r.size());
  kernels::parallel::level_series(a, s, out);
  const double pre = B0 / (2.0 * std::numbers::pi);
  for (auto& v : out) v *= pre;
  return out;
}

KernelSup level_kernel_sup(std::span<const cplx> a, double B0, double r_max, double dr) {
  const auto n = static_cast<std::size_t>(std::ceil(r_max / dr)) + 1;
  std::vector<double> r(n);
  for (std::size_t i = 0; i < n; ++i) r[i] = std::min(r_max, i * dr);
  const auto vals = level_kernel(a, B0, r);
  std::vector<double> mod(n);
  for (std::size_t i = 0; i < n; ++i) mod[i] = std::abs(vals[i]);

  // Candidate local maxima, largest first.
  std::vector<std::size_t> cand;
  for (std::size_t i = 0; i < n; ++i) {
    const bool left = i == 0 || mod[i] >= mod[i - 1];
    const bool right = i + 1 == n || mod[i] >= mod[i + 1];
    if (left && right) cand.push_back(i);
  }
  std::sort(cand.begin(), cand.end(), [&](std::size_t x, std::size_t y) {
    return mod[x] != mod[y] ? mod[x] > mod[y] : x < y;
  });
  if (cand.size() > 4) cand.resize(4);

  KernelSup best{mod[cand.front()], r[cand.front()]};
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  for (std::size_t c : cand) {
    double lo = std::max(0.0, r[c] - dr);
    double hi = std::min(r_max, r[c] + dr);
    double x1 = hi - g * (hi - lo);
    double x2 = lo + g * (hi - lo);
    double f1 = modulus_at(a, B0, x1);
    double f2 = modulus_at(a, B0, x2);
    for (int it = 0; it < 60 && hi - lo > 1e-12 * (1.0 + hi); ++it) {
      if (f1 > f2) {
        hi = x2;
        x2 = x1;
        f2 = f1;
        x1 = hi - g * (hi - lo);
        f1 = modulus_at(a, B0, x1);
      } else {
        lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = lo + g * (hi - lo);
        f2 = modulus_at(a, B0, x2);
      }
    }
    const double x = 0.5 * (lo + hi);
    const double f = modulus_at(a, B0, x);
    if (f > best.value) best = {f, x};
    if (f1 > best.value) best = {f1, x1};
    if (f2 > best.value) best = {f2, x2};
  }
  return best;
}

RadialSector::RadialSector(int k, int L, double B0, const PolarGrid& g)
    : k_(k), L_(L), Nr_(g.Nr()), table_(static_cast<std::size_t>(g.Nr()) * (L + 1)) {
  const double pre = std::sqrt(B0 / (2.0 * std::numbers::pi));
#pragma omp parallel for schedule(static)
  for (int i = 0; i < Nr_; ++i) {
    const double r = g.r()[i];
    std::span<double> row(&table_[static_cast<std::size_t>(i) * (L_ + 1)], L_ + 1);
    laguerre_functions(std::abs(k_), 0.5 * B0 * r * r, row);
    for (double& v : row) v *= pre;
  }
}

void RadialSector::evaluate(std::span<const cplx> c, std::span<cplx> out) const {
  const int n = std::min<int>(L_ + 1, static_cast<int>(c.size()));
#pragma omp parallel for schedule(static)
  for (int i = 0; i < Nr_; ++i) {
    const double* row = &table_[static_cast<std::size_t>(i) * (L_ + 1)];
    cplx acc = 0.0;
    for (int l = 0; l < n; ++l) acc += c[l] * row[l];
    out[i] = acc;
  }
}

}  // namespace magdirac
