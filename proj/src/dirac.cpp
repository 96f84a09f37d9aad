#include "magdirac/dirac.hpp"

#include <fmt/format.h>
#include <fmt/os.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>

#include "magdirac/error.hpp"
#include "magdirac/multipliers.hpp"

namespace magdirac {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
const cplx I{0.0, 1.0};

// Radial index on angular index k with eigenvalue lam, if any.
std::optional<int> ell_for(int k, double lam, double B) {
  const double v = (lam / B - 1.0 - std::abs(k) - k) / 2.0;
  const double n = std::round(v);
  if (n < 0.0 || std::abs(v - n) > 1e-9) return std::nullopt;
  return static_cast<int>(n);
}

// Expected image of D- on upper (k,l) / D+ on lower (k,l) from the angular
// selection rule and the eigenvalue shift -/+ 2B0.
LadderEntry predicted(ModeIndex src, bool minus, const FieldParams& p, int K, int L) {
  LadderEntry e;
  const int tk = minus ? src.k - 1 : src.k + 1;
  const double lam = eigenvalue(src, p) + (minus ? -2.0 : 2.0) * p.B0;
  const auto tl = ell_for(tk, lam, p.B0);
  if (!tl) {
    e.zero = true;
    return e;
  }
  e.target = {tk, *tl};
  e.in_range = std::abs(tk) <= K && *tl <= L;
  return e;
}

void check_shapes(const SpinorCoefficients& s, const LadderTable& t) {
  if (s.upper.K() != t.K || s.upper.L() != t.L || !s.upper.same_shape(s.lower))
    throw Error(Errc::InvalidArgument, "spinor truncation does not match the ladder table");
  if (s.params().B0 != t.params.B0)
    throw Error(Errc::InvalidArgument, "spinor and ladder table use different B0");
}

SpinorCoefficients diag_square(const SpinorCoefficients& s) {
  const auto& p = s.params();
  const double mm = p.m * p.m;
  auto up = apply_multiplier([&](double lam) { return lam + mm - p.B0; }, s.upper,
                             MultiplierArgument::PlainLambda);
  auto lo = apply_multiplier([&](double lam) { return lam + mm + p.B0; }, s.lower,
                             MultiplierArgument::PlainLambda);
  return {std::move(up), std::move(lo)};
}

}  // namespace

SpinorCoefficients::SpinorCoefficients(SpectralCoefficients u, SpectralCoefficients l)
    : upper(std::move(u)), lower(std::move(l)) {
  if (!upper.same_shape(lower))
    throw Error(Errc::InvalidArgument, "spinor components must share truncation and parameters");
}

double SpinorCoefficients::norm() const {
  const double a = upper.l2_norm();
  const double b = lower.l2_norm();
  return std::sqrt(a * a + b * b);
}

SpinorCoefficients operator+(const SpinorCoefficients& a, const SpinorCoefficients& b) {
  return {a.upper + b.upper, a.lower + b.lower};
}
SpinorCoefficients operator-(const SpinorCoefficients& a, const SpinorCoefficients& b) {
  return {a.upper - b.upper, a.lower - b.lower};
}
SpinorCoefficients operator*(cplx s, const SpinorCoefficients& a) {
  return {s * a.upper, s * a.lower};
}
cplx inner(const SpinorCoefficients& a, const SpinorCoefficients& b) {
  return inner(a.upper, b.upper) + inner(a.lower, b.lower);
}

void LadderTable::save(const std::filesystem::path& path) const {
  try {
    auto out = fmt::output_file(path.string());
    out.print("# ladder table B0={:.17g} K={} L={}\n", params.B0, K, L);
    out.print("# direction k ell target_k target_ell re im\n");
    auto dump = [&](const char* dir, const std::vector<LadderEntry>& v) {
      for (std::size_t f = 0; f < v.size(); ++f) {
        const ModeIndex src{static_cast<int>(f / (L + 1)) - K, static_cast<int>(f % (L + 1))};
        const auto& e = v[f];
        if (e.zero) {
          out.print("{} {} {} zero zero 0 0\n", dir, src.k, src.ell);
        } else if (!e.in_range) {
          out.print("{} {} {} {} {} nan nan\n", dir, src.k, src.ell, e.target.k, e.target.ell);
        } else {
          out.print("{} {} {} {} {} {:.17g} {:.17g}\n", dir, src.k, src.ell, e.target.k,
                    e.target.ell, e.coef.real(), e.coef.imag());
        }
      }
    };
    dump("minus", minus);
    dump("plus", plus);
  } catch (const std::system_error& e) {
    throw Error(Errc::IoError, e.what());
  }
}

LadderTable ladder_coefficients(const ModeBasis& basis) {
  const PolarGrid& g = basis.grid();
  const int K = basis.K();
  const int L = basis.L();
  const int Nr = g.Nr();
  const double B = basis.params().B0;
  const auto r = g.r();
  const auto w = g.weights();

  LadderTable t;
  t.params = basis.params();
  t.K = K;
  t.L = L;
  t.minus.resize(basis.mode_count());
  t.plus.resize(basis.mode_count());

  std::vector<double> leak(basis.mode_count() * 2, 0.0);
  std::vector<int> failed(basis.mode_count() * 2, 0);

#pragma omp parallel
  {
    std::vector<double> d(Nr);
    std::vector<double> img(Nr);
#pragma omp for schedule(dynamic)
    for (std::ptrdiff_t job = 0; job < static_cast<std::ptrdiff_t>(2 * basis.mode_count()); ++job) {
      const bool minus = job % 2 == 0;
      const std::size_t f = static_cast<std::size_t>(job / 2);
      const ModeIndex src = basis.index(f);
      LadderEntry e = predicted(src, minus, t.params, K, L);
      const auto prof = basis.profile(src);
      g.differentiate(prof, d);
      // The image is i times a real radial function.
      const double sgn = minus ? 1.0 : -1.0;
      for (int i = 0; i < Nr; ++i)
        img[i] = d[i] + sgn * (src.k / r[i] + 0.5 * B * r[i]) * prof[i];
      double norm2 = 0.0;
      for (int i = 0; i < Nr; ++i) norm2 += w[i] * r[i] * img[i] * img[i];
      norm2 *= kTwoPi;
      if (e.zero) {
        leak[job] = std::sqrt(norm2);
        if (leak[job] > 1e-8) failed[job] = 1;
      } else if (e.in_range) {
        const int tk = e.target.k;
        double off = 0.0;
        double on = 0.0;
        double best = 0.0;
        int best_l = -1;
        for (int l = 0; l <= L; ++l) {
          const auto tp = basis.profile({tk, l});
          double c = 0.0;
          for (int i = 0; i < Nr; ++i) c += w[i] * r[i] * img[i] * tp[i];
          c *= kTwoPi;
          if (std::abs(c) > std::abs(best)) {
            best = c;
            best_l = l;
          }
          if (l == e.target.ell) {
            on = c;
          } else {
            off += c * c;
          }
        }
        leak[job] = std::sqrt(off) / std::abs(on);
        const double missing = std::abs(on * on - norm2) / norm2;
        if (best_l != e.target.ell || leak[job] > 1e-8 || missing > 1e-8) failed[job] = 1;
        e.coef = I * on;
      }
      (minus ? t.minus : t.plus)[f] = e;
    }
  }
  for (std::size_t job = 0; job < failed.size(); ++job) {
    t.max_leakage = std::max(t.max_leakage, leak[job]);
    if (failed[job]) {
      const auto src = basis.index(job / 2);
      throw Error(Errc::LeakageError,
                  fmt::format("{} image of mode ({},{}) is not single-target (leakage {:.3g}); "
                              "the grid under-resolves the basis",
                              job % 2 == 0 ? "D-" : "D+", src.k, src.ell, leak[job]));
    }
  }
  return t;
}

LadderTable ladder_coefficients_exact(const FieldParams& params, int K, int L) {
  params.validate();
  LadderTable t;
  t.params = params;
  t.K = K;
  t.L = L;
  const std::size_t n = static_cast<std::size_t>(2 * K + 1) * (L + 1);
  t.minus.resize(n);
  t.plus.resize(n);
  const double B = params.B0;
  for (std::size_t f = 0; f < n; ++f) {
    const ModeIndex src{static_cast<int>(f / (L + 1)) - K, static_cast<int>(f % (L + 1))};
    LadderEntry em = predicted(src, true, params, K, L);
    if (!em.zero) {
      em.coef = (src.k <= 0) ? -I * std::sqrt(2.0 * src.ell * B)
                             : I * std::sqrt((2.0 * src.ell + 2.0 * src.k) * B);
    }
    t.minus[f] = em;
    LadderEntry ep = predicted(src, false, params, K, L);
    ep.coef = (src.k <= -1) ? I * std::sqrt(2.0 * (src.ell + 1) * B)
                            : -I * std::sqrt(2.0 * (src.ell + src.k + 1) * B);
    t.plus[f] = ep;
  }
  return t;
}

SpinorCoefficients apply_dirac(const SpinorCoefficients& s, const LadderTable& table) {
  check_shapes(s, table);
  const double m = s.params().m;
  SpinorCoefficients out(s.params(), table.K, table.L);
  const auto u = s.upper.data();
  const auto v = s.lower.data();
  auto uo = out.upper.data();
  auto lo = out.lower.data();
  for (std::size_t f = 0; f < u.size(); ++f) {
    uo[f] += m * u[f];
    lo[f] -= m * v[f];
  }
  auto overflow = [](const char* op, ModeIndex src) {
    return Error(Errc::TruncationOverflow,
                 fmt::format("{} maps mode ({},{}) outside the truncation", op, src.k, src.ell));
  };
  for (std::size_t f = 0; f < u.size(); ++f) {
    if (u[f] != 0.0) {
      const auto& e = table.minus[f];
      if (!e.zero) {
        if (!e.in_range) throw overflow("D-", s.upper.index(f));
        lo[table.flat(e.target)] -= e.coef * u[f];
      }
    }
    if (v[f] != 0.0) {
      const auto& e = table.plus[f];
      if (!e.zero) {
        if (!e.in_range) throw overflow("D+", s.lower.index(f));
        uo[table.flat(e.target)] -= e.coef * v[f];
      }
    }
  }
  return out;
}

double squaring_residual(const SpinorCoefficients& s, const LadderTable& table) {
  const auto dd = apply_dirac(apply_dirac(s, table), table);
  const auto ms = diag_square(s);
  const double diff = (dd - ms).norm();
  const double ref = ms.norm();
  return ref > 0.0 ? diff / ref : diff;
}

bool is_interior(ModeIndex idx, int K, int L) {
  return std::abs(idx.k) <= K - 2 && idx.ell <= L - 2;
}

SpinorCoefficients evolve_dirac(double t, const SpinorCoefficients& s, const LadderTable& table,
                                PhaseSign sign) {
  const auto ds = apply_dirac(s, table);
  const double sg = static_cast<double>(sign);
  auto cosine = [t](double w) { return std::cos(t * w); };
  auto sinc = [t, sg](double w) {
    const double v = (w * t == 0.0) ? t : std::sin(t * w) / w;
    return cplx(0.0, sg * v);
  };
  auto up = apply_multiplier(cosine, s.upper, MultiplierArgument::KgUp);
  up += apply_multiplier(sinc, ds.upper, MultiplierArgument::KgUp);
  auto lo = apply_multiplier(cosine, s.lower, MultiplierArgument::KgDown);
  lo += apply_multiplier(sinc, ds.lower, MultiplierArgument::KgDown);
  return {std::move(up), std::move(lo)};
}

NormIdentity dirac_norm_identity(const SpinorCoefficients& s, const LadderTable& table) {
  const auto& p = s.params();
  if (p.m != 0.0) throw Error(Errc::InvalidArgument, "the norm identity is stated for m = 0");
  NormIdentity out;
  const double n = apply_dirac(s, table).norm();
  out.lhs = n * n;
  for (std::size_t f = 0; f < s.upper.size(); ++f) {
    const double lam = s.upper.eigenvalue_at(f);
    out.rhs += (lam - p.B0) * std::norm(s.upper.data()[f]) + (lam + p.B0) * std::norm(s.lower.data()[f]);
    out.h1_norm_sq +=
        (lam + p.m * p.m + p.B0) * (std::norm(s.upper.data()[f]) + std::norm(s.lower.data()[f]));
  }
  out.bound_holds = std::sqrt(out.lhs) <= std::sqrt(out.h1_norm_sq) * (1.0 + 1e-12);
  return out;
}

DeficiencyVerdict deficiency_window_check() {
  DeficiencyVerdict v;
  for (int k = -16; k <= 16; ++k) {
    const int a = std::abs(k) + 1;
    const int b = std::abs(k + 1) + 1;
    if (0 < a && a < 2) v.window1.push_back(k);
    if (0 < b && b < 2) v.window2.push_back(k);
  }
  std::set_intersection(v.window1.begin(), v.window1.end(), v.window2.begin(), v.window2.end(),
                        std::back_inserter(v.intersection));
  return v;
}

SectorMatrix sector_matrix(int k, int Ls, const LadderTable& table, double m) {
  if (std::abs(k) > table.K || std::abs(k - 1) > table.K || Ls > table.L)
    throw Error(Errc::TruncationOverflow, "sector outside the ladder table");
  SectorMatrix M;
  for (int l = 0; l <= Ls; ++l) M.labels.push_back({true, {k, l}});
  for (int l = 0; l <= Ls; ++l) {
    const auto& e = table.minus[table.flat({k, l})];
    if (!e.zero) M.labels.push_back({false, e.target});
  }
  M.dim = static_cast<int>(M.labels.size());
  M.a.assign(static_cast<std::size_t>(M.dim) * M.dim, 0.0);
  auto find = [&](bool upper, ModeIndex idx) {
    for (int i = 0; i < M.dim; ++i)
      if (M.labels[i].first == upper && M.labels[i].second == idx) return i;
    throw Error(Errc::TruncationOverflow, "sector is not closed under the ladder maps");
  };
  for (int c = 0; c < M.dim; ++c) {
    const auto [upper, idx] = M.labels[c];
    if (upper) {
      M.a[static_cast<std::size_t>(c) * M.dim + c] += m;
      const auto& e = table.minus[table.flat(idx)];
      if (!e.zero) M.a[static_cast<std::size_t>(find(false, e.target)) * M.dim + c] -= e.coef;
    } else {
      M.a[static_cast<std::size_t>(c) * M.dim + c] -= m;
      const auto& e = table.plus[table.flat(idx)];
      if (!e.zero) M.a[static_cast<std::size_t>(find(true, e.target)) * M.dim + c] -= e.coef;
    }
  }
  return M;
}

SpinorCoefficients lp_project(int j, const SpinorCoefficients& s) {
  const double two_b = 2.0 * s.lower.params().B0;
  auto lower = apply_multiplier(
      [=](double lam) { return bump_phi(std::ldexp(std::sqrt(lam + two_b), -j)); }, s.lower,
      MultiplierArgument::PlainLambda);
  return SpinorCoefficients(lp_project(j, s.upper), std::move(lower));
}

}  // namespace magdirac
