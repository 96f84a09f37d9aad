#include "magdirac/spectrum.hpp"

#include <fmt/format.h>
#include <fmt/os.h>

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>

#include "magdirac/error.hpp"
#include "magdirac/specfun.hpp"

namespace magdirac {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// r^{|k|} e^{-s/2} without overflowing the power for large |k|.
double envelope(int k, double B0, double r) {
  const double s = 0.5 * B0 * r * r;
  if (r <= 0.0) return k == 0 ? 1.0 : 0.0;
  return std::exp(std::abs(k) * std::log(r) - 0.5 * s);
}

// Unnormalized profiles of angular index k, l = 0..L, at every node of `g`.
std::vector<double> raw_profiles(int k, int L, double B0, const PolarGrid& g) {
  const int Nr = g.Nr();
  std::vector<double> out(static_cast<std::size_t>(L + 1) * Nr);
  std::vector<double> P(L + 1);
  const auto r = g.r();
  for (int i = 0; i < Nr; ++i) {
    const double s = 0.5 * B0 * r[i] * r[i];
    laguerre_P_sequence(k, s, P);
    const double e = envelope(k, B0, r[i]);
    for (int l = 0; l <= L; ++l) out[static_cast<std::size_t>(l) * Nr + i] = e * P[l];
  }
  return out;
}

double quadrature_norm(std::span<const double> v, const PolarGrid& g) {
  const auto r = g.r();
  const auto w = g.weights();
  double acc = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) acc += w[i] * r[i] * v[i] * v[i];
  return std::sqrt(kTwoPi * acc);
}

// Mass fraction of the profile beyond R, from the Gaussian tail asymptotics.
double tail_fraction(ModeIndex idx, double B0, double R, double norm) {
  const int n = std::abs(idx.k) + 2 * idx.ell;
  const double denom = B0 * R - (2.0 * n + 1.0) / R;
  if (denom <= 0.0) return 1.0;
  const double v = radial_profile(idx, B0, R) / norm;
  return kTwoPi * R * v * v / denom;
}

std::string metadata_line(const FieldParams& p, int K, int L, const PolarGrid& g) {
  return fmt::format("# B0={:.17g} m={:.17g} K={} L={} R={:.17g} Nr={} Ntheta={}", p.B0, p.m, K,
                     L, g.R(), g.Nr(), g.Ntheta());
}

}  // namespace

void FieldParams::validate() const {
  if (!(B0 > 0.0) || !std::isfinite(B0)) throw Error(Errc::InvalidArgument, "B0 must be > 0");
  if (!(m >= 0.0) || !std::isfinite(m)) throw Error(Errc::InvalidArgument, "m must be >= 0");
}

double eigenvalue(ModeIndex idx, const FieldParams& params) {
  const int n = 2 * idx.ell + 1 + std::abs(idx.k) + idx.k;
  return n * params.B0;
}

double kg_frequency(ModeIndex idx, const FieldParams& params, Spin spin) {
  const double lam = eigenvalue(idx, params);
  const double shift = (spin == Spin::Up) ? -params.B0 : params.B0;
  const double rad = (lam + shift) + params.m * params.m;
  return std::sqrt(std::max(rad, 0.0));
}

double radial_profile(ModeIndex idx, double B0, double r) {
  return envelope(idx.k, B0, r) * laguerre_P(idx.k, idx.ell, 0.5 * B0 * r * r);
}

std::complex<double> eigenfunction_eval(ModeIndex idx, const FieldParams& params, double x1,
                                        double x2) {
  const double r = std::hypot(x1, x2);
  if (r == 0.0) return idx.k == 0 ? std::complex<double>(laguerre_P(0, idx.ell, 0.0)) : 0.0;
  const double theta = std::atan2(x2, x1);
  return radial_profile(idx, params.B0, r) * std::polar(1.0, -idx.k * theta);
}

int multiplicity_formula(double lambda, const FieldParams& params, int K) {
  const double B = params.B0;
  int count = 0;
  for (int j = -K; j <= K; ++j) {
    const double v = (lambda - j * B) / (2.0 * B) - (std::abs(j) + 1) / 2.0;
    const double n = std::round(v);
    if (n >= 0.0 && std::abs(v - n) < 1e-9) ++count;
  }
  return count;
}

int multiplicity_brute(double lambda, const FieldParams& params, int K, int L) {
  int count = 0;
  for (int k = -K; k <= K; ++k)
    for (int l = 0; l <= L; ++l)
      if (std::abs(eigenvalue({k, l}, params) - lambda) < 1e-9 * params.B0) ++count;
  return count;
}

double norm_constant(ModeIndex idx, double B0, const PolarGrid& grid) {
  const auto fine = build_polar_grid(grid.R(), 2 * grid.Nr(), grid.Ntheta());
  auto norm_on = [&](const PolarGrid& g) {
    std::vector<double> v(g.Nr());
    for (int i = 0; i < g.Nr(); ++i) v[i] = radial_profile(idx, B0, g.r()[i]);
    return quadrature_norm(v, g);
  };
  const double n1 = norm_on(grid);
  const double n2 = norm_on(fine);
  if (std::abs(n1 - n2) > 1e-8 * n2)
    throw Error(Errc::GridTooCoarse, fmt::format("norm of ({},{}) moves by {:.3g} under doubling",
                                                 idx.k, idx.ell, std::abs(n1 - n2) / n2));
  if (tail_fraction(idx, B0, grid.R(), n2) > 1e-12)
    throw Error(Errc::GridTooCoarse,
                fmt::format("R = {} truncates the tail of mode ({},{})", grid.R(), idx.k, idx.ell));
  return n1;
}

double default_radius(double B0, int K, int L) {
  const double n = K + 2.0 * L;
  const double log_tol = std::log(1e-13);
  const double rp = std::sqrt(2.0 * n / B0);
  auto rel = [&](double R) {
    const double lp = (n > 0.0) ? n * std::log(rp) - 0.25 * B0 * rp * rp : 0.0;
    return n * std::log(R) - 0.25 * B0 * R * R - lp;
  };
  double R = std::max(0.5, std::ceil(2.0 * rp) / 2.0);
  while (rel(R) > log_tol) R += 0.5;
  return R;
}

int effective_ntheta(int requested, int K) {
  const int need = std::max(requested, 4 * K + 4);
  int n = 8;
  while (n < need) n *= 2;
  return n;
}

ModeBasis ModeBasis::build(const FieldParams& params, int K, int L,
                           std::shared_ptr<const PolarGrid> grid) {
  params.validate();
  if (K < 0 || L < 0) throw Error(Errc::InvalidArgument, "truncations must be >= 0");
  if (!grid) throw Error(Errc::InvalidArgument, "null grid");
  if (grid->Ntheta() < 4 * K + 4)
    throw Error(Errc::InvalidResolution,
                fmt::format("Ntheta = {} < 4K+4 = {}", grid->Ntheta(), 4 * K + 4));

  ModeBasis b;
  b.params_ = params;
  b.K_ = K;
  b.L_ = L;
  b.grid_ = grid;
  const int Nr = grid->Nr();
  const std::size_t modes = static_cast<std::size_t>(2 * K + 1) * (L + 1);
  b.norms_.assign(modes, 0.0);
  b.profiles_.assign(modes * Nr, 0.0);

  const auto fine = build_polar_grid(grid->R(), 2 * Nr, grid->Ntheta());
  // Independent per k, so the result does not depend on the thread count.
#pragma omp parallel for schedule(dynamic)
  for (int k = -K; k <= K; ++k) {
    const auto coarse = raw_profiles(k, L, params.B0, *grid);
    const auto dense = raw_profiles(k, L, params.B0, fine);
    for (int l = 0; l <= L; ++l) {
      std::span<const double> v(&coarse[static_cast<std::size_t>(l) * Nr], Nr);
      std::span<const double> vf(&dense[static_cast<std::size_t>(l) * 2 * Nr], 2 * Nr);
      const double n1 = quadrature_norm(v, *grid);
      const double n2 = quadrature_norm(vf, fine);
      const std::size_t f = b.flat({k, l});
      b.norms_[f] = n1;
      if (!(n1 > 0.0) || std::abs(n1 - n2) > 1e-8 * n2 ||
          tail_fraction({k, l}, params.B0, grid->R(), n2) > 1e-12) {
        b.norms_[f] = -1.0;  // reported below, outside the parallel region
        continue;
      }
      for (int i = 0; i < Nr; ++i) b.profiles_[f * Nr + i] = v[i] / n1;
    }
  }
  for (std::size_t f = 0; f < modes; ++f) {
    if (b.norms_[f] < 0.0) {
      const auto idx = b.index(f);
      throw Error(Errc::GridTooCoarse,
                  fmt::format("grid R={} Nr={} does not resolve mode ({},{})", grid->R(), Nr,
                              idx.k, idx.ell));
    }
  }
  return b;
}

bool ModeBasis::contains(ModeIndex idx) const {
  return std::abs(idx.k) <= K_ && idx.ell >= 0 && idx.ell <= L_;
}

std::size_t ModeBasis::flat(ModeIndex idx) const {
  return static_cast<std::size_t>(idx.k + K_) * (L_ + 1) + idx.ell;
}

ModeIndex ModeBasis::index(std::size_t f) const {
  const int per = L_ + 1;
  return {static_cast<int>(f / per) - K_, static_cast<int>(f % per)};
}

double ModeBasis::eigenvalue(ModeIndex idx) const { return magdirac::eigenvalue(idx, params_); }

std::span<const double> ModeBasis::profile(ModeIndex idx) const {
  const std::size_t Nr = grid_->Nr();
  return {&profiles_[flat(idx) * Nr], Nr};
}

std::span<const double> ModeBasis::profiles_of(int k) const {
  const std::size_t Nr = grid_->Nr();
  return {&profiles_[flat({k, 0}) * Nr], Nr * (L_ + 1)};
}

double ModeBasis::normalized_radial(ModeIndex idx, double r) const {
  std::vector<double> P(idx.ell + 1);
  laguerre_P_sequence(idx.k, 0.5 * params_.B0 * r * r, P);
  return envelope(idx.k, params_.B0, r) * P[idx.ell] / norm_constant(idx);
}

std::complex<double> ModeBasis::eval(ModeIndex idx, double x1, double x2) const {
  const double r = std::hypot(x1, x2);
  const double v = normalized_radial(idx, r);
  if (r == 0.0) return v;
  return v * std::polar(1.0, -idx.k * std::atan2(x2, x1));
}

void ModeBasis::save(const std::filesystem::path& modes, const std::filesystem::path& radial) const {
  const std::string meta = metadata_line(params_, K_, L_, *grid_);
  try {
    auto out = fmt::output_file(modes.string());
    out.print("# magdirac mode table: k ell lambda norm\n{}\n", meta);
    for (std::size_t f = 0; f < mode_count(); ++f) {
      const auto idx = index(f);
      out.print("{} {} {:.17g} {:.17g}\n", idx.k, idx.ell, eigenvalue(idx), norms_[f]);
    }
    out.close();
    auto rad = fmt::output_file(radial.string());
    rad.print("# magdirac radial table: k ell v_0 .. v_(Nr-1), normalized\n{}\n", meta);
    const int Nr = grid_->Nr();
    for (std::size_t f = 0; f < mode_count(); ++f) {
      const auto idx = index(f);
      rad.print("{} {}", idx.k, idx.ell);
      for (int i = 0; i < Nr; ++i) rad.print(" {:.17g}", profiles_[f * Nr + i]);
      rad.print("\n");
    }
    rad.close();
  } catch (const std::system_error& e) {
    throw Error(Errc::IoError, e.what());
  }
}

std::optional<ModeBasis> ModeBasis::load(const std::filesystem::path& modes,
                                         const std::filesystem::path& radial,
                                         const FieldParams& params, int K, int L,
                                         std::shared_ptr<const PolarGrid> grid) {
  std::ifstream in_modes(modes);
  std::ifstream in_rad(radial);
  if (!in_modes || !in_rad) return std::nullopt;
  const std::string meta = metadata_line(params, K, L, *grid);
  std::string line;
  auto check_header = [&](std::ifstream& in) {
    std::string title;
    std::string m;
    return std::getline(in, title) && std::getline(in, m) && m == meta;
  };
  if (!check_header(in_modes) || !check_header(in_rad)) return std::nullopt;

  ModeBasis b;
  b.params_ = params;
  b.K_ = K;
  b.L_ = L;
  b.grid_ = grid;
  const std::size_t count = static_cast<std::size_t>(2 * K + 1) * (L + 1);
  const int Nr = grid->Nr();
  b.norms_.resize(count);
  b.profiles_.resize(count * Nr);
  for (std::size_t f = 0; f < count; ++f) {
    int k = 0;
    int l = 0;
    double lam = 0.0;
    double norm = 0.0;
    if (!(in_modes >> k >> l >> lam >> norm)) return std::nullopt;
    const auto idx = b.index(f);
    if (k != idx.k || l != idx.ell || lam != magdirac::eigenvalue(idx, params) || !(norm > 0.0))
      return std::nullopt;
    b.norms_[f] = norm;
    if (!(in_rad >> k >> l) || k != idx.k || l != idx.ell) return std::nullopt;
    for (int i = 0; i < Nr; ++i)
      if (!(in_rad >> b.profiles_[f * Nr + i])) return std::nullopt;
  }
  return b;
}

}  // namespace magdirac
