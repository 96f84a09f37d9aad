#include "magdirac/fields.hpp"

#include <fftw3.h>
#include <fmt/format.h>
#include <fmt/os.h>

#include <cmath>
#include <fstream>
#include <limits>
#include <mutex>
#include <numbers>
#include <string>

#include "magdirac/error.hpp"
#include "magdirac/kernels.hpp"
#include "magdirac/multipliers.hpp"

namespace magdirac {

namespace {

std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

// In-place batch of Nr length-Ntheta transforms. sign = FFTW_FORWARD gives
// sum_m a_m e^{-2 pi i j m / N}; FFTW_BACKWARD the conjugate kernel.
void angular_fft(std::vector<cplx>& data, int Nr, int Ntheta, int sign) {
  auto* p = reinterpret_cast<fftw_complex*>(data.data());
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    plan = fftw_plan_many_dft(1, &Ntheta, Nr, p, nullptr, 1, Ntheta, p, nullptr, 1, Ntheta, sign,
                              FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  std::lock_guard<std::mutex> lock(fftw_planner_mutex());
  fftw_destroy_plan(plan);
}

int slot(int k, int N) { return ((k % N) + N) % N; }

std::vector<double> area_weights(const PolarGrid& g) {
  std::vector<double> a(g.Nr());
  for (int i = 0; i < g.Nr(); ++i) a[i] = g.weights()[i] * g.r()[i];
  return a;
}

}  // namespace

// ---- SpectralCoefficients ----

SpectralCoefficients::SpectralCoefficients(const FieldParams& params, int K, int L)
    : params_(params), K_(K), L_(L) {
  params.validate();
  if (K < 0 || L < 0) throw Error(Errc::InvalidArgument, "truncations must be >= 0");
  c_.assign(static_cast<std::size_t>(2 * K + 1) * (L + 1), 0.0);
}

bool SpectralCoefficients::contains(ModeIndex idx) const {
  return std::abs(idx.k) <= K_ && idx.ell >= 0 && idx.ell <= L_;
}

std::size_t SpectralCoefficients::flat(ModeIndex idx) const {
  return static_cast<std::size_t>(idx.k + K_) * (L_ + 1) + idx.ell;
}

ModeIndex SpectralCoefficients::index(std::size_t f) const {
  const int per = L_ + 1;
  return {static_cast<int>(f / per) - K_, static_cast<int>(f % per)};
}

double SpectralCoefficients::l2_norm() const {
  double acc = 0.0;
  for (const auto& v : c_) acc += std::norm(v);
  return std::sqrt(acc);
}

double SpectralCoefficients::eigenvalue_at(std::size_t f) const {
  return eigenvalue(index(f), params_);
}

bool SpectralCoefficients::same_shape(const SpectralCoefficients& o) const {
  return K_ == o.K_ && L_ == o.L_ && params_ == o.params_;
}

SpectralCoefficients& SpectralCoefficients::operator+=(const SpectralCoefficients& o) {
  if (!same_shape(o)) throw Error(Errc::InvalidArgument, "coefficient shapes differ");
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
  return *this;
}

SpectralCoefficients& SpectralCoefficients::operator-=(const SpectralCoefficients& o) {
  if (!same_shape(o)) throw Error(Errc::InvalidArgument, "coefficient shapes differ");
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
  return *this;
}

SpectralCoefficients& SpectralCoefficients::operator*=(cplx a) {
  for (auto& v : c_) v *= a;
  return *this;
}

SpectralCoefficients operator+(SpectralCoefficients a, const SpectralCoefficients& b) {
  return a += b;
}
SpectralCoefficients operator-(SpectralCoefficients a, const SpectralCoefficients& b) {
  return a -= b;
}
SpectralCoefficients operator*(cplx s, SpectralCoefficients a) { return a *= s; }

cplx inner(const SpectralCoefficients& a, const SpectralCoefficients& b) {
  if (!a.same_shape(b)) throw Error(Errc::InvalidArgument, "coefficient shapes differ");
  cplx acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += std::conj(a.data()[i]) * b.data()[i];
  return acc;
}

void SpectralCoefficients::save(const std::filesystem::path& path) const {
  try {
    auto out = fmt::output_file(path.string());
    out.print("# {} {} {:.17g} {:.17g}\n", K_, L_, params_.B0, params_.m);
    for (std::size_t f = 0; f < c_.size(); ++f) {
      const auto idx = index(f);
      out.print("{} {} {:.17g} {:.17g}\n", idx.k, idx.ell, c_[f].real(), c_[f].imag());
    }
  } catch (const std::system_error& e) {
    throw Error(Errc::IoError, e.what());
  }
}

SpectralCoefficients SpectralCoefficients::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::IoError, "cannot open " + path.string());
  std::string hash;
  int K = 0;
  int L = 0;
  FieldParams p;
  if (!(in >> hash >> K >> L >> p.B0 >> p.m) || hash != "#")
    throw Error(Errc::IoError, "bad coefficient header in " + path.string());
  SpectralCoefficients c(p, K, L);
  int k = 0;
  int l = 0;
  double re = 0.0;
  double im = 0.0;
  while (in >> k >> l >> re >> im) {
    if (!c.contains({k, l})) throw Error(Errc::IoError, "mode outside truncation");
    c(k, l) = {re, im};
  }
  return c;
}

// ---- GridField ----

GridField::GridField(std::shared_ptr<const PolarGrid> grid) : grid_(std::move(grid)) {
  if (!grid_) throw Error(Errc::InvalidArgument, "null grid");
  v_.assign(grid_->size(), 0.0);
}

void GridField::save(const std::filesystem::path& path) const {
  try {
    auto out = fmt::output_file(path.string());
    out.print("# {:.17g} {} {}\n", grid_->R(), grid_->Nr(), grid_->Ntheta());
    for (int i = 0; i < grid_->Nr(); ++i)
      for (int j = 0; j < grid_->Ntheta(); ++j)
        out.print("{} {} {:.17g} {:.17g}\n", i, j, (*this)(i, j).real(), (*this)(i, j).imag());
  } catch (const std::system_error& e) {
    throw Error(Errc::IoError, e.what());
  }
}

GridField GridField::load(const std::filesystem::path& path, std::shared_ptr<const PolarGrid> grid) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::IoError, "cannot open " + path.string());
  std::string hash;
  double R = 0.0;
  int Nr = 0;
  int Nt = 0;
  if (!(in >> hash >> R >> Nr >> Nt) || hash != "#")
    throw Error(Errc::IoError, "bad grid-field header in " + path.string());
  if (R != grid->R() || Nr != grid->Nr() || Nt != grid->Ntheta())
    throw Error(Errc::GridMismatch, "stored field lives on another grid");
  GridField f(grid);
  int i = 0;
  int j = 0;
  double re = 0.0;
  double im = 0.0;
  while (in >> i >> j >> re >> im) {
    if (i < 0 || i >= Nr || j < 0 || j >= Nt) throw Error(Errc::IoError, "node out of range");
    f(i, j) = {re, im};
  }
  return f;
}

// ---- transforms ----

SpectralCoefficients analyze(const GridField& f, const ModeBasis& basis) {
  const PolarGrid& g = f.grid();
  if (!g.same_layout(basis.grid()))
    throw Error(Errc::GridMismatch, "field grid differs from basis grid");
  const int Nr = g.Nr();
  const int N = g.Ntheta();
  const int K = basis.K();
  const int L = basis.L();

  std::vector<cplx> buf(f.data().begin(), f.data().end());
  angular_fft(buf, Nr, N, FFTW_BACKWARD);
  std::vector<cplx> radial(static_cast<std::size_t>(2 * K + 1) * Nr);
  for (int k = -K; k <= K; ++k)
    for (int i = 0; i < Nr; ++i)
      radial[static_cast<std::size_t>(k + K) * Nr + i] =
          buf[static_cast<std::size_t>(i) * N + slot(k, N)] / static_cast<double>(N);

  SpectralCoefficients c(basis.params(), K, L);
  const auto aw = area_weights(g);
  kernels::parallel::radial_to_modes({K, L, Nr}, basis.all_profiles(), aw, radial, c.data());
  return c;
}

GridField synthesize(const SpectralCoefficients& c, const ModeBasis& basis) {
  if (c.K() > basis.K() || c.L() > basis.L())
    throw Error(Errc::TruncationExceeded,
                fmt::format("coefficients (K={}, L={}) exceed basis (K={}, L={})", c.K(), c.L(),
                            basis.K(), basis.L()));
  if (c.params().B0 != basis.params().B0)
    throw Error(Errc::InvalidArgument, "coefficients and basis use different B0");
  const PolarGrid& g = basis.grid();
  const int Nr = g.Nr();
  const int N = g.Ntheta();
  const int K = basis.K();
  const int L = basis.L();

  std::vector<cplx> padded(basis.mode_count(), 0.0);
  for (std::size_t f = 0; f < c.size(); ++f) padded[basis.flat(c.index(f))] = c.data()[f];
  std::vector<cplx> radial(static_cast<std::size_t>(2 * K + 1) * Nr);
  kernels::parallel::modes_to_radial({K, L, Nr}, basis.all_profiles(), padded, radial);

  GridField out(basis.grid_ptr());
  std::vector<cplx> buf(g.size(), 0.0);
  for (int k = -K; k <= K; ++k)
    for (int i = 0; i < Nr; ++i)
      buf[static_cast<std::size_t>(i) * N + slot(k, N)] =
          radial[static_cast<std::size_t>(k + K) * Nr + i];
  angular_fft(buf, Nr, N, FFTW_FORWARD);
  std::copy(buf.begin(), buf.end(), out.data().begin());
  return out;
}

GridField resample_angular(const GridField& f, int Ntheta) {
  const PolarGrid& g = f.grid();
  const int N = g.Ntheta();
  if (Ntheta < N || (Ntheta & (Ntheta - 1)) != 0)
    throw Error(Errc::InvalidResolution, "angular resampling needs a larger power of two");
  if (Ntheta == N) return f;
  const int Nr = g.Nr();
  std::vector<cplx> coarse(f.data().begin(), f.data().end());
  angular_fft(coarse, Nr, N, FFTW_FORWARD);
  std::vector<cplx> fine(static_cast<std::size_t>(Nr) * Ntheta, 0.0);
  const double scale = 1.0 / N;
  for (int i = 0; i < Nr; ++i) {
    const cplx* src = coarse.data() + static_cast<std::size_t>(i) * N;
    cplx* dst = fine.data() + static_cast<std::size_t>(i) * Ntheta;
    for (int m = -N / 2 + 1; m < N / 2; ++m) dst[slot(m, Ntheta)] = scale * src[slot(m, N)];
    // The Nyquist coefficient is shared evenly between +N/2 and -N/2.
    const cplx ny = 0.5 * scale * src[N / 2];
    dst[N / 2] = ny;
    dst[Ntheta - N / 2] = ny;
  }
  angular_fft(fine, Nr, Ntheta, FFTW_BACKWARD);
  GridField out(std::make_shared<const PolarGrid>(build_polar_grid(g.R(), Nr, Ntheta)));
  std::copy(fine.begin(), fine.end(), out.data().begin());
  return out;
}

GridField apply_H_radial(const GridField& f, const FieldParams& params) {
  const PolarGrid& g = f.grid();
  const int Nr = g.Nr();
  const int N = g.Ntheta();
  const double B = params.B0;
  const auto r = g.r();

  std::vector<cplx> buf(f.data().begin(), f.data().end());
  angular_fft(buf, Nr, N, FFTW_BACKWARD);

  std::vector<cplx> out(buf.size(), 0.0);
#pragma omp parallel
  {
    std::vector<cplx> u(Nr);
    std::vector<cplx> du(Nr);
    std::vector<cplx> d2u(Nr);
#pragma omp for schedule(static)
    for (int m = 0; m < N; ++m) {
      const int k = (m < N / 2) ? m : m - N;
      for (int i = 0; i < Nr; ++i) u[i] = buf[static_cast<std::size_t>(i) * N + m] / double(N);
      g.differentiate(u, du);
      g.differentiate(du, d2u);
      for (int i = 0; i < Nr; ++i) {
        const double ri = r[i];
        const double pot = double(k) * k / (ri * ri) + 0.25 * B * B * ri * ri + B * k;
        out[static_cast<std::size_t>(i) * N + m] = -d2u[i] - du[i] / ri + pot * u[i];
      }
    }
  }
  angular_fft(out, Nr, N, FFTW_FORWARD);
  GridField h(f.grid_ptr());
  std::copy(out.begin(), out.end(), h.data().begin());
  return h;
}

double eigen_residual(const GridField& f, double lambda, const FieldParams& params) {
  const GridField h = apply_H_radial(f, params);
  GridField diff(f.grid_ptr());
  GridField scaled(f.grid_ptr());
  for (std::size_t i = 0; i < f.data().size(); ++i) {
    scaled.data()[i] = lambda * f.data()[i];
    diff.data()[i] = h.data()[i] - scaled.data()[i];
  }
  const double denom = lp_norm(scaled, 2.0);
  return denom > 0.0 ? lp_norm(diff, 2.0) / denom : lp_norm(diff, 2.0);
}

double lp_norm(const GridField& f, double p) {
  if (!(p >= 1.0)) throw Error(Errc::InvalidArgument, "p must be >= 1");
  const PolarGrid& g = f.grid();
  const int Nr = g.Nr();
  const int N = g.Ntheta();
  if (std::isinf(p)) {
    double mx = 0.0;
    for (const auto& v : f.data()) mx = std::max(mx, std::abs(v));
    return mx;
  }
  double acc = 0.0;
  for (int i = 0; i < Nr; ++i) {
    double row = 0.0;
    for (int j = 0; j < N; ++j) {
      const double a = std::abs(f(i, j));
      row += (p == 2.0) ? a * a : std::pow(a, p);
    }
    acc += g.weights()[i] * g.r()[i] * g.dtheta() * row;
  }
  return std::pow(acc, 1.0 / p);
}

double sobolev_besov_norm(const SpectralCoefficients& c, const ModeBasis& basis, double s, double p,
                          double r, NormVariant variant) {
  const auto& prm = c.params();
  if (variant != NormVariant::Besov) {
    if (p != 2.0 || r != 2.0)
      throw Error(Errc::UnsupportedCombination, "Sobolev norms are defined for p = r = 2 only");
    double acc = 0.0;
    for (std::size_t f = 0; f < c.size(); ++f) {
      const double lam = c.eigenvalue_at(f);
      const double base =
          (variant == NormVariant::HomogeneousSobolev) ? lam : lam + prm.m * prm.m + prm.B0;
      acc += std::pow(base, s) * std::norm(c.data()[f]);
    }
    return std::sqrt(acc);
  }
  if (!(r >= 1.0)) throw Error(Errc::InvalidArgument, "r must be >= 1");
  auto piece_norm = [&](const SpectralCoefficients& piece) {
    return lp_norm(synthesize(piece, basis), p);
  };
  const bool r_inf = std::isinf(r);
  double acc = 0.0;
  auto add = [&](double v) { acc = r_inf ? std::max(acc, v) : acc + std::pow(v, r); };
  add(piece_norm(lp_project_low(c)));
  const int jmax = lp_max_level(c);
  for (int j = 1; j <= jmax; ++j) add(std::pow(2.0, j * s) * piece_norm(lp_project(j, c)));
  return r_inf ? acc : std::pow(acc, 1.0 / r);
}

}  // namespace magdirac
