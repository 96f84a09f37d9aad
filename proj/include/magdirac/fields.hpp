#pragma once

#include <complex>
#include <filesystem>
#include <memory>
#include <span>
#include <vector>

#include "magdirac/grid.hpp"
#include "magdirac/spectrum.hpp"

namespace magdirac {

using cplx = std::complex<double>;

/// Truncated coefficients c_{k,l}, |k| <= K, l <= L, in the normalized eigenbasis.
/// Flat layout matches ModeBasis: (k + K) * (L + 1) + l.
class SpectralCoefficients {
 public:
  SpectralCoefficients() = default;
  SpectralCoefficients(const FieldParams& params, int K, int L);

  const FieldParams& params() const { return params_; }
  int K() const { return K_; }
  int L() const { return L_; }
  std::size_t size() const { return c_.size(); }

  bool contains(ModeIndex idx) const;
  std::size_t flat(ModeIndex idx) const;
  ModeIndex index(std::size_t flat) const;

  cplx& operator()(int k, int ell) { return c_[flat({k, ell})]; }
  const cplx& operator()(int k, int ell) const { return c_[flat({k, ell})]; }
  cplx& at(ModeIndex idx) { return c_[flat(idx)]; }
  const cplx& at(ModeIndex idx) const { return c_[flat(idx)]; }

  std::span<cplx> data() { return c_; }
  std::span<const cplx> data() const { return c_; }

  double l2_norm() const;
  double eigenvalue_at(std::size_t flat) const;

  /// Same truncation and mass/field parameters.
  bool same_shape(const SpectralCoefficients& other) const;

  SpectralCoefficients& operator+=(const SpectralCoefficients& o);
  SpectralCoefficients& operator-=(const SpectralCoefficients& o);
  SpectralCoefficients& operator*=(cplx a);

  /// Header "# K L B0 m", then "k ell re im" rows; lossless (%.17g).
  void save(const std::filesystem::path& path) const;
  static SpectralCoefficients load(const std::filesystem::path& path);

 private:
  FieldParams params_;
  int K_ = 0;
  int L_ = 0;
  std::vector<cplx> c_;
};

SpectralCoefficients operator+(SpectralCoefficients a, const SpectralCoefficients& b);
SpectralCoefficients operator-(SpectralCoefficients a, const SpectralCoefficients& b);
SpectralCoefficients operator*(cplx s, SpectralCoefficients a);
cplx inner(const SpectralCoefficients& a, const SpectralCoefficients& b);  // <a,b>, conj on a

/// Samples on a PolarGrid, row-major in r: value(i, j) at (r_i, theta_j).
class GridField {
 public:
  GridField() = default;
  explicit GridField(std::shared_ptr<const PolarGrid> grid);

  const PolarGrid& grid() const { return *grid_; }
  std::shared_ptr<const PolarGrid> grid_ptr() const { return grid_; }

  cplx& operator()(int i, int j) { return v_[static_cast<std::size_t>(i) * grid_->Ntheta() + j]; }
  const cplx& operator()(int i, int j) const {
    return v_[static_cast<std::size_t>(i) * grid_->Ntheta() + j];
  }
  std::span<cplx> data() { return v_; }
  std::span<const cplx> data() const { return v_; }

  /// Header "# R Nr Ntheta", then "i j re im" rows.
  void save(const std::filesystem::path& path) const;
  static GridField load(const std::filesystem::path& path, std::shared_ptr<const PolarGrid> grid);

 private:
  std::shared_ptr<const PolarGrid> grid_;
  std::vector<cplx> v_;
};

/// c_{k,l} = integral of f conj(V~_{k,l}). Throws GridMismatch if f lives on a
/// grid with another layout than the basis.
SpectralCoefficients analyze(const GridField& f, const ModeBasis& basis);

/// f = sum c_{k,l} V~_{k,l}. Throws TruncationExceeded if c is wider than the basis.
GridField synthesize(const SpectralCoefficients& c, const ModeBasis& basis);

/// Trigonometric interpolation of f onto the same radial nodes with a finer
/// angular grid (zero padding in theta). Ntheta must be a power of two no
/// smaller than the current one.
GridField resample_angular(const GridField& f, int Ntheta);

/// Applies -d_rr - (1/r) d_r + k^2/r^2 + B0^2 r^2/4 + B0 k to each angular
/// mode e^{-ik theta} of f (FFT in theta, panel-spectral derivatives in r).
GridField apply_H_radial(const GridField& f, const FieldParams& params);

/// Relative residual ||H f - lambda f||_2 / ||lambda f||_2 on the grid.
double eigen_residual(const GridField& f, double lambda, const FieldParams& params);

/// Quadrature L^p norm; p = infinity gives the maximum over nodes.
double lp_norm(const GridField& f, double p);

enum class NormVariant { HomogeneousSobolev, InhomogeneousSobolev, Besov };

/// Sobolev variants need p = r = 2 (UnsupportedCombination otherwise) and
/// ignore the basis. Besov sums ||phi_0(sqrt H) f||_p^r + sum_{j>=1} 2^{jsr} ||phi_j(sqrt H) f||_p^r
/// with every piece synthesized on the basis grid.
double sobolev_besov_norm(const SpectralCoefficients& c, const ModeBasis& basis, double s, double p,
                          double r, NormVariant variant);

}  // namespace magdirac
