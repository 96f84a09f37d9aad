#pragma once

#include <complex>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "magdirac/grid.hpp"

namespace magdirac {

struct FieldParams {
  double B0 = 1.0;
  double m = 0.0;

  void validate() const;
  bool operator==(const FieldParams&) const = default;
};

/// Landau mode. Index k carries the angular factor e^{-ik theta}; with that
/// choice the eigenvalue is (2l+1+|k|+k) B0 for H = (i grad + A)^2,
/// A = (B0/2)(-x2, x1), and the infinitely degenerate lowest level sits at k <= 0.
struct ModeIndex {
  int k = 0;
  int ell = 0;

  auto operator<=>(const ModeIndex&) const = default;
};

enum class Spin { Up, Down };

double eigenvalue(ModeIndex idx, const FieldParams& params);

/// sqrt(lambda + m^2 - B0) for Up, sqrt(lambda + m^2 + B0) for Down.
double kg_frequency(ModeIndex idx, const FieldParams& params, Spin spin);

/// Unnormalized radial profile r^{|k|} e^{-B0 r^2/4} P_{k,l}(B0 r^2/2).
double radial_profile(ModeIndex idx, double B0, double r);

/// Unnormalized V_{k,l}(x) = radial_profile * e^{-ik theta}. Returns the P
/// value at the origin for k = 0 and 0 for k != 0.
std::complex<double> eigenfunction_eval(ModeIndex idx, const FieldParams& params, double x1,
                                        double x2);

/// Number of j in [-K, K] with (lambda - j B0)/(2 B0) - (|j|+1)/2 a nonnegative integer.
int multiplicity_formula(double lambda, const FieldParams& params, int K);

/// Number of pairs |k| <= K, l <= L with |lambda_{k,l} - lambda| < 1e-9 B0.
int multiplicity_brute(double lambda, const FieldParams& params, int K, int L);

/// ||V_{k,l}||_{L^2(R^2)} by radial quadrature on `grid`; throws GridTooCoarse if
/// doubling the radial nodes moves it by more than 1e-8 relative or the
/// Gaussian tail beyond R is not negligible.
double norm_constant(ModeIndex idx, double B0, const PolarGrid& grid);

/// Smallest half-integer R with R^{n} e^{-B0 R^2/4} below 1e-13 of its peak,
/// n = K + 2L (the highest-degree profile in the truncation).
double default_radius(double B0, int K, int L);

/// Smallest power of two that is >= max(requested, 4K+4).
int effective_ntheta(int requested, int K);

/// Sampled, normalized Landau eigenfunctions for |k| <= K, l <= L.
/// Flat layout: (k + K) * (L + 1) + l.
class ModeBasis {
 public:
  static ModeBasis build(const FieldParams& params, int K, int L,
                         std::shared_ptr<const PolarGrid> grid);

  const FieldParams& params() const { return params_; }
  int K() const { return K_; }
  int L() const { return L_; }
  const PolarGrid& grid() const { return *grid_; }
  std::shared_ptr<const PolarGrid> grid_ptr() const { return grid_; }

  std::size_t mode_count() const { return norms_.size(); }
  bool contains(ModeIndex idx) const;
  std::size_t flat(ModeIndex idx) const;
  ModeIndex index(std::size_t flat) const;

  double eigenvalue(ModeIndex idx) const;
  double norm_constant(ModeIndex idx) const { return norms_[flat(idx)]; }
  /// Normalized radial samples on the grid nodes.
  std::span<const double> profile(ModeIndex idx) const;
  /// All profiles of angular index k, rows l = 0..L.
  std::span<const double> profiles_of(int k) const;
  /// Every profile, flat-layout rows of Nr samples.
  std::span<const double> all_profiles() const { return profiles_; }
  /// Normalized radial function at arbitrary r.
  double normalized_radial(ModeIndex idx, double r) const;
  /// Normalized eigenfunction at a point.
  std::complex<double> eval(ModeIndex idx, double x1, double x2) const;

  /// Plain-text cache: `modes` holds one "k ell lambda norm" row per mode,
  /// `radial` one "k ell v_0 ... v_{Nr-1}" row of normalized samples per mode.
  void save(const std::filesystem::path& modes, const std::filesystem::path& radial) const;
  /// Returns nullopt when the files are missing or their metadata differs
  /// from the requested parameters.
  static std::optional<ModeBasis> load(const std::filesystem::path& modes,
                                       const std::filesystem::path& radial,
                                       const FieldParams& params, int K, int L,
                                       std::shared_ptr<const PolarGrid> grid);

 private:
  FieldParams params_;
  int K_ = 0;
  int L_ = 0;
  std::shared_ptr<const PolarGrid> grid_;
  std::vector<double> norms_;
  std::vector<double> profiles_;  // mode_count x Nr
};

}  // namespace magdirac
