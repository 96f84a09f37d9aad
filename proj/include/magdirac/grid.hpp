#pragma once

#include <complex>
#include <span>
#include <vector>

namespace magdirac {

/// One Gauss-Legendre panel of the composite radial rule.
struct RadialPanel {
  int begin = 0;
  int size = 0;
  double a = 0.0;
  double b = 0.0;
};

/// Composite Gauss-Legendre nodes on [0,R] (panels of about 32 nodes) times a
/// uniform angular grid. Weights integrate in dr; multiply by r for area.
class PolarGrid {
 public:
  static constexpr int kPanelNodes = 32;

  double R() const { return R_; }
  int Nr() const { return static_cast<int>(r_.size()); }
  int Ntheta() const { return ntheta_; }
  std::size_t size() const { return r_.size() * static_cast<std::size_t>(ntheta_); }

  std::span<const double> r() const { return r_; }
  std::span<const double> weights() const { return w_; }
  double theta(int j) const;
  double dtheta() const;
  std::span<const RadialPanel> panels() const { return panels_; }

  /// d/dr of radial samples by exact differentiation of the per-panel
  /// interpolating polynomial.
  void differentiate(std::span<const std::complex<double>> f,
                     std::span<std::complex<double>> df) const;
  void differentiate(std::span<const double> f, std::span<double> df) const;

  bool same_layout(const PolarGrid& other) const;

 private:
  friend PolarGrid build_polar_grid(double R, int Nr, int Ntheta);

  double R_ = 0.0;
  int ntheta_ = 0;
  std::vector<double> r_;
  std::vector<double> w_;
  std::vector<RadialPanel> panels_;
  std::vector<std::vector<double>> diff_;  // row-major size x size per panel
};

/// Throws InvalidResolution unless R > 0, Nr >= 16, Ntheta >= 8 and a power of two.
PolarGrid build_polar_grid(double R, int Nr, int Ntheta);

}  // namespace magdirac
