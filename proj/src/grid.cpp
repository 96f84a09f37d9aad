#include "magdirac/grid.hpp"

#include <gsl/gsl_integration.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <string>

#include "magdirac/error.hpp"

namespace magdirac {

namespace {

struct GlTable {
  explicit GlTable(int n) : t(gsl_integration_glfixed_table_alloc(static_cast<size_t>(n))) {}
  ~GlTable() { gsl_integration_glfixed_table_free(t); }
  GlTable(const GlTable&) = delete;
  GlTable& operator=(const GlTable&) = delete;
  gsl_integration_glfixed_table* t;
};

// Lagrange differentiation matrix on arbitrary distinct nodes (barycentric form).
std::vector<double> diff_matrix(std::span<const double> x) {
  const std::size_t n = x.size();
  std::vector<double> bw(n, 1.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) bw[i] /= (x[i] - x[j]);
  std::vector<double> D(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double diag = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const double v = (bw[j] / bw[i]) / (x[i] - x[j]);
      D[i * n + j] = v;
      diag -= v;
    }
    D[i * n + i] = diag;
  }
  return D;
}

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

template <class T>
void differentiate_impl(const PolarGrid& g, const std::vector<std::vector<double>>& diff,
                        std::span<const T> f, std::span<T> df) {
  const auto panels = g.panels();
  for (std::size_t p = 0; p < panels.size(); ++p) {
    const auto& P = panels[p];
    const auto& D = diff[p];
    for (int i = 0; i < P.size; ++i) {
      T acc{};
      const double* row = &D[static_cast<std::size_t>(i) * P.size];
      for (int j = 0; j < P.size; ++j) acc += row[j] * f[P.begin + j];
      df[P.begin + i] = acc;
    }
  }
}

}  // namespace

double PolarGrid::theta(int j) const { return dtheta() * j; }

double PolarGrid::dtheta() const { return 2.0 * std::numbers::pi / ntheta_; }

void PolarGrid::differentiate(std::span<const std::complex<double>> f,
                              std::span<std::complex<double>> df) const {
  differentiate_impl(*this, diff_, f, df);
}

void PolarGrid::differentiate(std::span<const double> f, std::span<double> df) const {
  differentiate_impl(*this, diff_, f, df);
}

bool PolarGrid::same_layout(const PolarGrid& other) const {
  return R_ == other.R_ && Nr() == other.Nr() && ntheta_ == other.ntheta_;
}

PolarGrid build_polar_grid(double R, int Nr, int Ntheta) {
  if (!(R > 0.0) || !std::isfinite(R))
    throw Error(Errc::InvalidResolution, "R must be positive and finite");
  if (Nr < 16) throw Error(Errc::InvalidResolution, "Nr must be >= 16, got " + std::to_string(Nr));
  if (Ntheta < 8 || !is_power_of_two(Ntheta))
    throw Error(Errc::InvalidResolution,
                "Ntheta must be a power of two >= 8, got " + std::to_string(Ntheta));

  PolarGrid g;
  g.R_ = R;
  g.ntheta_ = Ntheta;
  const int np = (Nr + PolarGrid::kPanelNodes - 1) / PolarGrid::kPanelNodes;
  const int base = Nr / np;
  const int extra = Nr % np;
  const double width = R / np;
  g.r_.reserve(Nr);
  g.w_.reserve(Nr);
  int begin = 0;
  for (int p = 0; p < np; ++p) {
    const int n = base + (p < extra ? 1 : 0);
    RadialPanel panel{begin, n, p * width, (p + 1 == np) ? R : (p + 1) * width};
    GlTable table(n);
    std::vector<double> x(n);
    for (int i = 0; i < n; ++i) {
      double xi = 0.0;
      double wi = 0.0;
      gsl_integration_glfixed_point(panel.a, panel.b, static_cast<size_t>(i), &xi, &wi, table.t);
      x[i] = xi;
      g.r_.push_back(xi);
      g.w_.push_back(wi);
    }
    g.diff_.push_back(diff_matrix(x));
    g.panels_.push_back(panel);
    begin += n;
  }
  for (std::size_t i = 1; i < g.r_.size(); ++i) {
    if (!(g.r_[i] > g.r_[i - 1]))
      throw Error(Errc::InvalidResolution, "radial nodes are not increasing");
  }
  return g;
}

}  // namespace magdirac
