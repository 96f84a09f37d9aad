#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "magdirac/dirac.hpp"
#include "magdirac/fields.hpp"
#include "magdirac/propagators.hpp"

namespace magdirac {

/// Tabular result: CSV header, preformatted rows and key/value metadata.
struct EstimateReport {
  std::string name;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::pair<std::string, std::string>> metadata;

  std::string csv() const;
  void write_csv(const std::filesystem::path& path) const;
};

std::string format_number(double v);
std::string to_string(Spin spin);

struct FitResult {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // RMS of the fit in log space
  int points = 0;
};

/// Least squares y = slope x + intercept.
FitResult fit_line(std::span<const double> x, std::span<const double> y);

// ---- decay ----

/// Times either absolute or scaled (values are 2^j t for each j).
struct TimeGrid {
  bool scaled = true;
  std::vector<double> values;
};

/// n log-uniform values in [lo, hi].
TimeGrid log_time_grid(double lo, double hi, int n, bool scaled = true);

struct DecayOptions {
  PhaseSign sign = PhaseSign::Positive;
  int max_levels = 1 << 16;
  double samples_per_wavelength = 48.0;
  double fit_lo = 4.0;   // fitted regime in 2^j t
  double fit_hi = 64.0;
};

struct DecayRow {
  int j = 0;
  double t = 0.0;
  double B0 = 1.0;
  double m = 0.0;
  Spin spin = Spin::Up;
  double measured = 0.0;
  double bound = 0.0;
  double ratio = 0.0;
  bool fitted = false;  // inside 2^j t in [fit_lo, fit_hi] and 2^{-j} t <= pi/(8 B0)
};

struct DecayScan {
  std::vector<DecayRow> rows;
  FitResult fit;              // log(measured / 2^{2j}) against log(2^j t), fitted rows
  double ratio_spread = 0.0;  // max/min ratio over fitted rows
};

/// L^1 -> L^inf norm of phi(2^{-j} sqrt H) e^{sign i t sqrt(H + m^2 -/+ B0)}, i.e.
/// the supremum of its kernel, evaluated through the level series.
/// TruncationTooSmall if the block needs more than opts.max_levels levels.
double decay_kernel_sup(int j, double t, const FieldParams& params, Spin spin,
                        const DecayOptions& opts = {});

DecayScan decay_scan(std::span<const int> js, const TimeGrid& grid, const FieldParams& params,
                     Spin spin, const DecayOptions& opts = {});

EstimateReport to_report(const DecayScan& scan);

// ---- Bernstein ----

struct BernsteinRow {
  int j = 0;
  double q = 1.0;
  double p = 1.0;
  double measured = 0.0;
  double scale = 1.0;
  double ratio = 0.0;
};

/// Pairs must be (1,inf), (2,inf) or (2,2); UnsupportedPair otherwise.
std::vector<BernsteinRow> bernstein_scan(std::span<const int> js,
                                         std::span<const std::pair<double, double>> pairs,
                                         const FieldParams& params);

EstimateReport to_report(std::span<const BernsteinRow> rows);

/// max/min of `ratio` over the rows with the given pair.
double ratio_spread(std::span<const BernsteinRow> rows, double q, double p);

// ---- square function and norm equivalence ----

struct SquareFunctionResult {
  double lhs = 0.0;  // ||(sum_j |phi_j f|^2)^{1/2}||_p
  double rhs = 0.0;  // ||f||_p
  double ratio = 0.0;
};

SquareFunctionResult square_function_check(const GridField& f, double p, const ModeBasis& basis);

/// `count` states, each with `modes` random modes of the (K, L) truncation and
/// complex normal amplitudes; deterministic in the seed.
std::vector<SpectralCoefficients> random_family(const FieldParams& params, int K, int L, int count,
                                                int modes, std::uint64_t seed);

struct NormRow {
  int id = 0;
  double s = 0.0;
  double besov = 0.0;
  double sobolev_hom = 0.0;
  double sobolev_inhom = 0.0;
  double ratio1 = 0.0;  // besov / sobolev_hom
  double ratio2 = 0.0;  // besov / sobolev_inhom
};

std::vector<NormRow> norm_equivalence_scan(std::span<const SpectralCoefficients> family, double s,
                                           const ModeBasis& basis);

EstimateReport to_report(std::span<const NormRow> rows);

// ---- Strichartz ----

struct Admissibility {
  bool admissible = false;
  double s = 0.0;
};

/// 2/q <= 1/2 - 1/p, s = 1 - 1/q - 2/p; q may be infinity.
Admissibility admissible_check(double q, double p);

/// h^{-(alpha+sigma)(1/2-1/p) + 1/q}.
double keel_tao_bound(double alpha, double sigma, double q, double p, double h);

enum class Flow { HalfwaveUp, HalfwaveDown, Dirac };
std::string to_string(Flow flow);

struct StrichartzOptions {
  int min_time_nodes = 64;
  int max_time_nodes = 4096;
  double time_tol = 1e-3;         // relative change under doubling
  double nodes_per_unit = 4.0;    // radial nodes per unit length, times 2^j
  PhaseSign halfwave_sign = PhaseSign::Positive;
  PhaseSign dirac_sign = PhaseSign::Negative;
};

/// phi(2^{-j} sqrt H) delta_0 as upper-component data: c_{0,l} = phi_j(sqrt lambda) V~_{0,l}(0),
/// truncation K = 1 and L one past the last level in the block.
SpinorCoefficients point_source(int j, const FieldParams& params);

struct StrichartzRow {
  double q = 0.0;
  double p = 0.0;
  double s = 0.0;
  int j = 0;
  double T = 0.0;
  Flow flow = Flow::HalfwaveUp;
  double measured = 0.0;
  double reference = 0.0;       // 2^{js} ||f||_2
  double ratio = 0.0;
  double sobolev_ratio = 0.0;   // measured / ||f||_{H^s}, Dirac flow only (else NaN)
  int time_nodes = 0;
};

/// ||U(t) f||_{L^q([0,T]) L^p}. The halfwave flows act on the upper component.
/// Each component must sit on one angular index so |u| is radial; the L^p
/// norm is then a radial quadrature (p = 2 uses Parseval). NotAdmissible for
/// non-admissible pairs.
StrichartzRow strichartz_norm(double q, double p, int j, double T, const SpinorCoefficients& state,
                              Flow flow, const StrichartzOptions& opts = {});

EstimateReport to_report(std::span<const StrichartzRow> rows);

}  // namespace magdirac
