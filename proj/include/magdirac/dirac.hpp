#pragma once

#include <filesystem>
#include <vector>

#include "magdirac/fields.hpp"
#include "magdirac/propagators.hpp"

namespace magdirac {

/// Spinor in the eigenbasis. Upper mode index k pairs with lower index k-1
/// (angular factors e^{-ik theta} and e^{-i(k-1) theta}); both components
/// share truncation and parameters.
struct SpinorCoefficients {
  SpectralCoefficients upper;
  SpectralCoefficients lower;

  SpinorCoefficients() = default;
  SpinorCoefficients(const FieldParams& params, int K, int L)
      : upper(params, K, L), lower(params, K, L) {}
  SpinorCoefficients(SpectralCoefficients u, SpectralCoefficients l);

  const FieldParams& params() const { return upper.params(); }
  double norm() const;
};

SpinorCoefficients operator+(const SpinorCoefficients& a, const SpinorCoefficients& b);
SpinorCoefficients operator-(const SpinorCoefficients& a, const SpinorCoefficients& b);
SpinorCoefficients operator*(cplx s, const SpinorCoefficients& a);
cplx inner(const SpinorCoefficients& a, const SpinorCoefficients& b);

/// Image of one basis mode under D- (upper -> lower) or D+ (lower -> upper).
struct LadderEntry {
  bool zero = false;      // image vanishes identically
  bool in_range = true;   // target inside the truncation
  ModeIndex target{};
  cplx coef = 0.0;
};

struct LadderTable {
  FieldParams params;
  int K = 0;
  int L = 0;
  std::vector<LadderEntry> minus;  // per upper mode, flat layout
  std::vector<LadderEntry> plus;   // per lower mode, flat layout
  double max_leakage = 0.0;        // largest off-target fraction seen while building

  std::size_t flat(ModeIndex idx) const { return static_cast<std::size_t>(idx.k + K) * (L + 1) + idx.ell; }
  /// Plain text, one "k ell target_k target_ell re im" row per mode and direction.
  void save(const std::filesystem::path& path) const;
};

/// Applies the radial forms i(d_r + k/r + B0 r/2) (upper index k) and
/// i(d_r - k/r - B0 r/2) (lower index k) to every sampled profile, projects
/// the result onto the target angular index and keeps the single target.
/// LeakageError when more than 1e-8 of the image lands elsewhere.
LadderTable ladder_coefficients(const ModeBasis& basis);

/// Closed-form table: D- maps upper (k,l) to lower (k-1,l-1) with -i sqrt(2 l B0)
/// for k <= 0 and to (k-1,l) with i sqrt((2l+2k) B0) for k >= 1; D+ is the adjoint.
LadderTable ladder_coefficients_exact(const FieldParams& params, int K, int L);

/// D s with D = -[[-m, D+], [D-, m]]: upper' = m u - D+ v, lower' = -m v - D- u.
/// TruncationOverflow if a nonzero coefficient maps outside the truncation.
SpinorCoefficients apply_dirac(const SpinorCoefficients& s, const LadderTable& table);

/// D^2 s against diag(H + m^2 - B0, H + m^2 + B0) s, relative l2.
double squaring_residual(const SpinorCoefficients& s, const LadderTable& table);

/// Modes whose double ladder image stays inside the truncation.
bool is_interior(ModeIndex idx, int K, int L);

/// e^{sign i t D} s = cos(t|D|) s + sign i sin(t|D|)/|D| D s, with |D| acting as
/// kg_frequency(Up) on the upper and kg_frequency(Down) on the lower component.
SpinorCoefficients evolve_dirac(double t, const SpinorCoefficients& s, const LadderTable& table,
                                PhaseSign sign = PhaseSign::Negative);

/// Dyadic projection phi_j(sqrt(D^2 - m^2 + B0)): the scalar projection on the
/// upper component and phi_j(sqrt(H + 2 B0)) on the lower, so that it commutes
/// with D and the Dirac flow.
SpinorCoefficients lp_project(int j, const SpinorCoefficients& s);

struct NormIdentity {
  double lhs = 0.0;        // ||D s||^2
  double rhs = 0.0;        // <(H - B0) u, u> + <(H + B0) v, v>
  double h1_norm_sq = 0.0; // ||s||^2 in H^1 = ||(H + m^2 + B0)^{1/2} s||^2
  bool bound_holds = false;
};

/// Requires m = 0 (InvalidArgument otherwise).
NormIdentity dirac_norm_identity(const SpinorCoefficients& s, const LadderTable& table);

struct DeficiencyVerdict {
  std::vector<int> window1;       // 0 < |k| + 1 < 2
  std::vector<int> window2;       // 0 < |k+1| + 1 < 2
  std::vector<int> intersection;
};

DeficiencyVerdict deficiency_window_check();

/// Dense Hermitian matrix of D on one sector: upper (k, 0..Ls) plus the lower
/// modes (k-1, .) reached from them. Row-major, labels give (is_upper, mode).
struct SectorMatrix {
  int dim = 0;
  std::vector<cplx> a;
  std::vector<std::pair<bool, ModeIndex>> labels;
};

SectorMatrix sector_matrix(int k, int Ls, const LadderTable& table, double m);

}  // namespace magdirac
