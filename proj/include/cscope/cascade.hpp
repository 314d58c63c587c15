#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cscope/covers.hpp"
#include "cscope/field.hpp"

namespace cscope {

/// Relative vorticity floor: directions are undefined where
/// |omega| < kVorticityFloor * max |omega|.
inline constexpr double kVorticityFloor = 1e-8;

/// Which points take part in a coherence computation.
struct CoherenceDomain {
  /// Optional per-cell masks (empty: all cells).
  std::vector<std::uint8_t> x_mask;
  std::vector<std::uint8_t> y_mask;
  /// Periodic axes measure distance to the nearest image; otherwise offsets
  /// are plain index differences inside the grid.
  bool minimum_image = true;
};

struct CoherenceField {
  Field rho;                            // 0 where undefined or no admissible y
  std::vector<std::uint8_t> undefined;  // |omega(x)| below the floor
  double floor = 0.0;                   // absolute vorticity floor used
  double sup = 0.0;                     // max of rho over admissible x
  std::size_t admissible_points = 0;    // x with a defined direction in the x mask
  std::size_t pairs_examined = 0;       // pairs evaluated before the scan stopped
};

/// The pair value |xi_x x xi_y| / d^gamma, with d^gamma taken as sqrt(d) for
/// gamma = 1/2.
double coherence_ratio(double cross_norm, double d, double gamma);

/// rho_{gamma,r}(x) = sup over grid points y != x with |x - y| <= r, |omega(y)|
/// above the floor (and in the y mask) of |xi(x) x xi(y)| / |x - y|^gamma,
/// xi = omega / |omega|. Distances come from integer cell offsets. Offsets are visited nearest first and the scan stops
/// once 1/|x - y|^gamma cannot beat the current best, which leaves the
/// supremum unchanged. r = infinity means all pairs.
CoherenceField coherence_measure(const Field& omega, double gamma, double r, double floor_rel = kVorticityFloor,
                                 const CoherenceDomain& domain = {});

struct CoherenceReport {
  double gamma = 0.5;
  double r = 0.0;  // pair radius (infinity: all pairs in the extended ball)
  double M = 0.0;
  double floor_rel = kVorticityFloor;
  double C1_user = 1.0;
  double C1_meas = 0.0;
  bool holds = true;
  std::size_t admissible_points = 0;  // summed over distinct snapshots
  std::size_t admissible_pairs = 0;   // summed over distinct snapshots
  double curl_residual = 0.0;         // max |curl u - omega| / max |omega|
  std::vector<double> per_snapshot;
};

/// (A1): x in B(0, 2 R0) with Frobenius |grad u|(x) > M, y in
/// B(0, 2 R0 + R0^(2/3)), gamma = 1/2, all such pairs, over every snapshot.
/// Throws ValidationError when curl u and omega disagree by more than
/// curl_tolerance (relative).
CoherenceReport check_A1(const FlowSeries& flow, double R0, double M, double C1_user,
                         double curl_tolerance = 1e-6);

/// Integral of |omega|^2 rho^2_{1/2, 2R} over B(x0, 2R) (cells whose centres
/// lie in the ball) and the time window (max(0, T - 4R^2), T).
double hybrid_integral(const FieldSeries& omega, const Point& x0, double R);

struct CascadeParams {
  double R0 = 1.0;
  double rho = 0.75;  // single exponent: rho1 = rho2 = rho
  double beta = 0.1;
  double C1 = 1.0;
  double C2 = 1.0;
  double M = 1.0;
  int K1 = 30;
  int K2 = 64;

  void validate() const;
  double kstar() const;
};

struct VorticityDiagnostics {
  double E0 = 0.0;
  double P0 = 0.0;
  double P0_gradient = 0.0;  // the |grad omega|^2 part
  double P0_final = 0.0;     // the final-time enstrophy part
  std::optional<double> sigma0;
  double B_T = 0.0;
  bool degenerate = false;  // P0 == 0
};

/// E0 = (1/T)(1/R0^3) int int 1/2 |omega|^2 phi0^(2 rho - 1)
/// P0 = (1/T)(1/R0^3) [int int |grad omega|^2 phi0 + 1/2 int |omega(T)|^2 psi0]
/// sigma0 = sqrt(E0 / P0); B_T = max over snapshots of the L1 norm on the grid.
VorticityDiagnostics diagnostics(const FieldSeries& omega, double rho, double R0);

struct A2Report {
  bool defined = false;
  bool holds = false;
  double sigma0 = 0.0;
  double beta = 0.0;
  double R0 = 0.0;
  double margin = 0.0;  // beta R0 - sigma0
};
/// Throws ValidationError if sigma0 is undefined.
A2Report check_A2(const VorticityDiagnostics& diag, double beta, double R0);

struct A3Report {
  double localization_integral = 0.0;  // int_0^T int_{B(0, 2R0 + R0^(2/3))} |omega|^2
  double C2 = 1.0;
  bool localization_holds = false;
  std::optional<double> modulation_ratio;  // empty when 0/0
  double final_enstrophy = 0.0;            // int |omega(T)|^2 psi0
  double sup_enstrophy = 0.0;              // max over snapshots
  bool modulation_holds = false;
  bool modulation_degenerate = false;
  std::vector<std::string> warnings;
};
A3Report check_A3(const FieldSeries& omega, double R0, double C2, double rho = 0.75);

/// Time-averaged local flux per unit mass at x_i, scale R, evaluation time
/// t_eval (default T): (1/t)(1/R^3) int_0^t int 1/2 |omega|^2 (u . grad phi_i).
double local_flux(const FlowSeries& flow, const Point& x_i, double R, double rho = 0.75, double t_eval = -1.0);

struct FluxPoint {
  double R = 0.0;
  double Phi = 0.0;
  double Psi = 0.0;  // R^3 * Phi, same stored quantity
  std::size_t n = 0;
};
struct FluxCurve {
  std::vector<FluxPoint> points;
  std::vector<Cover> covers;
};

/// <Phi>_R over a cover (pairwise mean over sorted centres) and <Psi>_R.
FluxPoint ensemble_flux(const FlowSeries& flow, const Cover& cover, double rho = 0.75);
/// Uniform covers of B(0, R0) at each scale.
FluxCurve flux_curve(const FlowSeries& flow, std::span<const double> scales, const CascadeParams& params);

struct BalanceTerms {
  double t_eval = 0.0;
  double flux = 0.0;       // int_0^t int 1/2 |omega|^2 u . grad phi_i
  double final_enstrophy = 0.0;
  double palinstrophy = 0.0;
  double transport = 0.0;  // int_0^t int 1/2 |omega|^2 (phi_s + Lap phi)
  double stretching = 0.0; // int_0^t int (omega . grad) u . omega phi_i
  double residual = 0.0;   // flux - (final + palinstrophy - transport - stretching)
  double scale = 0.0;      // largest term magnitude
  double normalized_residual = 0.0;
};
BalanceTerms balance_residual(const FlowSeries& flow, const Point& x_i, double R, double rho = 0.75,
                              double t_eval = -1.0);

struct ScaleVerdict {
  double R = 0.0;
  double Phi = 0.0;
  bool in_range = false;
  bool holds = false;
  double margin = 0.0;  // min(log(Phi / lower), log(upper / Phi)); -inf if Phi <= 0
};
struct CascadeVerdict {
  double range_lo = 0.0;  // sigma0 / beta
  double range_hi = 0.0;  // R0
  bool empty_range = false;
  double kstar = 0.0;
  double lower = 0.0;  // P0 / (4 K*)
  double upper = 0.0;  // 4 K* P0
  std::vector<ScaleVerdict> scales;
  std::optional<double> witness;  // first failing scale
  double worst_margin = 0.0;
  bool verified = false;
  std::string summary;
};
CascadeVerdict verify_cascade(const FluxCurve& flux, const VorticityDiagnostics& diag, double kstar, double beta,
                              double R0);

struct LocalityRow {
  double r = 0.0;
  double R = 0.0;
  std::optional<int> dyadic_k;  // r = 2^k R
  double ratio = 0.0;           // <Psi>_r / <Psi>_R
  double identity_rhs = 0.0;    // (r/R)^3 <Phi>_r / <Phi>_R
  double band_lo = 0.0;
  double band_hi = 0.0;
  bool inside = false;
  bool zero_denominator = false;
};
/// All ordered pairs of curve scales with r <= R.
std::vector<LocalityRow> locality_ratios(const FluxCurve& flux, double kstar);

}  // namespace cscope
