#pragma once

#include <functional>

#include "cscope/field.hpp"

namespace cscope {

/// Quintic smoothstep s^3 (10 - 15 s + 6 s^2), clamped to [0, 1].
double smoothstep(double s);
double smoothstep_d1(double s);
double smoothstep_d2(double s);

/// Smallest integer power m with m (1 - rho) >= 1.
int smoothness_power(double rho);

/// eta(t) = S((t - T/3) / (T/3))^m: zero up to T/3, one from 2T/3.
struct TemporalCutoff {
  double T = 1.0;
  double rho = 0.75;
  int m = 4;

  double value(double t) const;
  double derivative(double t) const;
  /// eta(t)^power, computed without forming eta for fractional powers.
  double power(double t, double exponent) const;
};

/// psi(x) = chi(|x - x0| / R)^m with chi = 1 on [0, 1], 1 - S(r - 1) on
/// [1, 2] and 0 beyond. Radial derivatives are with respect to the physical
/// radius.
struct SpatialCutoff {
  Point x0{0.0, 0.0, 0.0};
  double R = 1.0;
  double rho = 0.75;
  int m = 4;
  int dim = 3;

  double support() const { return 2.0 * R; }
  /// chi(r/R)^exponent and its first two radial derivatives.
  double profile(double r, double exponent) const;
  double profile_d1(double r, double exponent) const;
  double profile_d2(double r, double exponent) const;

  double value(const Point& x) const;
  Point gradient(const Point& x) const;
  double laplacian(const Point& x) const;
  /// Radial Laplacian psi'' + (dim - 1) psi' / r at radius r.
  double radial_laplacian(double r) const;
};

/// Throws ValidationError unless T > 0 and rho in (1/2, 1). power = 0 selects
/// smoothness_power(rho).
TemporalCutoff build_eta(double T, double rho1, int power = 0);
SpatialCutoff build_psi(const Point& x0, double R, double rho2, int dim, int power = 0);

/// Measured suprema of the normalised ratios over the positive set:
///   eta:  T |eta'| / eta^rho
///   grad: R |psi'| / psi^rho
///   lap:  R^2 |Lap psi| / psi^(2 rho - 1)
/// by dense uniform sampling of the transition layer. Unbounded ratios show
/// up as large values that grow with the sample count; non-finite samples
/// are reported as infinity.
struct CutoffCheckReport {
  double measured_C0_eta = 0.0;
  double measured_C0_grad = 0.0;
  double measured_C0_lap = 0.0;
  long samples = 0;
  bool all_finite = true;
  /// Largest outward radial slope seen (must be <= 0 for inward gradients).
  double max_outward_slope = 0.0;
};

CutoffCheckReport verify_cutoff_bounds(const TemporalCutoff& eta, const SpatialCutoff& psi, long samples = 1000000);

/// User-supplied radial profile p(s) on normalised radius s = r/R with
/// derivatives, positive on [0, 2). Same measurements as above for the
/// spatial part (eta column left at 0).
struct RadialProfile {
  std::function<double(double)> value, d1, d2;
};
CutoffCheckReport verify_radial_profile(const RadialProfile& profile, double rho, int dim, long samples = 1000000);

/// Measured constant of |(D^a f, psi)| <= (c / R^|a|) (|f|, psi^delta) with
/// delta(1) = rho, delta(2) = 2 rho - 1 and the derivative moved onto psi
/// (order 1: largest axis component of (f, grad psi); order 2: (f, Lap psi)).
/// Midpoint quadrature over the cells of supp psi.
struct ScaleInequalityReport {
  int order = 1;
  double lhs = 0.0;
  double rhs_integral = 0.0;  // (|f|, psi^delta)
  double measured_c = 0.0;
  double bound_C0 = 0.0;      // measured constant of the cutoff for this order
  bool degenerate = false;    // (|f|, psi^delta) == 0
  bool holds = true;
};
ScaleInequalityReport check_scale_inequality(const Field& f, const SpatialCutoff& psi, int order,
                                             long samples = 200000);

/// Cutoff at x_i dominated by the integral-scale cutoff psi0 (psi_i <= psi0
/// everywhere): radius min(R, R0 - |x_i|). Throws if x_i is not inside the
/// open ball B(0, R0).
SpatialCutoff dominated_cutoff(const SpatialCutoff& psi0, const Point& x_i, double R);

/// min over grid cells of psi0 - psi_i (>= 0 when domination holds).
double domination_margin(const SpatialCutoff& psi_i, const SpatialCutoff& psi0, const Grid& grid);

}  // namespace cscope
