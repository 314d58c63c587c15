#include "cscope/cutoffs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cscope/error.hpp"

namespace cscope {
namespace {

void check_rho(double rho, const char* name) {
  if (!(rho > 0.5 && rho < 1.0))
    throw ValidationError(std::string(name) + " must lie in (1/2, 1), got " + std::to_string(rho));
}

// chi on normalised radius s and its s-derivatives.
double chi(double s) { return s <= 1.0 ? 1.0 : (s >= 2.0 ? 0.0 : 1.0 - smoothstep(s - 1.0)); }
double chi_d1(double s) { return (s <= 1.0 || s >= 2.0) ? 0.0 : -smoothstep_d1(s - 1.0); }
double chi_d2(double s) { return (s <= 1.0 || s >= 2.0) ? 0.0 : -smoothstep_d2(s - 1.0); }

double ipow(double x, double e) { return e == 1.0 ? x : std::pow(x, e); }

double ratio(double num, double den) {
  if (num == 0.0) return 0.0;
  if (den <= 0.0) return std::numeric_limits<double>::infinity();
  return num / den;
}

struct SpatialRatios {
  double grad = 0.0, lap = 0.0, outward = -std::numeric_limits<double>::infinity();
  bool finite = true;
};

// Samples the transition layer s in (1, 2) of a radial profile given on
// normalised radius.
SpatialRatios sample_radial(const RadialProfile& p, double rho, int dim, long samples) {
  SpatialRatios out;
  for (long k = 0; k < samples; ++k) {
    const double s = 1.0 + (k + 0.5) / static_cast<double>(samples);
    const double v = p.value(s);
    if (!(v > 0.0)) continue;
    const double d1 = p.d1(s), d2 = p.d2(s);
    const double lap = d2 + (dim - 1) * d1 / s;
    const double g = ratio(std::abs(d1), std::pow(v, rho));
    const double l = ratio(std::abs(lap), std::pow(v, 2.0 * rho - 1.0));
    if (!std::isfinite(g) || !std::isfinite(l)) out.finite = false;
    out.grad = std::max(out.grad, g);
    out.lap = std::max(out.lap, l);
    out.outward = std::max(out.outward, d1);
  }
  return out;
}

}  // namespace

double smoothstep(double s) {
  if (s <= 0.0) return 0.0;
  if (s >= 1.0) return 1.0;
  return s * s * s * (10.0 - 15.0 * s + 6.0 * s * s);
}

double smoothstep_d1(double s) {
  if (s <= 0.0 || s >= 1.0) return 0.0;
  const double t = s * (1.0 - s);
  return 30.0 * t * t;
}

double smoothstep_d2(double s) {
  if (s <= 0.0 || s >= 1.0) return 0.0;
  return 60.0 * s * (1.0 - s) * (1.0 - 2.0 * s);
}

int smoothness_power(double rho) {
  // The tolerance absorbs rounding in 1/(1 - rho) for values like 0.95.
  return static_cast<int>(std::ceil(1.0 / (1.0 - rho) - 1e-9));
}

double TemporalCutoff::value(double t) const { return ipow(smoothstep((t - T / 3.0) / (T / 3.0)), m); }

double TemporalCutoff::derivative(double t) const {
  const double s = (t - T / 3.0) / (T / 3.0);
  const double S = smoothstep(s);
  if (S <= 0.0) return 0.0;
  return m * ipow(S, m - 1) * smoothstep_d1(s) * 3.0 / T;
}

double TemporalCutoff::power(double t, double exponent) const {
  const double S = smoothstep((t - T / 3.0) / (T / 3.0));
  return S <= 0.0 ? 0.0 : std::pow(S, m * exponent);
}

double SpatialCutoff::profile(double r, double exponent) const {
  const double c = chi(r / R);
  return c <= 0.0 ? 0.0 : ipow(c, m * exponent);
}

double SpatialCutoff::profile_d1(double r, double exponent) const {
  const double s = r / R, c = chi(s);
  if (c <= 0.0 || s <= 1.0) return 0.0;
  const double e = m * exponent;
  return e * ipow(c, e - 1.0) * chi_d1(s) / R;
}

double SpatialCutoff::profile_d2(double r, double exponent) const {
  const double s = r / R, c = chi(s);
  if (c <= 0.0 || s <= 1.0) return 0.0;
  const double e = m * exponent, c1 = chi_d1(s), c2 = chi_d2(s);
  const double second = e == 1.0 ? 0.0 : e * (e - 1.0) * std::pow(c, e - 2.0) * c1 * c1;
  return (second + e * ipow(c, e - 1.0) * c2) / (R * R);
}

double SpatialCutoff::value(const Point& x) const {
  double r2 = 0.0;
  for (int a = 0; a < dim; ++a) r2 += (x[a] - x0[a]) * (x[a] - x0[a]);
  return profile(std::sqrt(r2), 1.0);
}

Point SpatialCutoff::gradient(const Point& x) const {
  double r2 = 0.0;
  for (int a = 0; a < dim; ++a) r2 += (x[a] - x0[a]) * (x[a] - x0[a]);
  const double r = std::sqrt(r2);
  Point g{0.0, 0.0, 0.0};
  if (r <= R) return g;
  const double d1 = profile_d1(r, 1.0);
  for (int a = 0; a < dim; ++a) g[a] = d1 * (x[a] - x0[a]) / r;
  return g;
}

double SpatialCutoff::radial_laplacian(double r) const {
  if (r <= R) return 0.0;
  return profile_d2(r, 1.0) + (dim - 1) * profile_d1(r, 1.0) / r;
}

double SpatialCutoff::laplacian(const Point& x) const {
  double r2 = 0.0;
  for (int a = 0; a < dim; ++a) r2 += (x[a] - x0[a]) * (x[a] - x0[a]);
  return radial_laplacian(std::sqrt(r2));
}

TemporalCutoff build_eta(double T, double rho1, int power) {
  if (!(T > 0.0) || !std::isfinite(T)) throw ValidationError("T must be positive");
  check_rho(rho1, "rho1");
  if (power < 0) throw ValidationError("cutoff power must be positive");
  return TemporalCutoff{T, rho1, power == 0 ? smoothness_power(rho1) : power};
}

SpatialCutoff build_psi(const Point& x0, double R, double rho2, int dim, int power) {
  if (!(R > 0.0) || !std::isfinite(R)) throw ValidationError("R must be positive");
  if (dim < 1 || dim > 3) throw ValidationError("dimension must be 1, 2 or 3");
  check_rho(rho2, "rho2");
  if (power < 0) throw ValidationError("cutoff power must be positive");
  return SpatialCutoff{x0, R, rho2, power == 0 ? smoothness_power(rho2) : power, dim};
}

CutoffCheckReport verify_cutoff_bounds(const TemporalCutoff& eta, const SpatialCutoff& psi, long samples) {
  if (samples < 1) throw ValidationError("sample count must be positive");
  CutoffCheckReport rep;
  rep.samples = samples;
  double worst = 0.0;
  for (long k = 0; k < samples; ++k) {
    const double t = eta.T / 3.0 + (k + 0.5) / static_cast<double>(samples) * eta.T / 3.0;
    const double v = eta.value(t);
    if (!(v > 0.0)) continue;
    const double q = ratio(eta.T * std::abs(eta.derivative(t)), std::pow(v, eta.rho));
    if (!std::isfinite(q)) rep.all_finite = false;
    worst = std::max(worst, q);
  }
  rep.measured_C0_eta = worst;

  const SpatialCutoff unit{Point{}, 1.0, psi.rho, psi.m, psi.dim};
  const RadialProfile p{[&](double s) { return unit.profile(s, 1.0); },
                        [&](double s) { return unit.profile_d1(s, 1.0); },
                        [&](double s) { return unit.profile_d2(s, 1.0); }};
  const auto sp = sample_radial(p, psi.rho, psi.dim, samples);
  rep.measured_C0_grad = sp.grad;
  rep.measured_C0_lap = sp.lap;
  rep.max_outward_slope = sp.outward;
  rep.all_finite = rep.all_finite && sp.finite;
  return rep;
}

CutoffCheckReport verify_radial_profile(const RadialProfile& profile, double rho, int dim, long samples) {
  if (samples < 1) throw ValidationError("sample count must be positive");
  if (!profile.value || !profile.d1 || !profile.d2) throw ValidationError("radial profile needs value, d1 and d2");
  CutoffCheckReport rep;
  rep.samples = samples;
  const auto sp = sample_radial(profile, rho, dim, samples);
  rep.measured_C0_grad = sp.grad;
  rep.measured_C0_lap = sp.lap;
  rep.max_outward_slope = sp.outward;
  rep.all_finite = sp.finite;
  return rep;
}

ScaleInequalityReport check_scale_inequality(const Field& f, const SpatialCutoff& psi, int order, long samples) {
  if (order != 1 && order != 2) throw ValidationError("order must be 1 or 2");
  if (f.components() != 1) throw ValidationError("scale inequality needs a scalar field");
  const Grid& g = f.grid();
  if (g.dim != psi.dim) throw ValidationError("field and cutoff dimensions differ");

  const double delta = order == 1 ? psi.rho : 2.0 * psi.rho - 1.0;
  Point axis{0.0, 0.0, 0.0};
  double lap = 0.0, rhs = 0.0;
  visit_ball(g, psi.x0, psi.support(), [&](std::size_t cell, const Point& d) {
    const double r = std::sqrt(d[0] * d[0] + d[1] * d[1] + d[2] * d[2]);
    const double v = f(cell, 0);
    rhs += std::abs(v) * psi.profile(r, delta);
    if (order == 1) {
      if (r > psi.R) {
        const double d1 = psi.profile_d1(r, 1.0);
        for (int a = 0; a < g.dim; ++a) axis[a] += v * d1 * d[a] / r;
      }
    } else {
      lap += v * psi.radial_laplacian(r);
    }
  });
  const double vol = g.cell_volume();
  ScaleInequalityReport rep;
  rep.order = order;
  if (order == 1) {
    for (int a = 0; a < g.dim; ++a) rep.lhs = std::max(rep.lhs, std::abs(axis[a]) * vol);
  } else {
    rep.lhs = std::abs(lap) * vol;
  }
  rep.rhs_integral = rhs * vol;
  const auto c0 = verify_cutoff_bounds(TemporalCutoff{1.0, psi.rho, psi.m}, psi, samples);
  rep.bound_C0 = order == 1 ? c0.measured_C0_grad : c0.measured_C0_lap;
  if (rep.rhs_integral == 0.0) {
    rep.degenerate = true;
    rep.holds = rep.lhs == 0.0;
    return rep;
  }
  rep.measured_c = rep.lhs * std::pow(psi.R, order) / rep.rhs_integral;
  rep.holds = rep.measured_c <= rep.bound_C0 * (1.0 + 1e-9);
  return rep;
}

SpatialCutoff dominated_cutoff(const SpatialCutoff& psi0, const Point& x_i, double R) {
  double r2 = 0.0;
  for (int a = 0; a < psi0.dim; ++a) r2 += (x_i[a] - psi0.x0[a]) * (x_i[a] - psi0.x0[a]);
  const double slack = psi0.R - std::sqrt(r2);
  if (!(slack > 0.0)) throw ValidationError("centre must lie inside the open integral ball");
  SpatialCutoff out = psi0;
  out.x0 = x_i;
  out.R = std::min(R, slack);
  return out;
}

double domination_margin(const SpatialCutoff& psi_i, const SpatialCutoff& psi0, const Grid& grid) {
  double margin = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < grid.cell_count(); ++c) {
    const Point x = grid.cell_center(c);
    margin = std::min(margin, psi0.value(x) - psi_i.value(x));
  }
  return margin;
}

}  // namespace cscope
