#pragma once

// Independent reference integrators used by the unit and acceptance tests.
// They share no code with the library's localisation engine.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

namespace oracle {

struct Rule {
  std::vector<double> x, w;
};

// Gauss-Legendre on [a, b] via Golub-Welsch-free Newton iteration.
inline Rule gauss(int n, double a, double b) {
  Rule r;
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5)), d = 0.0;
    for (int it = 0; it < 200; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      d = n * (x * p1 - p0) / (x * x - 1.0);
      const double step = p1 / d;
      x -= step;
      if (std::abs(step) < 1e-15) break;
    }
    r.x.push_back(0.5 * (a + b) + 0.5 * (b - a) * x);
    r.w.push_back((b - a) / ((1.0 - x * x) * d * d));
  }
  return r;
}

// Composite rule on consecutive breakpoints with `panels` panels each.
inline Rule composite(const std::vector<double>& cuts, int panels, int n) {
  Rule out;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double h = (cuts[i + 1] - cuts[i]) / panels;
    for (int p = 0; p < panels; ++p) {
      const Rule g = gauss(n, cuts[i] + p * h, cuts[i] + (p + 1) * h);
      out.x.insert(out.x.end(), g.x.begin(), g.x.end());
      out.w.insert(out.w.end(), g.w.begin(), g.w.end());
    }
  }
  return out;
}

inline double integrate(const std::function<double(double)>& f, const std::vector<double>& cuts, int panels = 16,
                        int n = 24) {
  const Rule r = composite(cuts, panels, n);
  double s = 0.0;
  for (std::size_t i = 0; i < r.x.size(); ++i) s += r.w[i] * f(r.x[i]);
  return s;
}

// Reference cutoff profile written out independently: 1 on [0,1], the
// quintic ramp on [1,2], 0 beyond, raised to the power e (normalised radius).
inline double ramp(double s) {
  if (s <= 1.0) return 1.0;
  if (s >= 2.0) return 0.0;
  const double t = s - 1.0;
  return 1.0 - (6 * t * t * t * t * t - 15 * t * t * t * t + 10 * t * t * t);
}
inline double ramp_d1(double s) {
  if (s <= 1.0 || s >= 2.0) return 0.0;
  const double t = s - 1.0;
  return -(30 * t * t * t * t - 60 * t * t * t + 30 * t * t);
}
inline double ramp_d2(double s) {
  if (s <= 1.0 || s >= 2.0) return 0.0;
  const double t = s - 1.0;
  return -(120 * t * t * t - 180 * t * t + 60 * t);
}

// Integral over the ball B(c, 2R) in 3D in spherical coordinates:
// radius by composite Gauss-Legendre split at R, polar angle by
// Gauss-Legendre in cos(theta), azimuth by the periodic trapezoid rule.
inline double ball3(const std::function<double(double x, double y, double z, double r)>& f, const double c[3], double R,
                    int radial_panels = 8, int polar = 48, int azimuth = 96) {
  const Rule rr = composite({0.0, R, 2.0 * R}, radial_panels, 20);
  const Rule mu = gauss(polar, -1.0, 1.0);
  double s = 0.0;
  for (std::size_t i = 0; i < rr.x.size(); ++i) {
    const double r = rr.x[i];
    double shell = 0.0;
    for (std::size_t j = 0; j < mu.x.size(); ++j) {
      const double ct = mu.x[j], st = std::sqrt(1.0 - ct * ct);
      double ring = 0.0;
      for (int k = 0; k < azimuth; ++k) {
        const double ph = 2.0 * std::numbers::pi * k / azimuth;
        ring += f(c[0] + r * st * std::cos(ph), c[1] + r * st * std::sin(ph), c[2] + r * ct, r);
      }
      shell += mu.w[j] * ring * 2.0 * std::numbers::pi / azimuth;
    }
    s += rr.w[i] * r * r * shell;
  }
  return s;
}

// E0 and both P0 parts of the single mode omega = A sin(k x) e_z for the
// quartic-powered cutoffs (R0, T), by nested Gauss-Legendre: the radial
// weight is integrated over planes x = const, then over x.
struct SingleMode {
  double E0, P0_gradient, P0_final;
  double sigma0() const { return std::sqrt(E0 / (P0_gradient + P0_final)); }
};

inline SingleMode single_mode(double k, double A, double R0, double T) {
  const double pi = std::numbers::pi;
  const auto plane = [&](double x, double e) {
    const double a = std::abs(x);
    if (a >= 2 * R0) return 0.0;
    std::vector<double> cuts{a};
    if (a < R0) cuts.push_back(R0);
    cuts.push_back(2 * R0);
    return 2 * pi * integrate([&](double r) { return std::pow(std::pow(ramp(r / R0), 4), e) * r; }, cuts, 4, 20);
  };
  // Panels scale with k so each holds a few oscillations at most.
  const int panels = std::max(24, static_cast<int>(3 * k));
  const auto space = [&](const std::function<double(double)>& gx, double e) {
    return integrate([&](double x) { return gx(x) * plane(x, e); }, {-2 * R0, -R0, 0.0, R0, 2 * R0}, panels, 20);
  };
  const auto time = [&](double e) {
    return integrate([&](double t) { return std::pow(std::pow(1.0 - ramp(3 * t / T), 4), e); },
                     {0.0, T / 3, 2 * T / 3, T}, 8, 20);
  };
  const double half_sq = 0.5 * A * A, vol = T * R0 * R0 * R0;
  const auto sin2 = [&](double x) { return half_sq * std::pow(std::sin(k * x), 2); };
  return {time(0.5) * space(sin2, 0.5) / vol,
          time(1.0) * space([&](double x) { return A * A * k * k * std::pow(std::cos(k * x), 2); }, 1.0) / vol,
          space(sin2, 1.0) / vol};
}

}  // namespace oracle
