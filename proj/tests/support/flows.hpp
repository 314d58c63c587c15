#pragma once

// Small field builders and a brute-force coherence oracle shared by the
// unit and acceptance tests.

#include <algorithm>
#include <array>
#include <cstdint>
#include <cmath>
#include <functional>
#include <memory>
#include <vector>

#include "cscope/field.hpp"

namespace testflows {

using cscope::Field;
using cscope::FieldPtr;
using cscope::Grid;
using cscope::Point;

inline FieldPtr sample(const Grid& g, int comps, double t, const std::function<void(const Point&, double*)>& f) {
  auto out = std::make_shared<Field>(g, comps, t);
  for (std::size_t i = 0; i < g.cell_count(); ++i) f(g.cell_center(i), &(*out)(i, 0));
  return out;
}

// Direction rotating in the x-z plane at rate theta per unit length in y,
// magnitude 1 + a cos(x).
inline FieldPtr rotating(const Grid& g, double theta, double a = 0.0) {
  return sample(g, 3, 0.0, [&](const Point& x, double* v) {
    const double m = 1.0 + a * std::cos(x[0]);
    v[0] = m * std::sin(theta * x[1]);
    v[1] = 0.0;
    v[2] = m * std::cos(theta * x[1]);
  });
}

// All-pairs supremum of |xi(x) x xi(y)| / d^gamma over y != x with d <= r,
// written without neighbour search or pruning. Distances use the absolute
// index offsets (nearest image when `wrap`), d = sqrt(sum (a_i h_i)^2), and
// d^gamma = sqrt(d) for gamma = 1/2.
struct BruteForce {
  std::vector<double> rho;
  std::vector<bool> undefined;
};

inline BruteForce brute_force_coherence(const Field& om, double gamma, double r, double floor_rel, bool wrap,
                                        const std::vector<std::uint8_t>& xmask = {},
                                        const std::vector<std::uint8_t>& ymask = {},
                                        const std::vector<std::size_t>& only = {}) {
  const Grid& g = om.grid();
  const std::size_t n = g.cell_count();
  double peak = 0.0;
  std::vector<double> nrm(n);
  for (std::size_t i = 0; i < n; ++i) {
    nrm[i] = std::sqrt(om(i, 0) * om(i, 0) + om(i, 1) * om(i, 1) + om(i, 2) * om(i, 2));
    peak = std::max(peak, nrm[i]);
  }
  const double floor = floor_rel * peak;
  BruteForce out{std::vector<double>(n, 0.0), std::vector<bool>(n, false)};
  std::vector<std::array<double, 3>> xi(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.undefined[i] = !(nrm[i] > 0.0) || nrm[i] < floor;
    if (!out.undefined[i])
      for (int c = 0; c < 3; ++c) xi[i][c] = om(i, c) / nrm[i];
  }
  std::vector<std::size_t> xs = only;
  if (xs.empty())
    for (std::size_t i = 0; i < n; ++i) xs.push_back(i);
  const double rr = std::isfinite(r) ? r * (1.0 + 1e-12) : r;
  for (std::size_t x : xs) {
    if (out.undefined[x] || (!xmask.empty() && !xmask[x])) continue;
    const auto ix = g.unflatten(x);
    double best = 0.0;
    for (std::size_t y = 0; y < n; ++y) {
      if (y == x || out.undefined[y] || (!ymask.empty() && !ymask[y])) continue;
      const auto iy = g.unflatten(y);
      double e[3];
      for (int a = 0; a < 3; ++a) {
        int d = std::abs(iy[a] - ix[a]);
        if (wrap && g.periodic[a]) d = std::min(d, g.resolution[a] - d);
        e[a] = d * g.spacing(a);
      }
      const double dist = std::sqrt(e[0] * e[0] + e[1] * e[1] + e[2] * e[2]);
      if (!(dist <= rr)) continue;
      const auto& p = xi[x];
      const auto& q = xi[y];
      const double c0 = p[1] * q[2] - p[2] * q[1], c1 = p[2] * q[0] - p[0] * q[2], c2 = p[0] * q[1] - p[1] * q[0];
      const double dg = gamma == 0.5 ? std::sqrt(dist) : std::pow(dist, gamma);
      best = std::max(best, std::sqrt(c0 * c0 + c1 * c1 + c2 * c2) / dg);
    }
    out.rho[x] = best;
  }
  return out;
}

}  // namespace testflows
