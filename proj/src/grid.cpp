#include "cscope/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cscope/error.hpp"

namespace cscope {

double Grid::min_spacing() const {
  double h = spacing(0);
  for (int a = 1; a < dim; ++a) h = std::min(h, spacing(a));
  return h;
}

double Grid::cell_volume() const {
  double v = 1.0;
  for (int a = 0; a < dim; ++a) v *= spacing(a);
  return v;
}

std::size_t Grid::cell_count() const {
  return static_cast<std::size_t>(resolution[0]) * resolution[1] * resolution[2];
}

bool Grid::fully_periodic() const {
  for (int a = 0; a < dim; ++a)
    if (!periodic[a]) return false;
  return true;
}

Index3 Grid::unflatten(std::size_t flat) const {
  Index3 idx{};
  idx[2] = static_cast<int>(flat % resolution[2]);
  flat /= resolution[2];
  idx[1] = static_cast<int>(flat % resolution[1]);
  idx[0] = static_cast<int>(flat / resolution[1]);
  return idx;
}

Point Grid::cell_center(const Index3& idx) const {
  Point x{0.0, 0.0, 0.0};
  for (int a = 0; a < dim; ++a) x[a] = origin[a] + (idx[a] + 0.5) * spacing(a);
  return x;
}

bool Grid::same_shape(const Grid& other) const {
  if (dim != other.dim) return false;
  for (int a = 0; a < 3; ++a) {
    if (resolution[a] != other.resolution[a] || periodic[a] != other.periodic[a]) return false;
    if (origin[a] != other.origin[a] || extent[a] != other.extent[a]) return false;
  }
  return true;
}

Grid make_grid(std::span<const double> origin, std::span<const double> extent,
               std::span<const int> resolution, std::span<const bool> periodic) {
  const auto dim = static_cast<int>(extent.size());
  if (dim < 1 || dim > 3) throw ValidationError("grid dimension must be 1, 2 or 3");
  if (origin.size() != extent.size() || resolution.size() != extent.size() ||
      periodic.size() != extent.size())
    throw ValidationError("grid origin/extent/resolution/periodic lengths differ");

  Grid g;
  g.dim = dim;
  for (int a = 0; a < dim; ++a) {
    if (!(extent[a] > 0.0) || !std::isfinite(extent[a]))
      throw ValidationError("grid extent must be positive on axis " + std::to_string(a));
    if (!std::isfinite(origin[a]))
      throw ValidationError("grid origin must be finite on axis " + std::to_string(a));
    if (resolution[a] < kMinResolution)
      throw ValidationError("grid resolution must be >= " + std::to_string(kMinResolution) +
                            " on axis " + std::to_string(a));
    g.origin[a] = origin[a];
    g.extent[a] = extent[a];
    g.resolution[a] = resolution[a];
    g.periodic[a] = periodic[a];
  }
  return g;
}

Grid periodic_box(int dim, double length, int n) {
  return periodic_box(dim, Point{length, length, length}, Index3{n, n, n});
}

Grid periodic_box(int dim, const Point& lengths, const Index3& n) {
  if (dim < 1 || dim > 3) throw ValidationError("grid dimension must be 1, 2 or 3");
  std::array<double, 3> o{}, e{};
  std::array<bool, 3> p{true, true, true};
  for (int a = 0; a < dim; ++a) {
    e[a] = lengths[a];
    o[a] = -0.5 * lengths[a];
  }
  return make_grid(std::span<const double>(o.data(), dim), std::span<const double>(e.data(), dim),
                   std::span<const int>(n.data(), dim), std::span<const bool>(p.data(), dim));
}

std::array<std::array<int, 2>, 3> ball_ranges(const Grid& g, const Point& c, double radius) {
  std::array<std::array<int, 2>, 3> out{{{0, 0}, {0, 0}, {0, 0}}};
  for (int a = 0; a < g.dim; ++a) {
    const double h = g.spacing(a);
    const double lo = c[a] - radius, hi = c[a] + radius;
    const double slack = 1e-9 * g.extent[a];
    if (g.periodic[a]) {
      if (2.0 * radius > g.extent[a] + slack)
        throw ValidationError("support of diameter " + std::to_string(2.0 * radius) +
                              " exceeds the periodic length on axis " + std::to_string(a));
    } else if (lo < g.origin[a] - slack || hi > g.origin[a] + g.extent[a] + slack) {
      throw ValidationError("support [" + std::to_string(lo) + ", " + std::to_string(hi) +
                            "] leaves the grid on axis " + std::to_string(a));
    }
    out[a][0] = static_cast<int>(std::ceil((lo - g.origin[a]) / h - 0.5));
    out[a][1] = static_cast<int>(std::floor((hi - g.origin[a]) / h - 0.5));
    if (!g.periodic[a]) {
      out[a][0] = std::max(out[a][0], 0);
      out[a][1] = std::min(out[a][1], g.resolution[a] - 1);
    } else if (out[a][1] - out[a][0] + 1 > g.resolution[a]) {
      out[a][1] = out[a][0] + g.resolution[a] - 1;
    }
  }
  return out;
}

}  // namespace cscope
