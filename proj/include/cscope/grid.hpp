#pragma once

#include <array>
#include <cstddef>
#include <span>

namespace cscope {

using Point = std::array<double, 3>;
using Index3 = std::array<int, 3>;

/// Uniform cell-centred grid in 1, 2 or 3 dimensions.
///
/// Axes at or beyond `dim` are inert: resolution 1, extent 1, origin 0.
/// Cell (i0, i1, i2) has centre origin + (i + 1/2) * spacing and flat index
/// (i0 * n1 + i1) * n2 + i2, i.e. row-major with axis 0 slowest.
struct Grid {
  int dim = 1;
  Point origin{0.0, 0.0, 0.0};
  Point extent{1.0, 1.0, 1.0};
  Index3 resolution{1, 1, 1};
  std::array<bool, 3> periodic{false, false, false};

  double spacing(int axis) const { return extent[axis] / resolution[axis]; }
  double min_spacing() const;
  double cell_volume() const;
  std::size_t cell_count() const;
  bool fully_periodic() const;

  std::size_t flat_index(const Index3& idx) const {
    return (static_cast<std::size_t>(idx[0]) * resolution[1] + idx[1]) * resolution[2] + idx[2];
  }
  Index3 unflatten(std::size_t flat) const;
  Point cell_center(const Index3& idx) const;
  Point cell_center(std::size_t flat) const { return cell_center(unflatten(flat)); }

  /// Same geometry and sampling (used to check that fields can be combined).
  bool same_shape(const Grid& other) const;
};

inline constexpr int kMinResolution = 4;

/// Validated grid constructor. Spans must have length dim (1..3).
Grid make_grid(std::span<const double> origin, std::span<const double> extent,
               std::span<const int> resolution, std::span<const bool> periodic);

/// Periodic cube [-L/2, L/2)^dim with n cells per axis.
Grid periodic_box(int dim, double length, int n);

/// Periodic box with per-axis resolution, centred at the origin.
Grid periodic_box(int dim, const Point& lengths, const Index3& n);

/// Unwrapped index range [lo, hi] per axis of the cells whose centres may lie
/// in the closed ball B(c, radius). Throws ValidationError if the ball leaves
/// the grid on a non-periodic axis or is wider than a periodic axis.
std::array<std::array<int, 2>, 3> ball_ranges(const Grid& g, const Point& c, double radius);

/// Calls fn(flat_cell, displacement) for every cell whose centre lies in the
/// closed ball B(c, radius); displacement = centre - c, taken through the
/// periodic image that contains the ball.
template <class Fn>
void visit_ball(const Grid& g, const Point& c, double radius, Fn&& fn) {
  const auto r = ball_ranges(g, c, radius);
  const double r2 = radius * radius;
  const double h0 = g.spacing(0), h1 = g.spacing(1), h2 = g.spacing(2);
  for (int i0 = r[0][0]; i0 <= r[0][1]; ++i0) {
    const double d0 = g.dim > 0 ? g.origin[0] + (i0 + 0.5) * h0 - c[0] : 0.0;
    const int w0 = ((i0 % g.resolution[0]) + g.resolution[0]) % g.resolution[0];
    for (int i1 = r[1][0]; i1 <= r[1][1]; ++i1) {
      const double d1 = g.dim > 1 ? g.origin[1] + (i1 + 0.5) * h1 - c[1] : 0.0;
      const int w1 = ((i1 % g.resolution[1]) + g.resolution[1]) % g.resolution[1];
      if (d0 * d0 + d1 * d1 > r2) continue;
      for (int i2 = r[2][0]; i2 <= r[2][1]; ++i2) {
        const double d2 = g.dim > 2 ? g.origin[2] + (i2 + 0.5) * h2 - c[2] : 0.0;
        if (d0 * d0 + d1 * d1 + d2 * d2 > r2) continue;
        const int w2 = ((i2 % g.resolution[2]) + g.resolution[2]) % g.resolution[2];
        fn(g.flat_index(Index3{w0, w1, w2}), Point{d0, d1, d2});
      }
    }
  }
}

}  // namespace cscope
