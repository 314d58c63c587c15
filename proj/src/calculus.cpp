#include "cscope/calculus.hpp"

#include <string>

#include "cscope/error.hpp"
#include "cscope/spectral.hpp"

namespace cscope {
namespace {

const Complex kI{0.0, 1.0};

// d/dx_axis applied `order` (1 or 2) times to one component, spectrally.
std::vector<double> spectral_axis_derivative(const SpectralGrid& sg, std::span<const double> f, int axis, int order) {
  auto spec = sg.forward(f);
  for (std::size_t m = 0; m < spec.size(); ++m) {
    const double k = sg.wavevector(m)[axis];
    if (order == 1)
      spec[m] = sg.nyquist(m) ? Complex{} : spec[m] * (kI * k);
    else
      spec[m] *= -k * k;
  }
  return sg.inverse(spec);
}

std::vector<double> spectral_laplacian(const SpectralGrid& sg, std::span<const double> f) {
  auto spec = sg.forward(f);
  for (std::size_t m = 0; m < spec.size(); ++m) spec[m] *= -sg.k2(m);
  return sg.inverse(spec);
}

std::vector<double> central_axis_derivative(const Grid& g, std::span<const double> f, int axis, int order) {
  std::vector<double> out(f.size());
  const int n = g.resolution[axis];
  const double h = g.spacing(axis);
  const bool wrap = g.periodic[axis];
  for (std::size_t cell = 0; cell < f.size(); ++cell) {
    Index3 idx = g.unflatten(cell);
    const int i = idx[axis];
    auto at = [&](int j) {
      Index3 q = idx;
      q[axis] = wrap ? ((j % n) + n) % n : j;
      return f[g.flat_index(q)];
    };
    double v;
    if (order == 1) {
      if (wrap || (i > 0 && i < n - 1))
        v = (at(i + 1) - at(i - 1)) / (2.0 * h);
      else if (i == 0)
        v = (-3.0 * at(0) + 4.0 * at(1) - at(2)) / (2.0 * h);
      else
        v = (3.0 * at(n - 1) - 4.0 * at(n - 2) + at(n - 3)) / (2.0 * h);
    } else {
      if (wrap || (i > 0 && i < n - 1))
        v = (at(i + 1) - 2.0 * at(i) + at(i - 1)) / (h * h);
      else if (i == 0)
        v = (2.0 * at(0) - 5.0 * at(1) + 4.0 * at(2) - at(3)) / (h * h);
      else
        v = (2.0 * at(n - 1) - 5.0 * at(n - 2) + 4.0 * at(n - 3) - at(n - 4)) / (h * h);
    }
    out[cell] = v;
  }
  return out;
}

class Differ {
 public:
  Differ(const Grid& g, Scheme s) : grid_(g) {
    if (s == Scheme::Spectral) sg_ = spectral_grid(g);
  }
  std::vector<double> d(std::span<const double> f, int axis) const {
    return sg_ ? spectral_axis_derivative(*sg_, f, axis, 1) : central_axis_derivative(grid_, f, axis, 1);
  }
  std::vector<std::vector<double>> grad(std::span<const double> f) const {
    std::vector<std::vector<double>> out(grid_.dim);
    if (sg_) {
      const auto spec = sg_->forward(f);
      std::vector<Complex> work(spec.size());
      for (int a = 0; a < grid_.dim; ++a) {
        for (std::size_t m = 0; m < spec.size(); ++m)
          work[m] = sg_->nyquist(m) ? Complex{} : spec[m] * (kI * sg_->wavevector(m)[a]);
        out[a] = sg_->inverse(work);
      }
    } else {
      for (int a = 0; a < grid_.dim; ++a) out[a] = central_axis_derivative(grid_, f, a, 1);
    }
    return out;
  }
  std::vector<double> lap(std::span<const double> f) const {
    if (sg_) return spectral_laplacian(*sg_, f);
    std::vector<double> out(f.size(), 0.0);
    for (int a = 0; a < grid_.dim; ++a) {
      const auto d2 = central_axis_derivative(grid_, f, a, 2);
      for (std::size_t i = 0; i < out.size(); ++i) out[i] += d2[i];
    }
    return out;
  }

 private:
  const Grid& grid_;
  std::shared_ptr<const SpectralGrid> sg_;
};

}  // namespace

Scheme preferred_scheme(const Grid& grid) {
  if (!grid.fully_periodic()) return Scheme::Central2;
  for (int a = 0; a < grid.dim; ++a)
    if (grid.resolution[a] % 2 != 0) return Scheme::Central2;
  return Scheme::Spectral;
}

Field derivative(const Field& f, DerivativeKind kind, Scheme scheme) {
  const Grid& g = f.grid();
  const int d = g.dim;
  const int nc = f.components();
  const Differ differ(g, scheme);

  switch (kind) {
    case DerivativeKind::Gradient: {
      Field out(g, nc * d, f.time());
      for (int c = 0; c < nc; ++c) {
        const auto parts = differ.grad(f.component(c));
        for (int j = 0; j < d; ++j) out.set_component(c * d + j, parts[j]);
      }
      return out;
    }
    case DerivativeKind::Divergence: {
      if (nc != d) throw ValidationError("divergence needs a field with dim components");
      Field out(g, 1, f.time());
      std::vector<double> acc(f.cell_count(), 0.0);
      for (int j = 0; j < d; ++j) {
        const auto dj = differ.d(f.component(j), j);
        for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += dj[i];
      }
      out.set_component(0, acc);
      return out;
    }
    case DerivativeKind::Curl: {
      if (d != 3 || nc != 3) throw ValidationError("curl needs a 3-component field on a 3D grid");
      const auto u = f.component(0), v = f.component(1), w = f.component(2);
      const auto wy = differ.d(w, 1), vz = differ.d(v, 2);
      const auto uz = differ.d(u, 2), wx = differ.d(w, 0);
      const auto vx = differ.d(v, 0), uy = differ.d(u, 1);
      Field out(g, 3, f.time());
      for (std::size_t i = 0; i < f.cell_count(); ++i) {
        out(i, 0) = wy[i] - vz[i];
        out(i, 1) = uz[i] - wx[i];
        out(i, 2) = vx[i] - uy[i];
      }
      return out;
    }
    case DerivativeKind::Laplacian: {
      Field out(g, nc, f.time());
      for (int c = 0; c < nc; ++c) out.set_component(c, differ.lap(f.component(c)));
      return out;
    }
  }
  throw ValidationError("unknown derivative kind");
}

VelocityRecovery velocity_from_vorticity(const Field& vorticity) {
  const Grid& g = vorticity.grid();
  if (g.dim != 3 || vorticity.components() != 3)
    throw ValidationError("velocity_from_vorticity needs a 3-component field on a 3D grid");
  const auto sg = spectral_grid(g);

  std::array<std::vector<Complex>, 3> w;
  VelocityRecovery rec{Field(g, 3, vorticity.time()), {}};
  for (int c = 0; c < 3; ++c) {
    w[c] = sg->forward(vorticity.component(c));
    rec.removed_mean[c] = w[c][0].real() / static_cast<double>(g.cell_count());
  }
  // |k|^2 u = i k x w  (curl u = w, div u = 0); mode 0 and Nyquist removed.
  std::array<std::vector<Complex>, 3> u;
  for (int c = 0; c < 3; ++c) u[c].assign(sg->spectral_size(), Complex{});
  for (std::size_t m = 0; m < sg->spectral_size(); ++m) {
    const double k2 = sg->k2(m);
    if (k2 == 0.0 || sg->nyquist(m)) continue;
    const Point& k = sg->wavevector(m);
    const Complex a = w[0][m], b = w[1][m], c = w[2][m];
    u[0][m] = kI * (k[1] * c - k[2] * b) / k2;
    u[1][m] = kI * (k[2] * a - k[0] * c) / k2;
    u[2][m] = kI * (k[0] * b - k[1] * a) / k2;
  }
  for (int c = 0; c < 3; ++c) rec.velocity.set_component(c, sg->inverse(u[c]));
  return rec;
}

Field solenoidal_projection(const Field& v) {
  const Grid& g = v.grid();
  if (g.dim != 3 || v.components() != 3) throw ValidationError("projection needs a 3-component 3D field");
  const auto sg = spectral_grid(g);
  std::array<std::vector<Complex>, 3> s;
  for (int c = 0; c < 3; ++c) s[c] = sg->forward(v.component(c));
  for (std::size_t m = 0; m < sg->spectral_size(); ++m) {
    const double k2 = sg->k2(m);
    if (k2 == 0.0 || sg->nyquist(m)) {
      for (int c = 0; c < 3; ++c) s[c][m] = Complex{};
      continue;
    }
    const Point& k = sg->wavevector(m);
    const Complex kdot = (k[0] * s[0][m] + k[1] * s[1][m] + k[2] * s[2][m]) / k2;
    for (int c = 0; c < 3; ++c) s[c][m] -= k[c] * kdot;
  }
  Field out(g, 3, v.time());
  for (int c = 0; c < 3; ++c) out.set_component(c, sg->inverse(s[c]));
  return out;
}

}  // namespace cscope
