#include "cscope/generators.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <numbers>

#include "cscope/error.hpp"
#include "cscope/spectral.hpp"

namespace cscope {
namespace {

constexpr double kPi = std::numbers::pi;

bool wants_vorticity(const GeneratorParams& p) {
  if (p.output == "vorticity") return true;
  if (p.output == "velocity") return false;
  throw ValidationError("generator output must be 'velocity' or 'vorticity', got '" + p.output + "'");
}

void require_dim(const Grid& g, int d, const std::string& id) {
  if (g.dim != d) throw ValidationError(id + " needs a " + std::to_string(d) + "D grid");
}

Field demo1d(const Grid& g, double time) {
  require_dim(g, 1, "demo1d");
  Field f(g, 1, time);
  for (std::size_t i = 0; i < g.cell_count(); ++i) {
    const double x = g.cell_center(i)[0];
    const double c = std::cos(x + 5.0);
    f(i, 0) = c * c * std::sin(0.5 * (x - 1.0) * (x - 1.0));
  }
  return f;
}

Field taylor_green(const GeneratorParams& p, const Grid& g, double time) {
  require_dim(g, 3, "taylor_green_2d3d");
  const double U = p.get("U", 1.0), k = p.get("k", 1.0);
  if (!(k > 0.0)) throw ValidationError("taylor_green_2d3d: k must be positive");
  const double decay = std::exp(-2.0 * k * k * time);
  const bool vort = wants_vorticity(p);
  Field f(g, 3, time);
  for (std::size_t i = 0; i < g.cell_count(); ++i) {
    const Point x = g.cell_center(i);
    const double sx = std::sin(k * x[0]), cx = std::cos(k * x[0]);
    const double sy = std::sin(k * x[1]), cy = std::cos(k * x[1]);
    if (vort) {
      f(i, 2) = 2.0 * k * U * sx * sy * decay;
    } else {
      f(i, 0) = U * sx * cy * decay;
      f(i, 1) = -U * cx * sy * decay;
    }
  }
  return f;
}

Field abc_flow(const GeneratorParams& p, const Grid& g, double time) {
  require_dim(g, 3, "abc_flow");
  const double A = p.get("A", 1.0), B = p.get("B", 1.0), C = p.get("C", 1.0);
  wants_vorticity(p);  // validates; vorticity equals velocity for this flow
  const double decay = std::exp(-time);
  Field f(g, 3, time);
  for (std::size_t i = 0; i < g.cell_count(); ++i) {
    const Point x = g.cell_center(i);
    f(i, 0) = (A * std::sin(x[2]) + C * std::cos(x[1])) * decay;
    f(i, 1) = (B * std::sin(x[0]) + A * std::cos(x[2])) * decay;
    f(i, 2) = (C * std::sin(x[1]) + B * std::cos(x[0])) * decay;
  }
  return f;
}

Field single_mode(const GeneratorParams& p, const Grid& g, double time) {
  require_dim(g, 3, "single_mode");
  const double A = p.get("A", 1.0), k = p.get("k", 1.0);
  if (!(k > 0.0)) throw ValidationError("single_mode: k must be positive");
  const double decay = p.get("decay", 0.0) != 0.0 ? std::exp(-k * k * time) : 1.0;
  const bool vort = wants_vorticity(p);
  Field f(g, 3, time);
  for (std::size_t i = 0; i < g.cell_count(); ++i) {
    const double x = g.cell_center(i)[0];
    if (vort)
      f(i, 2) = A * std::sin(k * x) * decay;
    else
      f(i, 1) = -(A / k) * std::cos(k * x) * decay;
  }
  return f;
}

// Counter-based generator: each (seed, mode, slot) maps to fixed bits, so a
// field does not depend on grid resolution or iteration order.
std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

double unit_uniform(std::uint64_t bits) { return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53; }

Complex gaussian_pair(std::uint64_t seed, const std::array<int, 3>& n, int slot) {
  std::uint64_t h = splitmix(seed);
  for (int v : n) h = splitmix(h ^ static_cast<std::uint64_t>(static_cast<std::int64_t>(v) + 0x10000));
  h = splitmix(h ^ static_cast<std::uint64_t>(slot));
  const double u1 = unit_uniform(h), u2 = unit_uniform(splitmix(h));
  const double r = std::sqrt(-2.0 * std::log(u1));
  return {r * std::cos(2.0 * kPi * u2), r * std::sin(2.0 * kPi * u2)};
}

Field random_multiscale(const GeneratorParams& p, const Grid& g, double time) {
  require_dim(g, 3, "random_multiscale");
  const auto seed = static_cast<std::uint64_t>(p.get("seed", 0.0));
  const double slope = p.get("slope", -5.0 / 3.0);
  const double kmin = p.get("kmin", 1.0), kmax = p.get("kmax", 8.0);
  const double amplitude = p.get("amplitude", 1.0);
  const bool planar = p.get("planar", 0.0) != 0.0;
  const bool decay = p.get("decay", 1.0) != 0.0;
  const bool vort = wants_vorticity(p);
  if (!(kmin >= 1.0) || !(kmax >= kmin)) throw ValidationError("random_multiscale: need 1 <= kmin <= kmax");
  // Planar fields carry no z modes, so the z resolution is free.
  for (int a = 0; a < (planar ? 2 : 3); ++a)
    if (kmax >= g.resolution[a] / 2)
      throw ValidationError("random_multiscale: kmax must be below N/2 on every resolved axis");
  if (!(amplitude >= 0.0)) throw ValidationError("random_multiscale: amplitude must be non-negative");

  const auto sg = spectral_grid(g);
  const Index3& shape = sg->spectral_shape();
  std::array<std::vector<Complex>, 3> coef;
  for (auto& c : coef) c.assign(sg->spectral_size(), Complex{});

  // Fourier coefficients c_k at t = 0, in the field's own normalisation:
  // u(x) = sum_k c_k exp(i k.x).
  double energy = 0.0;
  std::size_t m = 0;
  for (int i0 = 0; i0 < shape[0]; ++i0)
    for (int i1 = 0; i1 < shape[1]; ++i1)
      for (int i2 = 0; i2 < shape[2]; ++i2, ++m) {
        const std::array<int, 3> n{i0 <= g.resolution[0] / 2 ? i0 : i0 - g.resolution[0],
                                   i1 <= g.resolution[1] / 2 ? i1 : i1 - g.resolution[1], i2};
        if (planar && n[2] != 0) continue;
        const double nn = std::sqrt(double(n[0]) * n[0] + double(n[1]) * n[1] + double(n[2]) * n[2]);
        if (nn < kmin || nn > kmax || sg->nyquist(m)) continue;
        // On the stored half-plane n2 == 0, only the lexicographically
        // positive member of each conjugate pair is drawn.
        std::array<int, 3> key = n;
        bool conj = false;
        if (n[2] == 0 && (n[0] < 0 || (n[0] == 0 && n[1] < 0))) {
          key = {-n[0], -n[1], 0};
          conj = true;
        }
        const Point& k = sg->wavevector(m);
        std::array<Complex, 3> a{};
        if (planar) {
          const double kh = std::hypot(k[0], k[1]);
          const Complex s = gaussian_pair(seed, key, 0) * std::pow(nn, 0.5 * (slope - 1.0));
          a = {-k[1] / kh * s, k[0] / kh * s, Complex{}};
          if (conj) a = {std::conj(a[0]) * -1.0, std::conj(a[1]) * -1.0, Complex{}};
        } else {
          const double scale = std::pow(nn, 0.5 * (slope - 2.0));
          for (int c = 0; c < 3; ++c) a[c] = gaussian_pair(seed, key, c + 1) * scale;
          const double k2 = sg->k2(m);
          // Project with the canonical wavevector so conjugate partners agree.
          const double sgn = conj ? -1.0 : 1.0;
          const Point kc{sgn * k[0], sgn * k[1], sgn * k[2]};
          const Complex kd = (kc[0] * a[0] + kc[1] * a[1] + kc[2] * a[2]) / k2;
          for (int c = 0; c < 3; ++c) a[c] -= kc[c] * kd;
          if (conj)
            for (auto& v : a) v = std::conj(v);
        }
        for (int c = 0; c < 3; ++c) {
          coef[c][m] = a[c];
          energy += sg->hermitian_weight(m) * std::norm(a[c]);
        }
      }

  const double norm = energy > 0.0 ? amplitude / std::sqrt(energy) : 0.0;
  const double ncells = static_cast<double>(g.cell_count());
  const Point x0{g.origin[0] + 0.5 * g.spacing(0), g.origin[1] + 0.5 * g.spacing(1),
                 g.origin[2] + 0.5 * g.spacing(2)};
  std::array<std::vector<Complex>, 3> spec;
  for (auto& s : spec) s.assign(sg->spectral_size(), Complex{});
  for (std::size_t j = 0; j < sg->spectral_size(); ++j) {
    if (coef[0][j] == Complex{} && coef[1][j] == Complex{} && coef[2][j] == Complex{}) continue;
    const Point& k = sg->wavevector(j);
    const double damp = decay ? std::exp(-sg->k2(j) * time) : 1.0;
    const Complex phase = std::polar(ncells * norm * damp, k[0] * x0[0] + k[1] * x0[1] + k[2] * x0[2]);
    std::array<Complex, 3> u{coef[0][j] * phase, coef[1][j] * phase, coef[2][j] * phase};
    if (vort) {
      const Complex I{0.0, 1.0};
      spec[0][j] = I * (k[1] * u[2] - k[2] * u[1]);
      spec[1][j] = I * (k[2] * u[0] - k[0] * u[2]);
      spec[2][j] = I * (k[0] * u[1] - k[1] * u[0]);
    } else {
      for (int c = 0; c < 3; ++c) spec[c][j] = u[c];
    }
  }
  Field f(g, 3, time);
  for (int c = 0; c < 3; ++c) f.set_component(c, sg->inverse(spec[c]));
  return f;
}

}  // namespace

double GeneratorParams::get(const std::string& key, double fallback) const {
  auto it = values.find(key);
  return it == values.end() ? fallback : it->second;
}

const std::vector<std::string>& generator_ids() {
  static const std::vector<std::string> ids{"demo1d", "taylor_green_2d3d", "abc_flow", "random_multiscale",
                                            "single_mode"};
  return ids;
}

bool is_flow_generator(const std::string& id) { return id != "demo1d"; }

Field sample_analytic(const std::string& id, const GeneratorParams& params, const Grid& grid, double time) {
  Field f = [&] {
    if (id == "demo1d") return demo1d(grid, time);
    if (id == "taylor_green_2d3d") return taylor_green(params, grid, time);
    if (id == "abc_flow") return abc_flow(params, grid, time);
    if (id == "random_multiscale") return random_multiscale(params, grid, time);
    if (id == "single_mode") return single_mode(params, grid, time);
    throw ValidationError("unknown generator '" + id + "'");
  }();
  if (!f.all_finite()) throw ValidationError("generator '" + id + "' produced non-finite values");
  return f;
}

FieldSeries sample_series(const std::string& id, const GeneratorParams& params, const Grid& grid, double T,
                          int steps) {
  if (steps < 1) throw ValidationError("series needs at least one time step");
  std::vector<double> times(steps + 1);
  std::vector<FieldPtr> snaps(steps + 1);
  for (int k = 0; k <= steps; ++k) {
    times[k] = k == steps ? T : T * k / steps;
    snaps[k] = std::make_shared<const Field>(sample_analytic(id, params, grid, times[k]));
  }
  return FieldSeries(std::move(times), std::move(snaps));
}

FlowSeries sample_flow_series(const std::string& id, const GeneratorParams& params, const Grid& grid, double T,
                              int steps) {
  if (!is_flow_generator(id)) throw ValidationError("'" + id + "' is not a flow generator");
  GeneratorParams pu = params, pw = params;
  pu.output = "velocity";
  pw.output = "vorticity";
  FlowSeries flow{sample_series(id, pu, grid, T, steps), sample_series(id, pw, grid, T, steps)};
  flow.validate_layout();
  return flow;
}

}  // namespace cscope
