#include "cscope/localize.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <tuple>

#include "cscope/error.hpp"
#include "cscope/parallel.hpp"
#include "cscope/quadrature.hpp"

namespace cscope {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kNodes = 24;

double radial_jacobian(int dim, double r) {
  if (dim == 1) return 2.0;
  if (dim == 2) return 2.0 * kPi * r;
  return 4.0 * kPi * r * r;
}

double radial_kernel(int dim, double x) {
  if (dim == 1) return std::cos(x);
  if (dim == 2) return std::cyl_bessel_j(0.0, x);
  return std::abs(x) < 1e-8 ? 1.0 - x * x / 6.0 : std::sin(x) / x;
}

// Gauss-Legendre nodes on [lo, hi] split into `panels` pieces.
void append_nodes(double lo, double hi, int panels, std::vector<double>& r, std::vector<double>& w) {
  const GaussRule& g = gauss_legendre(kNodes);
  const double h = (hi - lo) / panels;
  for (int p = 0; p < panels; ++p) {
    const double mid = lo + (p + 0.5) * h;
    for (int i = 0; i < kNodes; ++i) {
      r.push_back(mid + 0.5 * h * g.nodes[i]);
      w.push_back(0.5 * h * g.weights[i]);
    }
  }
}

// Fourier transform of the indicator of B(0, R) at |q| = q.
double ball_transform(int dim, double R, double q) {
  const double x = q * R;
  if (dim == 1) return std::abs(x) < 1e-8 ? 2.0 * R : 2.0 * std::sin(x) / q;
  if (dim == 2) return std::abs(x) < 1e-8 ? kPi * R * R : 2.0 * kPi * R * std::cyl_bessel_j(1.0, x) / q;
  if (std::abs(x) < 1e-3) return 4.0 * kPi * R * R * R * (1.0 / 3.0 - x * x / 30.0 + x * x * x * x / 840.0);
  return 4.0 * kPi * (std::sin(x) - x * std::cos(x)) / (q * q * q);
}

}  // namespace

double radial_transform(const std::function<double(double)>& p, double support, int dim, double q,
                        std::span<const double> breaks, int panels) {
  std::vector<double> cuts{0.0};
  for (double b : breaks)
    if (b > 0.0 && b < support) cuts.push_back(b);
  cuts.push_back(support);
  std::vector<double> r, w;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const int n = std::max(panels, 1 + static_cast<int>(std::ceil(q * (cuts[i + 1] - cuts[i]) / 2.0)));
    append_nodes(cuts[i], cuts[i + 1], n, r, w);
  }
  double s = 0.0;
  for (std::size_t j = 0; j < r.size(); ++j) s += w[j] * p(r[j]) * radial_jacobian(dim, r[j]) * radial_kernel(dim, q * r[j]);
  return s;
}

LocalIntegrator::LocalIntegrator(const Grid& grid, bool allow_spectral) : grid_(grid) {
  bool even = true;
  for (int a = 0; a < grid.dim; ++a) even = even && grid.resolution[a] % 2 == 0;
  if (allow_spectral && grid.fully_periodic() && even) sg_ = spectral_grid(grid);
}

PreparedDensity LocalIntegrator::prepare(std::span<const double> values, int components) const {
  if (components < 1) throw ValidationError("density needs at least one component");
  if (values.size() != grid_.cell_count() * static_cast<std::size_t>(components))
    throw ValidationError("density size does not match the grid");
  PreparedDensity d;
  d.components_ = components;
  if (!sg_) {
    d.cells_.assign(values.begin(), values.end());
    return d;
  }
  d.spectral_ = true;
  const std::size_t n = grid_.cell_count();
  const double inv_n = 1.0 / static_cast<double>(n);
  Point first{};
  for (int a = 0; a < grid_.dim; ++a) first[a] = grid_.origin[a] + 0.5 * grid_.spacing(a);

  std::vector<std::vector<Complex>> full(components);
  std::vector<double> comp(n);
  double peak = 0.0;
  for (int c = 0; c < components; ++c) {
    for (std::size_t i = 0; i < n; ++i) comp[i] = values[i * components + c];
    full[c] = sg_->forward(comp);
    for (std::size_t m = 0; m < full[c].size(); ++m) {
      const Point& k = sg_->wavevector(m);
      full[c][m] *= std::polar(inv_n * sg_->hermitian_weight(m), -(k[0] * first[0] + k[1] * first[1] + k[2] * first[2]));
      peak = std::max(peak, std::abs(full[c][m]));
    }
  }
  // Exact zeros and roundoff-level modes carry no information; dropping them
  // keeps pairings with sparse spectra cheap.
  const double floor = 1e-16 * peak;
  const Index3& shape = sg_->spectral_shape();
  const auto classes = sg_->k2_class();
  d.coef_.assign(components, {});
  std::size_t m = 0;
  for (int i0 = 0; i0 < shape[0]; ++i0)
    for (int i1 = 0; i1 < shape[1]; ++i1)
      for (int i2 = 0; i2 < shape[2]; ++i2, ++m) {
        if (sg_->nyquist(m)) continue;
        bool keep = false;
        for (int c = 0; c < components; ++c) keep = keep || std::abs(full[c][m]) > floor;
        if (!keep) continue;
        d.modes_.push_back({i0, i1, i2});
        d.classes_.push_back(classes[m]);
        for (int c = 0; c < components; ++c) d.coef_[c].push_back(full[c][m]);
      }
  return d;
}

std::shared_ptr<const std::vector<double>> LocalIntegrator::transform(double R, double power) const {
  if (!sg_) throw ValidationError("radial transforms need a spectral grid");
  const auto key = std::make_pair(R, power);
  {
    std::lock_guard lock(mu_);
    if (auto it = transforms_.find(key); it != transforms_.end()) return it->second;
  }
  const auto k2 = sg_->unique_k2();
  if (power < 0.0) {
    auto table = std::make_shared<std::vector<double>>(k2.size());
    for (std::size_t c = 0; c < k2.size(); ++c) (*table)[c] = ball_transform(grid_.dim, R, std::sqrt(k2[c]));
    std::lock_guard lock(mu_);
    return transforms_.emplace(key, std::move(table)).first->second;
  }
  const double qmax = std::sqrt(*std::max_element(k2.begin(), k2.end()));
  const SpatialCutoff unit{Point{}, R, 0.75, 1, grid_.dim};
  std::vector<double> r, w;
  const int panels = 2 + static_cast<int>(std::ceil(qmax * R / 2.0));
  append_nodes(0.0, R, panels, r, w);
  append_nodes(R, 2.0 * R, panels, r, w);
  for (std::size_t j = 0; j < r.size(); ++j) w[j] *= unit.profile(r[j], power) * radial_jacobian(grid_.dim, r[j]);
  auto table = std::make_shared<std::vector<double>>(k2.size());
  for (std::size_t c = 0; c < k2.size(); ++c) {
    const double q = std::sqrt(k2[c]);
    double s = 0.0;
    for (std::size_t j = 0; j < r.size(); ++j) s += w[j] * radial_kernel(grid_.dim, q * r[j]);
    (*table)[c] = s;
  }
  std::lock_guard lock(mu_);
  return transforms_.emplace(key, std::move(table)).first->second;
}

void LocalIntegrator::check_support(const Kernel& k, const Point& c) const {
  if (!(k.R > 0.0) || !std::isfinite(k.R)) throw ValidationError("kernel scale must be positive");
  ball_ranges(grid_, c, k.pairing == Pairing::Ball ? k.R : 2.0 * k.R);
}

double LocalIntegrator::midpoint(const PreparedDensity& d, const Kernel& k, const Point& c) const {
  const SpatialCutoff psi{c, k.R, 0.75, k.m, grid_.dim};
  const int nc = d.components_;
  const double* v = d.cells_.data();
  double s = 0.0;
  if (k.pairing == Pairing::Ball) {
    visit_ball(grid_, c, k.R, [&](std::size_t cell, const Point&) { s += v[cell * nc]; });
    return s * grid_.cell_volume();
  }
  visit_ball(grid_, c, 2.0 * k.R, [&](std::size_t cell, const Point& x) {
    const double r = std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
    switch (k.pairing) {
      case Pairing::Value:
        s += v[cell * nc] * psi.profile(r, k.exponent);
        break;
      case Pairing::Laplacian:
        s += v[cell * nc] * psi.radial_laplacian(r);
        break;
      case Pairing::Ball:
        break;
      case Pairing::Divergence:
        if (r > k.R) {
          const double d1 = psi.profile_d1(r, 1.0) / r;
          for (int a = 0; a < grid_.dim; ++a) s += v[cell * nc + a] * d1 * x[a];
        }
        break;
    }
  });
  return s * grid_.cell_volume();
}

std::vector<double> LocalIntegrator::evaluate(const PreparedDensity& d, const Kernel& k,
                                              std::span<const Point> centers) const {
  if (k.pairing == Pairing::Divergence) {
    if (d.components_ != grid_.dim) throw ValidationError("divergence pairing needs a dim-component density");
  } else if (d.components_ != 1) {
    throw ValidationError("value, Laplacian and ball pairings need a scalar density");
  }
  if (k.m < 1) throw ValidationError("kernel power must be positive");
  for (const Point& c : centers) check_support(k, c);

  std::vector<double> out(centers.size(), 0.0);
  if (!d.spectral_) {
    parallel_for(centers.size(), [&](std::size_t i) { out[i] = midpoint(d, k, centers[i]); });
    return out;
  }

  const double power = k.pairing == Pairing::Ball    ? -1.0
                       : k.pairing == Pairing::Value ? k.m * k.exponent
                                                     : static_cast<double>(k.m);
  const auto table = transform(k.R, power);
  const std::size_t nm = d.modes_.size();
  std::vector<Complex> C(nm);
  for (std::size_t j = 0; j < nm; ++j) {
    const auto& idx = d.modes_[j];
    const double W = (*table)[d.classes_[j]];
    Point kv{};
    for (int a = 0; a < grid_.dim; ++a) kv[a] = sg_->axis_wavenumber(a, idx[a]);
    switch (k.pairing) {
      case Pairing::Value:
      case Pairing::Ball:
        C[j] = d.coef_[0][j] * W;
        break;
      case Pairing::Laplacian:
        C[j] = d.coef_[0][j] * (-(kv[0] * kv[0] + kv[1] * kv[1] + kv[2] * kv[2]) * W);
        break;
      case Pairing::Divergence: {
        Complex s{};
        for (int a = 0; a < grid_.dim; ++a) s += d.coef_[a][j] * Complex(0.0, -kv[a]);
        C[j] = s * W;
        break;
      }
    }
  }
  const Index3& shape = sg_->spectral_shape();
  parallel_for(centers.size(), [&](std::size_t i) {
    std::array<std::vector<Complex>, 3> phase;
    for (int a = 0; a < 3; ++a) {
      phase[a].resize(shape[a]);
      for (int q = 0; q < shape[a]; ++q)
        phase[a][q] = a < grid_.dim ? std::polar(1.0, sg_->axis_wavenumber(a, q) * centers[i][a]) : Complex(1.0, 0.0);
    }
    double s = 0.0;
    for (std::size_t j = 0; j < nm; ++j) {
      const auto& idx = d.modes_[j];
      const Complex p = phase[0][idx[0]] * phase[1][idx[1]] * phase[2][idx[2]];
      s += C[j].real() * p.real() - C[j].imag() * p.imag();
    }
    out[i] = s;
  });
  return out;
}

double LocalIntegrator::evaluate(const PreparedDensity& d, const Kernel& k, const Point& center) const {
  return evaluate(d, k, std::span<const Point>(&center, 1)).front();
}

std::vector<double> time_weights(std::span<const double> times, const TemporalCutoff& eta, TimeWeight kind,
                                 double exponent, double t_end) {
  const double T = times.back();
  const double end = t_end < 0.0 ? T : t_end;
  if (end > T * (1.0 + 1e-12) || end < times.front()) throw ValidationError("evaluation time outside the series");
  const auto W = [&](double t) -> double {
    if (t > end) return 0.0;
    switch (kind) {
      case TimeWeight::EtaPower:
        return eta.power(t, exponent);
      case TimeWeight::EtaDerivative:
        return eta.derivative(t);
      case TimeWeight::One:
        return 1.0;
    }
    return 0.0;
  };
  const double breaks[] = {eta.T / 3.0, 2.0 * eta.T / 3.0, end};
  return product_weights(times, W, breaks);
}

std::vector<double> combine_in_time(std::span<const double> weights, std::span<const void* const> keys,
                                    const std::function<std::vector<double>(std::size_t)>& density) {
  if (weights.size() != keys.size()) throw ValidationError("weights and keys differ in length");
  std::vector<double> out;
  std::vector<bool> done(keys.size(), false);
  for (std::size_t k = 0; k < keys.size(); ++k) {
    if (done[k]) continue;
    double w = 0.0;
    for (std::size_t j = k; j < keys.size(); ++j)
      if (keys[j] == keys[k]) {
        w += weights[j];
        done[j] = true;
      }
    if (w == 0.0 && !out.empty()) continue;
    const std::vector<double> g = density(k);
    if (out.empty()) out.assign(g.size(), 0.0);
    if (g.size() != out.size()) throw ValidationError("snapshot densities differ in size");
    for (std::size_t i = 0; i < g.size(); ++i) out[i] += w * g[i];
  }
  return out;
}

std::shared_ptr<const LocalIntegrator> local_integrator(const Grid& grid) {
  static std::mutex mu;
  static std::vector<std::shared_ptr<const LocalIntegrator>> cache;
  std::lock_guard lock(mu);
  for (const auto& li : cache)
    if (li->grid().same_shape(grid)) return li;
  if (cache.size() > 16) cache.erase(cache.begin());
  cache.push_back(std::make_shared<const LocalIntegrator>(grid));
  return cache.back();
}

}  // namespace cscope
