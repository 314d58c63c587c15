#include "cscope/cascade.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

#include "cscope/calculus.hpp"
#include "cscope/cutoffs.hpp"
#include "cscope/ensemble.hpp"
#include "cscope/error.hpp"
#include "cscope/localize.hpp"
#include "cscope/parallel.hpp"
#include "cscope/quadrature.hpp"

namespace cscope {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double distance_power(double d, double gamma) { return gamma == 0.5 ? std::sqrt(d) : std::pow(d, gamma); }

double norm3(const Point& c) { return std::sqrt(c[0] * c[0] + c[1] * c[1] + c[2] * c[2]); }

void require_flow(const FlowSeries& flow) {
  flow.validate_layout();
  if (!(flow.horizon() > 0.0)) throw ValidationError("series horizon must be positive");
}

void require_vorticity(const FieldSeries& omega) {
  if (omega.grid().dim != 3 || omega.components() != 3)
    throw ValidationError("vorticity must be a 3-component field on a 3D grid");
  if (!(omega.horizon() > 0.0)) throw ValidationError("series horizon must be positive");
}

void require_rho(double rho) {
  if (!(rho > 0.5 && rho < 1.0)) throw ValidationError("rho must lie in (1/2, 1)");
}

std::vector<double> half_squared_norm(const Field& f) {
  std::vector<double> out(f.cell_count());
  for (std::size_t i = 0; i < out.size(); ++i) {
    double s = 0.0;
    for (int c = 0; c < f.components(); ++c) s += f(i, c) * f(i, c);
    out[i] = 0.5 * s;
  }
  return out;
}

std::vector<double> gradient_squared(const Field& f) {
  const Field g = gradient(f, preferred_scheme(f.grid()));
  std::vector<double> out(f.cell_count());
  for (std::size_t i = 0; i < out.size(); ++i) {
    double s = 0.0;
    for (int c = 0; c < g.components(); ++c) s += g(i, c) * g(i, c);
    out[i] = s;
  }
  return out;
}

// Snapshot keys that merge entries sharing both velocity and vorticity storage.
class FlowKeys {
 public:
  explicit FlowKeys(const FlowSeries& flow) : tags_(flow.velocity.size()), keys_(flow.velocity.size()) {
    for (std::size_t k = 0; k < keys_.size(); ++k) {
      std::size_t c = k;
      for (std::size_t j = 0; j < k; ++j)
        if (flow.velocity.snapshot_ptr(j) == flow.velocity.snapshot_ptr(k) &&
            flow.vorticity.snapshot_ptr(j) == flow.vorticity.snapshot_ptr(k)) {
          c = j;
          break;
        }
      keys_[k] = &tags_[c];
    }
  }
  std::span<const void* const> keys() const { return keys_; }

 private:
  std::vector<char> tags_;
  std::vector<const void*> keys_;
};

std::vector<const void*> vorticity_keys(const FieldSeries& omega) {
  std::vector<const void*> keys(omega.size());
  for (std::size_t k = 0; k < keys.size(); ++k) keys[k] = omega.snapshot_ptr(k).get();
  return keys;
}

// Per-snapshot densities of a flow, folded in time with given weights.
struct FlowDensities {
  const FlowSeries& flow;
  FlowKeys keys;

  explicit FlowDensities(const FlowSeries& f) : flow(f), keys(f) {}

  std::vector<double> enstrophy(std::span<const double> w) const {
    return combine_in_time(w, keys.keys(), [&](std::size_t k) { return half_squared_norm(flow.vorticity.snapshot(k)); });
  }
  std::vector<double> flux(std::span<const double> w) const {
    return combine_in_time(w, keys.keys(), [&](std::size_t k) {
      const Field& u = flow.velocity.snapshot(k);
      const auto e = half_squared_norm(flow.vorticity.snapshot(k));
      std::vector<double> v(u.cell_count() * 3);
      for (std::size_t i = 0; i < e.size(); ++i)
        for (int c = 0; c < 3; ++c) v[i * 3 + c] = e[i] * u(i, c);
      return v;
    });
  }
  std::vector<double> palinstrophy(std::span<const double> w) const {
    return combine_in_time(w, keys.keys(), [&](std::size_t k) { return gradient_squared(flow.vorticity.snapshot(k)); });
  }
  std::vector<double> stretching(std::span<const double> w) const {
    return combine_in_time(w, keys.keys(), [&](std::size_t k) {
      const Field& om = flow.vorticity.snapshot(k);
      const Field gu = gradient(flow.velocity.snapshot(k), preferred_scheme(om.grid()));
      std::vector<double> v(om.cell_count());
      for (std::size_t i = 0; i < v.size(); ++i) {
        double s = 0.0;
        for (int c = 0; c < 3; ++c) {
          double a = 0.0;
          for (int j = 0; j < 3; ++j) a += om(i, j) * gu(i, c * 3 + j);
          s += om(i, c) * a;
        }
        v[i] = s;
      }
      return v;
    });
  }
};

double evaluate_at(const LocalIntegrator& li, std::span<const double> density, int comps, const Kernel& k,
                   const Point& x) {
  return li.evaluate(li.prepare(density, comps), k, x);
}

double relative_curl_residual(const Field& u, const Field& omega) {
  const Field cu = curl(u, preferred_scheme(u.grid()));
  double worst = 0.0;
  for (std::size_t i = 0; i < cu.cell_count(); ++i) {
    Point d{};
    for (int c = 0; c < 3; ++c) d[c] = cu(i, c) - omega(i, c);
    worst = std::max(worst, norm3(d));
  }
  const double peak = omega.max_norm();
  if (peak == 0.0) return worst == 0.0 ? 0.0 : kInf;
  return worst / peak;
}

}  // namespace

double coherence_ratio(double cross_norm, double d, double gamma) { return cross_norm / distance_power(d, gamma); }

CoherenceField coherence_measure(const Field& omega, double gamma, double r, double floor_rel,
                                 const CoherenceDomain& domain) {
  const Grid& g = omega.grid();
  if (omega.components() != 3) throw ValidationError("coherence needs a 3-component vorticity");
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw ValidationError("gamma must be positive");
  if (!(r > 0.0)) throw ValidationError("pair radius must be positive");
  if (r < g.min_spacing()) throw ValidationError("pair radius is below the grid spacing; no pairs to compare");
  if (!(floor_rel >= 0.0)) throw ValidationError("vorticity floor must be non-negative");
  const std::size_t n = g.cell_count();
  if (!domain.x_mask.empty() && domain.x_mask.size() != n) throw ValidationError("x mask size does not match the grid");
  if (!domain.y_mask.empty() && domain.y_mask.size() != n) throw ValidationError("y mask size does not match the grid");

  CoherenceField out{Field(g, 1, omega.time()), std::vector<std::uint8_t>(n, 0)};
  const auto norms = pointwise_norm(omega);
  const double peak = norms.empty() ? 0.0 : *std::max_element(norms.begin(), norms.end());
  out.floor = floor_rel * peak;
  std::vector<Point> xi(n);
  std::vector<std::uint8_t> x_ok(n, 0), y_ok(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const bool undef = !(norms[i] > 0.0) || norms[i] < out.floor;
    out.undefined[i] = undef;
    if (undef) continue;
    for (int c = 0; c < 3; ++c) xi[i][c] = omega(i, c) / norms[i];
    x_ok[i] = domain.x_mask.empty() || domain.x_mask[i];
    y_ok[i] = domain.y_mask.empty() || domain.y_mask[i];
  }

  const Index3 res = g.resolution;
  const std::array<bool, 3> wrap{domain.minimum_image && g.periodic[0], domain.minimum_image && g.periodic[1],
                                 domain.minimum_image && g.periodic[2]};
  // d^gamma per absolute index offset.
  std::vector<double> dist(n), dpow(n);
  for (int a0 = 0; a0 < res[0]; ++a0)
    for (int a1 = 0; a1 < res[1]; ++a1)
      for (int a2 = 0; a2 < res[2]; ++a2) {
        const double e0 = a0 * g.spacing(0), e1 = a1 * g.spacing(1), e2 = a2 * g.spacing(2);
        const std::size_t t = g.flat_index(Index3{a0, a1, a2});
        dist[t] = std::sqrt(e0 * e0 + e1 * e1 + e2 * e2);
        dpow[t] = distance_power(dist[t], gamma);
      }
  const auto abs_offset = [&](int a, int delta) {
    int v = std::abs(delta);
    if (wrap[a]) v = std::min(v, res[a] - v);
    return v;
  };
  const double r_in = std::isfinite(r) ? r * (1.0 + 1e-12) : kInf;

  std::vector<std::size_t> xs, ys;
  for (std::size_t i = 0; i < n; ++i) {
    if (x_ok[i]) xs.push_back(i);
    if (y_ok[i]) ys.push_back(i);
  }
  out.admissible_points = xs.size();

  // Offsets within the pair radius, nearest first.
  struct Offset {
    Index3 delta;
    std::size_t table;
  };
  std::vector<Offset> stencil;
  bool use_stencil = false;
  if (std::isfinite(r)) {
    std::array<int, 3> lo{}, hi{};
    std::size_t span_size = 1;
    for (int a = 0; a < 3; ++a) {
      const int reach = static_cast<int>(std::floor(r_in / g.spacing(a)));
      lo[a] = wrap[a] ? -((res[a] - 1) / 2) : -(res[a] - 1);
      hi[a] = wrap[a] ? res[a] / 2 : res[a] - 1;
      lo[a] = std::max(lo[a], -reach);
      hi[a] = std::min(hi[a], reach);
      span_size *= static_cast<std::size_t>(hi[a] - lo[a] + 1);
    }
    if (span_size <= 4 * ys.size() + 64) {
      use_stencil = true;
      for (int d0 = lo[0]; d0 <= hi[0]; ++d0)
        for (int d1 = lo[1]; d1 <= hi[1]; ++d1)
          for (int d2 = lo[2]; d2 <= hi[2]; ++d2) {
            if (d0 == 0 && d1 == 0 && d2 == 0) continue;
            const std::size_t t = g.flat_index(Index3{abs_offset(0, d0), abs_offset(1, d1), abs_offset(2, d2)});
            if (dist[t] <= r_in) stencil.push_back({Index3{d0, d1, d2}, t});
          }
      std::stable_sort(stencil.begin(), stencil.end(),
                       [&](const Offset& a, const Offset& b) { return dist[a.table] < dist[b.table]; });
    }
  }

  std::vector<double> best(xs.size(), 0.0);
  std::vector<std::size_t> examined(xs.size(), 0);
  const auto pair_value = [&](std::size_t x, std::size_t y, std::size_t t) {
    const Point& p = xi[x];
    const Point& q = xi[y];
    const Point c{p[1] * q[2] - p[2] * q[1], p[2] * q[0] - p[0] * q[2], p[0] * q[1] - p[1] * q[0]};
    return norm3(c) / dpow[t];
  };
  parallel_for(xs.size(), [&](std::size_t s) {
    const std::size_t x = xs[s];
    const Index3 ix = g.unflatten(x);
    double b = 0.0;
    std::size_t count = 0;
    if (use_stencil) {
      for (const Offset& o : stencil) {
        if ((1.0 + 1e-12) / dpow[o.table] < b) break;
        Index3 iy{};
        bool inside = true;
        for (int a = 0; a < 3; ++a) {
          int v = ix[a] + o.delta[a];
          if (wrap[a]) {
            v = ((v % res[a]) + res[a]) % res[a];
          } else if (v < 0 || v >= res[a]) {
            inside = false;
            break;
          }
          iy[a] = v;
        }
        if (!inside) continue;
        const std::size_t y = g.flat_index(iy);
        if (!y_ok[y]) continue;
        ++count;
        b = std::max(b, pair_value(x, y, o.table));
      }
    } else {
      for (std::size_t y : ys) {
        if (y == x) continue;
        const Index3 iy = g.unflatten(y);
        const std::size_t t = g.flat_index(
            Index3{abs_offset(0, iy[0] - ix[0]), abs_offset(1, iy[1] - ix[1]), abs_offset(2, iy[2] - ix[2])});
        if (dist[t] > r_in || t == 0) continue;
        ++count;
        b = std::max(b, pair_value(x, y, t));
      }
    }
    best[s] = b;
    examined[s] = count;
  });
  for (std::size_t s = 0; s < xs.size(); ++s) {
    out.rho(xs[s], 0) = best[s];
    out.sup = std::max(out.sup, best[s]);
    out.pairs_examined += examined[s];
  }
  return out;
}

CoherenceReport check_A1(const FlowSeries& flow, double R0, double M, double C1_user, double curl_tolerance) {
  require_flow(flow);
  if (!(R0 > 0.0)) throw ValidationError("R0 must be positive");
  if (!(M >= 0.0)) throw ValidationError("M must be non-negative");
  if (!(C1_user > 0.0)) throw ValidationError("C1 must be positive");
  CoherenceReport rep;
  rep.r = kInf;
  rep.M = M;
  rep.C1_user = C1_user;
  const Grid& g = flow.vorticity.grid();
  const std::size_t n = g.cell_count();
  const double rx = 2.0 * R0, ry = 2.0 * R0 + std::cbrt(R0 * R0);
  std::vector<std::uint8_t> in_y(n, 0);
  std::vector<double> radius(n);
  for (std::size_t i = 0; i < n; ++i) {
    radius[i] = norm3(g.cell_center(i));
    in_y[i] = radius[i] <= ry;
  }

  std::map<std::pair<const Field*, const Field*>, std::size_t> seen;
  for (std::size_t k = 0; k < flow.vorticity.size(); ++k) {
    const auto key = std::make_pair(flow.velocity.snapshot_ptr(k).get(), flow.vorticity.snapshot_ptr(k).get());
    if (auto it = seen.find(key); it != seen.end()) {
      rep.per_snapshot.push_back(rep.per_snapshot[it->second]);
      continue;
    }
    const Field& u = flow.velocity.snapshot(k);
    const Field& om = flow.vorticity.snapshot(k);
    const double curl_res = relative_curl_residual(u, om);
    rep.curl_residual = std::max(rep.curl_residual, curl_res);
    if (!(curl_res <= curl_tolerance)) {
      std::ostringstream msg;
      msg << "vorticity is not the curl of the velocity at t = " << flow.vorticity.time(k) << " (relative residual "
          << curl_res << ", tolerance " << curl_tolerance << ")";
      throw ValidationError(msg.str());
    }
    const Field gu = gradient(u, preferred_scheme(g));
    CoherenceDomain dom;
    dom.minimum_image = false;
    dom.x_mask.assign(n, 0);
    dom.y_mask = in_y;
    for (std::size_t i = 0; i < n; ++i) {
      if (radius[i] > rx) continue;
      double s = 0.0;
      for (int c = 0; c < 9; ++c) s += gu(i, c) * gu(i, c);
      dom.x_mask[i] = std::sqrt(s) > M;
    }
    const CoherenceField cf = coherence_measure(om, 0.5, kInf, rep.floor_rel, dom);
    std::size_t ny = 0;
    for (std::size_t i = 0; i < n; ++i) ny += in_y[i] && !cf.undefined[i];
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < n; ++i)
      if (dom.x_mask[i] && !cf.undefined[i]) pairs += ny - (in_y[i] ? 1 : 0);
    seen.emplace(key, rep.per_snapshot.size());
    rep.per_snapshot.push_back(cf.sup);
    rep.admissible_points += cf.admissible_points;
    rep.admissible_pairs += pairs;
  }
  rep.C1_meas = *std::max_element(rep.per_snapshot.begin(), rep.per_snapshot.end());
  rep.holds = rep.C1_meas <= C1_user;
  return rep;
}

double hybrid_integral(const FieldSeries& omega, const Point& x0, double R) {
  require_vorticity(omega);
  if (!(R > 0.0)) throw ValidationError("R must be positive");
  const Grid& g = omega.grid();
  const double T = omega.horizon();
  const double t0 = std::max(0.0, T - 4.0 * R * R);
  const double breaks[] = {t0};
  const auto w = product_weights(omega.times(), [&](double t) { return t >= t0 ? 1.0 : 0.0; }, breaks);

  std::vector<std::uint8_t> in_ball(g.cell_count(), 0);
  std::vector<std::size_t> cells;
  visit_ball(g, x0, 2.0 * R, [&](std::size_t cell, const Point&) {
    in_ball[cell] = 1;
    cells.push_back(cell);
  });
  CoherenceDomain dom;
  dom.x_mask = in_ball;
  const auto keys = vorticity_keys(omega);
  const auto dens = combine_in_time(w, keys, [&](std::size_t k) {
    const Field& om = omega.snapshot(k);
    const CoherenceField cf = coherence_measure(om, 0.5, 2.0 * R, kVorticityFloor, dom);
    std::vector<double> v(om.cell_count(), 0.0);
    for (std::size_t c : cells) {
      double s = 0.0;
      for (int j = 0; j < 3; ++j) s += om(c, j) * om(c, j);
      v[c] = s * cf.rho(c, 0) * cf.rho(c, 0);
    }
    return v;
  });
  std::vector<double> terms;
  terms.reserve(cells.size());
  for (std::size_t c : cells) terms.push_back(dens[c]);
  return pairwise_sum(terms) * g.cell_volume();
}

void CascadeParams::validate() const {
  if (!(R0 > 0.0) || !std::isfinite(R0)) throw ValidationError("R0 must be positive");
  require_rho(rho);
  if (!(beta > 0.0)) throw ValidationError("beta must be positive");
  if (!(C1 > 0.0) || !(C2 > 0.0)) throw ValidationError("C1 and C2 must be positive");
  if (!(M >= 0.0)) throw ValidationError("M must be non-negative");
  if (K1 < 1 || K2 < 1) throw ValidationError("K1 and K2 must be at least 1");
}

double CascadeParams::kstar() const { return analytic_kstar(3, K1, K2); }

VorticityDiagnostics diagnostics(const FieldSeries& omega, double rho, double R0) {
  require_vorticity(omega);
  require_rho(rho);
  if (!(R0 > 0.0)) throw ValidationError("R0 must be positive");
  const double T = omega.horizon();
  const int m = smoothness_power(rho);
  const TemporalCutoff eta = build_eta(T, rho);
  const auto li = local_integrator(omega.grid());
  const auto keys = vorticity_keys(omega);
  const Point o{0.0, 0.0, 0.0};
  const double norm = 1.0 / (T * R0 * R0 * R0);

  VorticityDiagnostics d;
  const auto wE = time_weights(omega.times(), eta, TimeWeight::EtaPower, 2.0 * rho - 1.0);
  const auto ens = combine_in_time(wE, keys, [&](std::size_t k) { return half_squared_norm(omega.snapshot(k)); });
  d.E0 = norm * evaluate_at(*li, ens, 1, Kernel{Pairing::Value, R0, m, 2.0 * rho - 1.0}, o);

  const auto wP = time_weights(omega.times(), eta, TimeWeight::EtaPower, 1.0);
  const auto pal = combine_in_time(wP, keys, [&](std::size_t k) { return gradient_squared(omega.snapshot(k)); });
  d.P0_gradient = norm * evaluate_at(*li, pal, 1, Kernel{Pairing::Value, R0, m, 1.0}, o);
  d.P0_final = norm * evaluate_at(*li, half_squared_norm(omega.snapshot(omega.size() - 1)), 1,
                                  Kernel{Pairing::Value, R0, m, 1.0}, o);
  d.P0 = d.P0_gradient + d.P0_final;
  d.degenerate = !(d.P0 > 0.0);
  if (!d.degenerate) d.sigma0 = std::sqrt(std::max(d.E0, 0.0) / d.P0);

  const double vol = omega.grid().cell_volume();
  for (std::size_t k = 0; k < omega.size(); ++k) {
    const auto nrm = pointwise_norm(omega.snapshot(k));
    d.B_T = std::max(d.B_T, pairwise_sum(nrm) * vol);
  }
  return d;
}

A2Report check_A2(const VorticityDiagnostics& diag, double beta, double R0) {
  if (!diag.sigma0) throw ValidationError("sigma0 is undefined (P0 = 0); the scale condition cannot be checked");
  if (!(beta > 0.0) || !(R0 > 0.0)) throw ValidationError("beta and R0 must be positive");
  A2Report r;
  r.defined = true;
  r.sigma0 = *diag.sigma0;
  r.beta = beta;
  r.R0 = R0;
  r.margin = beta * R0 - r.sigma0;
  r.holds = r.sigma0 <= beta * R0;
  return r;
}

A3Report check_A3(const FieldSeries& omega, double R0, double C2, double rho) {
  require_vorticity(omega);
  require_rho(rho);
  if (!(R0 > 0.0)) throw ValidationError("R0 must be positive");
  if (!(C2 > 0.0)) throw ValidationError("C2 must be positive");
  const double T = omega.horizon();
  const auto li = local_integrator(omega.grid());
  const auto keys = vorticity_keys(omega);
  const Point o{0.0, 0.0, 0.0};
  A3Report rep;
  rep.C2 = C2;

  const TemporalCutoff eta = build_eta(T, rho);
  const auto w = time_weights(omega.times(), eta, TimeWeight::One);
  const auto sq = combine_in_time(w, keys, [&](std::size_t k) {
    auto v = half_squared_norm(omega.snapshot(k));
    for (double& x : v) x *= 2.0;
    return v;
  });
  const double rloc = 2.0 * R0 + std::cbrt(R0 * R0);
  rep.localization_integral = evaluate_at(*li, sq, 1, Kernel{Pairing::Ball, rloc, 1, 1.0}, o);
  rep.localization_holds = rep.localization_integral <= 1.0 / C2;

  const Kernel psi0{Pairing::Value, R0, smoothness_power(rho), 1.0};
  std::map<const void*, double> done;
  for (std::size_t k = 0; k < omega.size(); ++k) {
    auto it = done.find(keys[k]);
    if (it == done.end()) {
      auto v = half_squared_norm(omega.snapshot(k));
      for (double& x : v) x *= 2.0;
      it = done.emplace(keys[k], evaluate_at(*li, v, 1, psi0, o)).first;
    }
    rep.sup_enstrophy = std::max(rep.sup_enstrophy, it->second);
    if (k + 1 == omega.size()) rep.final_enstrophy = it->second;
  }
  if (rep.sup_enstrophy > 0.0) {
    rep.modulation_ratio = rep.final_enstrophy / rep.sup_enstrophy;
    rep.modulation_holds = *rep.modulation_ratio >= 0.5;
  } else {
    rep.modulation_degenerate = true;
    rep.warnings.push_back("enstrophy in the base ball vanishes at every snapshot; modulation ratio is 0/0");
  }
  if (R0 > std::min(std::sqrt(T), 1.0)) {
    std::ostringstream msg;
    msg << "R0 = " << R0 << " exceeds min(sqrt(T), 1) = " << std::min(std::sqrt(T), 1.0);
    rep.warnings.push_back(msg.str());
  }
  return rep;
}

namespace {

// Flux integrals int_0^t int 1/2 |omega|^2 u . grad phi_x at many centres.
class FluxEvaluator {
 public:
  FluxEvaluator(const FlowSeries& flow, double rho, double t_eval)
      : T_(flow.horizon()), t_(t_eval < 0.0 ? flow.horizon() : t_eval), m_(smoothness_power(rho)) {
    require_flow(flow);
    require_rho(rho);
    if (!(t_ > 0.0)) throw ValidationError("evaluation time must be positive");
    li_ = local_integrator(flow.velocity.grid());
    const TemporalCutoff eta = build_eta(T_, rho);
    const auto w = time_weights(flow.velocity.times(), eta, TimeWeight::EtaPower, 1.0, t_);
    density_ = li_->prepare(FlowDensities(flow).flux(w), 3);
  }

  std::vector<double> integrals(std::span<const Point> centers, double R) const {
    return li_->evaluate(density_, Kernel{Pairing::Divergence, R, m_, 1.0}, centers);
  }
  /// (1/t)(1/R^3) times the integrals.
  std::vector<double> per_unit_mass(std::span<const Point> centers, double R) const {
    auto v = integrals(centers, R);
    const double norm = 1.0 / (t_ * R * R * R);
    for (double& x : v) x *= norm;
    return v;
  }
  FluxPoint ensemble(const Cover& cover) const {
    if (cover.n() == 0) throw ValidationError("empty cover");
    if (cover.dim != 3) throw ValidationError("flux covers must be three-dimensional");
    const auto centers = sorted_centers(cover.centers);
    const auto v = per_unit_mass(centers, cover.R);
    FluxPoint p;
    p.R = cover.R;
    p.n = v.size();
    p.Phi = pairwise_sum(v) / static_cast<double>(v.size());
    p.Psi = cover.R * cover.R * cover.R * p.Phi;
    return p;
  }

 private:
  double T_, t_;
  int m_;
  std::shared_ptr<const LocalIntegrator> li_;
  PreparedDensity density_;
};

}  // namespace

double local_flux(const FlowSeries& flow, const Point& x_i, double R, double rho, double t_eval) {
  return FluxEvaluator(flow, rho, t_eval).per_unit_mass(std::span<const Point>(&x_i, 1), R).front();
}

FluxPoint ensemble_flux(const FlowSeries& flow, const Cover& cover, double rho) {
  return FluxEvaluator(flow, rho, -1.0).ensemble(cover);
}

FluxCurve flux_curve(const FlowSeries& flow, std::span<const double> scales, const CascadeParams& params) {
  params.validate();
  if (scales.empty()) throw ValidationError("no scales given");
  const FluxEvaluator ev(flow, params.rho, -1.0);
  FluxCurve out;
  for (double R : scales) {
    Cover c = uniform_cover(params.R0, R, 3, params.K1, params.K2);
    out.points.push_back(ev.ensemble(c));
    out.covers.push_back(std::move(c));
  }
  return out;
}

BalanceTerms balance_residual(const FlowSeries& flow, const Point& x_i, double R, double rho, double t_eval) {
  require_flow(flow);
  require_rho(rho);
  if (!(R > 0.0)) throw ValidationError("R must be positive");
  const double T = flow.horizon();
  const double t = t_eval < 0.0 ? T : t_eval;
  if (!(t > 0.0) || t > T * (1.0 + 1e-12)) throw ValidationError("evaluation time must lie in (0, T]");
  const int m = smoothness_power(rho);
  const TemporalCutoff eta = build_eta(T, rho);
  const auto li = local_integrator(flow.velocity.grid());
  const FlowDensities dens(flow);
  const auto times = flow.velocity.times();
  const auto w_eta = time_weights(times, eta, TimeWeight::EtaPower, 1.0, t);
  const auto w_deta = time_weights(times, eta, TimeWeight::EtaDerivative, 1.0, t);
  const auto w_at = interpolation_weights(times, t);
  const Kernel value{Pairing::Value, R, m, 1.0};

  BalanceTerms b;
  b.t_eval = t;
  b.flux = evaluate_at(*li, dens.flux(w_eta), 3, Kernel{Pairing::Divergence, R, m, 1.0}, x_i);
  b.final_enstrophy = eta.value(t) * evaluate_at(*li, dens.enstrophy(w_at), 1, value, x_i);
  b.palinstrophy = evaluate_at(*li, dens.palinstrophy(w_eta), 1, value, x_i);
  b.transport = evaluate_at(*li, dens.enstrophy(w_deta), 1, value, x_i) +
                evaluate_at(*li, dens.enstrophy(w_eta), 1, Kernel{Pairing::Laplacian, R, m, 1.0}, x_i);
  b.stretching = evaluate_at(*li, dens.stretching(w_eta), 1, value, x_i);
  b.residual = b.flux - (b.final_enstrophy + b.palinstrophy - b.transport - b.stretching);
  b.scale = std::max({std::abs(b.flux), std::abs(b.final_enstrophy), std::abs(b.palinstrophy), std::abs(b.transport),
                      std::abs(b.stretching)});
  b.normalized_residual = b.scale > 0.0 ? std::abs(b.residual) / b.scale : 0.0;
  return b;
}

CascadeVerdict verify_cascade(const FluxCurve& flux, const VorticityDiagnostics& diag, double kstar, double beta,
                              double R0) {
  if (!diag.sigma0) throw ValidationError("sigma0 is undefined (P0 = 0); no inertial range");
  if (!(kstar > 0.0) || !(beta > 0.0) || !(R0 > 0.0)) throw ValidationError("K*, beta and R0 must be positive");
  CascadeVerdict v;
  v.kstar = kstar;
  v.range_lo = *diag.sigma0 / beta;
  v.range_hi = R0;
  v.empty_range = v.range_lo > v.range_hi;
  v.lower = diag.P0 / (4.0 * kstar);
  v.upper = 4.0 * kstar * diag.P0;
  bool any = false, all = true;
  double worst = kInf;
  for (const FluxPoint& p : flux.points) {
    ScaleVerdict s;
    s.R = p.R;
    s.Phi = p.Phi;
    s.in_range = !v.empty_range && p.R >= v.range_lo * (1.0 - 1e-12) && p.R <= v.range_hi * (1.0 + 1e-12);
    s.holds = p.Phi >= v.lower && p.Phi <= v.upper;
    s.margin = p.Phi > 0.0 && v.lower > 0.0 ? std::min(std::log(p.Phi / v.lower), std::log(v.upper / p.Phi)) : -kInf;
    if (s.in_range) {
      any = true;
      worst = std::min(worst, s.margin);
      if (!s.holds) {
        all = false;
        if (!v.witness) v.witness = p.R;
      }
    }
    v.scales.push_back(s);
  }
  v.worst_margin = any ? worst : 0.0;
  v.verified = !v.empty_range && any && all;
  std::ostringstream msg;
  if (v.empty_range)
    msg << "empty inertial range: sigma0/beta = " << v.range_lo << " exceeds R0 = " << v.range_hi;
  else if (!any)
    msg << "no curve scale lies in [" << v.range_lo << ", " << v.range_hi << "]";
  else if (v.verified)
    msg << "flux bounds hold at every scale in [" << v.range_lo << ", " << v.range_hi << "]";
  else
    msg << "flux bounds fail at R = " << *v.witness;
  v.summary = msg.str();
  return v;
}

std::vector<LocalityRow> locality_ratios(const FluxCurve& flux, double kstar) {
  if (!(kstar > 0.0)) throw ValidationError("K* must be positive");
  const double band = 16.0 * kstar * kstar;
  std::vector<LocalityRow> rows;
  for (const FluxPoint& a : flux.points)
    for (const FluxPoint& b : flux.points) {
      if (!(a.R < b.R)) continue;
      LocalityRow row;
      row.r = a.R;
      row.R = b.R;
      const double q = a.R / b.R;
      const double k = std::round(std::log2(q));
      if (std::abs(q - std::exp2(k)) <= 1e-9 * q) row.dyadic_k = static_cast<int>(k);
      const double q3 = q * q * q;
      row.band_lo = q3 / band;
      row.band_hi = q3 * band;
      row.zero_denominator = b.Psi == 0.0 || b.Phi == 0.0;
      if (!row.zero_denominator) {
        row.ratio = a.Psi / b.Psi;
        row.identity_rhs = q3 * a.Phi / b.Phi;
        row.inside = row.ratio >= row.band_lo && row.ratio <= row.band_hi;
      }
      rows.push_back(row);
    }
  return rows;
}

}  // namespace cscope
