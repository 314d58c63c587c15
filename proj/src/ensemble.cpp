#include "cscope/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>

#include "cscope/error.hpp"
#include "cscope/generators.hpp"
#include "cscope/quadrature.hpp"

namespace cscope {
namespace {

std::vector<const void*> snapshot_keys(const FieldSeries& f) {
  std::vector<const void*> keys(f.size());
  for (std::size_t k = 0; k < f.size(); ++k) keys[k] = f.snapshot_ptr(k).get();
  return keys;
}

std::vector<double> time_combined(const FieldSeries& f, std::span<const double> w) {
  const auto keys = snapshot_keys(f);
  return combine_in_time(w, keys, [&](std::size_t k) {
    const auto v = f.snapshot(k).values();
    return std::vector<double>(v.begin(), v.end());
  });
}

FieldSeries absolute(const FieldSeries& f) {
  std::map<const Field*, FieldPtr> done;
  std::vector<FieldPtr> snaps;
  for (std::size_t k = 0; k < f.size(); ++k) {
    const Field* src = f.snapshot_ptr(k).get();
    auto it = done.find(src);
    if (it == done.end()) {
      std::vector<double> v(src->values().begin(), src->values().end());
      for (double& x : v) x = std::abs(x);
      it = done.emplace(src, std::make_shared<const Field>(src->grid(), src->components(), src->time(), std::move(v))).first;
    }
    snaps.push_back(it->second);
  }
  return FieldSeries(std::vector<double>(f.times().begin(), f.times().end()), std::move(snaps));
}

void require_scalar(const FieldSeries& f) {
  if (f.components() != 1) throw ValidationError("ensemble averages need a scalar density");
}

}  // namespace

void EnsembleConfig::validate() const {
  if (!(R0 > 0.0) || !std::isfinite(R0)) throw ValidationError("R0 must be positive");
  if (!(delta > 0.0 && delta <= 1.0)) throw ValidationError("delta must lie in (0, 1]");
  if (!(rho1 > 0.5 && rho1 < 1.0)) throw ValidationError("rho1 must lie in (1/2, 1)");
  if (!(rho2 > 0.5 && rho2 < 1.0)) throw ValidationError("rho2 must lie in (1/2, 1)");
  if (K1 < 1 || K2 < 1) throw ValidationError("K1 and K2 must be at least 1");
}

double unit_ball_volume(int dim) {
  switch (dim) {
    case 1:
      return 2.0;
    case 2:
      return std::numbers::pi;
    case 3:
      return 4.0 * std::numbers::pi / 3.0;
  }
  throw ValidationError("dimension must be 1, 2 or 3");
}

double analytic_kstar(int dim, int K1, int K2) {
  return 3.0 * std::pow(2.0, dim + 1) * unit_ball_volume(dim) * K1 * K2;
}

LocalAverager::LocalAverager(const FieldSeries& f, const EnsembleConfig& config)
    : config_(config), grid_(f.grid()), T_(f.horizon()) {
  config_.validate();
  require_scalar(f);
  const TemporalCutoff eta = build_eta(T_, config_.rho1);
  const auto w = time_weights(f.times(), eta, TimeWeight::EtaPower, config_.delta);
  integrator_ = local_integrator(grid_);
  density_ = integrator_->prepare(time_combined(f, w), 1);
}

std::vector<double> LocalAverager::local_averages(std::span<const Point> centers, double R) const {
  const Kernel k{Pairing::Value, R, smoothness_power(config_.rho2), config_.delta};
  std::vector<double> v = integrator_->evaluate(density_, k, centers);
  const double norm = 1.0 / (T_ * std::pow(R, grid_.dim));
  for (double& x : v) x *= norm;
  return v;
}

double LocalAverager::local_average(const Point& x, double R) const {
  return local_averages(std::span<const Point>(&x, 1), R).front();
}

double LocalAverager::ensemble_average(const Cover& cover) const {
  if (cover.n() == 0) throw ValidationError("empty cover");
  if (cover.dim != grid_.dim) throw ValidationError("cover and field dimensions differ");
  const auto centers = sorted_centers(cover.centers);
  const auto v = local_averages(centers, cover.R);
  return pairwise_sum(v) / static_cast<double>(v.size());
}

double local_average(const FieldSeries& f, const Point& x, double R, const EnsembleConfig& config) {
  return LocalAverager(f, config).local_average(x, R);
}

double ensemble_average(const FieldSeries& f, const Cover& cover, const EnsembleConfig& config) {
  return LocalAverager(f, config).ensemble_average(cover);
}

IntegralAverages integral_average(const FieldSeries& f, const EnsembleConfig& config) {
  config.validate();
  require_scalar(f);
  IntegralAverages out;
  out.F0 = local_average(f, Point{0.0, 0.0, 0.0}, config.R0, config);

  const Grid& g = f.grid();
  const TemporalCutoff eta = build_eta(f.horizon(), config.rho1);
  const auto w = time_weights(f.times(), eta, TimeWeight::One);
  const auto mean_in_time = time_combined(f, w);
  double all = 0.0, half = 0.0;
  std::size_t n_all = 0, n_half = 0;
  visit_ball(g, Point{0.0, 0.0, 0.0}, config.R0, [&](std::size_t cell, const Point& x) {
    all += mean_in_time[cell];
    ++n_all;
    if (x[0] >= 0.0) {
      half += mean_in_time[cell];
      ++n_half;
    }
  });
  const double T = f.horizon(), vol = g.cell_volume();
  if (n_all == 0) throw ValidationError("integral ball contains no grid cells");
  out.plain_mean = all / (T * static_cast<double>(n_all));
  out.half_domain_mean = n_half ? half / (T * static_cast<double>(n_half)) : 0.0;
  out.unit_mass_integral = all * vol / (T * std::pow(config.R0, g.dim));
  return out;
}

const std::vector<std::string>& convention_names() {
  static const std::vector<std::string> names{"plain_mean", "cutoff_F0", "half_domain_mean", "unit_mass_integral"};
  return names;
}

double convention_value(const IntegralAverages& a, const std::string& name) {
  if (name == "plain_mean") return a.plain_mean;
  if (name == "cutoff_F0") return a.F0;
  if (name == "half_domain_mean") return a.half_domain_mean;
  if (name == "unit_mass_integral") return a.unit_mass_integral;
  throw ValidationError("unknown averaging convention '" + name + "'");
}

Cover optimize_cover(const LocalAverager& averager, double R, const BiasObjective& objective) {
  const EnsembleConfig& c = averager.config();
  const Cover base = uniform_cover(c.R0, R, averager.dim(), c.K1, c.K2);
  return optimize_cover(base, [&](std::span<const Point> x) { return averager.local_averages(x, R); }, objective);
}

SweepResult scale_sweep(const FieldSeries& f, std::span<const double> scales, const EnsembleConfig& config,
                        int budget) {
  config.validate();
  for (double R : scales)
    if (!(R > 0.0) || R > config.R0 * (1.0 + 1e-12)) throw ValidationError("sweep scales must lie in (0, R0]");
  const LocalAverager avg(f, config);
  SweepResult out;
  out.integrals = integral_average(f, config);
  out.F0 = out.integrals.F0;
  out.F0_abs = LocalAverager(absolute(f), config).local_average(Point{0.0, 0.0, 0.0}, config.R0);

  for (double R : scales) {
    SweepPoint p;
    p.R = R;
    p.cover_uniform = uniform_cover(config.R0, R, avg.dim(), config.K1, config.K2);
    std::map<Point, double> memo;
    const LocalValueFn values = [&](std::span<const Point> x) {
      std::vector<Point> missing;
      for (const Point& c : x)
        if (!memo.count(c)) missing.push_back(c);
      if (!missing.empty()) {
        const auto v = avg.local_averages(missing, R);
        for (std::size_t i = 0; i < missing.size(); ++i) memo.emplace(missing[i], v[i]);
      }
      std::vector<double> out(x.size());
      for (std::size_t i = 0; i < x.size(); ++i) out[i] = memo.at(x[i]);
      return out;
    };
    p.cover_max = optimize_cover(p.cover_uniform, values, {BiasDirection::Maximize, 0.25, budget});
    p.cover_min = optimize_cover(p.cover_uniform, values, {BiasDirection::Minimize, 0.25, budget});
    p.value_uniform = avg.ensemble_average(p.cover_uniform);
    p.value_max = avg.ensemble_average(p.cover_max);
    p.value_min = avg.ensemble_average(p.cover_min);
    out.points.push_back(std::move(p));
  }
  return out;
}

KStarReport kstar_check(const FieldSeries& f, std::span<const double> scales, int trials,
                        const EnsembleConfig& config, std::uint64_t seed) {
  config.validate();
  require_scalar(f);
  if (trials < 1) throw ValidationError("kstar_check needs at least one trial");
  for (std::size_t k = 0; k < f.size(); ++k) {
    const auto v = f.snapshot(k).values();
    for (std::size_t i = 0; i < v.size(); ++i)
      if (v[i] < 0.0)
        throw ValidationError("kstar_check needs a nonnegative density; snapshot " + std::to_string(k) + ", cell " +
                              std::to_string(i) + " is " + std::to_string(v[i]));
  }
  const LocalAverager avg(f, config);
  KStarReport rep;
  rep.F0 = avg.local_average(Point{0.0, 0.0, 0.0}, config.R0);
  if (!(rep.F0 > 0.0)) throw ValidationError("kstar_check needs F0 > 0");
  rep.analytic = analytic_kstar(avg.dim(), config.K1, config.K2);
  for (std::size_t s = 0; s < scales.size(); ++s) {
    double worst = 1.0;
    for (int t = 0; t < trials; ++t) {
      const std::uint64_t draw = seed * 0x9E3779B97F4A7C15ull + s * 1000003ull + static_cast<std::uint64_t>(t);
      const Cover c = random_cover(config.R0, scales[s], avg.dim(), config.K1, config.K2, draw);
      const double F = avg.ensemble_average(c);
      const double r = F > 0.0 ? std::max(F / rep.F0, rep.F0 / F) : std::numeric_limits<double>::infinity();
      worst = std::max(worst, r);
      ++rep.covers_tested;
    }
    rep.scales.push_back(scales[s]);
    rep.worst_ratio.push_back(worst);
    rep.empirical = std::max(rep.empirical, worst);
  }
  rep.within_bound = rep.empirical <= rep.analytic;
  return rep;
}

DetectorReport detect_scales(const SweepResult& sweep, double threshold, double floor) {
  DetectorReport rep;
  rep.threshold = threshold;
  rep.normalizer = std::max(std::abs(sweep.F0), floor < 0.0 ? sweep.F0_abs : floor);
  for (const auto& p : sweep.points) {
    const double raw = std::max(0.0, p.value_max - p.value_min);
    const double s = rep.normalizer > 0.0 ? raw / rep.normalizer
                                          : (raw > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
    rep.scales.push_back(p.R);
    rep.spread.push_back(s);
    if (s > threshold) rep.flagged_scales.push_back(p.R);
  }
  return rep;
}

PropagationReport propagation_report(const SweepResult& sweep, double R_star, double C1) {
  PropagationReport rep;
  rep.R_star = R_star;
  rep.C1 = C1;
  if (!(R_star > 0.0) || !(C1 >= 1.0)) {
    rep.note = "R_star must be positive and C1 >= 1";
    return rep;
  }
  std::vector<double> base;
  for (const auto& p : sweep.points)
    if (p.R >= R_star * (1.0 - 1e-12) && p.R <= 2.0 * R_star * (1.0 + 1e-12))
      base.insert(base.end(), {p.value_min, p.value_uniform, p.value_max});
  for (const auto& p : sweep.points)
    if (p.R >= 2.0 * R_star * (1.0 - 1e-12)) rep.scales_above.push_back(p.R);
  if (base.empty() || rep.scales_above.empty()) {
    rep.note = base.empty() ? "insufficient data: no scales in [R*, 2R*]" : "insufficient data: no scales >= 2R*";
    return rep;
  }
  rep.sufficient_data = true;
  rep.F_star = pairwise_sum(base) / static_cast<double>(base.size());
  const double sign = rep.F_star > 0.0 ? 1.0 : (rep.F_star < 0.0 ? -1.0 : 0.0);
  const auto in_band = [&](double v) {
    const double a = sign * v, F = sign * rep.F_star;
    return sign != 0.0 && a >= F / C1 && a <= C1 * F;
  };
  rep.base_comparable = std::all_of(base.begin(), base.end(), in_band);

  rep.persists = true;
  bool same_sign = sign != 0.0;
  double c4 = 0.0;
  for (const auto& p : sweep.points) {
    if (p.R < 2.0 * R_star * (1.0 - 1e-12)) continue;
    for (double v : {p.value_min, p.value_uniform, p.value_max}) {
      rep.persists = rep.persists && in_band(v);
      if (!(sign * v > 0.0)) {
        same_sign = false;
        continue;
      }
      const double a = sign * v, F = sign * rep.F_star, L = std::log(p.R / R_star);
      c4 = std::max({c4, std::log(a / (C1 * F)) / L, std::log(F / (C1 * a)) / L});
    }
  }
  if (same_sign) {
    rep.exponent = c4;
  } else {
    rep.note = "curves change sign above 2R*; no power-law band fits";
  }
  return rep;
}

FieldSeries demo_series(double R0, int cells) {
  if (!(R0 > 0.0)) throw ValidationError("R0 must be positive");
  const double o[] = {-3.0 * R0}, e[] = {6.0 * R0};
  const int r[] = {cells};
  const bool p[] = {false};
  const Grid g = make_grid(o, e, r, p);
  const auto f = std::make_shared<const Field>(sample_analytic("demo1d", {}, g, 0.0));
  return FieldSeries::constant(f, R0 * R0, 4);
}

}  // namespace cscope
