#include <doctest.h>

#include <cmath>
#include <numbers>

#include "../support/approx.hpp"
#include "../support/oracles.hpp"
#include "cscope/ensemble.hpp"
#include "cscope/error.hpp"

using namespace cscope;

namespace {

constexpr double kPi = std::numbers::pi;

Grid demo_grid(double R0, int cells) {
  const double o[] = {-3.0 * R0}, e[] = {6.0 * R0};
  const int r[] = {cells};
  const bool p[] = {false};
  return make_grid(o, e, r, p);
}

FieldSeries series_of(const Grid& g, double T, const std::function<double(double)>& f) {
  auto field = std::make_shared<Field>(g, 1);
  for (std::size_t i = 0; i < g.cell_count(); ++i) (*field)(i, 0) = f(g.cell_center(i)[0]);
  return FieldSeries::constant(field, T, 4);
}

double demo_f(double x) {
  const double c = std::cos(x + 5.0);
  return c * c * std::sin(0.5 * (x - 1.0) * (x - 1.0));
}

// (1/T) int_0^T eta^delta, written independently of the library.
double eta_mean(double delta) {
  return oracle::integrate([&](double s) { return std::pow(std::pow(1.0 - oracle::ramp(3.0 * s), 4), delta); },
                           {0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0}, 8, 20);
}

// (1/R) int f(x) psi(x - c)^delta dx in 1D.
double space_mean(const std::function<double(double)>& f, double c, double R, double delta, int panels = 64) {
  return oracle::integrate([&](double x) { return f(x) * std::pow(std::pow(oracle::ramp(std::abs(x - c) / R), 4), delta); },
                           {c - 2 * R, c - R, c, c + R, c + 2 * R}, panels, 24) /
         R;
}

}  // namespace

TEST_CASE("local averages: zero, constant and bump") {
  const EnsembleConfig cfg;
  const Grid g = demo_grid(10.0, 24576);
  CHECK(local_average(series_of(g, 100.0, [](double) { return 0.0; }), Point{}, 1.0, cfg) == 0.0);

  const double c = 2.5;
  const double v = local_average(series_of(g, 100.0, [&](double) { return c; }), Point{0.3, 0, 0}, 1.5, cfg);
  CHECK(v >= 2.0 * c / 3.0);
  CHECK(v <= 8.0 * c / 3.0);
  CHECK(v == rel(c * eta_mean(1.0) * space_mean([](double) { return 1.0; }, 0.3, 1.5, 1.0)).epsilon(1e-10));

  EnsembleConfig half = cfg;
  half.delta = 0.5;
  const double x0 = 1.1, R = 2.0;
  const auto bump = [&](double x) { return std::exp(-0.5 * std::pow((x - x0) / (R / 4), 2)); };
  const double got = local_average(series_of(g, 100.0, bump), Point{x0, 0, 0}, R, half);
  CHECK(got == rel(eta_mean(0.5) * space_mean(bump, x0, R, 0.5)).epsilon(1e-8));
}

TEST_CASE("ensemble averages: demo oracle, single centre, linearity and order") {
  const EnsembleConfig cfg;
  const FieldSeries demo = demo_series(10.0);
  const Cover c = uniform_cover(10.0, 1.0, 1, 3, 3);
  double expect = 0.0;
  for (const Point& p : c.centers) expect += eta_mean(1.0) * space_mean(demo_f, p[0], 1.0, 1.0, 256);
  expect /= static_cast<double>(c.n());
  const LocalAverager avg(demo, cfg);
  CHECK(avg.ensemble_average(c) == rel(expect).epsilon(1e-8));

  const Cover one = uniform_cover(10.0, 10.0, 1, 3, 3);
  CHECK(avg.ensemble_average(one) == avg.local_average(Point{}, 10.0));

  Cover shuffled = c;
  std::reverse(shuffled.centers.begin(), shuffled.centers.end());
  std::swap(shuffled.centers[1], shuffled.centers[6]);
  CHECK(avg.ensemble_average(shuffled) == avg.ensemble_average(c));

  const Grid& g = demo.grid();
  const auto f = series_of(g, 100.0, demo_f);
  const auto h = series_of(g, 100.0, [](double x) { return std::cos(0.7 * x); });
  const auto mix = series_of(g, 100.0, [](double x) { return 2.0 * demo_f(x) - 3.0 * std::cos(0.7 * x); });
  const double lhs = ensemble_average(mix, c, cfg);
  const double rhs = 2.0 * ensemble_average(f, c, cfg) - 3.0 * ensemble_average(h, c, cfg);
  CHECK(lhs == rel(rhs).epsilon(1e-12));

  CHECK(ensemble_average(series_of(g, 100.0, [](double) { return 0.0; }), c, cfg) == 0.0);
}

TEST_CASE("integral averages") {
  const EnsembleConfig cfg;
  const auto a = integral_average(demo_series(10.0), cfg);
  CHECK(std::abs(a.unit_mass_integral - -0.003880) < 2e-4);
  const double plain = oracle::integrate(demo_f, {-10, -5, 0, 5, 10}, 64, 24) / 20.0;
  CHECK(a.plain_mean == rel(plain).epsilon(1e-4));
  CHECK(a.unit_mass_integral == rel(2.0 * plain).epsilon(1e-4));

  const auto one = series_of(demo_series(10.0).grid(), 100.0, [](double) { return 1.0; });
  const auto b = integral_average(one, cfg);
  CHECK(b.F0 == rel(eta_mean(1.0) * space_mean([](double) { return 1.0; }, 0.0, 10.0, 1.0)).epsilon(1e-10));
  CHECK(b.plain_mean == rel(1.0).epsilon(1e-14));

  const auto zero = integral_average(series_of(demo_series(10.0).grid(), 100.0, [](double) { return 0.0; }), cfg);
  CHECK(zero.F0 == 0.0);
  CHECK(zero.plain_mean == 0.0);
  CHECK(convention_names().front() == "plain_mean");
  CHECK(convention_value(a, "unit_mass_integral") == a.unit_mass_integral);
}

TEST_CASE("sweeps: ordering, comparability and detection") {
  const EnsembleConfig cfg;
  const double K = analytic_kstar(1, cfg.K1, cfg.K2);
  const Grid g = demo_grid(10.0, 24576);
  const double scales[] = {0.25, 0.5, 1.0, 2.0, 5.0, 10.0};

  SUBCASE("constant density") {
    const auto s = scale_sweep(series_of(g, 100.0, [](double) { return 1.5; }), scales, cfg);
    for (const auto& p : s.points) {
      CHECK(p.value_min <= p.value_uniform + 1e-12);
      CHECK(p.value_uniform <= p.value_max + 1e-12);
      CHECK(std::abs(p.value_max - p.value_uniform) <= 1e-9 * p.value_uniform);
      CHECK(p.value_min >= s.F0 / K);
      CHECK(p.value_max <= K * s.F0);
    }
    CHECK(detect_scales(s, 0.5).flagged_scales.empty());
    const auto prop = propagation_report(s, 1.0, 2.0);
    CHECK(prop.sufficient_data);
    CHECK(prop.persists);
    REQUIRE(prop.exponent.has_value());
    CHECK(*prop.exponent < 0.1);
    CHECK_FALSE(propagation_report(s, 6.0, 2.0).sufficient_data);
  }
  SUBCASE("nonnegative demo density") {
    const auto s = scale_sweep(series_of(g, 100.0, [](double x) { return std::abs(demo_f(x)); }), scales, cfg);
    for (const auto& p : s.points) {
      CHECK(p.value_min >= s.F0 / K);
      CHECK(p.value_max <= K * s.F0);
      CHECK(p.value_min <= p.value_uniform + 1e-12);
      CHECK(p.value_uniform <= p.value_max + 1e-12);
    }
  }
  SUBCASE("half waves of sin(pi x / 5)") {
    const double sc[] = {0.5, 1.0, 2.0, 10.0};
    const auto s = scale_sweep(series_of(g, 100.0, [](double x) { return std::sin(kPi * x / 5.0); }), sc, cfg);
    CHECK(s.points[0].value_max > 0.0);
    CHECK(s.points[0].value_min < 0.0);
    // Spreads relative to F0 of |f|: about 0.4-0.55 for R <= 2, 0.27 at R0.
    const auto det = detect_scales(s, 0.35);
    for (double R : {0.5, 1.0, 2.0})
      CHECK(std::find(det.flagged_scales.begin(), det.flagged_scales.end(), R) != det.flagged_scales.end());
    CHECK(std::find(det.flagged_scales.begin(), det.flagged_scales.end(), 10.0) == det.flagged_scales.end());
    const auto all = detect_scales(s, 0.0);
    std::size_t positive = 0;
    for (double v : all.spread) positive += v > 0.0;
    CHECK(all.flagged_scales.size() == positive);
  }
}

TEST_CASE("kstar check") {
  const EnsembleConfig cfg;
  const Grid g = demo_grid(10.0, 24576);
  const double scales[] = {0.5, 2.0};
  const auto rep = kstar_check(series_of(g, 100.0, [](double) { return 1.0; }), scales, 10, cfg, 7);
  CHECK(rep.within_bound);
  CHECK(std::isfinite(rep.empirical));
  CHECK(rep.empirical <= rep.analytic);
  CHECK(rep.covers_tested == 20);
  CHECK_THROWS_AS(kstar_check(series_of(g, 100.0, [](double x) { return x; }), scales, 2, cfg, 1), ValidationError);
}

TEST_CASE("config validation") {
  EnsembleConfig c;
  c.delta = 0.0;
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c = {};
  c.rho1 = 0.5;
  CHECK_THROWS_AS(c.validate(), ValidationError);
  CHECK(analytic_kstar(1, 3, 3) == rel(3 * 4 * 2 * 9));
}
