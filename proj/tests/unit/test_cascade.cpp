#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "../support/approx.hpp"
#include "../support/flows.hpp"
#include "../support/oracles.hpp"
#include "cscope/calculus.hpp"
#include "cscope/cascade.hpp"
#include "cscope/ensemble.hpp"
#include "cscope/error.hpp"
#include "cscope/generators.hpp"

using namespace cscope;

namespace {

constexpr double kPi = std::numbers::pi;

FlowSeries zero_flow(const Grid& g, double T = 1.0, int steps = 4) {
  auto z = std::make_shared<const Field>(g, 3);
  return FlowSeries{FieldSeries::constant(z, T, steps), FieldSeries::constant(z, T, steps)};
}

FieldSeries scaled_series(FieldPtr base, std::vector<double> times, std::vector<double> amps) {
  std::vector<FieldPtr> snaps;
  for (std::size_t k = 0; k < times.size(); ++k) {
    std::vector<double> v(base->values().begin(), base->values().end());
    for (double& x : v) x *= amps[k];
    snaps.push_back(std::make_shared<const Field>(base->grid(), 3, times[k], std::move(v)));
  }
  return FieldSeries(std::move(times), std::move(snaps));
}

GeneratorParams with(std::initializer_list<std::pair<const std::string, double>> v, std::string out = "velocity") {
  GeneratorParams p;
  p.values = v;
  p.output = std::move(out);
  return p;
}

}  // namespace

TEST_CASE("coherence: parallel directions give zero") {
  const Grid g = periodic_box(3, 2 * kPi, 16);
  const auto om = testflows::sample(g, 3, 0.0, [](const Point& x, double* v) { v[2] = 1.0 + 0.5 * std::sin(x[0]); });
  const auto cf = coherence_measure(*om, 0.5, 1.0);
  CHECK(cf.sup == 0.0);
  CHECK(cf.admissible_points == g.cell_count());
}

TEST_CASE("coherence: floor above max|omega| flags every point") {
  const Grid g = periodic_box(3, 2 * kPi, 8);
  const auto om = testflows::rotating(g, 1.0);
  const auto cf = coherence_measure(*om, 0.5, 1.0, 2.0);
  CHECK(std::all_of(cf.undefined.begin(), cf.undefined.end(), [](auto u) { return u == 1; }));
  CHECK(cf.sup == 0.0);
  CHECK(cf.admissible_points == 0);
}

TEST_CASE("coherence: radius below the spacing is rejected") {
  const Grid g = periodic_box(3, 2 * kPi, 8);
  CHECK_THROWS_AS(coherence_measure(*testflows::rotating(g, 1.0), 0.5, 0.1), ValidationError);
}

TEST_CASE("coherence: rotating direction matches the analytic grid supremum and brute force") {
  const Grid g = periodic_box(3, 2 * kPi, 32);
  const double theta = 2.0, r = 1.3;
  const auto om = testflows::rotating(g, theta, 0.3);
  const auto cf = coherence_measure(*om, 0.5, r);
  const double h = g.spacing(1);
  double expect = 0.0;
  for (int j = 1; j * h <= r * (1 + 1e-12); ++j) expect = std::max(expect, std::abs(std::sin(theta * j * h)) / std::sqrt(j * h));
  double worst = 0.0;
  for (std::size_t i = 0; i < g.cell_count(); ++i) worst = std::max(worst, std::abs(cf.rho(i, 0) - expect));
  CHECK(worst < 1e-12);

  std::vector<std::size_t> some;
  for (std::size_t i = 0; i < g.cell_count(); i += 997) some.push_back(i);
  const auto bf = testflows::brute_force_coherence(*om, 0.5, r, kVorticityFloor, true, {}, {}, some);
  for (std::size_t i : some) CHECK(cf.rho(i, 0) == bf.rho[i]);
}

TEST_CASE("coherence: random field equals brute force bitwise, scale invariant") {
  const Grid g = periodic_box(3, 2 * kPi, 16);
  const Field om = sample_analytic("random_multiscale", with({{"seed", 3}, {"kmax", 6}}, "vorticity"), g, 0.0);
  for (double gamma : {0.5, 0.8}) {
    for (double r : {0.5, 1.7, 100.0}) {
      const auto cf = coherence_measure(om, gamma, r);
      const auto bf = testflows::brute_force_coherence(om, gamma, r, kVorticityFloor, true);
      bool same = true;
      for (std::size_t i = 0; i < g.cell_count(); ++i) same = same && cf.rho(i, 0) == bf.rho[i];
      CHECK(same);
    }
  }
  std::vector<double> v(om.values().begin(), om.values().end());
  for (double& x : v) x *= 2.0;
  const Field om2(g, 3, 0.0, std::move(v));
  const auto a = coherence_measure(om, 0.5, 1.0), b = coherence_measure(om2, 0.5, 1.0);
  bool same = true;
  for (std::size_t i = 0; i < g.cell_count(); ++i) same = same && a.rho(i, 0) == b.rho(i, 0);
  CHECK(same);
}

TEST_CASE("check_A1: thresholds, planar fields and the all-pairs oracle") {
  const Grid g = periodic_box(3, 2 * kPi, 16);
  const auto flow = sample_flow_series("abc_flow", {}, g, 1.0, 1);

  SUBCASE("M above max |grad u|") {
    const auto rep = check_A1(flow, 1.0, 1e6, 1.0);
    CHECK(rep.C1_meas == 0.0);
    CHECK(rep.admissible_pairs == 0);
    CHECK(rep.holds);
  }
  SUBCASE("planar flow") {
    const auto planar = sample_flow_series("random_multiscale", with({{"seed", 5}, {"planar", 1}, {"kmax", 6}}), g, 1.0, 2);
    const auto rep = check_A1(planar, 1.0, 0.0, 1.0);
    CHECK(rep.C1_meas == 0.0);
    CHECK(rep.admissible_pairs > 0);
  }
  SUBCASE("median threshold against brute force") {
    const Field gu = gradient(flow.velocity.snapshot(0));
    std::vector<double> fro(g.cell_count());
    for (std::size_t i = 0; i < fro.size(); ++i) {
      double s = 0.0;
      for (int c = 0; c < 9; ++c) s += gu(i, c) * gu(i, c);
      fro[i] = std::sqrt(s);
    }
    std::vector<double> sorted = fro;
    std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
    const double M = sorted[sorted.size() / 2];
    const double R0 = 1.0;
    const auto rep = check_A1(flow, R0, M, 1.0);

    std::vector<std::uint8_t> xm(g.cell_count()), ym(g.cell_count());
    for (std::size_t i = 0; i < g.cell_count(); ++i) {
      const Point c = g.cell_center(i);
      const double r = std::sqrt(c[0] * c[0] + c[1] * c[1] + c[2] * c[2]);
      xm[i] = r <= 2.0 * R0 && fro[i] > M;
      ym[i] = r <= 2.0 * R0 + 1.0;
    }
    double expect = 0.0;
    for (std::size_t k = 0; k < flow.vorticity.size(); ++k) {
      const auto bf = testflows::brute_force_coherence(flow.vorticity.snapshot(k), 0.5, INFINITY, kVorticityFloor,
                                                       false, xm, ym);
      expect = std::max(expect, *std::max_element(bf.rho.begin(), bf.rho.end()));
    }
    CHECK(expect > 0.0);
    CHECK(rep.C1_meas == expect);
    CHECK(rep.curl_residual < 1e-12);
  }
  SUBCASE("velocity and vorticity that disagree") {
    FlowSeries bad{flow.velocity, flow.velocity.scaled(2.0)};
    CHECK_THROWS_AS(check_A1(bad, 1.0, 0.0, 1.0), ValidationError);
  }
}

TEST_CASE("hybrid integral") {
  const Grid g = periodic_box(3, 2 * kPi, 16);
  SUBCASE("planar and zero fields") {
    const auto planar = sample_series("random_multiscale", with({{"seed", 2}, {"planar", 1}, {"kmax", 6}}, "vorticity"), g, 1.0, 2);
    CHECK(hybrid_integral(planar, Point{}, 0.5) == 0.0);
    const auto z = FieldSeries::constant(std::make_shared<const Field>(g, 3), 1.0, 2);
    CHECK(hybrid_integral(z, Point{}, 0.5) == 0.0);
  }
  SUBCASE("rotating direction against the analytic supremum") {
    const Grid fine = periodic_box(3, 2 * kPi, 64);
    const double R = 0.75, T = 1.0;
    const auto om = FieldSeries::constant(testflows::rotating(fine, 1.0), T, 4);
    // sup over 0 < s <= 2R of sin(s)/sqrt(s), attained at tan(s) = 2s.
    double s = 1.1;
    for (int it = 0; it < 50; ++it) s -= (std::tan(s) - 2 * s) / (1.0 / (std::cos(s) * std::cos(s)) - 2.0);
    const double rho = std::sin(s) / std::sqrt(s);
    const double expect = rho * rho * 4.0 / 3.0 * kPi * std::pow(2 * R, 3) * std::min(T, 4 * R * R);
    CHECK(hybrid_integral(om, Point{0.1, 0.0, -0.2}, R) == rel(expect).epsilon(0.01));
  }
}

TEST_CASE("diagnostics: zero field, scaling and single mode oracle") {
  const Grid g = periodic_box(3, 2 * kPi, 48);
  SUBCASE("zero field") {
    const auto z = FieldSeries::constant(std::make_shared<const Field>(g, 3), 1.0, 2);
    const auto d = diagnostics(z, 0.75, 1.0);
    CHECK(d.E0 == 0.0);
    CHECK(d.P0 == 0.0);
    CHECK(d.degenerate);
    CHECK_FALSE(d.sigma0.has_value());
    CHECK_THROWS_AS(check_A2(d, 0.1, 1.0), ValidationError);
  }
  SUBCASE("sigma0 is scale invariant") {
    const auto om = sample_series("abc_flow", with({}, "vorticity"), periodic_box(3, 2 * kPi, 16), 1.0, 6);
    const double s = *diagnostics(om, 0.75, 1.0).sigma0;
    for (double lam : {-3.0, 0.01, 7.5}) CHECK(*diagnostics(om.scaled(lam), 0.75, 1.0).sigma0 == rel(s).epsilon(1e-12));
  }
  SUBCASE("single mode against quadrature") {
    const double k = 8.0, A = 1.3, R0 = 1.0, T = 1.0, rho = 0.75;
    const auto om = sample_series("single_mode", with({{"k", k}, {"A", A}}, "vorticity"), g, T, 3);
    const auto d = diagnostics(om, rho, R0);
    const auto o = oracle::single_mode(k, A, R0, T);
    CHECK(d.E0 == rel(o.E0).epsilon(1e-10));
    CHECK(d.P0_gradient == rel(o.P0_gradient).epsilon(1e-10));
    CHECK(d.P0_final == rel(o.P0_final).epsilon(1e-10));
    CHECK(*d.sigma0 == rel(o.sigma0()).epsilon(1e-10));
    CHECK(*d.sigma0 >= 0.5 / k);
    CHECK(*d.sigma0 <= 2.0 / k);
  }
}

TEST_CASE("check_A2 margins") {
  VorticityDiagnostics d;
  d.sigma0 = 0.01;
  auto a = check_A2(d, 0.1, 1.0);
  CHECK(a.holds);
  CHECK(a.margin == rel(0.09));
  d.sigma0 = 1.0;
  CHECK_FALSE(check_A2(d, 0.5, 1.0).holds);
}

TEST_CASE("check_A3: zero, growing and spiking series") {
  const Grid g = periodic_box(3, 2 * kPi, 16);
  const auto base = std::make_shared<const Field>(sample_analytic("abc_flow", with({}, "vorticity"), g, 0.0));
  SUBCASE("zero") {
    const auto z = FieldSeries::constant(std::make_shared<const Field>(g, 3), 1.0, 2);
    const auto r = check_A3(z, 1.0, 1.0);
    CHECK(r.localization_integral == 0.0);
    CHECK(r.localization_holds);
    CHECK(r.modulation_degenerate);
    CHECK_FALSE(r.modulation_ratio.has_value());
  }
  SUBCASE("growing") {
    const auto s = scaled_series(base, {0.0, 0.25, 0.5, 0.75, 1.0}, {0.0, 0.25, 0.5, 0.75, 1.0});
    const auto r = check_A3(s, 1.0, 1.0);
    CHECK(*r.modulation_ratio == 1.0);
    CHECK(r.modulation_holds);
    CHECK(r.warnings.empty());
  }
  SUBCASE("spike at T/2") {
    const auto s = scaled_series(base, {0.0, 0.5, 1.0, 1.5, 2.0}, {0.5, 0.8, 1.0, 0.6, std::sqrt(0.1)});
    const auto r = check_A3(s, 1.0, 1.0);
    CHECK(*r.modulation_ratio == rel(0.1).epsilon(1e-12));
    CHECK_FALSE(r.modulation_holds);
  }
  SUBCASE("localization integral against quadrature and R0 warning") {
    const double T = 1.0;
    const auto s = sample_series("abc_flow", with({}, "vorticity"), periodic_box(3, 4 * kPi, 32), T, 24);
    const auto r = check_A3(s, 1.2, 1.0);
    // |omega|^2 = e^{-2t} (3 + 2 sin z cos y + 2 sin x cos z + 2 sin y cos x).
    const double c[3] = {0.0, 0.0, 0.0};
    const double rl = 2.4 + std::cbrt(1.44);
    const double space = oracle::ball3(
        [](double x, double y, double z, double) {
          return 3 + 2 * std::sin(z) * std::cos(y) + 2 * std::sin(x) * std::cos(z) + 2 * std::sin(y) * std::cos(x);
        },
        c, rl / 2.0, 16, 64, 128);
    const double expect = space * (1 - std::exp(-2 * T)) / 2;
    CHECK(r.localization_integral == rel(expect).epsilon(1e-6));
    CHECK(r.localization_holds == (r.localization_integral <= 1.0));
    CHECK(r.warnings.size() == 1);
  }
}

TEST_CASE("local flux against quadrature on the ABC flow") {
  const double T = 1.0, R = kPi / 4, rho = 0.75;
  // 64 snapshots: the cubic-in-time error is about 1e-6 at 32.
  const auto flow = sample_flow_series("abc_flow", {}, periodic_box(3, 2 * kPi, 32), T, 64);
  const Point x0{0.2, -0.1, 0.3};
  const double phi = local_flux(flow, x0, R, rho);
  const double c[3] = {x0[0], x0[1], x0[2]};
  const double space = oracle::ball3(
      [&](double x, double y, double z, double r) {
        const double u0 = std::sin(z) + std::cos(y), u1 = std::sin(x) + std::cos(z), u2 = std::sin(y) + std::cos(x);
        const double s = r / R;
        const double dpsi = 4 * std::pow(oracle::ramp(s), 3) * oracle::ramp_d1(s) / R;
        const double radial = (u0 * (x - c[0]) + u1 * (y - c[1]) + u2 * (z - c[2])) / r;
        return 0.5 * (u0 * u0 + u1 * u1 + u2 * u2) * radial * dpsi;
      },
      c, R, 16, 64, 128);
  const double time = oracle::integrate([&](double t) { return std::pow(1 - oracle::ramp(3 * t / T), 4) * std::exp(-3 * t); },
                                        {0.0, T / 3, 2 * T / 3, T}, 8, 20);
  const double expect = time * space / (T * R * R * R);
  CHECK(std::abs(expect) > 1e-3);
  CHECK(phi == rel(expect).epsilon(1e-6));
}

TEST_CASE("ensemble flux invariants") {
  const Grid g = periodic_box(3, 2 * kPi, 16);
  const auto flow = sample_flow_series("abc_flow", {}, g, 1.0, 6);
  CascadeParams p;
  const double R = 0.5;
  const Cover c = uniform_cover(p.R0, R, 3, p.K1, p.K2);
  const FluxPoint fp = ensemble_flux(flow, c, p.rho);
  CHECK(fp.Psi == R * R * R * fp.Phi);
  CHECK(fp.n == c.n());

  Cover one{{Point{0.3, 0.1, -0.2}}, 0.7, 1.0, 30, 64, 3};
  CHECK(ensemble_flux(flow, one, p.rho).Phi == local_flux(flow, one.centers[0], 0.7, p.rho));

  const auto z = zero_flow(g);
  const auto fz = ensemble_flux(z, c, p.rho);
  CHECK(fz.Phi == 0.0);
  CHECK(fz.Psi == 0.0);

  FlowSeries still{flow.velocity.scaled(0.0), flow.vorticity};
  CHECK(local_flux(still, Point{}, 0.5) == 0.0);

  const double scales[] = {0.25, 0.5, 1.0};
  const FluxCurve curve = flux_curve(flow, scales, p);
  REQUIRE(curve.points.size() == 3);
  for (const auto& q : curve.points) CHECK(q.Psi == q.R * q.R * q.R * q.Phi);
}

TEST_CASE("balance identity") {
  SUBCASE("zero flow") {
    const auto b = balance_residual(zero_flow(periodic_box(3, 2 * kPi, 8)), Point{}, 0.5);
    CHECK(b.flux == 0.0);
    CHECK(b.palinstrophy == 0.0);
    CHECK(b.residual == 0.0);
    CHECK(b.normalized_residual == 0.0);
  }
  SUBCASE("planar Taylor-Green has no stretching") {
    const auto flow = sample_flow_series("taylor_green_2d3d", {}, periodic_box(3, 2 * kPi, 16), 1.0, 12);
    const auto b = balance_residual(flow, Point{0.2, 0.0, 0.0}, kPi / 4);
    CHECK(b.scale > 0.0);
    CHECK(std::abs(b.stretching) <= 1e-10 * b.scale);
  }
  SUBCASE("ABC residual converges under refinement") {
    const Point x0{0.1, -0.2, 0.3};
    const auto coarse = balance_residual(sample_flow_series("abc_flow", {}, periodic_box(3, 2 * kPi, 12), 1.0, 6), x0, kPi / 4);
    const auto fine = balance_residual(sample_flow_series("abc_flow", {}, periodic_box(3, 2 * kPi, 24), 1.0, 12), x0, kPi / 4);
    CHECK(fine.normalized_residual * 3.0 <= coarse.normalized_residual);
    CHECK(fine.normalized_residual < 1e-4);
    const auto mid = balance_residual(sample_flow_series("abc_flow", {}, periodic_box(3, 2 * kPi, 24), 1.0, 12), x0,
                                      kPi / 4, 0.75, 0.8);
    CHECK(mid.t_eval == 0.8);
    CHECK(mid.normalized_residual < 1e-4);
  }
}

TEST_CASE("verify_cascade") {
  VorticityDiagnostics d;
  d.P0 = 2.0;
  d.sigma0 = 0.05;
  const double K = 100.0;
  FluxCurve curve;
  for (double R : {0.5, 1.0, 2.0, 4.0}) curve.points.push_back({R, 2.0, R * R * R * 2.0, 1});

  const auto ok = verify_cascade(curve, d, K, 0.1, 4.0);
  CHECK(ok.verified);
  CHECK(ok.worst_margin == rel(std::log(4 * K)));
  CHECK_FALSE(ok.witness.has_value());

  curve.points[2].Phi = 0.0;
  const auto bad = verify_cascade(curve, d, K, 0.1, 4.0);
  CHECK_FALSE(bad.verified);
  REQUIRE(bad.witness.has_value());
  CHECK(*bad.witness == 2.0);

  const auto empty = verify_cascade(curve, d, K, 0.05 / 8.0, 4.0);
  CHECK(empty.empty_range);
  CHECK_FALSE(empty.verified);
  CHECK(empty.summary.find("empty") != std::string::npos);

  d.sigma0.reset();
  CHECK_THROWS_AS(verify_cascade(curve, d, K, 0.1, 4.0), ValidationError);
}

TEST_CASE("locality ratios") {
  const double K = 10.0;
  FluxCurve curve;
  for (double R : {0.25, 0.5, 1.0, 3.0}) curve.points.push_back({R, 1.5, R * R * R * 1.5, 1});
  const auto rows = locality_ratios(curve, K);
  CHECK(rows.size() == 6);
  for (const auto& row : rows) {
    const double q = row.r / row.R;
    CHECK(row.ratio == rel(q * q * q).epsilon(1e-15));
    CHECK(row.inside);
    CHECK(std::abs(row.ratio - row.identity_rhs) <= 1e-14 * std::abs(row.identity_rhs));
  }
  const auto dy = std::count_if(rows.begin(), rows.end(), [](const LocalityRow& r) { return r.dyadic_k.has_value(); });
  CHECK(dy == 3);

  curve.points[3].Phi = 0.0;
  curve.points[3].Psi = 0.0;
  const auto flagged = locality_ratios(curve, K);
  CHECK(std::count_if(flagged.begin(), flagged.end(), [](const LocalityRow& r) { return r.zero_denominator; }) == 3);
}
