#include <doctest.h>

#include <cmath>
#include <numbers>

#include "../support/approx.hpp"
#include "../support/oracles.hpp"
#include "cscope/error.hpp"
#include "cscope/localize.hpp"

using namespace cscope;

namespace {

constexpr double kPi = std::numbers::pi;

Grid line_grid(double origin, double extent, int n, bool periodic) {
  const double o[] = {origin}, e[] = {extent};
  const int r[] = {n};
  const bool p[] = {periodic};
  return make_grid(o, e, r, p);
}

double smooth3(double x, double y, double z) { return std::sin(x + 0.3) * std::cos(2.0 * y) + 0.5 * std::cos(z - x) + 0.2; }

std::vector<double> sample(const Grid& g, const std::function<double(const Point&)>& f, int comps = 1,
                           const std::function<double(const Point&, int)>& fv = {}) {
  std::vector<double> v(g.cell_count() * comps);
  for (std::size_t i = 0; i < g.cell_count(); ++i) {
    const Point x = g.cell_center(i);
    for (int c = 0; c < comps; ++c) v[i * comps + c] = comps == 1 ? f(x) : fv(x, c);
  }
  return v;
}

}  // namespace

TEST_CASE("midpoint localisation of a Gaussian bump matches a high-order oracle") {
  const Grid g = line_grid(-10.0, 20.0, 4096, false);
  const LocalIntegrator li(g);
  CHECK_FALSE(li.spectral());
  const double R = 1.0, xi = 0.37;
  const auto bump = [&](double x) { return std::exp(-0.5 * std::pow((x - xi) / (R / 4), 2)); };
  const auto d = li.prepare(sample(g, [&](const Point& x) { return bump(x[0]); }), 1);
  for (double delta : {1.0, 0.5}) {
    const double got = li.evaluate(d, Kernel{Pairing::Value, R, 4, delta}, Point{xi, 0, 0});
    const double want = oracle::integrate([&](double x) { return bump(x) * std::pow(oracle::ramp(std::abs(x - xi) / R), 4 * delta); },
                                          {xi - 2 * R, xi - R, xi, xi + R, xi + 2 * R}, 32);
    CHECK(got == rel(want).epsilon(1e-8));
  }
  CHECK_THROWS_AS(li.evaluate(d, Kernel{Pairing::Value, 1.0, 4, 1.0}, Point{9.0, 0, 0}), ValidationError);
}

TEST_CASE("spectral localisation in 3D matches the spherical oracle") {
  const Grid g = periodic_box(3, 2.0 * kPi, 32);
  const LocalIntegrator li(g);
  REQUIRE(li.spectral());
  const double R = kPi / 4;
  const double c[3] = {0.4, -0.7, 1.1};
  const Point cp{c[0], c[1], c[2]};
  const auto d = li.prepare(sample(g, [](const Point& x) { return smooth3(x[0], x[1], x[2]); }), 1);

  for (double delta : {1.0, 0.5, 0.3}) {
    CAPTURE(delta);
    const double got = li.evaluate(d, Kernel{Pairing::Value, R, 4, delta}, cp);
    const double want = oracle::ball3(
        [&](double x, double y, double z, double r) { return smooth3(x, y, z) * std::pow(oracle::ramp(r / R), 4 * delta); }, c, R);
    CHECK(got == rel(want).epsilon(1e-10));
  }

  SUBCASE("Laplacian pairing") {
    const double got = li.evaluate(d, Kernel{Pairing::Laplacian, R, 4}, cp);
    const double want = oracle::ball3(
        [&](double x, double y, double z, double r) {
          const double s = r / R, p = oracle::ramp(s);
          const double d1 = 4 * std::pow(p, 3) * oracle::ramp_d1(s) / R;
          const double d2 = (12 * p * p * std::pow(oracle::ramp_d1(s), 2) + 4 * std::pow(p, 3) * oracle::ramp_d2(s)) / (R * R);
          return smooth3(x, y, z) * (d2 + 2.0 * d1 / r);
        },
        c, R);
    CHECK(got == rel(want).epsilon(1e-9));
  }

  SUBCASE("divergence pairing") {
    const auto vf = [](const Point& x, int comp) {
      return comp == 0 ? std::sin(x[0]) + std::sin(x[1]) : comp == 1 ? std::cos(2 * x[1] + x[2]) : 0.3 * std::sin(2 * x[0] + x[2]);
    };
    const auto dv = li.prepare(sample(g, {}, 3, vf), 3);
    const double got = li.evaluate(dv, Kernel{Pairing::Divergence, R, 4}, cp);
    const double want = oracle::ball3(
        [&](double x, double y, double z, double r) {
          if (r <= R) return 0.0;
          const double s = r / R, p = oracle::ramp(s);
          const double d1 = 4 * std::pow(p, 3) * oracle::ramp_d1(s) / R;
          const Point q{x, y, z};
          double dot = 0.0;
          for (int a = 0; a < 3; ++a) dot += vf(q, a) * (q[a] - c[a]) / r;
          return dot * d1;
        },
        c, R);
    CHECK(std::abs(want) > 1e-2);
    CHECK(got == rel(want).epsilon(1e-9));
  }

  SUBCASE("batch evaluation equals single evaluation") {
    const std::vector<Point> centers{{0, 0, 0}, {1, 2, -2}, {3.0, 3.0, 3.0}};
    const auto batch = li.evaluate(d, Kernel{Pairing::Value, R, 4, 1.0}, centers);
    for (std::size_t i = 0; i < centers.size(); ++i)
      CHECK(batch[i] == li.evaluate(d, Kernel{Pairing::Value, R, 4, 1.0}, centers[i]));
  }
  CHECK_THROWS_AS(li.evaluate(d, Kernel{Pairing::Value, 2.0, 4, 1.0}, cp), ValidationError);
}

TEST_CASE("spectral localisation in 1D and 2D") {
  SUBCASE("1D") {
    const Grid g = line_grid(-kPi, 2 * kPi, 64, true);
    const LocalIntegrator li(g);
    const auto f = [](double x) { return std::cos(3 * x) + std::sin(x) + 1.0; };
    const auto d = li.prepare(sample(g, [&](const Point& x) { return f(x[0]); }), 1);
    const double c = 0.9, R = 0.6;
    const double want = oracle::integrate([&](double x) { return f(x) * std::pow(oracle::ramp(std::abs(x - c) / R), 4); },
                                          {c - 2 * R, c - R, c, c + R, c + 2 * R});
    CHECK(li.evaluate(d, Kernel{Pairing::Value, R, 4, 1.0}, Point{c, 0, 0}) == rel(want).epsilon(1e-11));
  }
  SUBCASE("2D") {
    const Grid g = periodic_box(2, 2 * kPi, 32);
    const LocalIntegrator li(g);
    const auto f = [](double x, double y) { return std::cos(2 * x - y) + 0.5; };
    const auto d = li.prepare(sample(g, [&](const Point& x) { return f(x[0], x[1]); }), 1);
    const double cx = -0.4, cy = 0.8, R = 0.7;
    const auto rr = oracle::composite({0.0, R, 2 * R}, 8, 20);
    double want = 0.0;
    for (std::size_t i = 0; i < rr.x.size(); ++i) {
      double ring = 0.0;
      for (int k = 0; k < 128; ++k) {
        const double ph = 2 * kPi * k / 128;
        ring += f(cx + rr.x[i] * std::cos(ph), cy + rr.x[i] * std::sin(ph));
      }
      want += rr.w[i] * rr.x[i] * ring * 2 * kPi / 128 * std::pow(oracle::ramp(rr.x[i] / R), 4);
    }
    CHECK(li.evaluate(d, Kernel{Pairing::Value, R, 4, 1.0}, Point{cx, cy, 0}) == rel(want).epsilon(1e-10));
  }
}

TEST_CASE("radial transform of the unit ball indicator") {
  const double q = 2.5;
  const double brk[] = {0.5};
  const double want = 4 * kPi * (std::sin(q) - q * std::cos(q)) / (q * q * q);
  CHECK(radial_transform([](double) { return 1.0; }, 1.0, 3, q, brk) == rel(want).epsilon(1e-13));
  CHECK(radial_transform([](double) { return 1.0; }, 1.0, 1, q, brk) == rel(2 * std::sin(q) / q).epsilon(1e-13));
  CHECK(radial_transform([](double) { return 1.0; }, 1.0, 2, q, brk) ==
        rel(2 * kPi * std::cyl_bessel_j(1.0, q) / q).epsilon(1e-12));
}
