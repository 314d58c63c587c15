#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <string>

#include "../support/approx.hpp"
#include "cscope/covers.hpp"
#include "cscope/error.hpp"

using namespace cscope;

TEST_CASE("uniform cover: single centre at R = R0") {
  for (int d = 1; d <= 3; ++d) {
    const Cover c = uniform_cover(10.0, 10.0, d, 1, 1);
    REQUIRE(c.n() == 1);
    CHECK(c.centers[0] == Point{0.0, 0.0, 0.0});
    CHECK(validate_cover(c).valid());
  }
}

TEST_CASE("uniform cover: 1D, R0 = 10, R = 1") {
  const Cover c = uniform_cover(10.0, 1.0, 1, 3, 3);
  REQUIRE(c.n() == 10);
  auto xs = c.centers;
  std::sort(xs.begin(), xs.end());
  for (std::size_t i = 0; i < xs.size(); ++i) CHECK(xs[i][0] == rel(-9.0 + 2.0 * i));
  const auto rep = validate_cover(c);
  CHECK(rep.covers_domain);
  CHECK(rep.n_in_bounds);
  CHECK(rep.max_local_multiplicity <= 2);
  CHECK(rep.lattice_spacing <= 1.0 / 8.0);
}

TEST_CASE("uniform cover: infeasible K1 names the minimum") {
  try {
    uniform_cover(1.0, 0.5, 3, 1, 64);
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("K1") != std::string::npos);
  }
}

TEST_CASE("uniform cover: valid across dimensions and scales with default constants") {
  for (int d = 1; d <= 3; ++d)
    for (double R : {1.0, 0.7, 0.5, 0.3, 0.26}) {
      if (d == 3 && R < 0.3) continue;
      const Cover c = uniform_cover(1.0, R, d, default_K1(d), default_K2(d));
      const auto rep = validate_cover(c);
      CHECK_MESSAGE(rep.valid(), "d = " << d << ", R = " << R);
      for (const Point& p : c.centers) CHECK(std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]) <= 1.0 + 1e-12);
    }
}

TEST_CASE("validate_cover: missing centre and excess multiplicity") {
  Cover c = uniform_cover(10.0, 1.0, 1, 3, 3);
  c.centers.erase(c.centers.begin() + 4);
  const auto gap = validate_cover(c);
  CHECK_FALSE(gap.covers_domain);
  REQUIRE(gap.uncovered_point.has_value());

  Cover one = uniform_cover(10.0, 10.0, 1, 5, 3);
  one.centers.assign(4, Point{0.0, 0.0, 0.0});
  const auto dup = validate_cover(one);
  CHECK(dup.max_local_multiplicity == 4);
  CHECK_FALSE(dup.multiplicity_ok);
  CHECK(dup.worst_multiplicity_point.has_value());
}

TEST_CASE("random covers are valid and reproducible") {
  for (int d = 1; d <= 3; ++d)
    for (std::uint64_t seed : {1u, 2u, 3u}) {
      const double R = d == 3 ? 0.5 : 0.3;
      const Cover a = random_cover(1.0, R, d, default_K1(d), default_K2(d), seed);
      const Cover b = random_cover(1.0, R, d, default_K1(d), default_K2(d), seed);
      CHECK(validate_cover(a).valid());
      CHECK(a.centers == b.centers);
    }
}

TEST_CASE("optimize_cover with a synthetic objective") {
  const Cover base = uniform_cover(10.0, 1.0, 1, 3, 3);
  const LocalValueFn values = [](std::span<const Point> x) {
    std::vector<double> v;
    for (const Point& p : x) v.push_back(std::sin(p[0]));
    return v;
  };
  const auto mean = [&](const Cover& c) {
    const auto v = values(c.centers);
    double s = 0.0;
    for (double x : v) s += x;
    return s / v.size();
  };
  SUBCASE("none returns the base") {
    CHECK(optimize_cover(base, values, BiasObjective{BiasDirection::None}).centers == base.centers);
  }
  SUBCASE("directions move the mean and keep validity") {
    OptimizeStats st;
    const Cover hi = optimize_cover(base, values, BiasObjective{BiasDirection::Maximize}, &st);
    const Cover lo = optimize_cover(base, values, BiasObjective{BiasDirection::Minimize});
    CHECK(validate_cover(hi).valid());
    CHECK(validate_cover(lo).valid());
    CHECK(mean(hi) >= mean(base) - 1e-12);
    CHECK(mean(lo) <= mean(base) + 1e-12);
    CHECK(mean(hi) > 0.0);
    CHECK(mean(lo) < 0.0);
    CHECK(st.candidates > 0);
  }
  SUBCASE("flat objective leaves the mean unchanged") {
    const LocalValueFn flat = [](std::span<const Point> x) { return std::vector<double>(x.size(), 2.5); };
    const Cover hi = optimize_cover(base, flat, BiasObjective{BiasDirection::Maximize});
    CHECK(validate_cover(hi).valid());
  }
}

TEST_CASE("sorted centres are lexicographic") {
  std::vector<Point> p{{1, 0, 0}, {0, 2, 0}, {0, 1, 5}, {0, 1, 4}};
  const auto s = sorted_centers(p);
  CHECK(s[0] == Point{0, 1, 4});
  CHECK(s[3] == Point{1, 0, 0});
}
