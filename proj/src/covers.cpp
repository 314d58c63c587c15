#include "cscope/covers.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <string>

#include "cscope/error.hpp"

namespace cscope {
namespace {

constexpr double kTol = 1e-12;

void check_params(double R0, double R, int dim, int K1, int K2) {
  if (dim < 1 || dim > 3) throw ValidationError("cover dimension must be 1, 2 or 3");
  if (!(R0 > 0.0) || !std::isfinite(R0)) throw ValidationError("R0 must be positive");
  if (!(R > 0.0) || !(R <= R0 * (1.0 + kTol))) throw ValidationError("cover scale must satisfy 0 < R <= R0");
  if (K1 < 1 || K2 < 1) throw ValidationError("K1 and K2 must be at least 1");
}

double norm2(const Point& p, int dim) {
  double s = 0.0;
  for (int a = 0; a < dim; ++a) s += p[a] * p[a];
  return s;
}

// Points k * s (k integer) inside the closed ball B(0, R0), with per-point
// counters.
class Lattice {
 public:
  Lattice(double R0, double s, int dim) : s_(s), dim_(dim) {
    K_ = static_cast<int>(std::floor(R0 / s * (1.0 + kTol)));
    side_ = 2 * K_ + 1;
    std::size_t total = 1;
    for (int a = 0; a < dim; ++a) total *= static_cast<std::size_t>(side_);
    inside_.assign(total, 0);
    const double lim = R0 * R0 * (1.0 + kTol);
    for (std::size_t f = 0; f < total; ++f) {
      if (norm2(point(f), dim_) <= lim) {
        inside_[f] = 1;
        ++count_;
      }
    }
  }

  std::size_t size() const { return inside_.size(); }
  std::size_t inside_count() const { return count_; }
  bool inside(std::size_t f) const { return inside_[f] != 0; }

  Point point(std::size_t f) const {
    Point p{0.0, 0.0, 0.0};
    for (int a = dim_ - 1; a >= 0; --a) {
      p[a] = (static_cast<int>(f % side_) - K_) * s_;
      f /= side_;
    }
    return p;
  }

  // Visits inside points p with |p - c| < radius (open) or <= radius (closed),
  // both with a relative tolerance that favours the cover.
  template <class Fn>
  void for_each(const Point& c, double radius, bool open, Fn&& fn) const {
    const double r = open ? radius * (1.0 - kTol) : radius * (1.0 + kTol);
    const double r2 = r * r;
    std::array<int, 3> lo{0, 0, 0}, hi{0, 0, 0};
    for (int a = 0; a < dim_; ++a) {
      lo[a] = std::max(-K_, static_cast<int>(std::ceil((c[a] - r) / s_)));
      hi[a] = std::min(K_, static_cast<int>(std::floor((c[a] + r) / s_)));
      if (lo[a] > hi[a]) return;
    }
    for (int i0 = lo[0]; i0 <= hi[0]; ++i0) {
      const double d0 = i0 * s_ - c[0];
      for (int i1 = lo[1]; i1 <= hi[1]; ++i1) {
        const double d1 = dim_ > 1 ? i1 * s_ - c[1] : 0.0;
        for (int i2 = lo[2]; i2 <= hi[2]; ++i2) {
          const double d2 = dim_ > 2 ? i2 * s_ - c[2] : 0.0;
          const double q = d0 * d0 + d1 * d1 + d2 * d2;
          if (open ? !(q < r2) : !(q <= r2)) continue;
          std::size_t f = static_cast<std::size_t>(i0 + K_);
          if (dim_ > 1) f = f * side_ + static_cast<std::size_t>(i1 + K_);
          if (dim_ > 2) f = f * side_ + static_cast<std::size_t>(i2 + K_);
          if (inside_[f]) fn(f);
        }
      }
    }
  }

 private:
  double s_;
  int dim_;
  int K_ = 0;
  int side_ = 1;
  std::size_t count_ = 0;
  std::vector<std::uint8_t> inside_;
};

double validation_spacing(const Cover& c) { return c.R / 8.0; }

bool count_in_bounds(const Cover& c) {
  const double lo = c.scale_ratio();
  const double n = static_cast<double>(c.n());
  return n >= lo * (1.0 - 1e-9) && n <= c.K1 * lo * (1.0 + 1e-9);
}

int max_multiplicity(const Cover& c, const Lattice& lat, std::vector<std::uint16_t>& mult) {
  mult.assign(lat.size(), 0);
  int worst = 0;
  for (const Point& x : c.centers)
    lat.for_each(x, 2.0 * c.R, true, [&](std::size_t f) { worst = std::max<int>(worst, ++mult[f]); });
  return worst;
}

double unit_draw(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

Point project_into_ball(Point p, double R0, int dim) {
  const double r = std::sqrt(norm2(p, dim));
  if (r > R0)
    for (int a = 0; a < dim; ++a) p[a] *= R0 / r;
  return p;
}

}  // namespace

double Cover::scale_ratio() const { return std::pow(R0 / R, dim); }

std::size_t Cover::max_count() const {
  return static_cast<std::size_t>(std::floor(K1 * scale_ratio() * (1.0 + 1e-12)));
}

int default_K1(int dim) { return dim == 1 ? 3 : (dim == 2 ? 8 : 30); }
int default_K2(int dim) { return dim == 1 ? 3 : (dim == 2 ? 16 : 64); }

CoverValidityReport validate_cover(const Cover& cover) {
  CoverValidityReport rep;
  rep.lattice_spacing = validation_spacing(cover);
  rep.n_in_bounds = count_in_bounds(cover);
  if (cover.dim < 1 || cover.dim > 3 || !(cover.R > 0.0) || !(cover.R0 > 0.0)) return rep;
  const Lattice lat(cover.R0, rep.lattice_spacing, cover.dim);
  rep.lattice_points = lat.inside_count();

  std::vector<std::uint16_t> covered(lat.size(), 0);
  for (const Point& x : cover.centers)
    lat.for_each(x, cover.R, false, [&](std::size_t f) { covered[f] = 1; });
  rep.covers_domain = true;
  for (std::size_t f = 0; f < lat.size(); ++f) {
    if (lat.inside(f) && !covered[f]) {
      rep.covers_domain = false;
      rep.uncovered_point = lat.point(f);
      break;
    }
  }

  std::vector<std::uint16_t> mult;
  rep.max_local_multiplicity = max_multiplicity(cover, lat, mult);
  for (std::size_t f = 0; f < lat.size(); ++f)
    if (lat.inside(f) && mult[f] == rep.max_local_multiplicity && rep.max_local_multiplicity > 0) {
      rep.worst_multiplicity_point = lat.point(f);
      break;
    }
  rep.multiplicity_ok = rep.max_local_multiplicity <= cover.K2;
  return rep;
}

Cover uniform_cover(double R0, double R, int dim, int K1, int K2) {
  check_params(R0, R, dim, K1, K2);
  Cover cover{{}, R, R0, K1, K2, dim};
  if (R >= R0) {
    cover.centers.push_back(Point{0.0, 0.0, 0.0});
  } else {
    const int N = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(dim)) * R0 / R - 1e-9));
    const double s = 2.0 * R0 / N;
    std::array<int, 3> hi{0, 0, 0};
    for (int a = 0; a < dim; ++a) hi[a] = N - 1;
    for (int i0 = 0; i0 <= hi[0]; ++i0)
      for (int i1 = 0; i1 <= hi[1]; ++i1)
        for (int i2 = 0; i2 <= hi[2]; ++i2) {
          const int idx[3] = {i0, i1, i2};
          Point c{0.0, 0.0, 0.0};
          double near2 = 0.0;
          for (int a = 0; a < dim; ++a) {
            const double lo = -R0 + idx[a] * s, up = lo + s;
            c[a] = -R0 + (idx[a] + 0.5) * s;
            const double gap = lo > 0.0 ? lo : (up < 0.0 ? -up : 0.0);
            near2 += gap * gap;
          }
          if (near2 < R0 * R0) cover.centers.push_back(project_into_ball(c, R0, dim));
        }
  }
  const double ratio = cover.scale_ratio();
  if (static_cast<double>(cover.n()) > K1 * ratio * (1.0 + 1e-9)) {
    const int need = static_cast<int>(std::ceil(cover.n() / ratio - 1e-9));
    throw ValidationError("infeasible cover: the lattice at R = " + std::to_string(R) + " needs " +
                          std::to_string(cover.n()) + " centres; minimal feasible K1 is " + std::to_string(need));
  }
  const Lattice lat(R0, validation_spacing(cover), dim);
  std::vector<std::uint16_t> mult;
  const int m = max_multiplicity(cover, lat, mult);
  if (m > K2)
    throw ValidationError("infeasible cover: lattice multiplicity at R = " + std::to_string(R) + " is " +
                          std::to_string(m) + "; minimal feasible K2 is " + std::to_string(m));
  return cover;
}

std::vector<Point> sorted_centers(std::span<const Point> centers) {
  std::vector<Point> out(centers.begin(), centers.end());
  std::sort(out.begin(), out.end());
  return out;
}

Cover optimize_cover(const Cover& base, const LocalValueFn& values, const BiasObjective& objective,
                     OptimizeStats* stats) {
  if (objective.direction == BiasDirection::None) return base;
  if (!(objective.candidate_spacing > 0.0) || objective.candidate_spacing > 1.0)
    throw ValidationError("candidate spacing must lie in (0, 1] (fraction of R)");
  if (objective.budget < 0) throw ValidationError("search budget must be non-negative");
  if (!validate_cover(base).valid()) throw ValidationError("optimize_cover needs a valid base cover");

  const bool maximize = objective.direction == BiasDirection::Maximize;
  const auto better = [maximize](double a, double b) { return maximize ? a > b : a < b; };
  const int dim = base.dim;
  const double R = base.R, R0 = base.R0;
  const double step = objective.candidate_spacing * R;
  OptimizeStats local;

  Cover cover = base;
  std::vector<double> val = values(cover.centers);
  double sum = 0.0;
  for (double v : val) sum += v;

  const Lattice lat(R0, validation_spacing(base), dim);
  std::vector<std::uint16_t> mult;
  max_multiplicity(cover, lat, mult);
  std::vector<std::uint16_t> covered(lat.size(), 0);
  for (const Point& x : cover.centers) lat.for_each(x, R, false, [&](std::size_t f) { ++covered[f]; });

  // Candidate lattice k * step inside B(0, R0).
  const Lattice cand(R0, step, dim);
  std::vector<Point> candidates;
  for (std::size_t f = 0; f < cand.size(); ++f)
    if (cand.inside(f)) candidates.push_back(cand.point(f));
  local.candidates = candidates.size();
  const std::vector<double> cval = values(candidates);

  std::map<Point, double> memo;
  for (std::size_t i = 0; i < candidates.size(); ++i) memo.emplace(candidates[i], cval[i]);

  std::vector<std::size_t> order(candidates.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (cval[a] != cval[b]) return better(cval[a], cval[b]);
    return candidates[a] < candidates[b];
  });

  const std::size_t n_max = cover.max_count();
  for (std::size_t idx : order) {
    if (cover.n() >= n_max) break;
    const double mean = sum / static_cast<double>(cover.n());
    if (!better(cval[idx], mean)) break;
    const Point& c = candidates[idx];
    bool ok = true;
    lat.for_each(c, 2.0 * R, true, [&](std::size_t f) { ok = ok && mult[f] < cover.K2; });
    if (!ok) continue;
    lat.for_each(c, 2.0 * R, true, [&](std::size_t f) { ++mult[f]; });
    lat.for_each(c, R, false, [&](std::size_t f) { ++covered[f]; });
    cover.centers.push_back(c);
    val.push_back(cval[idx]);
    sum += cval[idx];
    ++local.added;
  }

  const auto value_at = [&](const Point& p) {
    auto it = memo.find(p);
    if (it != memo.end()) return it->second;
    const double v = values(std::span<const Point>(&p, 1)).front();
    memo.emplace(p, v);
    return v;
  };

  for (int pass = 0; pass < objective.budget; ++pass) {
    ++local.passes;
    std::size_t accepted = 0;
    for (std::size_t i = 0; i < cover.n(); ++i) {
      for (int a = 0; a < dim; ++a) {
        for (double sgn : {-1.0, 1.0}) {
          const Point c = cover.centers[i];
          Point q = c;
          q[a] += sgn * step;
          if (norm2(q, dim) > R0 * R0 * (1.0 + kTol)) continue;
          const double v = value_at(q);
          if (!better(v, val[i])) continue;
          // Coverage: points leaving B(c, R) must stay covered.
          bool ok = true;
          lat.for_each(c, R, false, [&](std::size_t f) {
            if (covered[f] >= 2) return;
            const Point p = lat.point(f);
            double d2 = 0.0;
            for (int b = 0; b < dim; ++b) d2 += (p[b] - q[b]) * (p[b] - q[b]);
            if (!(d2 <= R * R * (1.0 + kTol) * (1.0 + kTol))) ok = false;
          });
          if (!ok) continue;
          // Multiplicity: points entering B(q, 2R) must have room.
          const double r2 = 4.0 * R * R * (1.0 - kTol) * (1.0 - kTol);
          lat.for_each(q, 2.0 * R, true, [&](std::size_t f) {
            const Point p = lat.point(f);
            double d2 = 0.0;
            for (int b = 0; b < dim; ++b) d2 += (p[b] - c[b]) * (p[b] - c[b]);
            if (!(d2 < r2) && mult[f] >= cover.K2) ok = false;
          });
          if (!ok) continue;
          lat.for_each(c, 2.0 * R, true, [&](std::size_t f) { --mult[f]; });
          lat.for_each(q, 2.0 * R, true, [&](std::size_t f) { ++mult[f]; });
          lat.for_each(c, R, false, [&](std::size_t f) { --covered[f]; });
          lat.for_each(q, R, false, [&](std::size_t f) { ++covered[f]; });
          cover.centers[i] = q;
          sum += v - val[i];
          val[i] = v;
          ++accepted;
        }
      }
    }
    local.moves += accepted;
    if (accepted == 0) break;
  }
  if (stats) *stats = local;
  return cover;
}

Cover random_cover(double R0, double R, int dim, int K1, int K2, std::uint64_t seed) {
  check_params(R0, R, dim, K1, K2);
  std::mt19937_64 rng(seed);
  const double root_d = std::sqrt(static_cast<double>(dim));
  for (int attempt = 0; attempt < 10000; ++attempt) {
    Cover cover{{}, R, R0, K1, K2, dim};
    const double q = 0.7 + 0.3 * unit_draw(rng);
    const double s = q * 2.0 * R / root_d;
    const double jitter = (1.0 - q) * R / root_d;
    Point offset{0.0, 0.0, 0.0};
    for (int a = 0; a < dim; ++a) offset[a] = s * unit_draw(rng);
    const int K = static_cast<int>(std::ceil(R0 / s)) + 1;
    std::array<int, 3> lo{0, 0, 0}, hi{0, 0, 0};
    for (int a = 0; a < dim; ++a) lo[a] = -K, hi[a] = K;
    for (int i0 = lo[0]; i0 <= hi[0]; ++i0)
      for (int i1 = lo[1]; i1 <= hi[1]; ++i1)
        for (int i2 = lo[2]; i2 <= hi[2]; ++i2) {
          const int idx[3] = {i0, i1, i2};
          Point c{0.0, 0.0, 0.0};
          double near2 = 0.0;
          for (int a = 0; a < dim; ++a) {
            c[a] = offset[a] + idx[a] * s;
            const double l = c[a] - 0.5 * s, u = c[a] + 0.5 * s;
            const double gap = l > 0.0 ? l : (u < 0.0 ? -u : 0.0);
            near2 += gap * gap;
          }
          if (!(near2 < R0 * R0)) continue;
          for (int a = 0; a < dim; ++a) c[a] += jitter * (2.0 * unit_draw(rng) - 1.0);
          cover.centers.push_back(project_into_ball(c, R0, dim));
        }
    const std::size_t room = cover.max_count() > cover.n() ? cover.max_count() - cover.n() : 0;
    const auto extras = static_cast<std::size_t>(unit_draw(rng) * static_cast<double>(std::min(room, cover.n()) + 1));
    for (std::size_t e = 0; e < extras; ++e) {
      Point c{0.0, 0.0, 0.0};
      do {
        for (int a = 0; a < dim; ++a) c[a] = R0 * (2.0 * unit_draw(rng) - 1.0);
      } while (norm2(c, dim) > R0 * R0);
      cover.centers.push_back(c);
    }
    if (validate_cover(cover).valid()) return cover;
  }
  throw ValidationError("could not draw a valid random cover; K1/K2 too tight for R = " + std::to_string(R));
}

}  // namespace cscope
