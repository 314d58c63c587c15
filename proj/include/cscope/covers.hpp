#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "cscope/grid.hpp"

namespace cscope {

/// Centres of n balls B(x_i, R) meant to cover the integral domain B(0, R0)
/// with (R0/R)^d <= n <= K1 (R0/R)^d and every point of B(0, R0) in at most K2
/// of the doubled balls B(x_i, 2R).
struct Cover {
  std::vector<Point> centers;
  double R = 1.0;
  double R0 = 1.0;
  int K1 = 3;
  int K2 = 3;
  int dim = 1;

  std::size_t n() const { return centers.size(); }
  /// (R0/R)^d
  double scale_ratio() const;
  /// Largest admissible count floor(K1 (R0/R)^d).
  std::size_t max_count() const;
};

/// Default multiplicity parameters per dimension.
int default_K1(int dim);
int default_K2(int dim);

/// Lattice checks of the cover properties. Coverage uses closed balls of
/// radius R, multiplicity uses open doubled balls; the lattice is
/// {k s : k integer} inside the closed ball B(0, R0) with s = R/8.
struct CoverValidityReport {
  bool covers_domain = false;
  bool n_in_bounds = false;
  bool multiplicity_ok = false;
  int max_local_multiplicity = 0;
  std::optional<Point> uncovered_point;
  std::optional<Point> worst_multiplicity_point;
  double lattice_spacing = 0.0;
  std::size_t lattice_points = 0;

  bool valid() const { return covers_domain && n_in_bounds && multiplicity_ok; }
};

CoverValidityReport validate_cover(const Cover& cover);

/// Axis-aligned lattice with spacing at most 2R/sqrt(d): the box [-R0, R0]^d
/// is split into N = ceil(sqrt(d) R0 / R) cells per axis, cells meeting the
/// ball contribute their centre, and centres outside the ball are projected
/// radially onto its boundary (projection onto a convex set never moves a
/// centre away from points of the ball, so coverage is kept). R >= R0 gives
/// the single centre 0. Throws ValidationError naming the minimal feasible
/// K1 (or K2) when the lattice exceeds the bounds.
Cover uniform_cover(double R0, double R, int dim, int K1, int K2);

enum class BiasDirection { Maximize, Minimize, None };

struct BiasObjective {
  BiasDirection direction = BiasDirection::None;
  /// Candidate lattice spacing as a fraction of R.
  double candidate_spacing = 0.25;
  /// Hill-climb passes over all centres.
  int budget = 4;
};

/// Batch evaluator of the local average at the given centres.
using LocalValueFn = std::function<std::vector<double>(std::span<const Point>)>;

struct OptimizeStats {
  std::size_t candidates = 0;
  std::size_t added = 0;
  std::size_t moves = 0;
  int passes = 0;
};

/// Greedy augmentation from the candidate lattice (best values first, lowest
/// lexicographic centre on ties) while the mean improves and multiplicity
/// stays within K2, then hill-climbing moves of one candidate step along
/// each axis that keep the cover valid and strictly improve the mean.
/// Direction None returns `base` unchanged.
Cover optimize_cover(const Cover& base, const LocalValueFn& values, const BiasObjective& objective,
                     OptimizeStats* stats = nullptr);

/// Random valid cover: a jittered lattice with random spacing factor and
/// offset, projected into the ball, plus random extra centres; draws that
/// fail validation are rejected.
Cover random_cover(double R0, double R, int dim, int K1, int K2, std::uint64_t seed);

/// Centres sorted lexicographically.
std::vector<Point> sorted_centers(std::span<const Point> centers);

}  // namespace cscope
