#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "cscope/grid.hpp"

namespace cscope {

/// Samples of a scalar (1 component) or vector/tensor field at cell centres.
///
/// Values are stored cell-major with components interleaved last, the same
/// order as the on-disk payload: value(cell, c) = values[cell * components + c].
class Field {
 public:
  Field(Grid grid, int components, double time = 0.0);
  Field(Grid grid, int components, double time, std::vector<double> values);

  const Grid& grid() const { return grid_; }
  int components() const { return components_; }
  double time() const { return time_; }
  std::size_t cell_count() const { return grid_.cell_count(); }

  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }

  double operator()(std::size_t cell, int c) const { return values_[cell * components_ + c]; }
  double& operator()(std::size_t cell, int c) { return values_[cell * components_ + c]; }

  /// Copy of one component as a contiguous array.
  std::vector<double> component(int c) const;
  void set_component(int c, std::span<const double> data);

  /// Largest pointwise Euclidean norm over the components.
  double max_norm() const;
  bool all_finite() const;

 private:
  Grid grid_;
  int components_;
  double time_;
  std::vector<double> values_;
};

using FieldPtr = std::shared_ptr<const Field>;

/// Pointwise Euclidean norm of each cell's components.
std::vector<double> pointwise_norm(const Field& f);

/// Ordered snapshots with uniform time step on [0, T].
///
/// Several entries may share one Field (a time-constant series); integrators
/// key their per-snapshot caches on the pointer.
class FieldSeries {
 public:
  FieldSeries(std::vector<double> times, std::vector<FieldPtr> snapshots);
  /// Uses each field's own time stamp.
  explicit FieldSeries(std::vector<FieldPtr> snapshots);

  /// The same field held at `steps + 1` uniformly spaced times on [0, T].
  static FieldSeries constant(FieldPtr field, double T, int steps);

  std::size_t size() const { return snapshots_.size(); }
  double time(std::size_t k) const { return times_[k]; }
  std::span<const double> times() const { return times_; }
  double horizon() const { return times_.back(); }
  const Field& snapshot(std::size_t k) const { return *snapshots_[k]; }
  const FieldPtr& snapshot_ptr(std::size_t k) const { return snapshots_[k]; }
  const Grid& grid() const { return snapshots_.front()->grid(); }
  int components() const { return snapshots_.front()->components(); }

  /// Multiplies every snapshot by `factor` (new storage).
  FieldSeries scaled(double factor) const;

 private:
  std::vector<double> times_;
  std::vector<FieldPtr> snapshots_;
};

/// Velocity and vorticity sampled at the same times on the same 3D grid.
struct FlowSeries {
  FieldSeries velocity;
  FieldSeries vorticity;

  /// Throws ValidationError when times, grids or component counts disagree.
  void validate_layout() const;
  double horizon() const { return velocity.horizon(); }
};

}  // namespace cscope
