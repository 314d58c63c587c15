#include "cscope/field.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cscope/error.hpp"

namespace cscope {

Field::Field(Grid grid, int components, double time)
    : grid_(grid), components_(components), time_(time) {
  if (components < 1) throw ValidationError("field needs at least one component");
  values_.assign(grid_.cell_count() * components_, 0.0);
}

Field::Field(Grid grid, int components, double time, std::vector<double> values)
    : grid_(grid), components_(components), time_(time), values_(std::move(values)) {
  if (components < 1) throw ValidationError("field needs at least one component");
  if (values_.size() != grid_.cell_count() * components_)
    throw ValidationError("field value count does not match grid and component count");
}

std::vector<double> Field::component(int c) const {
  std::vector<double> out(cell_count());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = values_[i * components_ + c];
  return out;
}

void Field::set_component(int c, std::span<const double> data) {
  if (data.size() != cell_count()) throw ValidationError("component size mismatch");
  for (std::size_t i = 0; i < data.size(); ++i) values_[i * components_ + c] = data[i];
}

double Field::max_norm() const {
  double best = 0.0;
  for (std::size_t i = 0; i < cell_count(); ++i) {
    double s = 0.0;
    for (int c = 0; c < components_; ++c) s += values_[i * components_ + c] * values_[i * components_ + c];
    best = std::max(best, s);
  }
  return std::sqrt(best);
}

bool Field::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

std::vector<double> pointwise_norm(const Field& f) {
  std::vector<double> out(f.cell_count());
  const int nc = f.components();
  const auto v = f.values();
  for (std::size_t i = 0; i < out.size(); ++i) {
    double s = 0.0;
    for (int c = 0; c < nc; ++c) s += v[i * nc + c] * v[i * nc + c];
    out[i] = std::sqrt(s);
  }
  return out;
}

FieldSeries::FieldSeries(std::vector<double> times, std::vector<FieldPtr> snapshots)
    : times_(std::move(times)), snapshots_(std::move(snapshots)) {
  if (snapshots_.size() < 2) throw ValidationError("a field series needs at least two snapshots");
  if (times_.size() != snapshots_.size()) throw ValidationError("series times/snapshots length mismatch");
  for (const auto& s : snapshots_) {
    if (!s) throw ValidationError("null snapshot in series");
    if (!s->grid().same_shape(snapshots_.front()->grid()) ||
        s->components() != snapshots_.front()->components())
      throw ValidationError("series snapshots must share grid and component count");
  }
  if (times_.front() != 0.0) throw ValidationError("series must start at time 0");
  const double T = times_.back();
  if (!(T > 0.0)) throw ValidationError("series horizon must be positive");
  const double dt = T / static_cast<double>(times_.size() - 1);
  for (std::size_t k = 0; k < times_.size(); ++k) {
    if (k > 0 && !(times_[k] > times_[k - 1])) throw ValidationError("series times must increase");
    if (std::abs(times_[k] - k * dt) > 1e-9 * T)
      throw ValidationError("series time step must be uniform (snapshot " + std::to_string(k) + ")");
  }
}

static std::vector<double> stamps(const std::vector<FieldPtr>& s) {
  std::vector<double> t;
  t.reserve(s.size());
  for (const auto& f : s) t.push_back(f ? f->time() : 0.0);
  return t;
}

FieldSeries::FieldSeries(std::vector<FieldPtr> snapshots)
    : FieldSeries(stamps(snapshots), snapshots) {}

FieldSeries FieldSeries::constant(FieldPtr field, double T, int steps) {
  if (steps < 1) throw ValidationError("constant series needs at least one step");
  if (!(T > 0.0)) throw ValidationError("series horizon must be positive");
  std::vector<double> t(steps + 1);
  for (int k = 0; k <= steps; ++k) t[k] = T * k / steps;
  t.back() = T;
  return FieldSeries(std::move(t), std::vector<FieldPtr>(steps + 1, std::move(field)));
}

FieldSeries FieldSeries::scaled(double factor) const {
  std::vector<FieldPtr> out;
  out.reserve(size());
  const Field* last_src = nullptr;
  FieldPtr last_dst;
  for (const auto& s : snapshots_) {
    if (s.get() != last_src) {
      std::vector<double> v(s->values().begin(), s->values().end());
      for (double& x : v) x *= factor;
      last_dst = std::make_shared<const Field>(s->grid(), s->components(), s->time(), std::move(v));
      last_src = s.get();
    }
    out.push_back(last_dst);
  }
  return FieldSeries(times_, std::move(out));
}

void FlowSeries::validate_layout() const {
  if (velocity.size() != vorticity.size()) throw ValidationError("velocity/vorticity snapshot counts differ");
  if (velocity.grid().dim != 3) throw ValidationError("flow series must live on a 3D grid");
  if (!velocity.grid().same_shape(vorticity.grid())) throw ValidationError("velocity/vorticity grids differ");
  if (velocity.components() != 3 || vorticity.components() != 3)
    throw ValidationError("velocity and vorticity must have 3 components");
  for (std::size_t k = 0; k < velocity.size(); ++k)
    if (std::abs(velocity.time(k) - vorticity.time(k)) > 1e-12 * velocity.horizon())
      throw ValidationError("velocity/vorticity snapshot times differ");
}

}  // namespace cscope
