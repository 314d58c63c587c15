#include "cscope/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <tuple>

#include "cscope/error.hpp"

namespace cscope {
namespace {

// FFTW's planner is not thread-safe.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

int signed_index(int i, int n) { return i <= n / 2 ? i : i - n; }

}  // namespace

SpectralGrid::SpectralGrid(const Grid& grid) : grid_(grid) {
  if (!grid.fully_periodic()) throw ValidationError("spectral operations require a fully periodic grid");
  for (int a = 0; a < grid.dim; ++a)
    if (grid.resolution[a] % 2 != 0) throw ValidationError("spectral operations require even resolution");

  const int d = grid.dim;
  int n[3];
  for (int a = 0; a < d; ++a) {
    n[a] = grid.resolution[a];
    shape_[a] = grid.resolution[a];
  }
  shape_[d - 1] = grid.resolution[d - 1] / 2 + 1;
  real_size_ = grid.cell_count();
  spectral_size_ = static_cast<std::size_t>(shape_[0]) * shape_[1] * shape_[2];

  {
    std::lock_guard lock(planner_mutex());
    std::vector<double> r(real_size_);
    auto* c = fftw_alloc_complex(spectral_size_);
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    plan_forward_ = fftw_plan_dft_r2c(d, n, r.data(), c, flags);
    plan_inverse_ = fftw_plan_dft_c2r(d, n, c, r.data(), flags | FFTW_DESTROY_INPUT);
    fftw_free(c);
  }

  k_.resize(spectral_size_);
  k2_.resize(spectral_size_);
  nyquist_.resize(spectral_size_);
  weight_.resize(spectral_size_);
  const int last = d - 1;
  std::size_t m = 0;
  for (int i0 = 0; i0 < shape_[0]; ++i0)
    for (int i1 = 0; i1 < shape_[1]; ++i1)
      for (int i2 = 0; i2 < shape_[2]; ++i2, ++m) {
        const int idx[3] = {i0, i1, i2};
        Point kv{0.0, 0.0, 0.0};
        bool nyq = false;
        for (int a = 0; a < d; ++a) {
          kv[a] = axis_wavenumber(a, idx[a]);
          if (idx[a] == grid.resolution[a] / 2) nyq = true;
        }
        k_[m] = kv;
        k2_[m] = kv[0] * kv[0] + kv[1] * kv[1] + kv[2] * kv[2];
        nyquist_[m] = nyq ? 1 : 0;
        const int il = idx[last];
        weight_[m] = (il > 0 && il < grid.resolution[last] / 2) ? 2.0 : 1.0;
      }

  // Group modes by |k|^2 so radial transforms are evaluated once per shell.
  std::vector<double> sorted(k2_);
  std::sort(sorted.begin(), sorted.end());
  for (double v : sorted)
    if (unique_k2_.empty() || v > unique_k2_.back() * (1.0 + 1e-13) + 1e-300) unique_k2_.push_back(v);
  k2_class_.resize(spectral_size_);
  for (std::size_t j = 0; j < spectral_size_; ++j) {
    auto it = std::lower_bound(unique_k2_.begin(), unique_k2_.end(), k2_[j] * (1.0 - 1e-13));
    k2_class_[j] = static_cast<std::uint32_t>(it - unique_k2_.begin());
  }
}

SpectralGrid::~SpectralGrid() {
  std::lock_guard lock(planner_mutex());
  if (plan_forward_) fftw_destroy_plan(static_cast<fftw_plan>(plan_forward_));
  if (plan_inverse_) fftw_destroy_plan(static_cast<fftw_plan>(plan_inverse_));
}

double SpectralGrid::axis_wavenumber(int axis, int i) const {
  const int n = grid_.resolution[axis];
  const int s = axis == grid_.dim - 1 ? i : signed_index(i, n);
  return 2.0 * std::numbers::pi * s / grid_.extent[axis];
}

std::vector<Complex> SpectralGrid::forward(std::span<const double> real) const {
  if (real.size() != real_size_) throw ValidationError("forward FFT size mismatch");
  std::vector<double> in(real.begin(), real.end());
  std::vector<Complex> out(spectral_size_);
  fftw_execute_dft_r2c(static_cast<fftw_plan>(plan_forward_), in.data(),
                       reinterpret_cast<fftw_complex*>(out.data()));
  return out;
}

std::vector<double> SpectralGrid::inverse(std::span<const Complex> spectrum) const {
  if (spectrum.size() != spectral_size_) throw ValidationError("inverse FFT size mismatch");
  std::vector<Complex> in(spectrum.begin(), spectrum.end());
  std::vector<double> out(real_size_);
  fftw_execute_dft_c2r(static_cast<fftw_plan>(plan_inverse_), reinterpret_cast<fftw_complex*>(in.data()),
                       out.data());
  const double norm = 1.0 / static_cast<double>(real_size_);
  for (double& v : out) v *= norm;
  return out;
}

std::shared_ptr<const SpectralGrid> spectral_grid(const Grid& grid) {
  using Key = std::tuple<int, Index3, Point, Point>;
  static std::mutex cache_mutex;
  static std::map<Key, std::shared_ptr<const SpectralGrid>> cache;
  const Key key{grid.dim, grid.resolution, grid.extent, grid.origin};
  {
    std::lock_guard lock(cache_mutex);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  auto sg = std::make_shared<const SpectralGrid>(grid);
  std::lock_guard lock(cache_mutex);
  cache[key] = sg;
  return sg;
}

}  // namespace cscope
