#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "cscope/grid.hpp"

namespace cscope {

using Complex = std::complex<double>;

/// Real-to-complex FFTs and wavenumber tables for a fully periodic grid.
///
/// The spectrum uses FFTW's half layout: the last active axis keeps indices
/// 0..N/2, the others 0..N-1. Plans are created once (FFTW_ESTIMATE, so the
/// transforms are bit-reproducible) and executed through the thread-safe
/// new-array interface.
class SpectralGrid {
 public:
  explicit SpectralGrid(const Grid& grid);
  ~SpectralGrid();
  SpectralGrid(const SpectralGrid&) = delete;
  SpectralGrid& operator=(const SpectralGrid&) = delete;

  const Grid& grid() const { return grid_; }
  std::size_t real_size() const { return real_size_; }
  std::size_t spectral_size() const { return spectral_size_; }
  /// Spectrum extents per axis (inert axes have extent 1).
  const Index3& spectral_shape() const { return shape_; }

  /// Unnormalised forward transform.
  std::vector<Complex> forward(std::span<const double> real) const;
  /// Inverse transform including the 1/N normalisation.
  std::vector<double> inverse(std::span<const Complex> spectrum) const;

  /// Physical wavevector of spectral mode `m`.
  const Point& wavevector(std::size_t m) const { return k_[m]; }
  double k2(std::size_t m) const { return k2_[m]; }
  /// True if any axis index of mode `m` is the Nyquist index N/2.
  bool nyquist(std::size_t m) const { return nyquist_[m] != 0; }
  /// Multiplicity of mode `m` in a real-field sum over the half spectrum
  /// (2 for modes whose conjugate partner is not stored, else 1).
  double hermitian_weight(std::size_t m) const { return weight_[m]; }
  /// Per-axis physical wavenumber of spectral index `i` along `axis`.
  double axis_wavenumber(int axis, int i) const;

  /// Distinct |k|^2 values and, for each mode, its index into that list.
  std::span<const double> unique_k2() const { return unique_k2_; }
  std::span<const std::uint32_t> k2_class() const { return k2_class_; }

 private:
  Grid grid_;
  Index3 shape_{1, 1, 1};
  std::size_t real_size_ = 0;
  std::size_t spectral_size_ = 0;
  void* plan_forward_ = nullptr;
  void* plan_inverse_ = nullptr;
  std::vector<Point> k_;
  std::vector<double> k2_;
  std::vector<std::uint8_t> nyquist_;
  std::vector<double> weight_;
  std::vector<double> unique_k2_;
  std::vector<std::uint32_t> k2_class_;
};

/// Shared, cached transform object for a grid shape. Throws ValidationError
/// unless every active axis is periodic with even resolution.
std::shared_ptr<const SpectralGrid> spectral_grid(const Grid& grid);

}  // namespace cscope
