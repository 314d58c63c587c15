#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <utility>
#include <vector>

#include "cscope/cutoffs.hpp"
#include "cscope/spectral.hpp"

namespace cscope {

/// How a density is paired with a radial cutoff centred at c:
///   Value       integral of g(x) chi(|x-c|/R)^(m exponent)
///   Laplacian   integral of g(x) Lap psi(x-c)
///   Divergence  integral of v(x) . grad psi(x-c)   (v has dim components)
///   Ball        integral of g over the sharp ball B(c, R)
enum class Pairing { Value, Laplacian, Divergence, Ball };

struct Kernel {
  Pairing pairing = Pairing::Value;
  double R = 1.0;
  int m = 4;
  double exponent = 1.0;  // Value only
};

/// A spatial density ready for repeated pairings at many centres.
class PreparedDensity {
 public:
  int components() const { return components_; }
  bool spectral() const { return spectral_; }

 private:
  friend class LocalIntegrator;
  int components_ = 1;
  bool spectral_ = false;
  std::vector<double> cells_;                  // midpoint: cell-major, components interleaved
  std::vector<std::array<int, 3>> modes_;      // spectral: retained half-spectrum indices
  std::vector<std::uint32_t> classes_;         // |k|^2 class per retained mode
  std::vector<std::vector<Complex>> coef_;     // per component, Hermitian weight included
};

/// Spatial integrals against radial cutoffs on a grid.
///
/// Fully periodic grids with even resolution use the trigonometric
/// interpolant of the density, integrated exactly against the Fourier
/// transform of the radial weight (the weight's transform is computed once
/// per (R, power) by Gauss-Legendre on the radius). Other grids use the
/// midpoint rule over the cells of the support. Either way the support
/// B(c, 2R) must fit the grid (see ball_ranges).
class LocalIntegrator {
 public:
  explicit LocalIntegrator(const Grid& grid, bool allow_spectral = true);

  const Grid& grid() const { return grid_; }
  bool spectral() const { return sg_ != nullptr; }

  PreparedDensity prepare(std::span<const double> values, int components) const;

  double evaluate(const PreparedDensity& d, const Kernel& k, const Point& center) const;
  std::vector<double> evaluate(const PreparedDensity& d, const Kernel& k, std::span<const Point> centers) const;

  /// Radial Fourier transform of chi(r/R)^power at |k|^2 class values
  /// (power < 0: the indicator of B(0, R)).
  std::shared_ptr<const std::vector<double>> transform(double R, double power) const;

 private:
  double midpoint(const PreparedDensity& d, const Kernel& k, const Point& c) const;
  void check_support(const Kernel& k, const Point& c) const;

  Grid grid_;
  std::shared_ptr<const SpectralGrid> sg_;
  mutable std::mutex mu_;
  mutable std::map<std::pair<double, double>, std::shared_ptr<const std::vector<double>>> transforms_;
};

/// Shared integrator per grid shape.
std::shared_ptr<const LocalIntegrator> local_integrator(const Grid& grid);

enum class TimeWeight { EtaPower, EtaDerivative, One };

/// Product-quadrature weights over the series times for the temporal factor
/// eta^exponent, eta' or 1, restricted to [0, t_end] (t_end < 0: the horizon).
std::vector<double> time_weights(std::span<const double> times, const TemporalCutoff& eta, TimeWeight kind,
                                 double exponent = 1.0, double t_end = -1.0);

/// Sum over snapshots of weight_k * density(k), evaluating density once per
/// distinct key (snapshots that share storage share a key).
std::vector<double> combine_in_time(std::span<const double> weights, std::span<const void* const> keys,
                                    const std::function<std::vector<double>(std::size_t)>& density);

/// Radial Fourier transform of a compactly supported profile in dim
/// dimensions: integral over R^dim of p(|y|) exp(i q . y) dy, at |q| = q.
double radial_transform(const std::function<double(double)>& p, double support, int dim, double q,
                        std::span<const double> breaks, int panels = 4);

}  // namespace cscope
