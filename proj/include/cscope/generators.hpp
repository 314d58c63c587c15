#pragma once

#include <map>
#include <string>
#include <vector>

#include "cscope/field.hpp"

namespace cscope {

/// Named numeric parameters for a generator, plus which quantity to emit
/// ("velocity" or "vorticity") for the flow generators.
struct GeneratorParams {
  std::map<std::string, double> values;
  std::string output = "velocity";

  double get(const std::string& key, double fallback) const;
};

/// Generators:
///   demo1d            f(x) = cos^2(x+5) sin((x-1)^2 / 2), 1D scalar, time independent
///   taylor_green_2d3d z-independent Taylor-Green cell, params U, k; decay exp(-2 k^2 t)
///   abc_flow          Beltrami ABC flow, params A, B, C; decay exp(-t), curl u = u
///   random_multiscale divergence-free random Fourier field; params seed, slope,
///                     kmin, kmax (integer shell radii), amplitude (rms at t=0),
///                     planar (1: embedded 2D, z-independent, u_z = 0), decay (0/1)
///   single_mode       vorticity (0, 0, A sin(k x)); params A, k, decay (0/1)
/// Viscosity is 1 throughout. All generators are pure functions of their
/// arguments.
Field sample_analytic(const std::string& id, const GeneratorParams& params, const Grid& grid, double time);

const std::vector<std::string>& generator_ids();
bool is_flow_generator(const std::string& id);

/// `steps + 1` uniformly spaced snapshots on [0, T] of a scalar generator
/// (or one quantity of a flow generator).
FieldSeries sample_series(const std::string& id, const GeneratorParams& params, const Grid& grid, double T,
                          int steps);

/// Velocity and vorticity snapshots of a flow generator.
FlowSeries sample_flow_series(const std::string& id, const GeneratorParams& params, const Grid& grid, double T,
                              int steps);

}  // namespace cscope
