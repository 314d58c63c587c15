#pragma once

#include <array>

#include "cscope/field.hpp"

namespace cscope {

enum class DerivativeKind { Gradient, Divergence, Curl, Laplacian };
enum class Scheme { Spectral, Central2 };

/// Differential operators on grid fields.
///
/// Gradient of a field with c components returns c * dim components laid out
/// as [c * dim + j] = d_j f_c. Divergence needs dim components; curl needs a
/// 3-component field on a 3D grid. Spectral derivatives drop the Nyquist mode
/// for odd orders. Central2 wraps periodic axes and uses second-order one-sided
/// stencils at non-periodic boundaries.
Field derivative(const Field& f, DerivativeKind kind, Scheme scheme);

inline Field gradient(const Field& f, Scheme s = Scheme::Spectral) { return derivative(f, DerivativeKind::Gradient, s); }
inline Field divergence(const Field& f, Scheme s = Scheme::Spectral) { return derivative(f, DerivativeKind::Divergence, s); }
inline Field curl(const Field& f, Scheme s = Scheme::Spectral) { return derivative(f, DerivativeKind::Curl, s); }
inline Field laplacian(const Field& f, Scheme s = Scheme::Spectral) { return derivative(f, DerivativeKind::Laplacian, s); }

/// Spectral scheme when the grid allows it, central differences otherwise.
Scheme preferred_scheme(const Grid& grid);

struct VelocityRecovery {
  Field velocity;
  /// Per-component mean of the input vorticity, removed before inversion.
  std::array<double, 3> removed_mean{0.0, 0.0, 0.0};
};

/// Divergence-free, zero-mean velocity with curl u equal to the solenoidal
/// part of `vorticity` (periodic 3D grid only).
VelocityRecovery velocity_from_vorticity(const Field& vorticity);

/// Solenoidal (divergence-free, zero-mean) part of a periodic 3D vector field.
Field solenoidal_projection(const Field& v);

}  // namespace cscope
