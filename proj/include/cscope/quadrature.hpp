#pragma once

#include <functional>
#include <span>
#include <vector>

namespace cscope {

struct GaussRule {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule (cached per n).
const GaussRule& gauss_legendre(int n);

/// Composite Gauss-Legendre on [a, b] with `panels` equal panels.
double integrate(const std::function<double(double)>& f, double a, double b, int panels = 1, int points = 20);

/// Composite rule split at the given interior breakpoints.
double integrate_split(const std::function<double(double)>& f, double a, double b, std::span<const double> breaks,
                       int panels_per_piece = 2, int points = 20);

/// Pairwise (tree) summation in the given order. Bit-stable for a fixed order.
double pairwise_sum(std::span<const double> values);

/// Weights w_k with sum_k w_k g(t_k) = integral over [t_0, t_n] of I[g](t) W(t) dt,
/// where I[g] is the piecewise cubic interpolant of the samples (4-point
/// Lagrange stencils, shifted inward at the ends; lower order below 4
/// samples). W is integrated with Gauss-Legendre, splitting pieces at `breaks`.
std::vector<double> product_weights(std::span<const double> times, const std::function<double(double)>& weight,
                                    std::span<const double> breaks);

/// Weights w_k with sum_k w_k g(t_k) = I[g](t), the same piecewise cubic
/// interpolant evaluated at t in [t_0, t_n].
std::vector<double> interpolation_weights(std::span<const double> times, double t);

}  // namespace cscope
