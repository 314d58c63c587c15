#include "cscope/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

#include "cscope/error.hpp"

namespace cscope {
namespace {

GaussRule build_rule(int n) {
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute the derivative at the converged node.
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

}  // namespace

const GaussRule& gauss_legendre(int n) {
  if (n < 2 || n > 256) throw ValidationError("Gauss-Legendre order must be in [2, 256]");
  static std::mutex mu;
  static std::map<int, std::unique_ptr<GaussRule>> cache;
  std::lock_guard lock(mu);
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<GaussRule>(build_rule(n));
  return *slot;
}

double integrate(const std::function<double(double)>& f, double a, double b, int panels, int points) {
  const GaussRule& g = gauss_legendre(points);
  const double h = (b - a) / panels;
  double total = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * h, mid = lo + 0.5 * h;
    double s = 0.0;
    for (int i = 0; i < points; ++i) s += g.weights[i] * f(mid + 0.5 * h * g.nodes[i]);
    total += 0.5 * h * s;
  }
  return total;
}

double integrate_split(const std::function<double(double)>& f, double a, double b, std::span<const double> breaks,
                       int panels_per_piece, int points) {
  std::vector<double> cuts{a};
  for (double x : breaks)
    if (x > a && x < b) cuts.push_back(x);
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
    if (cuts[i + 1] > cuts[i]) total += integrate(f, cuts[i], cuts[i + 1], panels_per_piece, points);
  return total;
}

double pairwise_sum(std::span<const double> values) {
  if (values.size() <= 8) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

namespace {

std::size_t stencil_start(std::size_t j, std::size_t n, std::size_t p) {
  return static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(
      static_cast<std::ptrdiff_t>(j) - (static_cast<std::ptrdiff_t>(p) / 2 - 1), 0, static_cast<std::ptrdiff_t>(n - p)));
}

}  // namespace

std::vector<double> interpolation_weights(std::span<const double> times, double t) {
  const std::size_t n = times.size();
  if (n < 2) throw ValidationError("interpolation needs at least two samples");
  if (t < times.front() || t > times.back()) throw ValidationError("interpolation time outside the samples");
  const std::size_t p = std::min<std::size_t>(n, 4);
  std::size_t j = 0;
  while (j + 2 < n && t > times[j + 1]) ++j;
  const std::size_t s = stencil_start(j, n, p);
  std::vector<double> w(n, 0.0);
  for (std::size_t a = 0; a < p; ++a) {
    if (times[s + a] == t) {
      std::fill(w.begin(), w.end(), 0.0);
      w[s + a] = 1.0;
      return w;
    }
    double l = 1.0;
    for (std::size_t b = 0; b < p; ++b)
      if (b != a) l *= (t - times[s + b]) / (times[s + a] - times[s + b]);
    w[s + a] = l;
  }
  return w;
}

std::vector<double> product_weights(std::span<const double> times, const std::function<double(double)>& weight,
                                    std::span<const double> breaks) {
  const std::size_t n = times.size();
  if (n < 2) throw ValidationError("product quadrature needs at least two samples");
  const std::size_t p = std::min<std::size_t>(n, 4);
  std::vector<double> w(n, 0.0);
  for (std::size_t j = 0; j + 1 < n; ++j) {
    const std::size_t s = stencil_start(j, n, p);
    for (std::size_t a = 0; a < p; ++a) {
      const auto basis = [&](double t) {
        double l = 1.0;
        for (std::size_t b = 0; b < p; ++b)
          if (b != a) l *= (t - times[s + b]) / (times[s + a] - times[s + b]);
        return l * weight(t);
      };
      w[s + a] += integrate_split(basis, times[j], times[j + 1], breaks, 1, 20);
    }
  }
  return w;
}

}  // namespace cscope
