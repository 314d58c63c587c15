#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cscope/covers.hpp"
#include "cscope/cutoffs.hpp"
#include "cscope/field.hpp"
#include "cscope/localize.hpp"

namespace cscope {

struct EnsembleConfig {
  double R0 = 10.0;
  double delta = 1.0;
  double rho1 = 0.75;
  double rho2 = 0.75;
  int K1 = 3;
  int K2 = 3;

  /// Throws ValidationError on out-of-range parameters.
  void validate() const;
};

/// Volume of the unit ball in dim dimensions.
double unit_ball_volume(int dim);

/// Comparability constant 3 * 2^(d+1) * v_d * K1 * K2.
double analytic_kstar(int dim, int K1, int K2);

/// Time-averaged, per-unit-mass localized densities of one series:
///   (1/T) (1/R^d) integral of f (psi_{x,R} eta)^delta dx dt.
/// The time integral is folded into one spatial density on construction
/// (product quadrature against eta^delta), so each centre costs one spatial
/// pairing.
class LocalAverager {
 public:
  LocalAverager(const FieldSeries& f, const EnsembleConfig& config);

  double horizon() const { return T_; }
  int dim() const { return grid_.dim; }
  const EnsembleConfig& config() const { return config_; }

  double local_average(const Point& x, double R) const;
  std::vector<double> local_averages(std::span<const Point> centers, double R) const;
  /// Mean over the cover, summed pairwise over lexicographically sorted
  /// centres (independent of centre order, bitwise).
  double ensemble_average(const Cover& cover) const;

 private:
  EnsembleConfig config_;
  Grid grid_;
  double T_ = 1.0;
  std::shared_ptr<const LocalIntegrator> integrator_;
  PreparedDensity density_;
};

double local_average(const FieldSeries& f, const Point& x, double R, const EnsembleConfig& config);
double ensemble_average(const FieldSeries& f, const Cover& cover, const EnsembleConfig& config);

/// The integral-scale average F0 (cutoff psi0 eta at x0 = 0, R0, power
/// delta) together with sharp-ball averaging conventions:
///   plain_mean          mean of f over B(0, R0) x (0, T)
///   half_domain_mean    mean over the half ball {x_0 >= 0}
///   unit_mass_integral  (1/T)(1/R0^d) integral over B(0, R0) x (0, T)
/// Sharp integrals include cells whose centres lie in the ball.
struct IntegralAverages {
  double F0 = 0.0;
  double plain_mean = 0.0;
  double half_domain_mean = 0.0;
  double unit_mass_integral = 0.0;
};
IntegralAverages integral_average(const FieldSeries& f, const EnsembleConfig& config);

/// Convention names in the order they are tried when matching a target.
const std::vector<std::string>& convention_names();
double convention_value(const IntegralAverages& a, const std::string& name);

struct SweepPoint {
  double R = 0.0;
  double value_min = 0.0;
  double value_uniform = 0.0;
  double value_max = 0.0;
  Cover cover_min, cover_uniform, cover_max;
};

struct SweepResult {
  std::vector<SweepPoint> points;
  double F0 = 0.0;
  /// F0 of |f|: a density scale for normalising spreads when F0 is near 0.
  double F0_abs = 0.0;
  IntegralAverages integrals;
};

/// Uniform, maximising and minimising covers at each scale. Scales must lie
/// in (0, R0]. `budget` is the number of hill-climb passes.
SweepResult scale_sweep(const FieldSeries& f, std::span<const double> scales, const EnsembleConfig& config,
                        int budget = 4);

/// Ensemble average over covers optimised toward `direction` at scale R.
Cover optimize_cover(const LocalAverager& averager, double R, const BiasObjective& objective);

struct KStarReport {
  double empirical = 0.0;
  double analytic = 0.0;
  double F0 = 0.0;
  std::size_t covers_tested = 0;
  std::vector<double> scales;
  std::vector<double> worst_ratio;  // per scale: max over covers of max(<F>/F0, F0/<F>)
  bool within_bound = false;
};

/// Random valid covers per scale against F0. f must be nonnegative with
/// F0 > 0.
KStarReport kstar_check(const FieldSeries& f, std::span<const double> scales, int trials,
                        const EnsembleConfig& config, std::uint64_t seed);

struct DetectorReport {
  double normalizer = 0.0;
  double threshold = 0.0;
  std::vector<double> scales;
  std::vector<double> spread;  // (max - min) / normalizer
  std::vector<double> flagged_scales;
};

/// Normalised spread (values_max - values_min) / max(|F0|, floor); floor < 0
/// selects the sweep's F0_abs. Scales with spread > threshold are flagged.
DetectorReport detect_scales(const SweepResult& sweep, double threshold, double floor = -1.0);

struct PropagationReport {
  double R_star = 0.0;
  double C1 = 0.0;
  double F_star = 0.0;
  bool sufficient_data = false;
  bool base_comparable = false;   // the three curves within [F*/C1, C1 F*] on [R*, 2R*]
  bool persists = false;          // same band holds for every scale >= 2R*
  std::optional<double> exponent; // smallest C4 with the power-law band holding
  std::vector<double> scales_above;
  std::string note;
};

/// Empirical look at whether comparability near R* persists to larger
/// scales, and the smallest power-law correction exponent that would make
/// the curves fit the band (F*/C1)(R*/R)^C4 .. C1 F* (R/R*)^C4.
PropagationReport propagation_report(const SweepResult& sweep, double R_star, double C1);

/// The time-constant 1D demo density on [-3 R0, 3 R0] (room for the supports
/// of every cover element), held for T = R0^2. 98304 cells put cell edges on
/// +-R0.
FieldSeries demo_series(double R0, int cells = 98304);

}  // namespace cscope
