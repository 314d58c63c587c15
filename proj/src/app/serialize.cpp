#include "cscope/app/serialize.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace cscope {
namespace {

Json point(const Point& p, int dim) {
  Json a = Json::array();
  for (int i = 0; i < dim; ++i) a.push_back(p[i]);
  return a;
}

Json optional_number(const std::optional<double>& v) { return v ? number(*v) : Json(nullptr); }

Json numbers(std::span<const double> v) {
  Json a = Json::array();
  for (double x : v) a.push_back(number(x));
  return a;
}

}  // namespace

Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json to_json(const Cover& c, bool with_centers) {
  Json j;
  j["dim"] = c.dim;
  j["R"] = c.R;
  j["R0"] = c.R0;
  j["K1"] = c.K1;
  j["K2"] = c.K2;
  j["n"] = c.n();
  if (with_centers) {
    Json a = Json::array();
    for (const Point& p : c.centers) a.push_back(point(p, c.dim));
    j["centers"] = std::move(a);
  }
  return j;
}

Json to_json(const CoverValidityReport& r) {
  Json j;
  j["valid"] = r.valid();
  j["covers_domain"] = r.covers_domain;
  j["n_in_bounds"] = r.n_in_bounds;
  j["multiplicity_ok"] = r.multiplicity_ok;
  j["max_local_multiplicity"] = r.max_local_multiplicity;
  j["uncovered_point"] = r.uncovered_point ? point(*r.uncovered_point, 3) : Json(nullptr);
  j["worst_multiplicity_point"] = r.worst_multiplicity_point ? point(*r.worst_multiplicity_point, 3) : Json(nullptr);
  j["lattice_spacing"] = r.lattice_spacing;
  j["lattice_points"] = r.lattice_points;
  return j;
}

Json to_json(const CutoffCheckReport& r) {
  Json j;
  j["measured_C0_eta"] = number(r.measured_C0_eta);
  j["measured_C0_grad"] = number(r.measured_C0_grad);
  j["measured_C0_lap"] = number(r.measured_C0_lap);
  j["samples"] = r.samples;
  j["all_finite"] = r.all_finite;
  j["max_outward_slope"] = number(r.max_outward_slope);
  j["inward_gradient"] = r.max_outward_slope <= 0.0;
  return j;
}

Json to_json(const IntegralAverages& a) {
  Json j;
  for (const auto& name : convention_names()) j[name] = number(convention_value(a, name));
  return j;
}

Json to_json(const SweepResult& s) {
  Json j;
  j["F0"] = number(s.F0);
  j["F0_abs"] = number(s.F0_abs);
  j["integral_averages"] = to_json(s.integrals);
  Json pts = Json::array();
  for (const auto& p : s.points) {
    Json q;
    q["R"] = p.R;
    q["min"] = number(p.value_min);
    q["uniform"] = number(p.value_uniform);
    q["max"] = number(p.value_max);
    q["n_min"] = p.cover_min.n();
    q["n_uniform"] = p.cover_uniform.n();
    q["n_max"] = p.cover_max.n();
    pts.push_back(std::move(q));
  }
  j["points"] = std::move(pts);
  return j;
}

Json to_json(const DetectorReport& r) {
  Json j;
  j["normalizer"] = number(r.normalizer);
  j["threshold"] = number(r.threshold);
  j["scales"] = numbers(r.scales);
  j["spread"] = numbers(r.spread);
  j["flagged_scales"] = numbers(r.flagged_scales);
  return j;
}

Json to_json(const PropagationReport& r) {
  Json j;
  j["R_star"] = r.R_star;
  j["C1"] = r.C1;
  j["F_star"] = number(r.F_star);
  j["sufficient_data"] = r.sufficient_data;
  j["base_comparable"] = r.base_comparable;
  j["persists"] = r.persists;
  j["exponent"] = optional_number(r.exponent);
  j["scales_above"] = numbers(r.scales_above);
  j["note"] = r.note;
  return j;
}

Json to_json(const KStarReport& r) {
  Json j;
  j["empirical"] = number(r.empirical);
  j["analytic"] = number(r.analytic);
  j["F0"] = number(r.F0);
  j["covers_tested"] = r.covers_tested;
  j["within_bound"] = r.within_bound;
  j["scales"] = numbers(r.scales);
  j["worst_ratio"] = numbers(r.worst_ratio);
  return j;
}

Json to_json(const CoherenceReport& r) {
  Json j;
  j["gamma"] = r.gamma;
  j["r"] = number(r.r);
  j["all_pairs"] = !std::isfinite(r.r);
  j["M"] = r.M;
  j["vorticity_floor"] = r.floor_rel;
  j["C1_user"] = r.C1_user;
  j["C1_meas"] = number(r.C1_meas);
  j["holds"] = r.holds;
  j["admissible_points"] = r.admissible_points;
  j["admissible_pairs"] = r.admissible_pairs;
  j["curl_residual"] = number(r.curl_residual);
  j["per_snapshot"] = numbers(r.per_snapshot);
  return j;
}

Json to_json(const VorticityDiagnostics& d) {
  Json j;
  j["E0"] = number(d.E0);
  j["P0"] = number(d.P0);
  j["P0_gradient"] = number(d.P0_gradient);
  j["P0_final"] = number(d.P0_final);
  j["sigma0"] = optional_number(d.sigma0);
  j["sigma0_defined"] = d.sigma0.has_value();
  j["degenerate"] = d.degenerate;
  j["B_T"] = number(d.B_T);
  return j;
}

Json to_json(const A2Report& r) {
  Json j;
  j["defined"] = r.defined;
  j["sigma0"] = number(r.sigma0);
  j["beta"] = r.beta;
  j["R0"] = r.R0;
  j["margin"] = number(r.margin);
  j["holds"] = r.holds;
  return j;
}

Json to_json(const A3Report& r) {
  Json j;
  j["localization_integral"] = number(r.localization_integral);
  j["C2"] = r.C2;
  j["localization_bound"] = 1.0 / r.C2;
  j["localization_holds"] = r.localization_holds;
  j["final_enstrophy"] = number(r.final_enstrophy);
  j["sup_enstrophy"] = number(r.sup_enstrophy);
  j["modulation_ratio"] = optional_number(r.modulation_ratio);
  j["modulation_degenerate"] = r.modulation_degenerate;
  j["modulation_holds"] = r.modulation_holds;
  j["warnings"] = r.warnings;
  return j;
}

Json to_json(const FluxCurve& f) {
  Json a = Json::array();
  for (const auto& p : f.points) {
    Json q;
    q["R"] = p.R;
    q["n"] = p.n;
    q["Phi"] = number(p.Phi);
    q["Psi"] = number(p.Psi);
    a.push_back(std::move(q));
  }
  return a;
}

Json to_json(const BalanceTerms& b) {
  Json j;
  j["t_eval"] = b.t_eval;
  j["flux"] = number(b.flux);
  j["final_enstrophy"] = number(b.final_enstrophy);
  j["palinstrophy"] = number(b.palinstrophy);
  j["transport"] = number(b.transport);
  j["stretching"] = number(b.stretching);
  j["residual"] = number(b.residual);
  j["scale"] = number(b.scale);
  j["normalized_residual"] = number(b.normalized_residual);
  return j;
}

Json to_json(const CascadeVerdict& v) {
  Json j;
  j["inertial_range"] = {number(v.range_lo), number(v.range_hi)};
  j["empty_range"] = v.empty_range;
  j["kstar"] = v.kstar;
  j["lower_bound"] = number(v.lower);
  j["upper_bound"] = number(v.upper);
  Json s = Json::array();
  for (const auto& p : v.scales) {
    Json q;
    q["R"] = p.R;
    q["Phi"] = number(p.Phi);
    q["in_range"] = p.in_range;
    q["holds"] = p.holds;
    q["margin"] = number(p.margin);
    s.push_back(std::move(q));
  }
  j["scales"] = std::move(s);
  j["witness"] = optional_number(v.witness);
  j["worst_margin"] = number(v.worst_margin);
  j["verified"] = v.verified;
  j["summary"] = v.summary;
  return j;
}

Json to_json(std::span<const LocalityRow> rows) {
  Json a = Json::array();
  for (const auto& r : rows) {
    Json q;
    q["r"] = r.r;
    q["R"] = r.R;
    q["dyadic_k"] = r.dyadic_k ? Json(*r.dyadic_k) : Json(nullptr);
    q["ratio"] = r.zero_denominator ? Json(nullptr) : number(r.ratio);
    q["identity_rhs"] = r.zero_denominator ? Json(nullptr) : number(r.identity_rhs);
    q["band"] = {number(r.band_lo), number(r.band_hi)};
    q["inside"] = r.inside;
    q["zero_denominator"] = r.zero_denominator;
    a.push_back(std::move(q));
  }
  return a;
}

std::string csv_number(double v) {
  if (!std::isfinite(v)) return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string samples_csv(const std::string& xname, const std::string& yname, std::span<const double> x,
                        std::span<const double> y) {
  std::ostringstream o;
  o << xname << ',' << yname << '\n';
  for (std::size_t i = 0; i < x.size() && i < y.size(); ++i) o << csv_number(x[i]) << ',' << csv_number(y[i]) << '\n';
  return o.str();
}

std::string sweep_csv(const SweepResult& s) {
  std::ostringstream o;
  o << "R,min,uniform,max,F0\n";
  for (const auto& p : s.points)
    o << csv_number(p.R) << ',' << csv_number(p.value_min) << ',' << csv_number(p.value_uniform) << ','
      << csv_number(p.value_max) << ',' << csv_number(s.F0) << '\n';
  return o.str();
}

std::string flux_csv(const FluxCurve& f) {
  std::ostringstream o;
  o << "R,n,Phi,Psi\n";
  for (const auto& p : f.points) o << csv_number(p.R) << ',' << p.n << ',' << csv_number(p.Phi) << ',' << csv_number(p.Psi) << '\n';
  return o.str();
}

std::string balance_csv(std::span<const BalanceTerms> rows, std::span<const double> scales) {
  std::ostringstream o;
  o << "R,t_eval,flux,final_enstrophy,palinstrophy,transport,stretching,residual,normalized_residual\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& b = rows[i];
    o << csv_number(scales[i]) << ',' << csv_number(b.t_eval) << ',' << csv_number(b.flux) << ','
      << csv_number(b.final_enstrophy) << ',' << csv_number(b.palinstrophy) << ',' << csv_number(b.transport) << ','
      << csv_number(b.stretching) << ',' << csv_number(b.residual) << ',' << csv_number(b.normalized_residual)
      << '\n';
  }
  return o.str();
}

}  // namespace cscope
