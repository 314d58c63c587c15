#include "cscope/app/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "cscope/app/svg.hpp"
#include "cscope/error.hpp"
#include "cscope/field_io.hpp"
#include "cscope/generators.hpp"

namespace cscope {
namespace {

namespace fs = std::filesystem;

const std::vector<std::pair<std::string, std::string>>& commands() {
  static const std::vector<std::pair<std::string, std::string>> list{
      {"demo1d", "run the 1D demonstration density end to end"},
      {"sweep", "ensemble averages of a scalar field across scales"},
      {"diagnose", "vorticity diagnostics and the three flow assumptions"},
      {"cascade", "averaged flux curve and the inertial-range verdict"},
      {"balance", "local enstrophy balance terms and residual"},
      {"cover", "build a cover and check its validity"},
      {"cutoff-verify", "sample the cutoff bounds"},
      {"generate", "write generator snapshots and a manifest"}};
  return list;
}

// Defaults that differ between commands, applied before config files and flags.
void command_defaults(RunConfig& c) {
  if (c.command == "demo1d") {
    c.R0 = 10.0;
    c.scales = "1e-2:1e1:31log";
  } else if (c.command == "sweep") {
    c.R0 = 10.0;
  } else if (c.command == "cover") {
    c.R0 = 10.0;
  }
}

void apply_config_file(RunConfig& c, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw IoError("malformed config file '" + path + "': " + e.what());
  }
  if (!j.is_object()) throw IoError("config file '" + path + "' must hold a JSON object");
  const auto get = [&](const char* key, auto& field) {
    if (!j.contains(key)) return;
    try {
      j.at(key).get_to(field);
    } catch (const std::exception&) {
      throw ValidationError(std::string("config key '") + key + "' has the wrong type");
    }
  };
  static const std::vector<std::string> known{"R0", "T", "K1", "K2", "rho1", "rho2", "delta", "beta", "C1", "C2",
                                              "M", "scales", "seed", "budget", "in", "out", "format", "generator",
                                              "n", "nz", "L", "steps", "params", "dim", "R", "kind", "x0", "t_eval",
                                              "samples", "threshold"};
  for (const auto& [key, _] : j.items())
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw ValidationError("unknown config key '" + key + "'");
  get("R0", c.R0);
  get("T", c.T);
  get("K1", c.K1);
  get("K2", c.K2);
  get("rho1", c.rho1);
  get("rho2", c.rho2);
  get("delta", c.delta);
  get("beta", c.beta);
  get("C1", c.C1);
  get("C2", c.C2);
  get("M", c.M);
  get("scales", c.scales);
  get("seed", c.seed);
  get("budget", c.budget);
  get("in", c.in);
  get("out", c.out);
  get("format", c.format);
  get("generator", c.generator);
  get("n", c.n);
  get("nz", c.nz);
  get("L", c.L);
  get("steps", c.steps);
  get("params", c.params);
  get("dim", c.dim);
  get("R", c.R);
  get("kind", c.kind);
  get("x0", c.x0);
  get("t_eval", c.t_eval);
  get("samples", c.samples);
  get("threshold", c.threshold);
}

void add_options(CLI::App& app, RunConfig& c, std::string& config_path, std::vector<std::string>& params) {
  app.add_option("--config", config_path, "JSON file with default settings (flags override)");
  app.add_option("--R0", c.R0, "integral scale");
  app.add_option("--T", c.T, "time horizon");
  app.add_option("--K1", c.K1, "cover count constant (0: dimension default)");
  app.add_option("--K2", c.K2, "cover multiplicity constant (0: dimension default)");
  app.add_option("--rho1", c.rho1, "temporal cutoff exponent");
  app.add_option("--rho2", c.rho2, "spatial cutoff exponent");
  app.add_option("--delta", c.delta, "cutoff power in local averages");
  app.add_option("--beta", c.beta, "scale-ratio constant");
  app.add_option("--C1", c.C1, "coherence constant");
  app.add_option("--C2", c.C2, "localization constant");
  app.add_option("--M", c.M, "velocity-gradient threshold");
  app.add_option("--scales", c.scales, "lo:hi:Nlog, lo:hi:Nlin or a comma list");
  app.add_option("--seed", c.seed, "random seed");
  app.add_option("--budget", c.budget, "hill-climb passes");
  app.add_option("--in", c.in, "input field file or series manifest");
  app.add_option("--out", c.out, "output directory or file");
  app.add_option("--format", c.format, "csv, json or svg")->check(CLI::IsMember({"", "csv", "json", "svg"}));
  app.add_option("--generator", c.generator, "synthesize the input with a generator");
  app.add_option("--n", c.n, "grid cells per axis for generators");
  app.add_option("--nz", c.nz, "cells along z for generators (default n)");
  app.add_option("--L", c.L, "periodic box length for generators (default 2 pi)");
  app.add_option("--steps", c.steps, "time steps for generators");
  app.add_option("--param", params, "generator parameter key=value (repeatable)");
  app.add_option("--dim", c.dim, "dimension (cover, cutoff-verify)");
  app.add_option("--R", c.R, "scale (cover, cutoff-verify)");
  app.add_option("--kind", c.kind, "cover kind: uniform or random")->check(CLI::IsMember({"uniform", "random"}));
  app.add_option("--x0", c.x0, "centre (balance)")->expected(1, 3);
  app.add_option("--t-eval", c.t_eval, "evaluation time (balance; default T)");
  app.add_option("--samples", c.samples, "samples per cutoff check");
  app.add_option("--threshold", c.threshold, "detector threshold on the normalised spread");
}

void parse_params(RunConfig& c, const std::vector<std::string>& params) {
  for (const auto& p : params) {
    const auto eq = p.find('=');
    if (eq == std::string::npos || eq == 0) throw ValidationError("--param expects key=value, got '" + p + "'");
    try {
      std::size_t used = 0;
      const std::string v = p.substr(eq + 1);
      c.params[p.substr(0, eq)] = std::stod(v, &used);
      if (used != v.size()) throw std::invalid_argument(v);
    } catch (const std::logic_error&) {
      throw ValidationError("--param value must be numeric in '" + p + "'");
    }
  }
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create directory '" + path.parent_path().string() + "': " + ec.message());
  }
  std::ofstream o(path, std::ios::binary);
  if (!o) throw IoError("cannot write '" + path.string() + "'");
  o << text;
  if (!o) throw IoError("write failed for '" + path.string() + "'");
}

void emit(const RunConfig& c, const std::string& text, std::ostream& out) {
  if (c.out.empty())
    out << text;
  else
    write_text(c.out, text);
}

bool wants(const RunConfig& c, const char* format) { return c.format.empty() || c.format == format; }

fs::path out_dir(const RunConfig& c) { return c.out.empty() ? fs::path(c.command + "_out") : fs::path(c.out); }

double box_length(const RunConfig& c) { return c.L > 0.0 ? c.L : 2.0 * std::numbers::pi; }

Grid generator_grid(const RunConfig& c, int dim) {
  if (dim == 1) {
    const double o[] = {-box_length(c) / 2}, e[] = {box_length(c)};
    const int r[] = {c.n};
    const bool p[] = {true};
    return make_grid(o, e, r, p);
  }
  const double L = box_length(c);
  const int nz = c.nz > 0 ? c.nz : c.n;
  if (dim == 3) return periodic_box(3, Point{L, L, L}, Index3{c.n, c.n, nz});
  return periodic_box(2, Point{L, L, 1.0}, Index3{c.n, c.n, 1});
}

GeneratorParams generator_params(const RunConfig& c) {
  GeneratorParams p;
  p.values = c.params;
  return p;
}

// Manifest: {"velocity": [...], "vorticity": [...]} or {"fields": [...]},
// paths relative to the manifest.
nlohmann::json read_manifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw IoError("malformed manifest '" + path.string() + "': " + e.what());
  }
  if (!j.is_object()) throw IoError("manifest '" + path.string() + "' must hold a JSON object");
  return j;
}

FieldSeries series_from_list(const nlohmann::json& list, const fs::path& base) {
  if (!list.is_array() || list.empty()) throw IoError("manifest field lists must be non-empty arrays");
  std::vector<FieldPtr> snaps;
  for (const auto& entry : list) {
    if (!entry.is_string()) throw IoError("manifest entries must be file names");
    snaps.push_back(std::make_shared<const Field>(read_field(base / entry.get<std::string>())));
  }
  return FieldSeries(std::move(snaps));
}

bool is_manifest(const std::string& path) { return fs::path(path).extension() == ".json"; }

FlowSeries load_flow(const RunConfig& c) {
  if (!c.generator.empty() && !c.in.empty()) throw ValidationError("give either --in or --generator, not both");
  if (!c.generator.empty()) {
    if (!is_flow_generator(c.generator)) throw ValidationError("'" + c.generator + "' is not a flow generator");
    const double T = c.T > 0.0 ? c.T : 1.0;
    FlowSeries f = sample_flow_series(c.generator, generator_params(c), generator_grid(c, 3), T, c.steps);
    f.validate_layout();
    return f;
  }
  if (c.in.empty()) throw ValidationError("this command needs --in MANIFEST.json or --generator ID");
  if (!is_manifest(c.in)) throw ValidationError("flow input must be a series manifest (.json)");
  const auto j = read_manifest(c.in);
  if (!j.contains("velocity") || !j.contains("vorticity"))
    throw IoError("manifest '" + c.in + "' needs 'velocity' and 'vorticity' lists");
  const fs::path base = fs::path(c.in).parent_path();
  FlowSeries f{series_from_list(j["velocity"], base), series_from_list(j["vorticity"], base)};
  f.validate_layout();
  return f;
}

FieldSeries load_scalar(const RunConfig& c) {
  if (!c.generator.empty() && !c.in.empty()) throw ValidationError("give either --in or --generator, not both");
  if (c.generator == "demo1d" || (c.generator.empty() && c.in.empty())) return demo_series(c.R0);
  const double T = c.T > 0.0 ? c.T : c.R0 * c.R0;
  if (!c.generator.empty()) {
    GeneratorParams p = generator_params(c);
    return sample_series(c.generator, p, generator_grid(c, 3), T, c.steps);
  }
  if (is_manifest(c.in)) {
    const auto j = read_manifest(c.in);
    if (!j.contains("fields")) throw IoError("manifest '" + c.in + "' needs a 'fields' list");
    return series_from_list(j["fields"], fs::path(c.in).parent_path());
  }
  return FieldSeries::constant(std::make_shared<const Field>(read_field(c.in)), T, 4);
}

EnsembleConfig ensemble_config(const RunConfig& c, int dim) {
  EnsembleConfig e;
  e.R0 = c.R0;
  e.delta = c.delta;
  e.rho1 = c.rho1;
  e.rho2 = c.rho2;
  e.K1 = c.K1 > 0 ? c.K1 : default_K1(dim);
  e.K2 = c.K2 > 0 ? c.K2 : default_K2(dim);
  e.validate();
  return e;
}

CascadeParams cascade_params(const RunConfig& c) {
  if (c.rho1 != c.rho2) throw ValidationError("vorticity diagnostics use one exponent; set rho1 = rho2");
  CascadeParams p;
  p.R0 = c.R0;
  p.rho = c.rho2;
  p.beta = c.beta;
  p.C1 = c.C1;
  p.C2 = c.C2;
  p.M = c.M;
  p.K1 = c.K1 > 0 ? c.K1 : default_K1(3);
  p.K2 = c.K2 > 0 ? c.K2 : default_K2(3);
  p.validate();
  return p;
}

std::vector<double> resolve_scales(const RunConfig& c, const std::vector<double>& fallback) {
  return c.scales.empty() ? fallback : parse_scales(c.scales);
}

std::string sweep_svg(const SweepResult& s, const std::string& title) {
  PlotSeries lo{"min bias", {}, {}, "#d62728"}, un{"uniform", {}, {}, "#2ca02c"}, hi{"max bias", {}, {}, "#1f77b4"};
  PlotSeries f0{"F0", {}, {}, "#555555", true};
  for (const auto& p : s.points) {
    for (auto* q : {&lo, &un, &hi, &f0}) q->x.push_back(p.R);
    lo.y.push_back(p.value_min);
    un.y.push_back(p.value_uniform);
    hi.y.push_back(p.value_max);
    f0.y.push_back(s.F0);
  }
  return line_chart(PlotSpec{title, "R", "ensemble average", true}, {hi, un, lo, f0});
}

int cmd_demo1d(RunConfig& c, std::ostream& out) {
  if (c.T > 0.0 && c.T != c.R0 * c.R0) throw ValidationError("demo1d holds the density for T = R0^2; omit --T");
  c.T = c.R0 * c.R0;
  const EnsembleConfig e = ensemble_config(c, 1);
  c.K1 = e.K1;
  c.K2 = e.K2;
  c.scale_list = resolve_scales(c, {});
  const FieldSeries f = demo_series(c.R0);
  const SweepResult sweep = scale_sweep(f, c.scale_list, e, c.budget);
  const DetectorReport det = detect_scales(sweep, c.threshold);

  Json tried = Json::array();
  Json matched = nullptr;
  for (const auto& name : convention_names()) {
    const double v = convention_value(sweep.integrals, name);
    const bool ok = std::abs(v - kDemoTarget) <= kDemoTolerance;
    tried.push_back({{"convention", name}, {"value", number(v)}, {"matches", ok}});
    if (ok && matched.is_null()) matched = name;
  }

  const fs::path dir = out_dir(c);
  const Grid& g = f.grid();
  std::vector<double> xs, ys;
  const Field& snap = f.snapshot(0);
  const std::size_t stride = std::max<std::size_t>(1, g.cell_count() / 6144);
  for (std::size_t i = 0; i < g.cell_count(); i += stride) {
    const double x = g.cell_center(i)[0];
    if (std::abs(x) > c.R0) continue;
    xs.push_back(x);
    ys.push_back(snap(i, 0));
  }
  if (wants(c, "csv")) {
    write_text(dir / "density.csv", samples_csv("x", "f", xs, ys));
    write_text(dir / "sweep.csv", sweep_csv(sweep));
  }
  if (wants(c, "svg")) {
    write_text(dir / "density.svg",
               line_chart(PlotSpec{"demo density on [-R0, R0]", "x", "f(x)"}, {PlotSeries{"f", xs, ys}}));
    write_text(dir / "sweep.svg", sweep_svg(sweep, "ensemble averages across scales"));
  }
  Json report;
  report["config"] = to_json(c);
  report["target_global_average"] = kDemoTarget;
  report["tolerance"] = kDemoTolerance;
  report["conventions_tried"] = tried;
  report["matched_convention"] = matched;
  report["sweep"] = to_json(sweep);
  report["detector"] = to_json(det);
  if (wants(c, "json")) write_text(dir / "report.json", report.dump(2) + "\n");
  out << "matched convention: " << (matched.is_null() ? std::string("none") : matched.get<std::string>()) << "\n";
  for (const auto& t : tried) out << "  " << t["convention"].get<std::string>() << " = " << t["value"].dump() << "\n";
  out << "outputs in " << dir.string() << "\n";
  return 0;
}

int cmd_sweep(RunConfig& c, std::ostream& out) {
  const FieldSeries f = load_scalar(c);
  const int dim = f.grid().dim;
  if (c.T <= 0.0) c.T = f.horizon();
  const EnsembleConfig e = ensemble_config(c, dim);
  c.K1 = e.K1;
  c.K2 = e.K2;
  c.scale_list = resolve_scales(c, parse_scales(std::to_string(c.R0 / 100) + ":" + std::to_string(c.R0) + ":13log"));
  const SweepResult sweep = scale_sweep(f, c.scale_list, e, c.budget);
  const fs::path dir = out_dir(c);
  if (wants(c, "csv")) write_text(dir / "sweep.csv", sweep_csv(sweep));
  if (wants(c, "svg")) write_text(dir / "sweep.svg", sweep_svg(sweep, "ensemble averages across scales"));
  if (wants(c, "json")) {
    Json j;
    j["config"] = to_json(c);
    j["sweep"] = to_json(sweep);
    j["detector"] = to_json(detect_scales(sweep, c.threshold));
    write_text(dir / "sweep.json", j.dump(2) + "\n");
  }
  out << "sweep of " << sweep.points.size() << " scales written to " << dir.string() << "\n";
  return 0;
}

Json assumption_json(const FlowSeries& flow, const CascadeParams& p, const VorticityDiagnostics& d) {
  Json a;
  a["A1"] = to_json(check_A1(flow, p.R0, p.M, p.C1));
  if (d.sigma0) {
    a["A2"] = to_json(check_A2(d, p.beta, p.R0));
  } else {
    A2Report r;
    r.beta = p.beta;
    r.R0 = p.R0;
    Json j = to_json(r);
    j["sigma0"] = nullptr;
    j["margin"] = nullptr;
    j["note"] = "sigma0 undefined (P0 = 0)";
    a["A2"] = j;
  }
  a["A3"] = to_json(check_A3(flow.vorticity, p.R0, p.C2, p.rho));
  return a;
}

void record_series(RunConfig& c, const FlowSeries& flow) {
  if (c.T <= 0.0) c.T = flow.horizon();
}

int cmd_diagnose(RunConfig& c, std::ostream& out) {
  const CascadeParams p = cascade_params(c);
  c.K1 = p.K1;
  c.K2 = p.K2;
  const FlowSeries flow = load_flow(c);
  record_series(c, flow);
  const VorticityDiagnostics d = diagnostics(flow.vorticity, p.rho, p.R0);
  Json j;
  j["config"] = to_json(c);
  j["diagnostics"] = to_json(d);
  j["assumptions"] = assumption_json(flow, p, d);
  emit(c, j.dump(2) + "\n", out);
  return 0;
}

int cmd_cascade(RunConfig& c, std::ostream& out) {
  const CascadeParams p = cascade_params(c);
  c.K1 = p.K1;
  c.K2 = p.K2;
  const FlowSeries flow = load_flow(c);
  record_series(c, flow);
  c.scale_list = resolve_scales(c, {p.R0 / 8, p.R0 / 4, p.R0 / 2, p.R0});
  const VorticityDiagnostics d = diagnostics(flow.vorticity, p.rho, p.R0);
  const FluxCurve curve = flux_curve(flow, c.scale_list, p);
  const double kstar = p.kstar();

  Json j;
  j["config"] = to_json(c);
  j["diagnostics"] = to_json(d);
  j["assumptions"] = assumption_json(flow, p, d);
  j["flux_curve"] = to_json(curve);
  if (d.sigma0) {
    const CascadeVerdict v = verify_cascade(curve, d, kstar, p.beta, p.R0);
    j["verdict"] = to_json(v);
    out << v.summary << "\n";
  } else {
    j["verdict"] = nullptr;
    j["note"] = "sigma0 undefined (P0 = 0); no inertial range";
    out << "sigma0 undefined; no verdict\n";
  }
  j["locality"] = to_json(std::span<const LocalityRow>(locality_ratios(curve, kstar)));

  const fs::path dir = out_dir(c);
  if (wants(c, "json")) write_text(dir / "cascade.json", j.dump(2) + "\n");
  if (wants(c, "csv")) write_text(dir / "flux.csv", flux_csv(curve));
  if (wants(c, "svg")) {
    PlotSeries phi{"<Phi>_R", {}, {}}, lo{"P0/(4K*)", {}, {}, "#888888", true}, hi{"4K* P0", {}, {}, "#888888", true};
    for (const auto& q : curve.points) {
      for (auto* s : {&phi, &lo, &hi}) s->x.push_back(q.R);
      phi.y.push_back(q.Phi);
      lo.y.push_back(d.P0 / (4 * kstar));
      hi.y.push_back(4 * kstar * d.P0);
    }
    write_text(dir / "flux.svg", line_chart(PlotSpec{"averaged flux per unit mass", "R", "<Phi>_R", true},
                                                  d.P0 > 0.0 ? std::vector<PlotSeries>{phi, lo, hi} : std::vector<PlotSeries>{phi}));
  }
  return 0;
}

int cmd_balance(RunConfig& c, std::ostream& out) {
  if (c.rho1 != c.rho2) throw ValidationError("the balance identity uses one exponent; set rho1 = rho2");
  const FlowSeries flow = load_flow(c);
  record_series(c, flow);
  c.scale_list = resolve_scales(c, {c.R0});
  if (c.x0.size() != 3) c.x0.resize(3, 0.0);
  const Point x{c.x0[0], c.x0[1], c.x0[2]};
  std::vector<BalanceTerms> rows;
  for (double R : c.scale_list) rows.push_back(balance_residual(flow, x, R, c.rho2, c.t_eval));
  if (c.format == "csv") {
    emit(c, balance_csv(rows, c.scale_list), out);
  } else {
    Json j;
    j["config"] = to_json(c);
    Json r = Json::array();
    for (std::size_t i = 0; i < rows.size(); ++i) {
      Json b = to_json(rows[i]);
      b["R"] = c.scale_list[i];
      r.push_back(std::move(b));
    }
    j["rows"] = std::move(r);
    emit(c, j.dump(2) + "\n", out);
  }
  return 0;
}

int cmd_cover(RunConfig& c, std::ostream& out) {
  if (c.dim < 1 || c.dim > 3) throw ValidationError("--dim must be 1, 2 or 3");
  if (c.K1 <= 0) c.K1 = default_K1(c.dim);
  if (c.K2 <= 0) c.K2 = default_K2(c.dim);
  const Cover cover = c.kind == "random" ? random_cover(c.R0, c.R, c.dim, c.K1, c.K2, c.seed)
                                         : uniform_cover(c.R0, c.R, c.dim, c.K1, c.K2);
  Json j;
  j["config"] = to_json(c);
  j["cover"] = to_json(cover);
  j["validity"] = to_json(validate_cover(cover));
  emit(c, j.dump(2) + "\n", out);
  return 0;
}

int cmd_cutoff_verify(RunConfig& c, std::ostream& out) {
  if (c.dim < 1 || c.dim > 3) throw ValidationError("--dim must be 1, 2 or 3");
  if (c.T <= 0.0) c.T = 1.0;
  if (c.samples < 1000) throw ValidationError("--samples must be at least 1000");
  const TemporalCutoff eta = build_eta(c.T, c.rho1);
  const SpatialCutoff psi = build_psi(Point{}, c.R, c.rho2, c.dim);
  Json j;
  j["config"] = to_json(c);
  j["eta_power"] = eta.m;
  j["psi_power"] = psi.m;
  j["report"] = to_json(verify_cutoff_bounds(eta, psi, c.samples));
  emit(c, j.dump(2) + "\n", out);
  return 0;
}

int cmd_generate(RunConfig& c, std::ostream& out) {
  if (c.generator.empty()) throw ValidationError("generate needs --generator");
  const fs::path dir = out_dir(c);
  Json manifest;
  manifest["config"] = to_json(c);
  const auto write_list = [&](const FieldSeries& s, const std::string& stem) {
    Json list = Json::array();
    for (std::size_t k = 0; k < s.size(); ++k) {
      char name[64];
      std::snprintf(name, sizeof name, "%s_%04zu.csf", stem.c_str(), k);
      std::error_code ec;
      fs::create_directories(dir, ec);
      if (ec) throw IoError("cannot create directory '" + dir.string() + "': " + ec.message());
      const Field& f = s.snapshot(k);
      // Shared snapshots of a constant series carry one stamp; store the series time.
      if (f.time() == s.times()[k])
        write_field(f, dir / name);
      else
        write_field(Field(f.grid(), f.components(), s.times()[k], std::vector<double>(f.values().begin(), f.values().end())),
                    dir / name);
      list.push_back(name);
    }
    return list;
  };
  if (c.generator == "demo1d") {
    manifest["fields"] = write_list(demo_series(c.R0), "field");
  } else if (is_flow_generator(c.generator)) {
    const FlowSeries f = load_flow(c);
    manifest["velocity"] = write_list(f.velocity, "velocity");
    manifest["vorticity"] = write_list(f.vorticity, "vorticity");
  } else {
    throw ValidationError("unknown generator '" + c.generator + "'");
  }
  write_text(dir / "manifest.json", manifest.dump(2) + "\n");
  out << "wrote " << (dir / "manifest.json").string() << "\n";
  return 0;
}

}  // namespace

Json to_json(const RunConfig& c) {
  Json j;
  j["command"] = c.command;
  j["R0"] = c.R0;
  j["T"] = c.T > 0.0 ? Json(c.T) : Json(nullptr);
  j["K1"] = c.K1;
  j["K2"] = c.K2;
  j["rho1"] = c.rho1;
  j["rho2"] = c.rho2;
  j["delta"] = c.delta;
  j["beta"] = c.beta;
  j["C1"] = c.C1;
  j["C2"] = c.C2;
  j["M"] = c.M;
  j["scales"] = c.scales;
  j["scale_list"] = c.scale_list;
  j["seed"] = c.seed;
  j["budget"] = c.budget;
  j["in"] = c.in;
  j["out"] = c.out;
  j["format"] = c.format;
  j["generator"] = c.generator;
  j["n"] = c.n;
  j["nz"] = c.nz > 0 ? c.nz : c.n;
  j["L"] = box_length(c);
  j["steps"] = c.steps;
  j["params"] = c.params;
  j["dim"] = c.dim;
  j["R"] = c.R;
  j["kind"] = c.kind;
  j["x0"] = c.x0;
  j["t_eval"] = c.t_eval > 0.0 ? Json(c.t_eval) : Json(nullptr);
  j["samples"] = c.samples;
  j["threshold"] = c.threshold;
  return j;
}

std::vector<double> parse_scales(const std::string& spec) {
  const auto to_double = [&](const std::string& s) {
    try {
      std::size_t used = 0;
      const double v = std::stod(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::logic_error&) {
      throw ValidationError("bad number '" + s + "' in scale list '" + spec + "'");
    }
  };
  std::vector<double> out;
  if (spec.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(spec);
    for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
    if (parts.size() != 3) throw ValidationError("scale range must look like lo:hi:Nlog or lo:hi:Nlin");
    const double lo = to_double(parts[0]), hi = to_double(parts[1]);
    const std::string& n = parts[2];
    const bool log = n.size() > 3 && n.ends_with("log");
    const bool lin = n.size() > 3 && n.ends_with("lin");
    if (!log && !lin) throw ValidationError("scale count must end in 'log' or 'lin': '" + n + "'");
    const double count = to_double(n.substr(0, n.size() - 3));
    if (count < 1 || count != std::floor(count) || count > 100000) throw ValidationError("bad scale count in '" + spec + "'");
    if (!(lo > 0.0) || !(hi >= lo)) throw ValidationError("scale range needs 0 < lo <= hi");
    const int N = static_cast<int>(count);
    for (int i = 0; i < N; ++i) {
      const double f = N == 1 ? 0.0 : static_cast<double>(i) / (N - 1);
      out.push_back(i == N - 1 && N > 1 ? hi : log ? lo * std::pow(hi / lo, f) : lo + (hi - lo) * f);
    }
  } else {
    std::stringstream ss(spec);
    for (std::string p; std::getline(ss, p, ',');) out.push_back(to_double(p));
    if (out.empty()) throw ValidationError("empty scale list");
    for (double v : out)
      if (!(v > 0.0)) throw ValidationError("scales must be positive");
  }
  return out;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig c;
  std::string config_path;
  std::vector<std::string> params;
  CLI::App app{"Localized averages, covers and enstrophy-cascade diagnostics", "cascade-scope"};
  app.require_subcommand(1);
  for (const auto& [name, help] : commands()) add_options(*app.add_subcommand(name, help), c, config_path, params);
  try {
    // Command defaults and the config file go in first so that flags win.
    for (int i = 1; i < argc; ++i) {
      const std::string a = argv[i];
      if (c.command.empty() && !a.empty() && a[0] != '-') {
        c.command = a;
        command_defaults(c);
      }
      if (a == "--config" && i + 1 < argc) apply_config_file(c, argv[i + 1]);
      if (a.rfind("--config=", 0) == 0) apply_config_file(c, a.substr(9));
    }
    try {
      app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
      const int code = app.exit(e, out, err);
      return code == 0 ? 0 : 2;
    }
    parse_params(c, params);
    if (c.command == "demo1d") return cmd_demo1d(c, out);
    if (c.command == "sweep") return cmd_sweep(c, out);
    if (c.command == "diagnose") return cmd_diagnose(c, out);
    if (c.command == "cascade") return cmd_cascade(c, out);
    if (c.command == "balance") return cmd_balance(c, out);
    if (c.command == "cover") return cmd_cover(c, out);
    if (c.command == "cutoff-verify") return cmd_cutoff_verify(c, out);
    if (c.command == "generate") return cmd_generate(c, out);
    err << "unknown command '" << c.command << "'\n";
    return 2;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace cscope
