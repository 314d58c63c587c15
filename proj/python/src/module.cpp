#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "cscope/app/cli.hpp"
#include "cscope/app/serialize.hpp"
#include "cscope/cascade.hpp"
#include "cscope/covers.hpp"
#include "cscope/ensemble.hpp"
#include "cscope/error.hpp"

namespace py = pybind11;
using namespace cscope;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

Grid box_for(const Array& a, int lead, const std::vector<double>& lengths) {
  if (a.ndim() != lead + 4 || a.shape(lead + 3) != 3)
    throw ValidationError("vorticity must have shape (" + std::string(lead ? "steps, " : "") + "n0, n1, n2, 3)");
  if (lengths.size() != 3) throw ValidationError("lengths needs three entries");
  return periodic_box(3, Point{lengths[0], lengths[1], lengths[2]},
                      Index3{static_cast<int>(a.shape(lead)), static_cast<int>(a.shape(lead + 1)),
                             static_cast<int>(a.shape(lead + 2))});
}

std::string cli(const std::vector<std::string>& args, int& code, std::string& err_text) {
  std::vector<std::string> all{"cascade-scope"};
  all.insert(all.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : all) argv.push_back(a.c_str());
  std::ostringstream out, err;
  code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  err_text = err.str();
  return out.str();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Localized averages, covers and enstrophy-cascade diagnostics";

  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<IoError>(m, "IoError", PyExc_OSError);

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        int code = 0;
        std::string err;
        std::string out = cli(args, code, err);
        return py::make_tuple(code, out, err);
      },
      py::arg("args"), "Run the command-line tool in process; returns (exit_code, stdout, stderr).");

  m.def("parse_scales", &parse_scales, py::arg("spec"));

  m.def(
      "cover_json",
      [](double R0, double R, int dim, int K1, int K2, const std::string& kind, std::uint64_t seed) {
        if (K1 <= 0) K1 = default_K1(dim);
        if (K2 <= 0) K2 = default_K2(dim);
        const Cover c = kind == "random" ? random_cover(R0, R, dim, K1, K2, seed) : uniform_cover(R0, R, dim, K1, K2);
        Json j;
        j["cover"] = to_json(c);
        j["validity"] = to_json(validate_cover(c));
        return j.dump();
      },
      py::arg("R0"), py::arg("R"), py::arg("dim"), py::arg("K1") = 0, py::arg("K2") = 0, py::arg("kind") = "uniform",
      py::arg("seed") = 1);

  m.def(
      "demo_sweep_json",
      [](const std::vector<double>& scales, double R0, int budget, double threshold) {
        EnsembleConfig cfg;
        cfg.R0 = R0;
        const SweepResult s = [&] {
          py::gil_scoped_release release;
          return scale_sweep(demo_series(R0), scales, cfg, budget);
        }();
        Json j;
        j["sweep"] = to_json(s);
        j["detector"] = to_json(detect_scales(s, threshold));
        return j.dump();
      },
      py::arg("scales"), py::arg("R0") = 10.0, py::arg("budget") = 4, py::arg("threshold") = 0.1);

  m.def(
      "diagnostics_json",
      [](const Array& omega, double T, const std::vector<double>& lengths, double rho, double R0) {
        const Grid g = box_for(omega, 1, lengths);
        const auto steps = static_cast<std::size_t>(omega.shape(0));
        if (steps < 2) throw ValidationError("need at least two snapshots");
        const std::size_t per = g.cell_count() * 3;
        std::vector<FieldPtr> snaps;
        std::vector<double> times;
        for (std::size_t k = 0; k < steps; ++k) {
          const double t = T * static_cast<double>(k) / static_cast<double>(steps - 1);
          times.push_back(t);
          std::vector<double> v(omega.data() + k * per, omega.data() + (k + 1) * per);
          snaps.push_back(std::make_shared<const Field>(g, 3, t, std::move(v)));
        }
        const FieldSeries s(std::move(times), std::move(snaps));
        py::gil_scoped_release release;
        return to_json(diagnostics(s, rho, R0)).dump();
      },
      py::arg("omega"), py::arg("T"), py::arg("lengths") = std::vector<double>(3, 2 * std::numbers::pi), py::arg("rho") = 0.75,
      py::arg("R0") = 1.0,
      "Diagnostics of vorticity snapshots shaped (steps, n0, n1, n2, 3), uniformly spaced on [0, T].");

  m.def(
      "coherence",
      [](const Array& omega, const std::vector<double>& lengths, double gamma, double r) {
        const Grid g = box_for(omega, 0, lengths);
        const Field f(g, 3, 0.0, std::vector<double>(omega.data(), omega.data() + omega.size()));
        CoherenceField c = [&] {
          py::gil_scoped_release release;
          return coherence_measure(f, gamma, r);
        }();
        const std::vector<py::ssize_t> shape{omega.shape(0), omega.shape(1), omega.shape(2)};
        py::array_t<double> rho(shape);
        py::array_t<bool> undefined(shape);
        auto pr = rho.mutable_unchecked<3>();
        auto pu = undefined.mutable_unchecked<3>();
        std::size_t i = 0;
        for (py::ssize_t a = 0; a < shape[0]; ++a)
          for (py::ssize_t b = 0; b < shape[1]; ++b)
            for (py::ssize_t d = 0; d < shape[2]; ++d, ++i) {
              pr(a, b, d) = c.rho(i, 0);
              pu(a, b, d) = c.undefined[i] != 0;
            }
        return py::make_tuple(rho, undefined);
      },
      py::arg("omega"), py::arg("lengths") = std::vector<double>(3, 2 * std::numbers::pi), py::arg("gamma") = 0.5,
      py::arg("r") = std::numeric_limits<double>::infinity(),
      "Direction coherence of a vorticity field shaped (n0, n1, n2, 3); returns (rho, undefined).");
}
