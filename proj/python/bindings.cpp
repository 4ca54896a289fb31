// Copyright The msfrac Authors
// SPDX-License-Identifier: Apache-2.0

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "msfrac/scenario.hpp"

namespace py = pybind11;
using namespace msfrac;

namespace {

py::dict norms_dict(const ErrorRow& r) {
  py::dict d;
  d["mode"] = r.mode;
  d["M"] = r.m;
  d["dof"] = r.dof;
  d["l2"] = r.norms.l2;
  d["h1"] = r.norms.h1;
  d["hq"] = r.norms.hq;
  return d;
}

std::vector<Polyline> to_polylines(const std::vector<std::vector<std::pair<double, double>>>& lines) {
  std::vector<Polyline> out;
  for (const auto& l : lines) {
    Polyline p;
    for (const auto& [x, y] : l) p.push_back({x, y});
    out.push_back(std::move(p));
  }
  return out;
}

VerifyMode parse_mode(const std::string& m) {
  if (m == "uncoupled") return VerifyMode::Uncoupled;
  if (m == "coupled") return VerifyMode::Coupled;
  fail(ErrorKind::InvalidArgument, "mode must be 'uncoupled' or 'coupled'");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Multiscale flow in fractured porous media";

  static py::exception<Error> error(m, "Error", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      const auto cls = py::reinterpret_borrow<py::object>(error.ptr());
      py::object inst = cls(e.what());
      inst.attr("kind") = std::string(to_string(e.kind()));
      PyErr_SetObject(error.ptr(), inst.ptr());
    }
  });

  py::class_<ScenarioConfig>(m, "ScenarioConfig")
      .def_readwrite("scenario", &ScenarioConfig::scenario)
      .def_readwrite("seed", &ScenarioConfig::seed)
      .def_readwrite("threads", &ScenarioConfig::threads)
      .def_readwrite("coarse_nx", &ScenarioConfig::coarse_nx)
      .def_readwrite("coarse_ny", &ScenarioConfig::coarse_ny)
      .def_readwrite("refinement", &ScenarioConfig::refinement)
      .def_readwrite("verify", &ScenarioConfig::verify)
      .def_property(
          "t_max", [](const ScenarioConfig& c) { return c.time.t_max; },
          [](ScenarioConfig& c, double v) { c.time.t_max = v; })
      .def_property(
          "steps", [](const ScenarioConfig& c) { return c.time.steps; },
          [](ScenarioConfig& c, int v) { c.time.steps = v; })
      .def_property(
          "basis", [](const ScenarioConfig& c) { return c.basis.mode; },
          [](ScenarioConfig& c, const std::string& v) { c.basis.mode = v; })
      .def_property(
          "schedule", [](const ScenarioConfig& c) { return c.basis.schedule; },
          [](ScenarioConfig& c, const std::vector<int>& v) { c.basis.schedule = v; })
      .def_property(
          "out", [](const ScenarioConfig& c) { return c.output.dir; },
          [](ScenarioConfig& c, const std::string& v) { c.output.dir = v; })
      .def("validate", &ScenarioConfig::validate)
      .def("__repr__", [](const ScenarioConfig& c) {
        return "<ScenarioConfig " + c.scenario + " basis=" + c.basis.mode + ">";
      });

  m.def("preset", &preset, py::arg("name"));
  m.def("preset_names", &preset_names);
  m.def("parse_config", &parse_config, py::arg("yaml_text"));
  m.def("load_config", &load_config, py::arg("path"));

  m.def(
      "run",
      [](const ScenarioConfig& cfg) {
        RunSummary s;
        {
          py::gil_scoped_release release;
          s = run(cfg);
        }
        py::dict d;
        py::list rows;
        for (const auto& r : s.rows) rows.append(norms_dict(r));
        d["rows"] = rows;
        d["files"] = s.files;
        d["warnings"] = s.warnings;
        d["shale_l2"] = s.shale_l2 ? py::cast(*s.shale_l2) : py::none();
        return d;
      },
      py::arg("config"), "Run a configuration and write its artifacts into config.out.");

  m.def(
      "check_bounds",
      [](const ScenarioConfig& cfg, const std::string& mode, const std::vector<int>& schedule) {
        BoundReport rep;
        {
          py::gil_scoped_release release;
          const Model model = build_model(cfg);
          VerifyOptions vo = cfg.verify_options;
          if (!schedule.empty()) vo.schedule = schedule;
          rep = check_bounds(model.mesh, model.sys, model.fm, model.ops, model.time, model.reference,
                             parse_mode(mode), vo);
        }
        py::dict d;
        py::list rows;
        for (const auto& r : rep.rows) {
          py::dict row;
          row["L"] = r.L;
          row["lambda"] = r.lambda;
          row["D"] = r.d;
          row["E"] = r.e;
          row["lhs"] = r.lhs;
          row["rhs"] = r.rhs;
          row["c_emp"] = r.c_emp;
          row["c_initial"] = r.c_initial;
          row["cea_ratio"] = r.cea_ratio;
          row["dim"] = r.dim;
          rows.append(row);
        }
        d["rows"] = rows;
        d["assume_constant"] = rep.assume_constant;
        d["assumption_ok"] = rep.assumption_ok;
        d["caccioppoli"] = rep.caccioppoli;
        d["bounds_csv"] = rep.bounds_csv();
        return d;
      },
      py::arg("config"), py::arg("mode") = "uncoupled", py::arg("schedule") = std::vector<int>{});

  m.def(
      "rve_transfer",
      [](double width, double height, int cells, int refinement,
         const std::vector<std::vector<std::pair<double, double>>>& fractures, double porosity,
         double permeability, double t_max, int steps, double rel_tol, int window) {
        const auto mesh = build_hierarchy({width, height}, cells, cells, refinement);
        const auto lines = to_polylines(fractures);
        const auto fm = embed_fractures(mesh, lines, std::vector<FractureProps>(lines.size()));
        RveOptions o;
        o.rel_tol = rel_tol;
        o.window = window;
        const auto r = rve_transfer(mesh, fm, uniform_field(mesh, porosity), uniform_field(mesh, permeability),
                                    {t_max, steps}, o);
        Vec t(r.trace.size()), q(r.trace.size()), mean(r.trace.size());
        for (std::size_t k = 0; k < r.trace.size(); ++k) {
          t[k] = r.trace[k].t;
          q[k] = r.trace[k].q;
          mean[k] = r.trace[k].mean;
        }
        py::dict d;
        d["q"] = r.q;
        d["status"] = std::string(to_string(r.status));
        d["t_asymptote"] = r.t_asymptote;
        d["t"] = t;
        d["q_trace"] = q;
        d["mean"] = mean;
        return d;
      },
      py::arg("width"), py::arg("height"), py::arg("cells"), py::arg("refinement"), py::arg("fractures"),
      py::arg("porosity"), py::arg("permeability"), py::arg("t_max"), py::arg("steps"),
      py::arg("rel_tol") = 1e-3, py::arg("window") = 5);

  m.def(
      "offline_eigenvalues",
      [](double width, double height, int nx, int ny, int refinement,
         const std::vector<std::vector<std::pair<double, double>>>& fractures, double contrast, int omega) {
        const auto mesh = build_hierarchy({width, height}, nx, ny, refinement);
        const auto lines = to_polylines(fractures);
        const auto fm =
            embed_fractures(mesh, lines, std::vector<FractureProps>(lines.size(), {contrast, 1.0, 1.0, 0}));
        const auto sys = ContinuumSystem::single(uniform_field(mesh, 1.0), uniform_field(mesh, 1.0));
        const auto snap = uncoupled_snapshots(mesh, sys, fm, omega, 0);
        return Vec(offline_eig(mesh, sys, fm, snap, Weighting::KappaMass, Bilinear::A).lambda);
      },
      py::arg("width"), py::arg("height"), py::arg("nx"), py::arg("ny"), py::arg("refinement"),
      py::arg("fractures"), py::arg("contrast"), py::arg("omega"),
      "Local spectrum of one neighborhood with unit matrix coefficients.");

  m.def(
      "count_networks",
      [](const std::vector<double>& eigs, double gap_ratio) { return count_networks(eigs, gap_ratio); },
      py::arg("eigenvalues"), py::arg("gap_ratio") = 1e3);
}
