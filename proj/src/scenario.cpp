// Copyright The msfrac Authors
// SPDX-License-Identifier: Apache-2.0

#include "msfrac/scenario.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <initializer_list>
#include <json.hpp>
#include <set>

#include "msfrac/simplified_basis.hpp"

namespace msfrac {

namespace {

constexpr double kDay = 86400.0;

const std::vector<std::string> kBasisModes{"gmsfem_uncoupled", "gmsfem_coupled", "simplified",
                                           "simplified_cellwise", "lambda_select"};

[[noreturn]] void bad(const std::string& path, const std::string& what) {
  fail(ErrorKind::ConfigInvalid, path + ": " + what);
}

std::string at(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

std::string at(const std::string& path, std::size_t i) {
  return path + "[" + std::to_string(i) + "]";
}

void check_keys(const YAML::Node& n, const std::string& path,
                std::initializer_list<const char*> allowed) {
  if (!n.IsMap()) bad(path.empty() ? "<root>" : path, "expected a mapping");
  for (const auto& kv : n) {
    const auto key = kv.first.as<std::string>();
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }))
      bad(at(path, key), "unknown key");
  }
}

template <class T>
T scalar(const YAML::Node& n, const std::string& path, const char* what) {
  if (!n.IsScalar()) bad(path, std::string("expected ") + what);
  try {
    return n.as<T>();
  } catch (const YAML::Exception&) {
    bad(path, std::string("expected ") + what);
  }
}

double number(const YAML::Node& n, const std::string& path) {
  const double v = scalar<double>(n, path, "a number");
  if (!std::isfinite(v)) bad(path, "must be finite");
  return v;
}

int integer(const YAML::Node& n, const std::string& path) { return scalar<int>(n, path, "an integer"); }

bool boolean(const YAML::Node& n, const std::string& path) { return scalar<bool>(n, path, "a boolean"); }

std::string text(const YAML::Node& n, const std::string& path) {
  return scalar<std::string>(n, path, "a string");
}

template <class F>
void seq(const YAML::Node& n, const std::string& path, F&& f) {
  if (!n.IsSequence()) bad(path, "expected a list");
  for (std::size_t i = 0; i < n.size(); ++i) f(n[i], at(path, i));
}

std::vector<double> numbers(const YAML::Node& n, const std::string& path) {
  std::vector<double> out;
  seq(n, path, [&](const YAML::Node& v, const std::string& p) { out.push_back(number(v, p)); });
  return out;
}

std::vector<int> integers(const YAML::Node& n, const std::string& path) {
  std::vector<int> out;
  seq(n, path, [&](const YAML::Node& v, const std::string& p) { out.push_back(integer(v, p)); });
  return out;
}

Point point(const YAML::Node& n, const std::string& path) {
  const auto v = numbers(n, path);
  if (v.size() != 2) bad(path, "expected [x, y]");
  return {v[0], v[1]};
}

Polyline polyline(const YAML::Node& n, const std::string& path) {
  Polyline out;
  seq(n, path, [&](const YAML::Node& v, const std::string& p) { out.push_back(point(v, p)); });
  if (out.size() < 2) bad(path, "a polyline needs at least two points");
  return out;
}

template <class E>
E choice(const YAML::Node& n, const std::string& path,
         std::initializer_list<std::pair<const char*, E>> options) {
  const std::string s = text(n, path);
  for (const auto& [name, value] : options)
    if (s == name) return value;
  std::string list;
  for (const auto& o : options) list += (list.empty() ? "" : ", ") + std::string(o.first);
  bad(path, "expected one of " + list);
}

int fracture_tag(const YAML::Node& n, const std::string& path) {
  if (n.IsScalar()) {
    const std::string s = n.Scalar();
    if (s == "natural") return kNaturalFracture;
    if (s == "hydraulic") return kHydraulicFracture;
  }
  return integer(n, path);
}

// The desk fracture network: a network draining into both sinks plus three
// isolated pieces. Every vertex lies on the 0.6 m fine grid and off the 6 m
// coarse lines except where a piece reaches a sink.
std::vector<Polyline> desk_polylines() {
  return {
      {{0, 24}, {3, 24}, {3, 27}, {39, 27}},
      {{0, 48}, {3, 48}, {3, 45}, {33, 45}},
      {{33, 9}, {33, 57}},
      {{9, 15}, {51, 15}},
      {{45, 33}, {57, 33}},
      {{9, 33}, {15, 33}, {15, 39}, {21, 39}},
      {{51, 39}, {51, 57}},
  };
}

std::vector<DirichletPoint> desk_sinks() { return {{{0, 24}, -1, 0.0}, {{0, 48}, -1, 0.0}}; }

ScenarioConfig single_preset() {
  ScenarioConfig c;
  c.scenario = "single";
  c.time = {300.0, 50};
  c.continua = {{"matrix", 1e-2, 0.1, 1.0, 0.0}};
  c.gamma = {1.0};
  for (auto& p : desk_polylines()) c.fractures.push_back({p, {1e4, 0.01, 1.0, 0}});
  c.dirichlet = desk_sinks();
  return c;
}

ScenarioConfig dual_preset() {
  ScenarioConfig c;
  c.scenario = "dual";
  c.time = {5000.0, 50};
  c.continua = {{"fracture", 1e-3, 0.1, 1.0, 0.0}, {"matrix", 1e-7, 0.01, 1.0, 0.0}};
  c.gamma = {0.8, 0.2};
  for (auto& p : desk_polylines()) c.fractures.push_back({p, {1e3, 0.1, 1.0, 0}});
  TransferSpec t;
  t.q = 250.0 * 1e-7;
  c.transfers = {t};
  c.dirichlet = desk_sinks();
  c.basis.schedule = {1, 2, 4, 8};
  return c;
}

ScenarioConfig dual_rve_preset() {
  ScenarioConfig c = dual_preset();
  c.scenario = "dual_rve";
  c.continua[1].porosity = 0.1;
  for (auto& f : c.fractures) f.props.porosity = 0.01;
  auto& t = c.transfers[0];
  t.profile = true;
  t.q1 = 500.0 * 1e-7;
  t.q2 = 920.0 * 1e-7;
  t.y_lo = 5.0 * c.domain.ly / 10.0;
  t.y_hi = 7.0 * c.domain.ly / 10.0;
  // Unit-size cells with one (lower) or two (upper) crossing fracture lines.
  RveSpec lower;
  lower.domain = {0.06, 0.06};
  lower.cells = 2;
  lower.refinement = 6;
  lower.fractures = {{{0.0, 0.03}, {0.06, 0.03}}};
  lower.time = {1.0e5, 400};
  RveSpec upper = lower;
  upper.fractures = {{{0.0, 0.03}, {0.06, 0.03}}, {{0.03, 0.0}, {0.03, 0.06}}};
  c.rve.lower = lower;
  c.rve.upper = upper;
  return c;
}

ScenarioConfig shale_preset() {
  ScenarioConfig c;
  c.scenario = "shale";
  c.domain = {50.0, 50.0};
  c.coarse_nx = c.coarse_ny = 10;
  c.refinement = 10;
  c.shale.t_max_days = 500.0;
  c.time = {c.shale.t_max_days * kDay, 50};
  c.basis.mode = "simplified";
  c.basis.schedule = {};
  // One hydraulic fracture through the well with natural fractures hung off it
  // and two isolated natural fractures.
  const ShaleParams p;
  const auto hf = shale_fracture(p, kHydraulicFracture);
  const auto nf = shale_fracture(p, kNaturalFracture);
  c.fractures = {
      {{{10.5, 25.5}, {39.5, 25.5}}, hf},
      {{{15.5, 15.5}, {15.5, 35.5}}, nf},
      {{{34.5, 18.5}, {34.5, 32.5}}, nf},
      {{{20.5, 40.5}, {30.5, 40.5}}, nf},
      {{{22.5, 6.5}, {22.5, 14.5}, {28.5, 14.5}}, nf},
  };
  c.shale.wells = {{25.5, 25.5}};
  return c;
}

}  // namespace

std::vector<std::string> preset_names() { return {"single", "dual", "dual_rve", "shale"}; }

ScenarioConfig preset(const std::string& name) {
  if (name == "single") return single_preset();
  if (name == "dual") return dual_preset();
  if (name == "dual_rve") return dual_rve_preset();
  if (name == "shale") return shale_preset();
  bad("scenario", "unknown scenario '" + name + "'");
}

void ScenarioConfig::validate() const {
  if (std::find(preset_names().begin(), preset_names().end(), scenario) == preset_names().end())
    bad("scenario", "unknown scenario '" + scenario + "'");
  if (!(domain.lx > 0.0 && domain.ly > 0.0)) bad("mesh.size", "must be positive");
  if (coarse_nx < 1 || coarse_ny < 1) bad("mesh.coarse", "need at least one coarse cell");
  if (refinement < 1) bad("mesh.refinement", "must be at least 1");
  if (!(time.t_max > 0.0)) bad("time.t_max", "must be positive");
  if (time.steps < 1) bad("time.steps", "must be at least 1");
  if (threads < 0) bad("threads", "must be non-negative");
  if (std::find(kBasisModes.begin(), kBasisModes.end(), basis.mode) == kBasisModes.end())
    bad("basis.mode", "unknown basis mode '" + basis.mode + "'");
  for (std::size_t i = 0; i < basis.schedule.size(); ++i)
    if (basis.schedule[i] < 1) bad(at("basis.schedule", i), "basis counts must be positive");
  if (!(basis.lambda_threshold > 0.0)) bad("basis.lambda_threshold", "must be positive");
  if (!(basis.gap_ratio > 1.0)) bad("basis.gap_ratio", "must exceed 1");
  if (basis.randomized.target < 1) bad("basis.randomized.target", "must be positive");
  if (basis.randomized.ring < 0) bad("basis.randomized.oversampling", "must be non-negative");
  for (std::size_t i = 0; i < output.field_steps.size(); ++i)
    if (output.field_steps[i] < 0 || output.field_steps[i] > time.steps)
      bad(at("output.field_steps", i), "time level outside [0, steps]");
  if (scenario == "shale") {
    if (basis.mode != "simplified" && basis.mode != "simplified_cellwise")
      bad("basis.mode", "the shale scenario uses the simplified basis");
    if (shale.wells.empty()) bad("shale.wells", "at least one well is needed");
    try {
      shale.params.validate();
    } catch (const Error& e) {
      bad("shale", e.what());
    }
    return;
  }
  if (continua.empty()) bad("continua", "at least one continuum is needed");
  const int n = static_cast<int>(continua.size());
  for (int s = 0; s < n; ++s) {
    const std::string p = at("continua", static_cast<std::size_t>(s));
    if (!(continua[s].porosity > 0.0)) bad(at(p, "porosity"), "must be positive");
    if (!(continua[s].permeability >= 0.0)) bad(at(p, "permeability"), "must be non-negative");
  }
  if (static_cast<int>(gamma.size()) != n) bad("fractures.gamma", "needs one entry per continuum");
  for (std::size_t i = 0; i < transfers.size(); ++i) {
    const auto& t = transfers[i];
    const std::string p = at("transfer", i);
    if (t.first < 0 || t.second < 0 || t.first >= n || t.second >= n || t.first == t.second)
      bad(at(p, "between"), "needs two distinct continuum indices");
    if (!t.profile && !(t.q >= 0.0)) bad(at(p, "q"), "must be non-negative");
    if (t.profile && !(t.q1 >= 0.0 && t.q2 >= 0.0)) bad(at(p, "profile"), "values must be non-negative");
    if (t.profile && !(t.y_lo < t.y_hi)) bad(at(p, "profile"), "needs y_lo < y_hi");
  }
  for (std::size_t i = 0; i < dirichlet.size(); ++i)
    if (dirichlet[i].continuum >= n) bad(at(at("dirichlet", i), "continuum"), "out of range");
  if (basis.mode == "gmsfem_coupled" && basis.coupled_bilinear == Bilinear::AQ && n < 2)
    bad("basis.coupled_form", "a_Q needs two continua");
  if (rve.enabled) {
    if (rve.continuum < 0 || rve.continuum >= n) bad("rve.continuum", "out of range");
    if (transfers.empty() || !transfers[0].profile)
      bad("rve.enabled", "calibration fills a transfer profile");
    for (const auto* r : {&rve.lower, &rve.upper}) {
      const std::string p = r == &rve.lower ? "rve.lower" : "rve.upper";
      if (r->cells < 1 || r->refinement < 1) bad(p, "mesh counts must be positive");
      if (r->fractures.empty()) bad(at(p, "fractures"), "an RVE needs a fracture");
      if (!(r->time.t_max > 0.0) || r->time.steps < 1) bad(at(p, "time"), "invalid time grid");
    }
  }
}

namespace {

void parse_rve(const YAML::Node& n, const std::string& path, RveSpec& r) {
  check_keys(n, path, {"size", "cells", "refinement", "polylines", "t_max", "steps", "rel_tol",
                       "window", "lumped_mass"});
  if (n["size"]) {
    const auto v = numbers(n["size"], at(path, "size"));
    if (v.size() != 2) bad(at(path, "size"), "expected [Lx, Ly]");
    r.domain = {v[0], v[1]};
  }
  if (n["cells"]) r.cells = integer(n["cells"], at(path, "cells"));
  if (n["refinement"]) r.refinement = integer(n["refinement"], at(path, "refinement"));
  if (n["polylines"]) {
    r.fractures.clear();
    seq(n["polylines"], at(path, "polylines"),
        [&](const YAML::Node& v, const std::string& p) { r.fractures.push_back(polyline(v, p)); });
  }
  if (n["t_max"]) r.time.t_max = number(n["t_max"], at(path, "t_max"));
  if (n["steps"]) r.time.steps = integer(n["steps"], at(path, "steps"));
  if (n["rel_tol"]) r.options.rel_tol = number(n["rel_tol"], at(path, "rel_tol"));
  if (n["window"]) r.options.window = integer(n["window"], at(path, "window"));
  if (n["lumped_mass"]) r.options.lumped_mass = boolean(n["lumped_mass"], at(path, "lumped_mass"));
}

TransferSpec parse_transfer(const YAML::Node& n, const std::string& path, TransferSpec t) {
  check_keys(n, path, {"between", "q", "profile"});
  if (n["between"]) {
    const auto v = integers(n["between"], at(path, "between"));
    if (v.size() != 2) bad(at(path, "between"), "expected [first, second]");
    t.first = v[0];
    t.second = v[1];
  }
  if (n["q"]) {
    t.q = number(n["q"], at(path, "q"));
    t.profile = false;
  }
  if (n["profile"]) {
    const auto& p = n["profile"];
    const std::string pp = at(path, "profile");
    check_keys(p, pp, {"q1", "q2", "y_lo", "y_hi"});
    for (const char* k : {"q1", "q2", "y_lo", "y_hi"})
      if (!p[k]) bad(at(pp, k), "missing");
    t.profile = true;
    t.q1 = number(p["q1"], at(pp, "q1"));
    t.q2 = number(p["q2"], at(pp, "q2"));
    t.y_lo = number(p["y_lo"], at(pp, "y_lo"));
    t.y_hi = number(p["y_hi"], at(pp, "y_hi"));
  }
  return t;
}

void parse_shale(const YAML::Node& n, ScenarioConfig& c) {
  check_keys(n, "shale", {"phi_i", "phi_k", "phi_f", "kappa_i", "kappa_k", "kappa_nf", "kappa_hf",
                          "d_i", "d_k", "d_s", "k_h", "sigma", "mu", "z", "r_gas", "t_k", "p_init",
                          "p_well", "aperture", "wells", "t_max_days"});
  auto& p = c.shale.params;
  const std::pair<const char*, double*> fields[] = {
      {"phi_i", &p.phi_i},       {"phi_k", &p.phi_k},     {"phi_f", &p.phi_f},
      {"kappa_i", &p.kappa_i},   {"kappa_k", &p.kappa_k}, {"kappa_nf", &p.kappa_nf},
      {"kappa_hf", &p.kappa_hf}, {"d_i", &p.d_i},         {"d_k", &p.d_k},
      {"d_s", &p.d_s},           {"k_h", &p.k_h},         {"sigma", &p.sigma},
      {"mu", &p.mu},             {"z", &p.z},             {"r_gas", &p.r_gas},
      {"t_k", &p.t_k},           {"p_init", &p.p_init},   {"p_well", &p.p_well},
      {"aperture", &p.aperture}, {"t_max_days", &c.shale.t_max_days}};
  for (const auto& [key, dst] : fields)
    if (n[key]) *dst = number(n[key], at("shale", key));
  if (n["wells"]) {
    c.shale.wells.clear();
    seq(n["wells"], "shale.wells",
        [&](const YAML::Node& v, const std::string& pp) { c.shale.wells.push_back(point(v, pp)); });
  }
}

}  // namespace

ScenarioConfig parse_config(const std::string& yaml_text) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::Exception& e) {
    bad("<document>", e.what());
  }
  if (root.IsNull()) root = YAML::Node(YAML::NodeType::Map);
  check_keys(root, "", {"scenario", "seed", "threads", "mesh", "time", "continua", "fractures",
                        "transfer", "dirichlet", "assembly", "basis", "verify", "output", "rve",
                        "shale"});
  ScenarioConfig c = preset(root["scenario"] ? text(root["scenario"], "scenario") : "single");
  if (root["seed"]) c.seed = scalar<std::uint64_t>(root["seed"], "seed", "a non-negative integer");
  if (root["threads"]) c.threads = integer(root["threads"], "threads");
  // Before the fractures: tagged polylines take their properties from these.
  if (const auto s = root["shale"]) {
    if (c.scenario != "shale") bad("shale", "only valid with scenario: shale");
    parse_shale(s, c);
    c.time.t_max = c.shale.t_max_days * kDay;
    for (auto& f : c.fractures) f.props = shale_fracture(c.shale.params, f.props.tag);
  }

  if (const auto m = root["mesh"]) {
    check_keys(m, "mesh", {"size", "coarse", "refinement"});
    if (m["size"]) {
      const auto v = numbers(m["size"], "mesh.size");
      if (v.size() != 2) bad("mesh.size", "expected [Lx, Ly]");
      c.domain = {v[0], v[1]};
    }
    if (m["coarse"]) {
      const auto v = integers(m["coarse"], "mesh.coarse");
      if (v.size() != 2) bad("mesh.coarse", "expected [nx, ny]");
      c.coarse_nx = v[0];
      c.coarse_ny = v[1];
    }
    if (m["refinement"]) c.refinement = integer(m["refinement"], "mesh.refinement");
  }
  if (const auto t = root["time"]) {
    check_keys(t, "time", {"t_max", "steps"});
    if (t["t_max"]) c.time.t_max = number(t["t_max"], "time.t_max");
    if (t["steps"]) c.time.steps = integer(t["steps"], "time.steps");
  }
  if (const auto cs = root["continua"]) {
    c.continua.clear();
    seq(cs, "continua", [&](const YAML::Node& v, const std::string& p) {
      check_keys(v, p, {"name", "permeability", "porosity", "initial", "source"});
      ContinuumSpec s;
      s.name = "c" + std::to_string(c.continua.size() + 1);
      if (v["name"]) s.name = text(v["name"], at(p, "name"));
      if (!v["permeability"]) bad(at(p, "permeability"), "missing");
      if (!v["porosity"]) bad(at(p, "porosity"), "missing");
      s.permeability = number(v["permeability"], at(p, "permeability"));
      s.porosity = number(v["porosity"], at(p, "porosity"));
      if (v["initial"]) s.initial = number(v["initial"], at(p, "initial"));
      if (v["source"]) s.source = number(v["source"], at(p, "source"));
      c.continua.push_back(s);
    });
    if (c.gamma.size() != c.continua.size()) {
      c.gamma.assign(c.continua.size(), 0.0);
      if (!c.gamma.empty()) c.gamma[0] = 1.0;
    }
  }
  if (const auto f = root["fractures"]) {
    check_keys(f, "fractures", {"permeability", "porosity", "aperture", "gamma", "polylines"});
    FractureProps base = c.fractures.empty() ? FractureProps{} : c.fractures.front().props;
    base.tag = 0;
    if (f["permeability"]) base.permeability = number(f["permeability"], "fractures.permeability");
    if (f["porosity"]) base.porosity = number(f["porosity"], "fractures.porosity");
    if (f["aperture"]) base.aperture = number(f["aperture"], "fractures.aperture");
    if (f["gamma"]) c.gamma = numbers(f["gamma"], "fractures.gamma");
    if (f["polylines"]) {
      c.fractures.clear();
      seq(f["polylines"], "fractures.polylines", [&](const YAML::Node& v, const std::string& p) {
        FractureSpec s{{}, base};
        if (v.IsSequence()) {
          s.points = polyline(v, p);
        } else {
          check_keys(v, p, {"points", "permeability", "porosity", "aperture", "tag"});
          if (!v["points"]) bad(at(p, "points"), "missing");
          s.points = polyline(v["points"], at(p, "points"));
          if (v["tag"]) s.props.tag = fracture_tag(v["tag"], at(p, "tag"));
          if (c.scenario == "shale") s.props = shale_fracture(c.shale.params, s.props.tag);
          if (v["permeability"]) s.props.permeability = number(v["permeability"], at(p, "permeability"));
          if (v["porosity"]) s.props.porosity = number(v["porosity"], at(p, "porosity"));
          if (v["aperture"]) s.props.aperture = number(v["aperture"], at(p, "aperture"));
        }
        c.fractures.push_back(s);
      });
    } else {
      for (auto& s : c.fractures) {
        if (f["permeability"]) s.props.permeability = base.permeability;
        if (f["porosity"]) s.props.porosity = base.porosity;
        if (f["aperture"]) s.props.aperture = base.aperture;
      }
    }
  }
  if (const auto t = root["transfer"]) {
    if (t.IsSequence()) {
      c.transfers.clear();
      seq(t, "transfer", [&](const YAML::Node& v, const std::string& p) {
        c.transfers.push_back(parse_transfer(v, p, {}));
      });
    } else {
      c.transfers = {parse_transfer(t, "transfer", c.transfers.empty() ? TransferSpec{} : c.transfers[0])};
    }
  }
  if (const auto d = root["dirichlet"]) {
    c.dirichlet.clear();
    seq(d, "dirichlet", [&](const YAML::Node& v, const std::string& p) {
      check_keys(v, p, {"at", "value", "continuum"});
      if (!v["at"]) bad(at(p, "at"), "missing");
      DirichletPoint dp;
      dp.at = point(v["at"], at(p, "at"));
      if (v["value"]) dp.value = number(v["value"], at(p, "value"));
      if (v["continuum"]) dp.continuum = integer(v["continuum"], at(p, "continuum"));
      if (dp.continuum < -1) bad(at(p, "continuum"), "use -1 or omit for every continuum");
      c.dirichlet.push_back(dp);
    });
  }
  if (const auto a = root["assembly"]) {
    check_keys(a, "assembly", {"lumped_mass", "lumped_transfer"});
    if (a["lumped_mass"]) c.assembly.lumped_mass = boolean(a["lumped_mass"], "assembly.lumped_mass");
    if (a["lumped_transfer"])
      c.assembly.lumped_transfer = boolean(a["lumped_transfer"], "assembly.lumped_transfer");
  }
  if (const auto b = root["basis"]) {
    check_keys(b, "basis", {"mode", "schedule", "snapshots", "weighting", "coupled_form", "coupled_traces",
                            "lambda_threshold", "gap_ratio", "randomized"});
    if (b["mode"]) c.basis.mode = text(b["mode"], "basis.mode");
    if (b["schedule"]) c.basis.schedule = integers(b["schedule"], "basis.schedule");
    if (b["snapshots"])
      c.basis.snapshots = choice<SnapshotKind>(
          b["snapshots"], "basis.snapshots",
          {{"harmonic", SnapshotKind::Harmonic}, {"randomized", SnapshotKind::Randomized}});
    if (b["weighting"])
      c.basis.weighting = choice<Weighting>(
          b["weighting"], "basis.weighting",
          {{"kappa_mass", Weighting::KappaMass}, {"pou_gradient", Weighting::PouGradient}});
    if (b["coupled_form"])
      c.basis.coupled_bilinear = choice<Bilinear>(b["coupled_form"], "basis.coupled_form",
                                                  {{"a", Bilinear::A}, {"a_Q", Bilinear::AQ}});
    if (b["coupled_traces"])
      c.basis.coupled_independent = choice<bool>(b["coupled_traces"], "basis.coupled_traces",
                                                 {{"shared", false}, {"independent", true}});
    if (b["lambda_threshold"]) c.basis.lambda_threshold = number(b["lambda_threshold"], "basis.lambda_threshold");
    if (b["gap_ratio"]) c.basis.gap_ratio = number(b["gap_ratio"], "basis.gap_ratio");
    if (const auto r = b["randomized"]) {
      check_keys(r, "basis.randomized", {"target", "oversampling", "rank_tol"});
      if (r["target"]) c.basis.randomized.target = integer(r["target"], "basis.randomized.target");
      if (r["oversampling"])
        c.basis.randomized.ring = integer(r["oversampling"], "basis.randomized.oversampling");
      if (r["rank_tol"]) c.basis.randomized.rank_tol = number(r["rank_tol"], "basis.randomized.rank_tol");
    }
  }
  if (const auto v = root["verify"]) {
    check_keys(v, "verify", {"enabled", "schedule", "power_iterations", "caccioppoli_samples"});
    if (v["enabled"]) c.verify = boolean(v["enabled"], "verify.enabled");
    if (v["schedule"]) c.verify_options.schedule = integers(v["schedule"], "verify.schedule");
    if (v["power_iterations"])
      c.verify_options.power_iterations = integer(v["power_iterations"], "verify.power_iterations");
    if (v["caccioppoli_samples"])
      c.verify_options.caccioppoli_samples = integer(v["caccioppoli_samples"], "verify.caccioppoli_samples");
  }
  if (const auto o = root["output"]) {
    check_keys(o, "output", {"dir", "field_steps", "cache"});
    if (o["dir"]) c.output.dir = text(o["dir"], "output.dir");
    if (o["field_steps"]) c.output.field_steps = integers(o["field_steps"], "output.field_steps");
    if (o["cache"]) c.output.cache_dir = text(o["cache"], "output.cache");
  }
  if (const auto r = root["rve"]) {
    check_keys(r, "rve", {"enabled", "continuum", "lower", "upper"});
    if (r["enabled"]) c.rve.enabled = boolean(r["enabled"], "rve.enabled");
    if (r["continuum"]) c.rve.continuum = integer(r["continuum"], "rve.continuum");
    if (r["lower"]) parse_rve(r["lower"], "rve.lower", c.rve.lower);
    if (r["upper"]) parse_rve(r["upper"], "rve.upper", c.rve.upper);
  }
  c.validate();
  return c;
}

ScenarioConfig load_config(const std::string& path) {
  std::string body;
  try {
    body = read_text(path);
  } catch (const Error&) {
    bad("--config", "cannot read " + path);
  }
  return parse_config(body);
}

ScenarioConfig apply_overrides(ScenarioConfig cfg, const Overrides& o, bool have_config) {
  if (o.scenario && *o.scenario != cfg.scenario) {
    if (have_config) bad("--scenario", "conflicts with the scenario of the config file");
    cfg = preset(*o.scenario);
  }
  if (o.basis) {
    cfg.basis.mode = *o.basis;
    if (cfg.basis.mode != "simplified" && cfg.basis.mode != "simplified_cellwise" &&
        cfg.basis.schedule.empty())
      cfg.basis.schedule = {1, 2, 4, 8};
  }
  if (o.schedule) cfg.basis.schedule = *o.schedule;
  if (o.seed) cfg.seed = *o.seed;
  if (o.threads) cfg.threads = *o.threads;
  if (o.out) cfg.output.dir = *o.out;
  if (o.verify) cfg.verify = true;
  cfg.validate();
  return cfg;
}

FractureMesh build_fractures(const ScenarioConfig& cfg, const MeshHierarchy& mesh) {
  std::vector<Polyline> lines;
  std::vector<FractureProps> props;
  for (const auto& f : cfg.fractures) {
    lines.push_back(f.points);
    props.push_back(f.props);
  }
  return embed_fractures(mesh, lines, props);
}

ContinuumSystem build_system(const ScenarioConfig& cfg, const MeshHierarchy& mesh) {
  ContinuumSystem sys;
  bool any_source = false;
  for (const auto& c : cfg.continua) {
    sys.continua.push_back({uniform_field(mesh, c.porosity), uniform_field(mesh, c.permeability)});
    any_source = any_source || c.source != 0.0;
  }
  if (any_source)
    for (const auto& c : cfg.continua) sys.source.push_back(uniform_field(mesh, c.source));
  sys.gamma = cfg.gamma;
  for (const auto& t : cfg.transfers) {
    Transfer tr;
    tr.first = t.first;
    tr.second = t.second;
    tr.coefficient = t.profile ? spatial_Q_field(t.q1, t.q2, t.y_lo, t.y_hi, mesh)
                               : uniform_field(mesh, t.q);
    sys.transfers.push_back(std::move(tr));
  }
  return sys;
}

namespace {

RveResult run_rve(const RveSpec& r, const ContinuumSpec& matrix) {
  const MeshHierarchy mesh = build_hierarchy(r.domain, r.cells, r.cells, r.refinement);
  const std::vector<FractureProps> props(r.fractures.size());
  const FractureMesh fm = embed_fractures(mesh, r.fractures, props);
  return rve_transfer(mesh, fm, uniform_field(mesh, matrix.porosity),
                      uniform_field(mesh, matrix.permeability), r.time, r.options);
}

}  // namespace

Model build_model(const ScenarioConfig& cfg, bool solve_reference) {
  require(cfg.scenario != "shale", ErrorKind::InvalidArgument, "shale runs through shale_run");
  Model m;
  m.mesh = build_hierarchy(cfg.domain, cfg.coarse_nx, cfg.coarse_ny, cfg.refinement);
  m.fm = build_fractures(cfg, m.mesh);
  ScenarioConfig resolved = cfg;
  if (cfg.rve.enabled) {
    const auto& matrix = cfg.continua[cfg.rve.continuum];
    const RveResult lo = run_rve(cfg.rve.lower, matrix);
    const RveResult hi = run_rve(cfg.rve.upper, matrix);
    resolved.transfers[0].q1 = lo.q;
    resolved.transfers[0].q2 = hi.q;
    m.rve = {lo, hi};
  }
  m.sys = build_system(resolved, m.mesh);
  m.sys.validate(m.mesh);
  m.ops = apply_bc(assemble_multi(m.mesh, m.sys, m.fm, cfg.assembly), m.mesh, cfg.dirichlet);
  m.time = cfg.time;
  const int nn = m.mesh.fine.node_count();
  m.u0 = Vec::Zero(m.ops.dofs());
  for (int s = 0; s < m.sys.size(); ++s) m.u0.segment(s * nn, nn).setConstant(cfg.continua[s].initial);
  if (solve_reference) m.reference = solve_fine(m.ops, m.time, m.u0);
  return m;
}

BasisRun run_basis(const Model& model, const BasisConfig& basis, const std::string& cache_dir) {
  require(!model.reference.states.empty(), ErrorKind::InvalidArgument, "model has no reference solution");
  BasisRun out;
  const Vec& uh = model.reference.final_state();
  auto add_row = [&](const std::string& label, const OfflineSpace& space) {
    SimulationResult ms = solve_coarse(model.ops, space.R, model.time, model.u0);
    ErrorRow row{basis.mode, label, space.dim(), error_norms(ms.final_state(), uh, model.ops)};
    out.rows.push_back(row);
    out.solutions.push_back(std::move(ms));
    out.warnings.insert(out.warnings.end(), space.warnings.begin(), space.warnings.end());
  };

  if (basis.mode == "simplified" || basis.mode == "simplified_cellwise") {
    const OfflineSpace space =
        build_simplified(model.mesh, model.sys, model.fm, basis.mode == "simplified_cellwise");
    char label[32];
    std::snprintf(label, sizeof label, "%.2f",
                  static_cast<double>(space.dim()) / static_cast<double>(model.mesh.neighborhoods.size()));
    add_row(label, space);
    return out;
  }

  SpectralOptions so;
  so.coupled = basis.mode == "gmsfem_coupled";
  so.snapshots = basis.snapshots;
  so.weighting = basis.weighting;
  so.bilinear = so.coupled ? basis.coupled_bilinear : Bilinear::A;
  so.independent_traces = basis.coupled_independent;
  so.randomized = basis.randomized;
  out.spectra = compute_spectra_cached(model.mesh, model.sys, model.fm, so, cache_dir);
  const Spectra& sp = *out.spectra;

  if (basis.mode == "lambda_select") {
    Selection sel;
    sel.kind = SelectionKind::LambdaThreshold;
    sel.threshold_rel = basis.lambda_threshold;
    sel.gap_ratio = basis.gap_ratio;
    for (const auto& ls : sp.local) out.lambda_counts.push_back(selected_count(ls, sel, sp.continua, sp.coupled));
    for (int offset : {-1, 0, 1}) {
      sel.offset = offset;
      add_row(offset < 0 ? "M_lambda-1" : offset == 0 ? "M_lambda" : "M_lambda+1",
              select_basis(model.mesh, sp, sel));
    }
    return out;
  }
  for (int m : basis.schedule) {
    Selection sel;
    sel.kind = SelectionKind::Fixed;
    sel.count = m;
    add_row(std::to_string(m), select_basis(model.mesh, sp, sel));
  }
  return out;
}

namespace {

std::string join_path(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

nlohmann::json config_json(const ScenarioConfig& c) {
  using nlohmann::json;
  json j;
  j["scenario"] = c.scenario;
  j["seed"] = c.seed;
  j["threads"] = c.threads;
  j["mesh"] = {{"size", {c.domain.lx, c.domain.ly}},
               {"coarse", {c.coarse_nx, c.coarse_ny}},
               {"refinement", c.refinement}};
  j["time"] = {{"t_max", c.time.t_max}, {"steps", c.time.steps}, {"tau", c.time.tau()},
               {"scheme", "implicit_euler"}};
  if (c.scenario == "shale") {
    const auto& p = c.shale.params;
    j["shale"] = {{"phi_i", p.phi_i},       {"phi_k", p.phi_k},     {"phi_f", p.phi_f},
                  {"kappa_i", p.kappa_i},   {"kappa_k", p.kappa_k}, {"kappa_nf", p.kappa_nf},
                  {"kappa_hf", p.kappa_hf}, {"d_i", p.d_i},         {"d_k", p.d_k},
                  {"d_s", p.d_s},           {"k_h", p.k_h},         {"sigma", p.sigma},
                  {"mu", p.mu},             {"z", p.z},             {"r_gas", p.r_gas},
                  {"t_k", p.t_k},           {"p_init", p.p_init},   {"p_well", p.p_well},
                  {"aperture", p.aperture}, {"c_init", p.c_init()}, {"c_well", p.c_well()},
                  {"tau_ki", p.tau_ki()},   {"t_max_days", c.shale.t_max_days}};
    json wells = json::array();
    for (const auto& w : c.shale.wells) wells.push_back({w.x, w.y});
    j["shale"]["wells"] = wells;
  }
  json cont = json::array();
  for (const auto& s : c.continua)
    cont.push_back({{"name", s.name},
                    {"permeability", s.permeability},
                    {"porosity", s.porosity},
                    {"initial", s.initial},
                    {"source", s.source}});
  j["continua"] = cont;
  json fr = json::array();
  for (const auto& f : c.fractures) {
    json pts = json::array();
    for (const auto& p : f.points) pts.push_back({p.x, p.y});
    fr.push_back({{"points", pts},
                  {"permeability", f.props.permeability},
                  {"porosity", f.props.porosity},
                  {"aperture", f.props.aperture},
                  {"tag", f.props.tag}});
  }
  j["fractures"] = {{"gamma", c.gamma}, {"polylines", fr}};
  json tr = json::array();
  for (const auto& t : c.transfers) {
    json e{{"between", {t.first, t.second}}};
    if (t.profile)
      e["profile"] = {{"q1", t.q1}, {"q2", t.q2}, {"y_lo", t.y_lo}, {"y_hi", t.y_hi}};
    else
      e["q"] = t.q;
    tr.push_back(e);
  }
  j["transfer"] = tr;
  json bc = json::array();
  for (const auto& d : c.dirichlet)
    bc.push_back({{"at", {d.at.x, d.at.y}}, {"value", d.value}, {"continuum", d.continuum}});
  j["dirichlet"] = bc;
  j["assembly"] = {{"lumped_mass", c.assembly.lumped_mass},
                   {"lumped_transfer", c.assembly.lumped_transfer}};
  j["basis"] = {{"mode", c.basis.mode},
                {"schedule", c.basis.schedule},
                {"snapshots", std::string(to_string(c.basis.snapshots))},
                {"weighting", std::string(to_string(c.basis.weighting))},
                {"coupled_form", std::string(to_string(c.basis.coupled_bilinear))},
                {"coupled_traces", c.basis.coupled_independent ? "independent" : "shared"},
                {"lambda_threshold", c.basis.lambda_threshold},
                {"gap_ratio", c.basis.gap_ratio},
                {"randomized",
                 {{"target", c.basis.randomized.target},
                  {"oversampling", c.basis.randomized.ring},
                  {"extra_snapshots", 4},
                  {"rank_tol", c.basis.randomized.rank_tol}}}};
  j["verify"] = {{"enabled", c.verify},
                 {"schedule", c.verify_options.schedule},
                 {"power_iterations", c.verify_options.power_iterations},
                 {"caccioppoli_samples", c.verify_options.caccioppoli_samples},
                 {"assume_limit", c.verify_options.assume_limit}};
  j["output"] = {{"dir", c.output.dir}, {"field_steps", c.output.field_steps}, {"cache", c.output.cache_dir}};
  auto rve = [](const RveSpec& r) {
    json pl = json::array();
    for (const auto& l : r.fractures) {
      json pts = json::array();
      for (const auto& p : l) pts.push_back({p.x, p.y});
      pl.push_back(pts);
    }
    return json{{"size", {r.domain.lx, r.domain.ly}},
                {"cells", r.cells},
                {"refinement", r.refinement},
                {"polylines", pl},
                {"t_max", r.time.t_max},
                {"steps", r.time.steps},
                {"rel_tol", r.options.rel_tol},
                {"window", r.options.window},
                {"near_one", r.options.near_one},
                {"lumped_mass", r.options.lumped_mass}};
  };
  j["rve"] = {{"enabled", c.rve.enabled},
              {"continuum", c.rve.continuum},
              {"lower", rve(c.rve.lower)},
              {"upper", rve(c.rve.upper)}};
  return j;
}

}  // namespace

std::string manifest_json(const ScenarioConfig& cfg, const RunSummary& summary) {
  using nlohmann::json;
  json j;
  j["config"] = config_json(cfg);
  j["decisions"] = {
      {"time_scheme", "implicit Euler, uniform steps"},
      {"snapshot_boundary", "discrete delta traces on the full neighborhood boundary"},
      {"spectral_weighting", std::string(to_string(cfg.basis.weighting))},
      {"gram_drop_tol", "1e-12 relative, after Jacobi scaling of S_off"},
      {"coupled_traces", cfg.basis.coupled_independent ? "independent per continuum" : "shared"},
      {"network_gap_eps", "1e-8 * max(lambda)"},
      {"lambda_threshold", "lambda < threshold * median(lambda); at least one mode"},
      {"simplified_complement", "zero on the neighborhood boundary"},
      {"coarse_initial", "mass projection of u0"},
      {"downscaling", "R^T"},
      {"norms", "kappa-weighted L2 and energy seminorm per continuum; hq is the a_Q norm"},
      {"transfer_form", cfg.assembly.lumped_transfer ? "lumped Q mass" : "consistent Q mass"},
      {"rve_flux", "backward-difference matrix mass uptake rate"},
      {"rve_asymptote", "relative change below rel_tol for window consecutive steps"},
      {"shale_linearization", "frozen coefficients, one linear solve per step"},
      {"shale_fracture_unknowns", "fracture edges carried in the inorganic block"},
      {"lemma_coefficients", "plain c in the projection residual, not dc/dt"},
      {"verify_initial_norm", "a-norm (a_Q coupled) of u(0); roundoff floors to zero"},
  };
  j["files"] = summary.files;
  j["warnings"] = summary.warnings;
  json rows = json::array();
  for (const auto& r : summary.rows) rows.push_back({{"mode", r.mode}, {"M", r.m}, {"dof", r.dof}});
  j["rows"] = rows;
  if (summary.shale_l2) j["shale_l2"] = *summary.shale_l2;
  return j.dump(2) + "\n";
}

RunSummary run(const ScenarioConfig& cfg) {
  cfg.validate();
  set_thread_count(cfg.threads);
  const std::string dir = cfg.output.dir.empty() ? "." : cfg.output.dir;
  std::filesystem::create_directories(dir);
  RunSummary summary;
  auto emit = [&](const std::string& name, const std::string& body) {
    write_text(join_path(dir, name), body);
    summary.files.push_back(name);
  };
  std::vector<int> steps = cfg.output.field_steps;
  if (steps.empty()) steps = {cfg.time.steps};

  if (cfg.scenario == "shale") {
    const MeshHierarchy mesh = build_hierarchy(cfg.domain, cfg.coarse_nx, cfg.coarse_ny, cfg.refinement);
    const FractureMesh fm = build_fractures(cfg, mesh);
    const ShaleResult r = shale_run(mesh, fm, cfg.shale.params, cfg.shale.wells, cfg.time, true);
    ErrorRow row;
    row.mode = cfg.basis.mode;
    row.m = "-";
    row.dof = r.coarse_dim;
    row.norms.l2 = r.l2_continuum;
    summary.rows = {row};
    summary.shale_l2 = r.l2;
    emit("errors.csv", errors_csv(summary.rows));
    emit("spectra.csv", spectra_csv(Spectra{}));
    for (int n : steps) {
      emit("field_fine_n" + std::to_string(n) + ".csv", field_csv(mesh, r.fine.states[n], 2));
      emit("field_ms_n" + std::to_string(n) + ".csv", field_csv(mesh, r.coarse.states[n], 2));
    }
    emit("manifest.json", manifest_json(cfg, summary));
    return summary;
  }

  ScenarioConfig resolved = cfg;
  Model model = build_model(cfg);
  if (!model.rve.empty()) {
    resolved.transfers[0].q1 = model.rve[0].q;
    resolved.transfers[0].q2 = model.rve[1].q;
  }
  BasisConfig basis = cfg.basis;
  basis.randomized.seed = cfg.seed;
  BasisRun br = run_basis(model, basis, cfg.output.cache_dir);
  summary.rows = br.rows;
  summary.warnings = br.warnings;
  emit("errors.csv", errors_csv(br.rows));
  emit("spectra.csv", spectra_csv(br.spectra ? *br.spectra : Spectra{}));
  const int n_cont = model.sys.size();
  for (int n : steps) {
    emit("field_fine_n" + std::to_string(n) + ".csv", field_csv(model.mesh, model.reference.states[n], n_cont));
    if (!br.solutions.empty())
      emit("field_ms_n" + std::to_string(n) + ".csv",
           field_csv(model.mesh, br.solutions.back().states[n], n_cont));
  }
  if (!model.rve.empty()) {
    emit("rve_lower.csv", rve_trace_csv(model.rve[0]));
    emit("rve_upper.csv", rve_trace_csv(model.rve[1]));
    for (const auto& r : model.rve)
      if (r.status != RveStatus::Converged)
        summary.warnings.push_back("rve: " + std::string(to_string(r.status)));
  }
  if (cfg.verify) {
    VerifyOptions vo = cfg.verify_options;
    vo.seed = cfg.seed;
    const VerifyMode mode = cfg.basis.mode == "gmsfem_coupled" ? VerifyMode::Coupled : VerifyMode::Uncoupled;
    const BoundReport rep =
        check_bounds(model.mesh, model.sys, model.fm, model.ops, model.time, model.reference, mode, vo);
    emit("bounds.csv", rep.bounds_csv());
    emit("lemma.csv", rep.lemma_csv());
    if (!rep.assumption_ok) summary.warnings.push_back("verify: assumption constant not finite");
  }
  summary.files.push_back("manifest.json");
  write_text(join_path(dir, "manifest.json"), manifest_json(resolved, summary));
  return summary;
}

}  // namespace msfrac
