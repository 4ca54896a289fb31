// Copyright The msfrac Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "msfrac/io.hpp"
#include "msfrac/rve.hpp"
#include "msfrac/shale_gas.hpp"
#include "msfrac/verify.hpp"

namespace msfrac {

struct ContinuumSpec {
  std::string name;
  double permeability = 1.0;
  double porosity = 1.0;
  double initial = 0.0;
  double source = 0.0;
};

struct FractureSpec {
  Polyline points;
  FractureProps props;
};

struct TransferSpec {
  int first = 0, second = 1;
  double q = 0.0;
  /// Q1 below y_lo, Q2 above y_hi, linear in between.
  bool profile = false;
  double q1 = 0.0, q2 = 0.0, y_lo = 0.0, y_hi = 0.0;
};

struct RveSpec {
  Domain domain{1.0, 1.0};
  int cells = 4;
  int refinement = 4;
  std::vector<Polyline> fractures;
  TimeGrid time{1.0, 200};
  RveOptions options;
};

struct RveCalibration {
  bool enabled = false;
  int continuum = 1;  // continuum whose c and kappa fill the RVE matrix
  RveSpec lower, upper;
};

struct BasisConfig {
  std::string mode = "gmsfem_uncoupled";
  std::vector<int> schedule{1, 2, 4, 8};
  SnapshotKind snapshots = SnapshotKind::Harmonic;
  RandomizedOptions randomized;
  Weighting weighting = Weighting::KappaMass;
  Bilinear coupled_bilinear = Bilinear::A;
  bool coupled_independent = true;
  double lambda_threshold = 1e-3;
  double gap_ratio = 1e3;
};

struct OutputConfig {
  std::string dir;
  std::vector<int> field_steps;  // time levels dumped; empty -> final level
  std::string cache_dir;
};

struct ShaleConfig {
  ShaleParams params;
  std::vector<Point> wells;
  double t_max_days = 500.0;
};

struct ScenarioConfig {
  std::string scenario = "single";
  std::uint64_t seed = 0;
  int threads = 0;
  Domain domain{60.0, 60.0};
  int coarse_nx = 10, coarse_ny = 10;
  int refinement = 10;
  TimeGrid time{300.0, 50};
  std::vector<ContinuumSpec> continua;
  std::vector<double> gamma;
  std::vector<FractureSpec> fractures;
  std::vector<TransferSpec> transfers;
  std::vector<DirichletPoint> dirichlet;
  AssemblyOptions assembly;
  BasisConfig basis;
  bool verify = false;
  VerifyOptions verify_options;
  OutputConfig output;
  RveCalibration rve;
  ShaleConfig shale;

  void validate() const;
};

/// Built-in desk configurations: single, dual, dual_rve, shale.
ScenarioConfig preset(const std::string& name);
std::vector<std::string> preset_names();

/// Parses a YAML document on top of the preset named by its `scenario` key.
/// Unknown keys and malformed values raise ConfigInvalid with the field path.
ScenarioConfig parse_config(const std::string& yaml_text);
ScenarioConfig load_config(const std::string& path);

struct Overrides {
  std::optional<std::string> scenario;
  std::optional<std::string> basis;
  std::optional<std::vector<int>> schedule;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::optional<std::string> out;
  bool verify = false;
};

/// Applies command-line overrides. A scenario override swaps in that preset
/// only when no config file was given.
ScenarioConfig apply_overrides(ScenarioConfig cfg, const Overrides& o, bool have_config);

/// Fine model of a linear scenario: mesh, fractures, coefficients, operators
/// with constraints applied, initial state and reference trajectory.
struct Model {
  MeshHierarchy mesh;
  FractureMesh fm;
  ContinuumSystem sys;
  FineOperators ops;
  TimeGrid time;
  Vec u0;
  SimulationResult reference;
  /// Lower and upper RVE calibrations when requested.
  std::vector<RveResult> rve;
};

Model build_model(const ScenarioConfig& cfg, bool solve_reference = true);

ContinuumSystem build_system(const ScenarioConfig& cfg, const MeshHierarchy& mesh);
FractureMesh build_fractures(const ScenarioConfig& cfg, const MeshHierarchy& mesh);

/// Multiscale runs of one basis mode across the schedule.
struct BasisRun {
  std::vector<ErrorRow> rows;
  std::optional<Spectra> spectra;
  std::vector<SimulationResult> solutions;  // one per row
  std::vector<int> lambda_counts;           // M_lambda per local spectrum (lambda_select)
  std::vector<std::string> warnings;
};

BasisRun run_basis(const Model& model, const BasisConfig& basis, const std::string& cache_dir = "");

struct RunSummary {
  std::vector<ErrorRow> rows;
  std::vector<std::string> files;
  std::vector<std::string> warnings;
  std::optional<double> shale_l2;
};

/// Executes a configuration and writes its artifacts into cfg.output.dir.
RunSummary run(const ScenarioConfig& cfg);

std::string manifest_json(const ScenarioConfig& cfg, const RunSummary& summary);

}  // namespace msfrac
