// Copyright The msfrac Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "msfrac/coarse_solver.hpp"
#include "msfrac/spectral.hpp"

namespace msfrac {

enum class VerifyMode { Uncoupled, Coupled };

std::string_view to_string(VerifyMode m);

/// Snapshot spaces that reproduce every boundary trace, with their offline
/// eigenpairs for s^(j) (|grad chi_j|^2 weighting). Un-coupled: one scalar space
/// per neighborhood and continuum with the a form. Coupled: one N-block space
/// per neighborhood with independent deltas per continuum and the a_Q form.
struct VerifySpace {
  VerifyMode mode = VerifyMode::Uncoupled;
  int continua = 1;
  std::vector<LocalSpectrum> local;
  std::vector<Mat> gram;  // S_off per local space
};

VerifySpace verify_space(const MeshHierarchy& mesh, const ContinuumSystem& sys,
                         const FractureMesh& fm, VerifyMode mode);

/// Snapshot coordinates of u in each local space (its boundary trace).
std::vector<Vec> snapshot_coordinates(const MeshHierarchy& mesh, const VerifySpace& vs, const Vec& u);

/// u_snap = sum_j chi_j u_snap^(j), where u_snap^(j) extends the trace of u on
/// the boundary of omega_j.
Vec snapshot_projection(const MeshHierarchy& mesh, const VerifySpace& vs, const Vec& u);

/// w: the eigen-coordinates of each u_snap^(j) truncated to the first
/// keep[k] modes of local space k, stitched with the partition of unity.
Vec eigen_projection(const MeshHierarchy& mesh, const VerifySpace& vs, const Vec& u,
                     std::span<const int> keep);

/// Offline space spanned by the first keep[k] modes of every local space.
OfflineSpace verify_offline_space(const MeshHierarchy& mesh, const VerifySpace& vs,
                                  std::span<const int> keep);

/// Maximum number of neighborhoods sharing a coarse cell.
int overlap_constant(const MeshHierarchy& mesh);

/// max of c chi_j^2 / (kappa |grad chi_j|^2) over quadrature points of every
/// neighborhood, continuum and fracture edge (tangential gradient there).
double weight_constant(const MeshHierarchy& mesh, const ContinuumSystem& sys, const FractureMesh& fm);

/// Largest D with -q(v, v) <= D a(v, v) on the constrained space, by power
/// iteration on A^{-1}(-Bq) from a seeded random start.
double assumption_constant(const FineOperators& ops, std::uint64_t seed, int iterations = 200);

/// max over interior neighborhoods and random local a-harmonic w of
/// int kappa chi^2 |grad w|^2 / int kappa |grad chi|^2 w^2.
double caccioppoli_ratio(const MeshHierarchy& mesh, const ContinuumSystem& sys, const FractureMesh& fm,
                         int samples, std::uint64_t seed);

struct BoundRow {
  VerifyMode mode = VerifyMode::Uncoupled;
  int L = 0;
  double lambda = 0.0;  // smallest discarded eigenvalue over all local spaces
  double d = 0.0;
  double e = 0.0;
  double lhs = 0.0, rhs = 0.0, c_emp = 0.0;
  /// Initial-data term: ||(w - u_snap)(0)||_c^2 against (E / Lambda) ||u(0)||^2.
  double lhs_initial = 0.0, rhs_initial = 0.0, c_initial = 0.0;
  /// Galerkin error functional against the Ritz-projection functional.
  double cea_lhs = 0.0, cea_rhs = 0.0, cea_ratio = 0.0;
  int dim = 0;
};

struct BoundReport {
  std::vector<BoundRow> rows;
  double assume_constant = 0.0;
  bool assumption_ok = true;
  double caccioppoli = 0.0;

  /// mode,L,Lambda,D,E,LHS,RHS,C_emp
  std::string bounds_csv() const;
  /// Per-L lemma checks and the scalar constants.
  std::string lemma_csv() const;
};

struct VerifyOptions {
  std::vector<int> schedule{2, 4, 6, 8};
  std::uint64_t seed = 0;
  int power_iterations = 200;
  int caccioppoli_samples = 20;
  double assume_limit = 1e6;
  /// L <= 0 in the schedule means every mode is kept; such rows carry no
  /// Galerkin (cea_*) values.
};

/// Evaluates the projection bounds on a reference trajectory of `ops`
/// (Dirichlet conditions applied).
BoundReport check_bounds(const MeshHierarchy& mesh, const ContinuumSystem& sys, const FractureMesh& fm,
                         const FineOperators& ops, const TimeGrid& tg, const SimulationResult& reference,
                         VerifyMode mode, const VerifyOptions& opts = {});

}  // namespace msfrac
