// Copyright The msfrac Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <vector>

#include "msfrac/forms.hpp"

namespace msfrac {

struct ContinuumCoefficients {
  CellField porosity;      // c_s, per fine cell
  CellField permeability;  // kappa_s, per fine cell
};

/// Exchange between two continua; q(u, v) = -int Q (u_a - u_b)(v_a - v_b).
struct Transfer {
  int first = 0;
  int second = 1;
  CellField coefficient;  // Q >= 0 per fine cell
};

/// N overlapping continua sharing one set of resolved fractures. Fracture
/// coefficients of continuum s are gamma_s times the effective fracture values.
struct ContinuumSystem {
  std::vector<ContinuumCoefficients> continua;
  std::vector<double> gamma;
  std::vector<Transfer> transfers;
  /// Per-continuum source per fine cell; empty means no source.
  std::vector<CellField> source;

  int size() const { return static_cast<int>(continua.size()); }

  static ContinuumSystem single(CellField permeability, CellField porosity);

  std::vector<double> fracture_permeability(const FractureMesh& fm, int s) const;
  std::vector<double> fracture_porosity(const FractureMesh& fm, int s) const;
  /// Checks positivity, sizes and the normalization of gamma.
  void validate(const MeshHierarchy& mesh) const;
};

struct AssemblyOptions {
  bool lumped_mass = false;
  bool lumped_transfer = false;
};

struct DirichletValue {
  int dof = 0;
  double value = 0.0;
};

/// Fine-grid operators with dof index s * nodes + n.
struct FineOperators {
  int continua = 1;
  int nodes = 0;
  SpMat mass;       // c(u, v)
  SpMat stiffness;  // a(u, v)
  SpMat transfer;   // q(u, v), negative semidefinite
  Vec load;
  std::vector<DirichletValue> dirichlet;

  /// kappa-weighted L2 product and unconstrained c, a, q; used by the error norms.
  SpMat weighted_mass;
  SpMat storage;
  SpMat energy;
  SpMat energy_transfer;

  int dofs() const { return continua * nodes; }
  /// M / tau + A - Bq.
  SpMat step_matrix(double tau) const;
};

FineOperators assemble_single(const MeshHierarchy& mesh, const CellField& permeability,
                              const CellField& porosity, const FractureMesh& fm,
                              const CellField& source = {}, const AssemblyOptions& opts = {});

FineOperators assemble_multi(const MeshHierarchy& mesh, const ContinuumSystem& sys,
                             const FractureMesh& fm, const AssemblyOptions& opts = {});

/// Exchange operator of a system restricted to a region, box-local numbering,
/// block layout s * region.size() + local.
SpMat assemble_transfer(const MeshHierarchy& mesh, const ContinuumSystem& sys,
                        const NodeBox& region, bool lumped);

struct DirichletPoint {
  Point at;
  int continuum = -1;  // -1: every continuum
  double value = 0.0;
};

/// Symmetric elimination of point constraints. Rows and columns of A become
/// identity, those of Bq vanish, off-diagonal mass couplings vanish while the
/// mass diagonal is kept, and the load is corrected by the lifted values.
FineOperators apply_bc(FineOperators ops, const MeshHierarchy& mesh,
                       std::span<const DirichletPoint> points);

/// Constant per-cell field.
CellField uniform_field(const MeshHierarchy& mesh, double value);

}  // namespace msfrac
