// Copyright The msfrac Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>

#include "msfrac/fracture_mesh.hpp"

namespace msfrac {

enum class FormKind {
  Stiffness,     // coef * grad u . grad v  (tangential along fractures)
  Mass,          // coef * u v
  LumpedMass,    // row-summed Mass
  PouMass,       // coef * |grad chi_j|^2 u v
  PouStiffness,  // coef * chi_j^2 grad u . grad v
};

struct FormSpec {
  FormKind kind = FormKind::Stiffness;
  /// Coarse vertex j of chi_j for the Pou* kinds.
  int pou_node = -1;
  /// fracture_coef holds one value per fracture edge instead of per fracture.
  bool per_edge = false;
};

/// Assembles a scalar bilinear form over the fine cells and fracture edges
/// inside `region`. The result is square of size region.size(), numbered by
/// NodeBox::local. `cell_coef` has one value per fine cell of the whole grid
/// (empty: no area term); `fracture_coef` has one value per fracture (empty:
/// no fracture term).
SpMat assemble_form(const MeshHierarchy& mesh, const FractureMesh& fm, const NodeBox& region,
                    FormSpec spec, std::span<const double> cell_coef,
                    std::span<const double> fracture_coef);

/// Load vector of a per-cell constant source over the region.
Vec assemble_load(const MeshHierarchy& mesh, const NodeBox& region, std::span<const double> cell_source);

/// Block-diagonal matrix from equally sized square blocks.
SpMat block_diagonal(const std::vector<SpMat>& blocks);

/// Values of chi_j at the nodes of a box, in box-local order.
Vec pou_on_box(const MeshHierarchy& mesh, int coarse_node, const NodeBox& box);

}  // namespace msfrac
