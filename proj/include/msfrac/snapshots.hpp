// Copyright The msfrac Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string_view>

#include "msfrac/local_problem.hpp"

namespace msfrac {

enum class SnapshotKind { Harmonic, Randomized, Uncoupled, Coupled };

std::string_view to_string(SnapshotKind kind);

/// Local snapshot functions on a neighborhood box, one per column. Rows follow
/// the block layout s * box.size() + local with `blocks` blocks.
struct SnapshotSpace {
  int omega = 0;
  SnapshotKind kind = SnapshotKind::Harmonic;
  int continuum = 0;  // kCoupled for N-block snapshots
  NodeBox box;
  int blocks = 1;
  Mat vectors;

  int count() const { return static_cast<int>(vectors.cols()); }
};

/// One a-harmonic snapshot per boundary fine node of the neighborhood, for the
/// permeability of continuum `continuum`.
SnapshotSpace uncoupled_snapshots(const MeshHierarchy& mesh, const ContinuumSystem& sys,
                                  const FractureMesh& fm, int omega, int continuum);

/// Single-continuum shorthand.
SnapshotSpace harmonic_snapshots(const MeshHierarchy& mesh, const CellField& permeability,
                                 const FractureMesh& fm, int omega);

/// N-block snapshots of a - q with the same boundary delta on every continuum.
SnapshotSpace coupled_snapshots(const MeshHierarchy& mesh, const ContinuumSystem& sys,
                                const FractureMesh& fm, int omega);

struct RandomizedOptions {
  int target = 1;      // n; n + 4 snapshots are produced
  int ring = 1;        // oversampling in coarse cells
  std::uint64_t seed = 0;
  double rank_tol = 1e-10;
};

/// Local solves on the oversampled neighborhood with i.i.d. uniform(-1, 1)
/// boundary values, restricted to the neighborhood. `continuum` selects a
/// single-continuum operator or kCoupled.
SnapshotSpace randomized_snapshots(const MeshHierarchy& mesh, const ContinuumSystem& sys,
                                   const FractureMesh& fm, int omega, int continuum,
                                   const RandomizedOptions& opts);

/// N-block a - q extensions of independent deltas: one snapshot per boundary
/// node and continuum, so every boundary trace is reproduced.
SnapshotSpace coupled_trace_snapshots(const MeshHierarchy& mesh, const ContinuumSystem& sys,
                                      const FractureMesh& fm, int omega);

/// Numerical rank via column-pivoted QR, relative to the largest pivot.
int numerical_rank(const Mat& a, double rel_tol);

}  // namespace msfrac
