// Copyright The msfrac Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>
#include <vector>

#include "msfrac/assembly.hpp"

namespace msfrac {

/// Selects which local operator to build: a single continuum (>= 0) or the
/// full coupled block system.
inline constexpr int kCoupled = -1;

/// Operators of a system restricted to a node box, box-local numbering with
/// block layout s * box.size() + local.
struct LocalSystem {
  NodeBox box;
  int blocks = 1;
  SpMat stiffness;      // a, block diagonal
  SpMat transfer;       // q; empty pattern for a single continuum
  SpMat weighted_mass;  // kappa-weighted L2 product

  int size() const { return blocks * box.size(); }
  /// a - q.
  SpMat energy() const { return stiffness - transfer; }
};

LocalSystem local_system(const MeshHierarchy& mesh, const ContinuumSystem& sys,
                         const FractureMesh& fm, const NodeBox& box, int continuum);

/// Local indices of the nodes on the box boundary, increasing.
std::vector<int> box_boundary(const NodeBox& box);
std::vector<int> box_interior(const NodeBox& box);

/// Discrete extension operator: solves K_II x_I = -K_IB g for prescribed
/// boundary values g in every block. The factorization is computed once.
class HarmonicExtension {
 public:
  HarmonicExtension(const SpMat& k, const NodeBox& box, int blocks);
  ~HarmonicExtension();
  HarmonicExtension(HarmonicExtension&&) noexcept;
  HarmonicExtension& operator=(HarmonicExtension&&) noexcept;

  /// Boundary / interior dofs in block layout.
  const std::vector<int>& boundary() const { return boundary_; }
  const std::vector<int>& interior() const { return interior_; }
  int size() const { return size_; }

  /// Columns of `values` hold boundary data ordered as boundary(); returns
  /// full local vectors.
  Mat extend(const Mat& values) const;
  /// Solves K_II x = rhs for interior right-hand sides.
  Mat solve_interior(const Mat& rhs) const;

 private:
  struct Factor;
  int size_ = 0;
  std::vector<int> boundary_;
  std::vector<int> interior_;
  SpMat kib_;
  std::unique_ptr<Factor> factor_;
};

/// Sub-matrix with the given rows and columns.
SpMat submatrix(const SpMat& a, const std::vector<int>& rows, const std::vector<int>& cols);

}  // namespace msfrac
