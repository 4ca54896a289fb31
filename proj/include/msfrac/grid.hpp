// Copyright The msfrac Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <optional>
#include <vector>

#include "msfrac/common.hpp"

namespace msfrac {

/// Rectangle [0, lx] x [0, ly] in meters.
struct Domain {
  double lx = 1.0;
  double ly = 1.0;
};

/// Inclusive range of fine-grid node indices [i0, i1] x [j0, j1].
struct NodeBox {
  int i0 = 0, i1 = 0, j0 = 0, j1 = 0;

  int width() const { return i1 - i0 + 1; }
  int height() const { return j1 - j0 + 1; }
  int size() const { return width() * height(); }
  bool contains(int i, int j) const { return i >= i0 && i <= i1 && j >= j0 && j <= j1; }
  bool on_boundary(int i, int j) const {
    return contains(i, j) && (i == i0 || i == i1 || j == j0 || j == j1);
  }
  /// Lexicographic local index of node (i, j); the node must be inside.
  int local(int i, int j) const { return (j - j0) * width() + (i - i0); }
  bool contains_box(const NodeBox& o) const {
    return o.i0 >= i0 && o.i1 <= i1 && o.j0 >= j0 && o.j1 <= j1;
  }
};

struct CoarseGrid {
  int nx = 0, ny = 0;
  double hx = 0.0, hy = 0.0;
  std::vector<Point> vertices;
  /// Counter-clockwise vertex quadruples starting at the lower-left corner.
  std::vector<std::array<int, 4>> cells;

  int node_count() const { return (nx + 1) * (ny + 1); }
  int cell_count() const { return nx * ny; }
  int node(int i, int j) const { return j * (nx + 1) + i; }
};

struct FineGrid {
  int nx = 0, ny = 0;
  int refinement = 1;
  double hx = 0.0, hy = 0.0;
  std::vector<Point> vertices;
  std::vector<std::array<int, 4>> cells;
  /// Fine cell -> coarse cell.
  std::vector<int> parent;

  int node_count() const { return (nx + 1) * (ny + 1); }
  int cell_count() const { return nx * ny; }
  int node(int i, int j) const { return j * (nx + 1) + i; }
  int cell(int i, int j) const { return j * nx + i; }
  int node_i(int n) const { return n % (nx + 1); }
  int node_j(int n) const { return n / (nx + 1); }
  NodeBox all_nodes() const { return NodeBox{0, nx, 0, ny}; }
};

/// Coarse neighborhood of a coarse vertex: union of the coarse cells touching it.
struct Neighborhood {
  int node = 0;
  int ci = 0, cj = 0;
  std::vector<int> cells;
  NodeBox box;
  /// Fine nodes in lexicographic order of the box; interior and boundary
  /// partition them.
  std::vector<int> nodes;
  std::vector<int> interior;
  std::vector<int> boundary;
};

class MeshHierarchy {
 public:
  Domain domain;
  CoarseGrid coarse;
  FineGrid fine;
  std::vector<Neighborhood> neighborhoods;

  /// Bilinear coarse hat of vertex `coarse_node` evaluated at (x, y).
  double pou(int coarse_node, double x, double y) const;
  /// Gradient of the hat at a point strictly inside a coarse cell.
  std::array<double, 2> pou_gradient(int coarse_node, double x, double y) const;

  /// Fine node within tol * min(hx, hy) of p, if any.
  std::optional<int> find_node(Point p, double rel_tol = 1e-9) const;

  /// Node box of the neighborhood grown by `ring` coarse cells, clipped to the domain.
  NodeBox oversampled_box(const Neighborhood& nb, int ring) const;
  NodeBox coarse_cell_box(int coarse_cell) const;
  /// Fine cell indices whose four nodes all lie in the box.
  std::vector<int> cells_in(const NodeBox& box) const;
  std::vector<int> nodes_in(const NodeBox& box) const;

  /// Number of neighborhoods containing each coarse cell.
  std::vector<int> cell_overlap() const;
};

MeshHierarchy build_hierarchy(const Domain& domain, int nx, int ny, int refinement);

}  // namespace msfrac
