// Copyright The msfrac Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "msfrac/grid.hpp"

namespace msfrac {

/// Raw properties of one fracture as supplied by the user.
struct FractureProps {
  double permeability = 1.0;  // m^2
  double porosity = 1.0;      // -
  double aperture = 1.0;      // m
  int tag = 0;                // free-form label (e.g. natural vs hydraulic)
};

using Polyline = std::vector<Point>;

struct FractureEdge {
  int a = 0, b = 0;  // fine node ids, a < b
  int fracture = 0;
  double length = 0.0;
};

/// Lower-dimensional fractures as chains of fine-grid edges.
struct FractureMesh {
  /// Per fracture, with permeability and porosity already multiplied by the aperture.
  std::vector<FractureProps> fractures;
  std::vector<FractureEdge> edges;
  /// Connected component of each edge.
  std::vector<int> edge_network;
  int network_count = 0;
  std::vector<char> node_on_fracture;

  bool empty() const { return edges.empty(); }
  std::vector<int> fracture_nodes() const;
};

/// Snaps polylines onto the fine grid. Segments must run along grid lines.
FractureMesh embed_fractures(const MeshHierarchy& mesh, const std::vector<Polyline>& polylines,
                             const std::vector<FractureProps>& props, double snap_tol = 1e-9);

/// A connected component of the fracture edges restricted to a node box.
struct LocalNetwork {
  int global_network = 0;
  std::vector<int> edges;
  std::vector<int> nodes;
  /// Component nodes lying on the box boundary.
  std::vector<int> boundary_nodes;
};

std::vector<LocalNetwork> local_networks(const MeshHierarchy& mesh, const FractureMesh& fm,
                                         const NodeBox& box);

/// Boundary intersection points of each local network of the neighborhood.
std::vector<std::vector<int>> network_boundary_points(const MeshHierarchy& mesh,
                                                      const Neighborhood& nb,
                                                      const FractureMesh& fm);

}  // namespace msfrac
