// Copyright The msfrac Authors
// SPDX-License-Identifier: Apache-2.0

#include "msfrac/fracture_mesh.hpp"

#include <algorithm>
#include <numeric>
#include <string>
#include <unordered_map>

namespace msfrac {

namespace {

class DisjointSets {
 public:
  explicit DisjointSets(int n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  int find(int x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<int> parent_;
};

std::string describe(Point p) {
  return "(" + std::to_string(p.x) + ", " + std::to_string(p.y) + ")";
}

}  // namespace

std::vector<int> FractureMesh::fracture_nodes() const {
  std::vector<int> out;
  for (int n = 0; n < static_cast<int>(node_on_fracture.size()); ++n)
    if (node_on_fracture[n]) out.push_back(n);
  return out;
}

FractureMesh embed_fractures(const MeshHierarchy& mesh, const std::vector<Polyline>& polylines,
                             const std::vector<FractureProps>& props, double snap_tol) {
  require(polylines.size() == props.size(), ErrorKind::InvalidArgument,
          "one property set per polyline is required");
  const auto& fg = mesh.fine;

  FractureMesh fm;
  fm.node_on_fracture.assign(fg.node_count(), 0);
  std::unordered_map<long long, int> edge_index;

  for (std::size_t f = 0; f < polylines.size(); ++f) {
    const auto& p = props[f];
    require(p.aperture > 0.0, ErrorKind::InvalidArgument, "fracture aperture must be positive");
    require(p.permeability >= 0.0 && p.porosity >= 0.0, ErrorKind::InvalidArgument,
            "fracture permeability and porosity must be non-negative");
    FractureProps eff = p;
    eff.permeability = p.permeability * p.aperture;
    eff.porosity = p.porosity * p.aperture;
    fm.fractures.push_back(eff);

    const auto& line = polylines[f];
    require(line.size() >= 2, ErrorKind::InvalidArgument, "a polyline needs at least two points");
    std::vector<int> snapped;
    for (const auto& pt : line) {
      auto n = mesh.find_node(pt, snap_tol);
      if (!n) fail(ErrorKind::PolylineOffGrid, "vertex " + describe(pt) + " of polyline " +
                                                   std::to_string(f) + " is not a fine-grid node");
      snapped.push_back(*n);
    }
    for (std::size_t k = 0; k + 1 < snapped.size(); ++k) {
      const int ia = fg.node_i(snapped[k]), ja = fg.node_j(snapped[k]);
      const int ib = fg.node_i(snapped[k + 1]), jb = fg.node_j(snapped[k + 1]);
      if (ia != ib && ja != jb)
        fail(ErrorKind::NonAdjacentSegment, "segment " + describe(line[k]) + " -> " +
                                                describe(line[k + 1]) + " is not along a grid line");
      if (ia == ib && ja == jb) continue;
      const int di = (ib > ia) - (ib < ia);
      const int dj = (jb > ja) - (jb < ja);
      for (int i = ia, j = ja; i != ib || j != jb; i += di, j += dj) {
        const int a = fg.node(i, j);
        const int b = fg.node(i + di, j + dj);
        FractureEdge e{std::min(a, b), std::max(a, b), static_cast<int>(f),
                       di != 0 ? fg.hx : fg.hy};
        const long long key = static_cast<long long>(e.a) * fg.node_count() + e.b;
        auto [it, inserted] = edge_index.emplace(key, static_cast<int>(fm.edges.size()));
        if (!inserted) {
          if (fm.edges[it->second].fracture == e.fracture) continue;
          fail(ErrorKind::OverlappingFracture,
               "fractures " + std::to_string(fm.edges[it->second].fracture) + " and " +
                   std::to_string(f) + " share a fine edge");
        }
        fm.edges.push_back(e);
        fm.node_on_fracture[e.a] = 1;
        fm.node_on_fracture[e.b] = 1;
      }
    }
  }

  DisjointSets sets(fg.node_count());
  for (const auto& e : fm.edges) sets.unite(e.a, e.b);
  std::unordered_map<int, int> root_to_network;
  fm.edge_network.reserve(fm.edges.size());
  for (const auto& e : fm.edges) {
    const int root = sets.find(e.a);
    auto [it, inserted] = root_to_network.emplace(root, fm.network_count);
    if (inserted) ++fm.network_count;
    fm.edge_network.push_back(it->second);
  }
  return fm;
}

std::vector<LocalNetwork> local_networks(const MeshHierarchy& mesh, const FractureMesh& fm,
                                         const NodeBox& box) {
  const auto& fg = mesh.fine;
  std::vector<int> local_edges;
  for (int e = 0; e < static_cast<int>(fm.edges.size()); ++e) {
    const auto& edge = fm.edges[e];
    if (box.contains(fg.node_i(edge.a), fg.node_j(edge.a)) &&
        box.contains(fg.node_i(edge.b), fg.node_j(edge.b)))
      local_edges.push_back(e);
  }
  if (local_edges.empty()) return {};

  DisjointSets sets(box.size());
  auto loc = [&](int n) { return box.local(fg.node_i(n), fg.node_j(n)); };
  for (int e : local_edges) sets.unite(loc(fm.edges[e].a), loc(fm.edges[e].b));

  std::vector<LocalNetwork> out;
  std::unordered_map<int, int> root_to_out;
  for (int e : local_edges) {
    const int root = sets.find(loc(fm.edges[e].a));
    auto [it, inserted] = root_to_out.emplace(root, static_cast<int>(out.size()));
    if (inserted) {
      out.emplace_back();
      out.back().global_network = fm.edge_network[e];
    }
    out[it->second].edges.push_back(e);
  }
  for (auto& net : out) {
    for (int e : net.edges) {
      net.nodes.push_back(fm.edges[e].a);
      net.nodes.push_back(fm.edges[e].b);
    }
    std::sort(net.nodes.begin(), net.nodes.end());
    net.nodes.erase(std::unique(net.nodes.begin(), net.nodes.end()), net.nodes.end());
    for (int n : net.nodes)
      if (box.on_boundary(fg.node_i(n), fg.node_j(n))) net.boundary_nodes.push_back(n);
  }
  return out;
}

std::vector<std::vector<int>> network_boundary_points(const MeshHierarchy& mesh,
                                                      const Neighborhood& nb,
                                                      const FractureMesh& fm) {
  std::vector<std::vector<int>> out;
  for (auto& net : local_networks(mesh, fm, nb.box)) out.push_back(std::move(net.boundary_nodes));
  return out;
}

}  // namespace msfrac
