// Copyright The msfrac Authors
// SPDX-License-Identifier: Apache-2.0

#include "msfrac/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace msfrac {

MeshHierarchy build_hierarchy(const Domain& domain, int nx, int ny, int refinement) {
  require(domain.lx > 0.0 && domain.ly > 0.0, ErrorKind::InvalidArgument,
          "domain extents must be positive");
  require(nx >= 1 && ny >= 1 && refinement >= 1, ErrorKind::InvalidArgument,
          "coarse counts and refinement must be >= 1");

  MeshHierarchy mesh;
  mesh.domain = domain;

  auto& cg = mesh.coarse;
  cg.nx = nx;
  cg.ny = ny;
  cg.hx = domain.lx / nx;
  cg.hy = domain.ly / ny;
  cg.vertices.reserve(cg.node_count());
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i) cg.vertices.push_back({i * cg.hx, j * cg.hy});
  cg.cells.reserve(cg.cell_count());
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i)
      cg.cells.push_back({cg.node(i, j), cg.node(i + 1, j), cg.node(i + 1, j + 1), cg.node(i, j + 1)});

  auto& fg = mesh.fine;
  fg.refinement = refinement;
  fg.nx = nx * refinement;
  fg.ny = ny * refinement;
  fg.hx = domain.lx / fg.nx;
  fg.hy = domain.ly / fg.ny;
  fg.vertices.reserve(fg.node_count());
  for (int j = 0; j <= fg.ny; ++j)
    for (int i = 0; i <= fg.nx; ++i) fg.vertices.push_back({i * fg.hx, j * fg.hy});
  fg.cells.reserve(fg.cell_count());
  fg.parent.reserve(fg.cell_count());
  for (int j = 0; j < fg.ny; ++j)
    for (int i = 0; i < fg.nx; ++i) {
      fg.cells.push_back({fg.node(i, j), fg.node(i + 1, j), fg.node(i + 1, j + 1), fg.node(i, j + 1)});
      fg.parent.push_back((j / refinement) * nx + (i / refinement));
    }

  mesh.neighborhoods.reserve(cg.node_count());
  for (int cj = 0; cj <= ny; ++cj)
    for (int ci = 0; ci <= nx; ++ci) {
      Neighborhood nb;
      nb.node = cg.node(ci, cj);
      nb.ci = ci;
      nb.cj = cj;
      for (int kj = cj - 1; kj <= cj; ++kj)
        for (int ki = ci - 1; ki <= ci; ++ki)
          if (ki >= 0 && ki < nx && kj >= 0 && kj < ny) nb.cells.push_back(kj * nx + ki);
      nb.box.i0 = std::max(ci - 1, 0) * refinement;
      nb.box.i1 = std::min(ci + 1, nx) * refinement;
      nb.box.j0 = std::max(cj - 1, 0) * refinement;
      nb.box.j1 = std::min(cj + 1, ny) * refinement;
      for (int j = nb.box.j0; j <= nb.box.j1; ++j)
        for (int i = nb.box.i0; i <= nb.box.i1; ++i) {
          const int n = fg.node(i, j);
          nb.nodes.push_back(n);
          (nb.box.on_boundary(i, j) ? nb.boundary : nb.interior).push_back(n);
        }
      mesh.neighborhoods.push_back(std::move(nb));
    }
  return mesh;
}

double MeshHierarchy::pou(int coarse_node, double x, double y) const {
  const Point& v = coarse.vertices[coarse_node];
  const double ax = std::max(0.0, 1.0 - std::abs(x - v.x) / coarse.hx);
  const double ay = std::max(0.0, 1.0 - std::abs(y - v.y) / coarse.hy);
  return ax * ay;
}

std::array<double, 2> MeshHierarchy::pou_gradient(int coarse_node, double x, double y) const {
  const Point& v = coarse.vertices[coarse_node];
  const double dx = x - v.x;
  const double dy = y - v.y;
  if (std::abs(dx) >= coarse.hx || std::abs(dy) >= coarse.hy) return {0.0, 0.0};
  const double ax = 1.0 - std::abs(dx) / coarse.hx;
  const double ay = 1.0 - std::abs(dy) / coarse.hy;
  const double sx = dx > 0.0 ? -1.0 : 1.0;
  const double sy = dy > 0.0 ? -1.0 : 1.0;
  return {sx / coarse.hx * ay, sy / coarse.hy * ax};
}

std::optional<int> MeshHierarchy::find_node(Point p, double rel_tol) const {
  const double tol = rel_tol * std::min(fine.hx, fine.hy);
  const double fi = p.x / fine.hx;
  const double fj = p.y / fine.hy;
  const long i = std::lround(fi);
  const long j = std::lround(fj);
  if (i < 0 || j < 0 || i > fine.nx || j > fine.ny) return std::nullopt;
  if (std::abs(i * fine.hx - p.x) > tol || std::abs(j * fine.hy - p.y) > tol) return std::nullopt;
  return fine.node(static_cast<int>(i), static_cast<int>(j));
}

NodeBox MeshHierarchy::oversampled_box(const Neighborhood& nb, int ring) const {
  const int s = fine.refinement;
  NodeBox b;
  b.i0 = std::max(nb.ci - 1 - ring, 0) * s;
  b.i1 = std::min(nb.ci + 1 + ring, coarse.nx) * s;
  b.j0 = std::max(nb.cj - 1 - ring, 0) * s;
  b.j1 = std::min(nb.cj + 1 + ring, coarse.ny) * s;
  return b;
}

NodeBox MeshHierarchy::coarse_cell_box(int coarse_cell) const {
  const int s = fine.refinement;
  const int ki = coarse_cell % coarse.nx;
  const int kj = coarse_cell / coarse.nx;
  return NodeBox{ki * s, (ki + 1) * s, kj * s, (kj + 1) * s};
}

std::vector<int> MeshHierarchy::cells_in(const NodeBox& box) const {
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(box.width() - 1) * (box.height() - 1));
  for (int j = box.j0; j < box.j1; ++j)
    for (int i = box.i0; i < box.i1; ++i) out.push_back(fine.cell(i, j));
  return out;
}

std::vector<int> MeshHierarchy::nodes_in(const NodeBox& box) const {
  std::vector<int> out;
  out.reserve(box.size());
  for (int j = box.j0; j <= box.j1; ++j)
    for (int i = box.i0; i <= box.i1; ++i) out.push_back(fine.node(i, j));
  return out;
}

std::vector<int> MeshHierarchy::cell_overlap() const {
  std::vector<int> count(coarse.cell_count(), 0);
  for (const auto& nb : neighborhoods)
    for (int c : nb.cells) ++count[c];
  return count;
}

}  // namespace msfrac
