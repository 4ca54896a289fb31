// Copyright The msfrac Authors
// SPDX-License-Identifier: Apache-2.0

#include "msfrac/forms.hpp"

#include <cmath>

namespace msfrac {

namespace {

struct Gauss {
  std::array<double, 3> x;
  std::array<double, 3> w;
  int n;
};

// Rules on [0, 1].
constexpr Gauss kGauss2{{0.5 - 0.28867513459481287, 0.5 + 0.28867513459481287, 0.0}, {0.5, 0.5, 0.0}, 2};
constexpr Gauss kGauss3{{0.5 - 0.3872983346207417, 0.5, 0.5 + 0.3872983346207417},
                        {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0},
                        3};

bool needs_pou(FormKind k) { return k == FormKind::PouMass || k == FormKind::PouStiffness; }

using Local4 = std::array<std::array<double, 4>, 4>;

// Q1 element matrix on a hx x hy rectangle with lower-left corner (x0, y0).
Local4 cell_matrix(const MeshHierarchy& mesh, FormSpec spec, double coef, double x0, double y0) {
  const double hx = mesh.fine.hx, hy = mesh.fine.hy;
  const Gauss& g = needs_pou(spec.kind) ? kGauss3 : kGauss2;
  Local4 k{};
  for (int qa = 0; qa < g.n; ++qa)
    for (int qb = 0; qb < g.n; ++qb) {
      const double xi = g.x[qa], eta = g.x[qb];
      const double w = g.w[qa] * g.w[qb] * hx * hy * coef;
      const std::array<double, 4> n{(1 - xi) * (1 - eta), xi * (1 - eta), xi * eta, (1 - xi) * eta};
      const std::array<double, 4> dx{-(1 - eta) / hx, (1 - eta) / hx, eta / hx, -eta / hx};
      const std::array<double, 4> dy{-(1 - xi) / hy, -xi / hy, xi / hy, (1 - xi) / hy};
      double weight = 1.0;
      if (needs_pou(spec.kind)) {
        const double x = x0 + xi * hx, y = y0 + eta * hy;
        if (spec.kind == FormKind::PouMass) {
          const auto grad = mesh.pou_gradient(spec.pou_node, x, y);
          weight = grad[0] * grad[0] + grad[1] * grad[1];
        } else {
          const double chi = mesh.pou(spec.pou_node, x, y);
          weight = chi * chi;
        }
      }
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
          const double v = (spec.kind == FormKind::Stiffness || spec.kind == FormKind::PouStiffness)
                               ? dx[a] * dx[b] + dy[a] * dy[b]
                               : n[a] * n[b];
          k[a][b] += w * weight * v;
        }
    }
  if (spec.kind == FormKind::LumpedMass) {
    for (int a = 0; a < 4; ++a) {
      double row = 0.0;
      for (int b = 0; b < 4; ++b) {
        row += k[a][b];
        k[a][b] = 0.0;
      }
      k[a][a] = row;
    }
  }
  return k;
}

// Linear 1-D element on a fracture edge from pa to pb.
std::array<std::array<double, 2>, 2> edge_matrix(const MeshHierarchy& mesh, FormSpec spec,
                                                 double coef, Point pa, Point pb) {
  const double len = std::hypot(pb.x - pa.x, pb.y - pa.y);
  const double tx = (pb.x - pa.x) / len, ty = (pb.y - pa.y) / len;
  std::array<std::array<double, 2>, 2> k{};
  for (int q = 0; q < kGauss3.n; ++q) {
    const double s = kGauss3.x[q];
    const double w = kGauss3.w[q] * len * coef;
    const std::array<double, 2> n{1 - s, s};
    const std::array<double, 2> dn{-1 / len, 1 / len};
    const double x = pa.x + s * (pb.x - pa.x), y = pa.y + s * (pb.y - pa.y);
    double weight = 1.0;
    if (spec.kind == FormKind::PouMass) {
      const auto grad = mesh.pou_gradient(spec.pou_node, x, y);
      const double t = grad[0] * tx + grad[1] * ty;
      weight = t * t;
    } else if (spec.kind == FormKind::PouStiffness) {
      const double chi = mesh.pou(spec.pou_node, x, y);
      weight = chi * chi;
    }
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) {
        const double v = (spec.kind == FormKind::Stiffness || spec.kind == FormKind::PouStiffness)
                             ? dn[a] * dn[b]
                             : n[a] * n[b];
        k[a][b] += w * weight * v;
      }
  }
  if (spec.kind == FormKind::LumpedMass) {
    for (int a = 0; a < 2; ++a) {
      const double row = k[a][0] + k[a][1];
      k[a][0] = k[a][1] = 0.0;
      k[a][a] = row;
    }
  }
  return k;
}

}  // namespace

SpMat assemble_form(const MeshHierarchy& mesh, const FractureMesh& fm, const NodeBox& region,
                    FormSpec spec, std::span<const double> cell_coef,
                    std::span<const double> fracture_coef) {
  const auto& fg = mesh.fine;
  require(!needs_pou(spec.kind) ||
              (spec.pou_node >= 0 && spec.pou_node < mesh.coarse.node_count()),
          ErrorKind::InvalidArgument, "POU-weighted form needs a valid coarse vertex");
  Triplets trips;
  if (!cell_coef.empty()) {
    require(static_cast<int>(cell_coef.size()) == fg.cell_count(), ErrorKind::InvalidArgument,
            "cell coefficient size mismatch");
    trips.reserve(static_cast<std::size_t>(region.size()) * 9);
    for (int j = region.j0; j < region.j1; ++j)
      for (int i = region.i0; i < region.i1; ++i) {
        const double coef = cell_coef[fg.cell(i, j)];
        if (coef == 0.0) continue;
        const auto k = cell_matrix(mesh, spec, coef, i * fg.hx, j * fg.hy);
        const std::array<int, 4> loc{region.local(i, j), region.local(i + 1, j),
                                     region.local(i + 1, j + 1), region.local(i, j + 1)};
        for (int a = 0; a < 4; ++a)
          for (int b = 0; b < 4; ++b)
            if (k[a][b] != 0.0) trips.emplace_back(loc[a], loc[b], k[a][b]);
      }
  }
  if (!fracture_coef.empty()) {
    require(fracture_coef.size() == (spec.per_edge ? fm.edges.size() : fm.fractures.size()),
            ErrorKind::InvalidArgument, "fracture coefficient size mismatch");
    for (std::size_t ei = 0; ei < fm.edges.size(); ++ei) {
      const auto& e = fm.edges[ei];
      const int ia = fg.node_i(e.a), ja = fg.node_j(e.a);
      const int ib = fg.node_i(e.b), jb = fg.node_j(e.b);
      if (!region.contains(ia, ja) || !region.contains(ib, jb)) continue;
      const double coef = fracture_coef[spec.per_edge ? ei : e.fracture];
      if (coef == 0.0) continue;
      const auto k = edge_matrix(mesh, spec, coef, fg.vertices[e.a], fg.vertices[e.b]);
      const std::array<int, 2> loc{region.local(ia, ja), region.local(ib, jb)};
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
          if (k[a][b] != 0.0) trips.emplace_back(loc[a], loc[b], k[a][b]);
    }
  }
  SpMat out(region.size(), region.size());
  out.setFromTriplets(trips.begin(), trips.end());
  return out;
}

Vec assemble_load(const MeshHierarchy& mesh, const NodeBox& region, std::span<const double> cell_source) {
  const auto& fg = mesh.fine;
  Vec b = Vec::Zero(region.size());
  if (cell_source.empty()) return b;
  const double quarter = 0.25 * fg.hx * fg.hy;
  for (int j = region.j0; j < region.j1; ++j)
    for (int i = region.i0; i < region.i1; ++i) {
      const double f = cell_source[fg.cell(i, j)] * quarter;
      b[region.local(i, j)] += f;
      b[region.local(i + 1, j)] += f;
      b[region.local(i + 1, j + 1)] += f;
      b[region.local(i, j + 1)] += f;
    }
  return b;
}

SpMat block_diagonal(const std::vector<SpMat>& blocks) {
  if (blocks.empty()) return SpMat();
  const Eigen::Index n = blocks.front().rows();
  Triplets trips;
  for (std::size_t s = 0; s < blocks.size(); ++s) {
    const auto off = static_cast<Eigen::Index>(s) * n;
    for (int k = 0; k < blocks[s].outerSize(); ++k)
      for (SpMat::InnerIterator it(blocks[s], k); it; ++it)
        trips.emplace_back(it.row() + off, it.col() + off, it.value());
  }
  SpMat out(n * static_cast<Eigen::Index>(blocks.size()), n * static_cast<Eigen::Index>(blocks.size()));
  out.setFromTriplets(trips.begin(), trips.end());
  return out;
}

Vec pou_on_box(const MeshHierarchy& mesh, int coarse_node, const NodeBox& box) {
  Vec chi(box.size());
  for (int j = box.j0; j <= box.j1; ++j)
    for (int i = box.i0; i <= box.i1; ++i) {
      const Point& p = mesh.fine.vertices[mesh.fine.node(i, j)];
      chi[box.local(i, j)] = mesh.pou(coarse_node, p.x, p.y);
    }
  return chi;
}

}  // namespace msfrac
