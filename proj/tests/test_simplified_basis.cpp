// Copyright The msfrac Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include "msfrac/simplified_basis.hpp"

using namespace msfrac;

namespace {

struct Geometry {
  MeshHierarchy mesh = build_hierarchy({2.0, 2.0}, 2, 2, 6);
  FractureMesh fm;
};

// Center neighborhood: one line entering from the left, one from the top and
// an interior segment that never reaches the boundary.
Geometry geometry() {
  Geometry g;
  const FractureProps p{1e4, 0.1, 1.0, 0};
  g.fm = embed_fractures(g.mesh,
                         {{{0.0, 1.0}, {0.5, 1.0}}, {{1.5, 2.0}, {1.5, 1.0}}, {{0.5, 0.5}, {0.5 + 1.0 / 3.0, 0.5}}},
                         {p, p, p});
  return g;
}

}  // namespace

TEST_CASE("one background function plus one per boundary network") {
  const auto g = geometry();
  const auto sys = ContinuumSystem::single(uniform_field(g.mesh, 1.0), uniform_field(g.mesh, 1.0));
  const int omega = 4;
  const auto b = simplified_basis(g.mesh, sys, g.fm, omega, 0);
  REQUIRE(b.count() == 3);
  CHECK((b.functions.col(0) - Vec::Ones(b.box.size())).cwiseAbs().maxCoeff() < 1e-14);

  // Network functions: unit on their own boundary crossings, zero elsewhere on
  // the boundary, harmonic inside.
  std::vector<std::vector<int>> pts;
  for (auto& p : network_boundary_points(g.mesh, g.mesh.neighborhoods[omega], g.fm))
    if (!p.empty()) pts.push_back(p);  // the interior segment has no crossings
  REQUIRE(pts.size() == 2);
  const auto bnd = box_boundary(b.box);
  const auto loc = local_system(g.mesh, sys, g.fm, b.box, 0);
  for (int k = 0; k < 2; ++k) {
    const Vec f = b.functions.col(k + 1);
    double on = 0.0;
    for (int l : bnd) on += f[l];
    CHECK(on == doctest::Approx(static_cast<double>(pts[k].size())));
    for (int l : bnd) CHECK((f[l] == doctest::Approx(0.0) || f[l] == doctest::Approx(1.0)));
    const Vec r = loc.stiffness * f;
    for (int l : box_interior(b.box)) CHECK(std::abs(r[l]) < 1e-8);
  }
}

TEST_CASE("continua without fracture conductivity keep only the background") {
  const auto g = geometry();
  ContinuumSystem sys;
  sys.continua = {{uniform_field(g.mesh, 1.0), uniform_field(g.mesh, 1.0)},
                  {uniform_field(g.mesh, 1.0), uniform_field(g.mesh, 1e-3)}};
  sys.gamma = {1.0, 0.0};
  CHECK(simplified_basis(g.mesh, sys, g.fm, 4, 0).count() == 3);
  CHECK(simplified_basis(g.mesh, sys, g.fm, 4, 1).count() == 1);

  const auto space = build_simplified(g.mesh, sys, g.fm);
  int total = 0;
  for (int c : space.counts) total += c;
  CHECK(space.dim() == total);
  // Background rows of each continuum sum to one.
  Vec sum = Vec::Zero(space.R.cols());
  int row = 0;
  for (const auto& b : space.bases) {
    sum += Vec(space.R.row(row).transpose());
    row += b.count();
  }
  CHECK((sum - Vec::Ones(sum.size())).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("cellwise variant solves per coarse cell") {
  const auto g = geometry();
  const auto sys = ContinuumSystem::single(uniform_field(g.mesh, 1.0), uniform_field(g.mesh, 1.0));
  const auto b = simplified_basis_cellwise(g.mesh, sys, g.fm, 4, 0);
  CHECK(b.count() >= 3);
  CHECK((b.functions.col(0) - Vec::Ones(b.box.size())).cwiseAbs().maxCoeff() < 1e-14);
  // Every network function lives in one coarse cell of the neighborhood.
  const auto& nb = g.mesh.neighborhoods[4];
  for (int k = 1; k < b.count(); ++k) {
    int hits = 0;
    for (int cell : nb.cells) {
      const NodeBox cb = g.mesh.coarse_cell_box(cell);
      bool inside = true;
      for (int j = b.box.j0; j <= b.box.j1; ++j)
        for (int i = b.box.i0; i <= b.box.i1; ++i)
          if (b.functions(b.box.local(i, j), k) != 0.0 && !cb.contains(i, j)) inside = false;
      hits += inside;
    }
    CHECK(hits >= 1);
  }
}
