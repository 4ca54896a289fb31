// Copyright The msfrac Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>

#include "msfrac/grid.hpp"

using namespace msfrac;

TEST_CASE("hierarchy sizes and parent map") {
  const auto mesh = build_hierarchy({6.0, 4.0}, 3, 2, 4);
  CHECK(mesh.coarse.node_count() == 12);
  CHECK(mesh.fine.nx == 12);
  CHECK(mesh.fine.ny == 8);
  CHECK(mesh.fine.hx == doctest::Approx(0.5));
  CHECK(mesh.neighborhoods.size() == 12);
  for (int j = 0; j < mesh.fine.ny; ++j)
    for (int i = 0; i < mesh.fine.nx; ++i)
      CHECK(mesh.fine.parent[mesh.fine.cell(i, j)] == (j / 4) * 3 + i / 4);
}

TEST_CASE("neighborhood boxes split into interior and boundary") {
  const auto mesh = build_hierarchy({1.0, 1.0}, 4, 4, 3);
  const auto& corner = mesh.neighborhoods[0];
  CHECK(corner.cells.size() == 1);
  CHECK(corner.box.size() == 16);
  const auto& mid = mesh.neighborhoods[mesh.coarse.node(2, 2)];
  CHECK(mid.cells.size() == 4);
  CHECK(mid.box.width() == 7);
  CHECK(mid.interior.size() + mid.boundary.size() == mid.nodes.size());
  CHECK(mid.boundary.size() == 24);
}

TEST_CASE("coarse hats form a partition of unity") {
  const auto mesh = build_hierarchy({2.0, 3.0}, 2, 3, 2);
  for (double x : {0.1, 0.77, 1.5, 1.99})
    for (double y : {0.05, 1.2, 2.6}) {
      double s = 0.0, gx = 0.0, gy = 0.0;
      for (int n = 0; n < mesh.coarse.node_count(); ++n) {
        s += mesh.pou(n, x, y);
        const auto g = mesh.pou_gradient(n, x, y);
        gx += g[0];
        gy += g[1];
      }
      CHECK(s == doctest::Approx(1.0));
      CHECK(std::abs(gx) < 1e-12);
      CHECK(std::abs(gy) < 1e-12);
    }
}

TEST_CASE("node lookup and overlap") {
  const auto mesh = build_hierarchy({1.0, 1.0}, 2, 2, 5);
  CHECK(mesh.find_node({0.3, 0.4}).value() == mesh.fine.node(3, 4));
  CHECK_FALSE(mesh.find_node({0.35, 0.4}).has_value());
  for (int v : mesh.cell_overlap()) CHECK(v == 4);
  const auto box = mesh.oversampled_box(mesh.neighborhoods[0], 1);
  CHECK(box.i1 == 10);
  CHECK(box.j1 == 10);
}

TEST_CASE("invalid hierarchy arguments") {
  CHECK_THROWS_AS(build_hierarchy({0.0, 1.0}, 1, 1, 1), Error);
  CHECK_THROWS_AS(build_hierarchy({1.0, 1.0}, 0, 1, 1), Error);
}
