// Copyright The msfrac Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include "msfrac/fracture_mesh.hpp"

using namespace msfrac;

namespace {

ErrorKind kind_of(const auto& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error raised");
  return ErrorKind::InvalidArgument;
}

}  // namespace

TEST_CASE("polylines become fine edges with folded aperture") {
  const auto mesh = build_hierarchy({4.0, 4.0}, 2, 2, 2);
  FractureProps p{10.0, 0.5, 0.1, 3};
  const auto fm = embed_fractures(mesh, {{{0.0, 1.0}, {3.0, 1.0}, {3.0, 4.0}}}, {p});
  CHECK(fm.edges.size() == 6);
  CHECK(fm.network_count == 1);
  CHECK(fm.fractures[0].permeability == doctest::Approx(1.0));
  CHECK(fm.fractures[0].porosity == doctest::Approx(0.05));
  CHECK(fm.fractures[0].tag == 3);
  CHECK(fm.fracture_nodes().size() == 7);
  for (const auto& e : fm.edges) CHECK(e.length == doctest::Approx(1.0));
}

TEST_CASE("networks are connected components") {
  const auto mesh = build_hierarchy({4.0, 4.0}, 2, 2, 2);
  const FractureProps p{};
  const auto fm = embed_fractures(mesh,
                                  {{{0.0, 1.0}, {2.0, 1.0}},
                                   {{2.0, 1.0}, {2.0, 3.0}},
                                   {{3.0, 0.0}, {3.0, 2.0}}},
                                  {p, p, p});
  CHECK(fm.network_count == 2);
  const auto loc = local_networks(mesh, fm, mesh.neighborhoods[0].box);
  CHECK(loc.size() == 1);
  CHECK(loc[0].boundary_nodes.size() == 3);  // (0,1), (2,1), (2,2)
}

TEST_CASE("embedding errors") {
  const auto mesh = build_hierarchy({4.0, 4.0}, 2, 2, 2);
  const FractureProps p{};
  CHECK(kind_of([&] { embed_fractures(mesh, {{{0.5, 1.0}, {2.0, 1.0}}}, {p}); }) ==
        ErrorKind::PolylineOffGrid);
  CHECK(kind_of([&] { embed_fractures(mesh, {{{0.0, 0.0}, {1.0, 1.0}}}, {p}); }) ==
        ErrorKind::NonAdjacentSegment);
  CHECK(kind_of([&] {
          embed_fractures(mesh, {{{0.0, 1.0}, {2.0, 1.0}}, {{1.0, 1.0}, {3.0, 1.0}}}, {p, p});
        }) == ErrorKind::OverlappingFracture);
}
