// Copyright The msfrac Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include "msfrac/shale_gas.hpp"

using namespace msfrac;

namespace {

struct Small {
  MeshHierarchy mesh = build_hierarchy({20.0, 20.0}, 4, 4, 5);
  FractureMesh fm;
  ShaleParams p;
};

Small small() {
  Small s;
  s.fm = embed_fractures(s.mesh, {{{5.0, 10.0}, {15.0, 10.0}}, {{8.0, 4.0}, {8.0, 10.0}}},
                         {shale_fracture(s.p, kHydraulicFracture), shale_fracture(s.p, kNaturalFracture)});
  return s;
}

}  // namespace

TEST_CASE("parameter relations") {
  const ShaleParams p;
  CHECK(p.c_init() == doctest::Approx(2e7 / (8.31 * 323.0)));
  CHECK(p.c_init() > p.c_well());
  CHECK(p.tau_ki() == doctest::Approx(0.025 * 1e-8 + 0.975 * 1e-8 * 0.1));
  CHECK(p.kerogen_storage() == doctest::Approx(0.025 + 0.975 * 0.1));
  ShaleParams q = p;
  q.p_well = 3e7;
  CHECK_THROWS_AS(q.validate(), Error);
  q = p;
  q.sigma = 0.0;
  CHECK_THROWS_AS(q.validate(), Error);
  CHECK(shale_fracture(p, kHydraulicFracture).permeability == p.kappa_hf);
  CHECK(shale_fracture(p, kNaturalFracture).permeability == p.kappa_nf);
}

TEST_CASE("frozen coefficients") {
  const Small s = small();
  const Vec u = shale_initial(s.mesh, s.p);
  CHECK(u.size() == 2 * s.mesh.fine.node_count());
  CHECK(u.minCoeff() == doctest::Approx(s.p.c_init()));
  const auto co = shale_coefficients(s.mesh, s.fm, s.p, u);
  const double zrt_mu = s.p.zrt() / s.p.mu;
  CHECK(co.inorganic[0] == doctest::Approx(s.p.phi_i * s.p.d_i + s.p.c_init() * zrt_mu * s.p.kappa_i));
  CHECK(co.kerogen[0] == doctest::Approx(s.p.tau_ki()));
  CHECK(co.fracture.size() == s.fm.edges.size());
  Vec bad = u;
  bad[3] = -1.0;
  try {
    shale_coefficients(s.mesh, s.fm, s.p, bad);
    FAIL("expected NegativeConcentration");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NegativeConcentration);
  }
  // Exchange and diffusion keep the constant in the kernel.
  const auto ops = shale_assemble(s.mesh, s.fm, s.p, u);
  const Vec ones = Vec::Ones(ops.dofs());
  CHECK((ops.stiffness * ones).cwiseAbs().maxCoeff() < 1e-12 * Mat(ops.stiffness).cwiseAbs().maxCoeff());
  CHECK((ops.transfer * ones).cwiseAbs().maxCoeff() < 1e-12 * std::max(1e-300, Mat(ops.transfer).cwiseAbs().maxCoeff()));
}

TEST_CASE("depletion stays between well and reservoir concentration") {
  const Small s = small();
  const TimeGrid tg{100.0 * 86400.0, 10};
  const auto r = shale_run(s.mesh, s.fm, s.p, {{10.0, 10.0}}, tg);
  REQUIRE(r.fine.states.size() == 11);
  REQUIRE(r.coarse.states.size() == 11);
  CHECK(r.min_value >= s.p.c_well() * (1.0 - 1e-9));
  CHECK(r.max_value <= s.p.c_init() * (1.0 + 1e-9));
  CHECK(r.l2_continuum.size() == 2);
  CHECK(r.l2 < 0.1);
  CHECK(r.coarse_dim > 0);
  // Gas leaves through the well.
  const double before = lumped_l2(s.mesh, r.fine.states.front(), 2);
  const double after = lumped_l2(s.mesh, r.fine.final_state(), 2);
  CHECK(after < before);
  CHECK_THROWS_AS(shale_run(s.mesh, s.fm, s.p, {{10.3, 10.0}}, tg), Error);
}
