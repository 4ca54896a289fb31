// Copyright The msfrac Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include "msfrac/verify.hpp"
#include "oracles.hpp"

using namespace msfrac;

namespace {

struct Problem {
  MeshHierarchy mesh = build_hierarchy({4.0, 4.0}, 4, 4, 4);
  FractureMesh fm;
  ContinuumSystem sys;
  FineOperators ops;
  TimeGrid tg{20.0, 20};
  SimulationResult ref;
};

Problem problem() {
  Problem p;
  p.fm = embed_fractures(p.mesh, {{{0.0, 1.0}, {2.5, 1.0}, {2.5, 3.5}}, {{3.5, 0.0}, {3.5, 2.0}}},
                         {{1e2, 0.1, 1.0, 0}, {1e2, 0.1, 1.0, 0}});
  p.sys.continua = {{uniform_field(p.mesh, 0.1), uniform_field(p.mesh, 1e-2)},
                    {uniform_field(p.mesh, 0.05), uniform_field(p.mesh, 1e-3)}};
  p.sys.gamma = {0.8, 0.2};
  p.sys.transfers.push_back({0, 1, uniform_field(p.mesh, 0.25)});
  const std::vector<DirichletPoint> bc{{{0.0, 1.0}, -1, 0.0}};
  p.ops = apply_bc(assemble_multi(p.mesh, p.sys, p.fm), p.mesh, bc);
  p.ref = solve_fine(p.ops, p.tg, Vec::Ones(p.ops.dofs()));
  return p;
}

}  // namespace

TEST_CASE("projections of a constant") {
  const Problem p = problem();
  for (auto mode : {VerifyMode::Uncoupled, VerifyMode::Coupled}) {
    const auto vs = verify_space(p.mesh, p.sys, p.fm, mode);
    CHECK(vs.local.size() == p.mesh.neighborhoods.size() * (mode == VerifyMode::Coupled ? 1 : 2));
    const Vec one = Vec::Ones(p.ops.dofs());
    CHECK((snapshot_projection(p.mesh, vs, one) - one).cwiseAbs().maxCoeff() < 1e-10);
    std::vector<int> keep;
    for (const auto& ls : vs.local) keep.push_back(ls.eig.size());
    const Vec u = p.ref.states[5];
    const Vec us = snapshot_projection(p.mesh, vs, u);
    CHECK((eigen_projection(p.mesh, vs, u, keep) - us).cwiseAbs().maxCoeff() < 1e-8 * us.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("bound report on the toy problem") {
  const Problem p = problem();
  VerifyOptions vo;
  vo.schedule = {1, 2, 4, 6, 0};
  for (auto mode : {VerifyMode::Uncoupled, VerifyMode::Coupled}) {
    const auto rep = check_bounds(p.mesh, p.sys, p.fm, p.ops, p.tg, p.ref, mode, vo);
    REQUIRE(rep.rows.size() == 5);
    for (std::size_t k = 1; k + 1 < rep.rows.size(); ++k) {
      CHECK(rep.rows[k].lambda >= rep.rows[k - 1].lambda);
      CHECK(rep.rows[k].lhs <= rep.rows[k - 1].lhs * (1.0 + 1e-9));
      CHECK(rep.rows[k].c_emp > 0.0);
      CHECK(std::isfinite(rep.rows[k].c_emp));
    }
    const auto& full = rep.rows.back();
    CHECK(full.lhs <= 1e-12 * rep.rows.front().lhs);
    CHECK(full.c_initial == 0.0);
    CHECK(rep.rows[2].d == 4.0);
    CHECK(std::isfinite(rep.assume_constant));
    CHECK(rep.caccioppoli <= 10.0);
    CHECK(rep.bounds_csv().rfind("mode,L,Lambda,D,E,LHS,RHS,C_emp\n", 0) == 0);
  }
}

TEST_CASE("assumption constant against the dense pencil") {
  const Problem p = problem();
  const double d = assumption_constant(p.ops, 3, 400);
  const auto ev = oracle::generalized_eigenvalues(Mat(-p.ops.transfer), Mat(p.ops.stiffness));
  CHECK(d <= ev.back() * (1.0 + 1e-9));
  CHECK(d >= 0.95 * ev.back());
}

TEST_CASE("scalar constants") {
  const Problem p = problem();
  CHECK(overlap_constant(p.mesh) == 4);
  const double e = weight_constant(p.mesh, p.sys, p.fm);
  CHECK(std::isfinite(e));
  CHECK(e > 0.0);
  CHECK(caccioppoli_ratio(p.mesh, p.sys, p.fm, 5, 1) == caccioppoli_ratio(p.mesh, p.sys, p.fm, 5, 1));
}
