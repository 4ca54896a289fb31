// Copyright The msfrac Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include "msfrac/coarse_solver.hpp"
#include "msfrac/simplified_basis.hpp"
#include "oracles.hpp"

using namespace msfrac;

namespace {

struct Dual {
  MeshHierarchy mesh = build_hierarchy({4.0, 4.0}, 4, 4, 4);
  FractureMesh fm;
  ContinuumSystem sys;
};

Dual dual(double q) {
  Dual d;
  d.fm = embed_fractures(d.mesh, {{{0.0, 1.0}, {2.5, 1.0}, {2.5, 3.5}}}, {{1e3, 0.1, 1.0, 0}});
  d.sys.continua = {{uniform_field(d.mesh, 0.1), uniform_field(d.mesh, 1e-2)},
                    {uniform_field(d.mesh, 0.02), uniform_field(d.mesh, 1e-4)}};
  d.sys.gamma = {0.8, 0.2};
  d.sys.transfers.push_back({0, 1, uniform_field(d.mesh, q)});
  return d;
}

Vec bump(const MeshHierarchy& mesh, int continua) {
  const auto& fg = mesh.fine;
  Vec u(continua * fg.node_count());
  for (int s = 0; s < continua; ++s)
    for (int n = 0; n < fg.node_count(); ++n) {
      const auto& p = fg.vertices[n];
      u[s * fg.node_count() + n] = (s + 1.0) * std::exp(-((p.x - 1.0) * (p.x - 1.0) + (p.y - 3.0) * (p.y - 3.0)));
    }
  return u;
}

SpMat identity(int n) {
  SpMat i(n, n);
  i.setIdentity();
  return i;
}

}  // namespace

TEST_CASE("identity basis reproduces the fine solution") {
  const Dual d = dual(0.05);
  const std::vector<DirichletPoint> bc{{{0.0, 1.0}, -1, 0.0}};
  const auto ops = apply_bc(assemble_multi(d.mesh, d.sys, d.fm), d.mesh, bc);
  const TimeGrid tg{5.0, 20};
  const Vec u0 = Vec::Ones(ops.dofs());
  const auto fine = solve_fine(ops, tg, u0);
  const auto ms = solve_coarse(ops, identity(ops.dofs()), tg, u0);
  REQUIRE(ms.states.size() == fine.states.size());
  for (std::size_t n = 1; n < ms.states.size(); ++n)
    CHECK((ms.states[n] - fine.states[n]).cwiseAbs().maxCoeff() < 1e-12 * fine.states[n].cwiseAbs().maxCoeff());
  CHECK(fine.states.front() == u0);
}

TEST_CASE("mass is conserved without sources or constraints") {
  for (double q : {0.0, 0.3}) {
    const Dual d = dual(q);
    const auto ops = assemble_multi(d.mesh, d.sys, d.fm);
    const TimeGrid tg{10.0, 50};
    const Vec u0 = bump(d.mesh, 2);
    const Vec ones = Vec::Ones(ops.dofs());
    const double total = ones.dot(ops.mass * u0);
    const auto fine = solve_fine(ops, tg, u0);
    const auto space = build_simplified(d.mesh, d.sys, d.fm);
    const auto ms = solve_coarse(ops, space.R, tg, u0);
    for (std::size_t n = 0; n < fine.states.size(); ++n) {
      CHECK(std::abs(ones.dot(ops.mass * fine.states[n]) - total) < 1e-10 * total);
      CHECK(std::abs(ones.dot(ops.mass * ms.states[n]) - total) < 1e-10 * total);
    }
    if (q > 0.0) {
      // Exchange moves mass between the continua.
      const int nn = ops.nodes;
      const Vec m1 = (ops.mass * fine.final_state()).head(nn);
      const Vec m0 = (ops.mass * u0).head(nn);
      CHECK(std::abs(m1.sum() - m0.sum()) > 1e-6 * total);
    }
  }
}

TEST_CASE("Galerkin residual is orthogonal to the basis") {
  const Dual d = dual(0.05);
  const std::vector<DirichletPoint> bc{{{0.0, 1.0}, -1, 0.0}, {{4.0, 4.0}, 1, 2.0}};
  auto sys = d.sys;
  sys.source = {uniform_field(d.mesh, 1e-3), {}};
  const auto ops = apply_bc(assemble_multi(d.mesh, sys, d.fm), d.mesh, bc);
  const auto space = build_simplified(d.mesh, sys, d.fm);
  const TimeGrid tg{5.0, 25};
  std::vector<double> res;
  const auto ms = solve_coarse(ops, space.R, tg, bump(d.mesh, 2), &res);
  REQUIRE(res.size() == 25);
  const CoarseProblem cp = coarse_problem(ops, space.R);
  for (std::size_t n = 0; n < res.size(); ++n) {
    const double scale = (cp.basis * (ops.mass * ms.states[n] / tg.tau())).cwiseAbs().maxCoeff();
    CHECK(res[n] <= 1e-9 * std::max(scale, 1.0));
  }
  // Constrained dofs hold their values.
  for (const auto& dv : ops.dirichlet) CHECK(ms.final_state()[dv.dof] == doctest::Approx(dv.value));
}

TEST_CASE("implicit Euler matches a dense recurrence") {
  const auto mesh = build_hierarchy({1.0, 1.0}, 1, 1, 3);
  const auto ops = assemble_single(mesh, uniform_field(mesh, 0.5), uniform_field(mesh, 2.0), {});
  const TimeGrid tg{1.0, 4};
  const Vec u0 = Vec::LinSpaced(ops.dofs(), 0.0, 1.0);
  const auto fine = solve_fine(ops, tg, u0);
  const Mat m = Mat(ops.mass) / tg.tau();
  const Mat k = m + Mat(ops.stiffness);
  Vec u = u0;
  for (int n = 0; n < tg.steps; ++n) u = oracle::solve(k, Vec(m * u));
  CHECK((u - fine.final_state()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("error norms") {
  const Dual d = dual(0.1);
  const auto ops = assemble_multi(d.mesh, d.sys, d.fm);
  const Vec u = bump(d.mesh, 2);
  const auto zero = error_norms(u, u, ops);
  REQUIRE(zero.l2.size() == 2);
  CHECK(zero.l2[0] == 0.0);
  CHECK(zero.h1[1] == 0.0);
  CHECK(zero.hq == 0.0);
  const auto half = error_norms(Vec(0.5 * u), u, ops);
  for (double v : half.l2) CHECK(v == doctest::Approx(0.5));
  CHECK_THROWS_AS(error_norms(u, Vec::Zero(u.size()), ops), Error);
}

TEST_CASE("solver guards") {
  CHECK_THROWS_AS((TimeGrid{0.0, 5}.validate()), Error);
  CHECK_THROWS_AS((TimeGrid{1.0, 0}.validate()), Error);
  SpMat indef(2, 2);
  indef.insert(0, 1) = 1.0;
  indef.insert(1, 0) = 1.0;
  const LinearSolver lu(indef);
  const Vec x = lu.solve(Vec::Ones(2));
  CHECK(x[0] == doctest::Approx(1.0));
  SpMat zero(2, 2);
  zero.insert(0, 0) = 1.0;
  CHECK_THROWS_AS(LinearSolver{zero}, Error);
}
