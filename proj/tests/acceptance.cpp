// Copyright The msfrac Authors
// SPDX-License-Identifier: Apache-2.0

// Acceptance run: one PASS/FAIL line per criterion. The exit status reports
// crashes only; the lines themselves are the verdict.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <random>
#include <set>
#include <string>

#include "msfrac/scenario.hpp"
#include "msfrac/simplified_basis.hpp"
#include "oracles.hpp"

using namespace msfrac;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int failures = 0;

void report(int id, const char* name, bool ok, const std::string& detail) {
  std::printf("criterion %2d %s  %s: %s\n", id, ok ? "PASS" : "FAIL", name, detail.c_str());
  std::fflush(stdout);
  failures += !ok;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

void guarded(int id, const char* name, const std::function<void()>& body) {
  try {
    body();
  } catch (const std::exception& e) {
    report(id, name, false, std::string("exception: ") + e.what());
  }
}

// 1: three disjoint conductive lines through one neighborhood.
void network_detection() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto mesh = build_hierarchy({2.0, 2.0}, 2, 2, 10);
  const FractureProps p{1e6, 1.0, 1.0, 0};
  const auto fm = embed_fractures(mesh,
                                  {{{0.0, 0.5}, {1.2, 0.5}},
                                   {{0.6, 2.0}, {0.6, 1.4}, {1.6, 1.4}},
                                   {{2.0, 0.9}, {1.5, 0.9}, {1.5, 0.2}}},
                                  {p, p, p});
  const auto sys = ContinuumSystem::single(uniform_field(mesh, 1.0), uniform_field(mesh, 1.0));
  const auto snap = uncoupled_snapshots(mesh, sys, fm, 4, 0);
  const auto eig = offline_eig(mesh, sys, fm, snap, Weighting::KappaMass, Bilinear::A);
  int small = 0;
  for (int k = 0; k < eig.size(); ++k) small += eig.lambda[k] < 1e-6 * eig.lambda[3];
  const std::vector<double> l(eig.lambda.data(), eig.lambda.data() + eig.size());
  const int nets = count_networks(l);
  const double secs = seconds_since(t0);
  report(1, "spectral network detection", small == 3 && nets == 3 && secs < 5.0,
         fmt("lambda_1..4 = %.2e %.2e %.2e %.2e, small = %d, count_networks = %d, %.2f s", eig.lambda[0],
             eig.lambda[1], eig.lambda[2], eig.lambda[3], small, nets, secs));
}

// 2, 3, 5: single-continuum desk problem.
void single_desk() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto cfg = preset("single");
  const Model model = build_model(cfg);
  BasisConfig b = cfg.basis;
  b.mode = "gmsfem_uncoupled";
  b.schedule = {1, 2, 4, 8};
  const auto g = run_basis(model, b);
  const double secs = seconds_since(t0);
  std::vector<double> l2;
  for (const auto& r : g.rows) l2.push_back(r.norms.l2[0]);
  bool decreasing = l2.size() == 4;
  for (std::size_t k = 1; k < l2.size(); ++k) decreasing = decreasing && l2[k] < l2[k - 1];
  guarded(2, "error decay (single continuum)", [&] {
    report(2, "error decay (single continuum)", decreasing && l2[2] <= 0.05 && secs < 60.0,
           fmt("L2 = %.4f %.4f %.4f %.6f for M = 1 2 4 8, %.1f s", l2[0], l2[1], l2[2], l2[3], secs));
  });

  b.mode = "lambda_select";
  const auto ls = run_basis(model, b);
  const double lm = ls.rows[0].norms.l2[0], l0 = ls.rows[1].norms.l2[0], lp = ls.rows[2].norms.l2[0];
  report(3, "lambda-selection regimes", lm >= 3.0 * l0 && lp <= l0,
         fmt("L2 = %.4f / %.4f / %.4f for M_lambda-1 / M_lambda / M_lambda+1 (ratio %.1f)", lm, l0, lp, lm / l0));

  b.mode = "simplified";
  const auto sb = run_basis(model, b);
  const double ls0 = sb.rows[0].norms.l2[0];
  report(5, "simplified basis adequacy", ls0 <= 2.0 * l0,
         fmt("simplified L2 = %.4f (dof %d) vs M_lambda L2 = %.4f (dof %d)", ls0, sb.rows[0].dof, l0,
             ls.rows[1].dof));
}

// 4: dual-continuum desk problem, coupled vs un-coupled at M = 8.
void coupled_vs_uncoupled() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto cfg = preset("dual");
  const Model model = build_model(cfg);
  BasisConfig b = cfg.basis;
  b.schedule = {8};
  b.mode = "gmsfem_uncoupled";
  const auto u = run_basis(model, b);
  b.mode = "gmsfem_coupled";
  const auto c = run_basis(model, b);
  const double secs = seconds_since(t0);
  const double hu = u.rows[0].norms.h1[1], hc = c.rows[0].norms.h1[1];
  const bool same_dof = u.rows[0].dof == c.rows[0].dof;
  report(4, "coupled beats un-coupled", hc <= 0.5 * hu && same_dof && secs < 120.0,
         fmt("H1(c2) coupled %.4f vs un-coupled %.4f (ratio %.3f), dof %d/%d, Q = %.3g, %.1f s", hc, hu,
             hc / hu, c.rows[0].dof, u.rows[0].dof, cfg.transfers[0].q, secs));
}

// 6: exactness, conservation and Galerkin orthogonality on a dual toy.
void exactness() {
  const auto mesh = build_hierarchy({4.0, 4.0}, 4, 4, 4);
  const auto fm = embed_fractures(mesh, {{{0.0, 1.0}, {2.5, 1.0}, {2.5, 3.5}}}, {{1e3, 0.1, 1.0, 0}});
  ContinuumSystem sys;
  sys.continua = {{uniform_field(mesh, 0.1), uniform_field(mesh, 1e-2)},
                  {uniform_field(mesh, 0.02), uniform_field(mesh, 1e-4)}};
  sys.gamma = {0.8, 0.2};
  sys.transfers.push_back({0, 1, uniform_field(mesh, 0.3)});
  const auto raw = assemble_multi(mesh, sys, fm);
  const TimeGrid tg{10.0, 50};
  const int nn = mesh.fine.node_count();
  Vec u0(2 * nn);
  for (int s = 0; s < 2; ++s)
    for (int n = 0; n < nn; ++n) {
      const auto& p = mesh.fine.vertices[n];
      u0[s * nn + n] = (1.0 + s) * std::exp(-((p.x - 1.0) * (p.x - 1.0) + (p.y - 3.0) * (p.y - 3.0)));
    }

  // (a) identity basis with constraints.
  const std::vector<DirichletPoint> bc{{{0.0, 1.0}, -1, 0.0}};
  const auto ops = apply_bc(raw, mesh, bc);
  SpMat eye(ops.dofs(), ops.dofs());
  eye.setIdentity();
  const auto fine = solve_fine(ops, tg, u0);
  const auto ident = solve_coarse(ops, eye, tg, u0);
  double ident_err = 0.0;
  for (std::size_t n = 1; n < fine.states.size(); ++n)
    ident_err = std::max(ident_err, (ident.states[n] - fine.states[n]).cwiseAbs().maxCoeff() /
                                        fine.states[n].cwiseAbs().maxCoeff());

  // (b) pure Neumann, no source, N = 2 with Q > 0.
  const Vec ones = Vec::Ones(raw.dofs());
  const double total = ones.dot(raw.mass * u0);
  const auto free_fine = solve_fine(raw, tg, u0);
  const auto space = build_simplified(mesh, sys, fm);
  const auto free_ms = solve_coarse(raw, space.R, tg, u0);
  double drift = 0.0;
  for (std::size_t n = 0; n < free_fine.states.size(); ++n) {
    drift = std::max(drift, std::abs(ones.dot(raw.mass * free_fine.states[n]) - total) / total);
    drift = std::max(drift, std::abs(ones.dot(raw.mass * free_ms.states[n]) - total) / total);
  }

  // (c) projected residual per step.
  std::vector<double> res;
  const auto ms = solve_coarse(ops, space.R, tg, u0, &res);
  const CoarseProblem cp = coarse_problem(ops, space.R);
  double worst = 0.0;
  for (std::size_t n = 0; n < res.size(); ++n) {
    const double scale = std::max(1.0, (cp.basis * (ops.mass * ms.states[n] / tg.tau())).cwiseAbs().maxCoeff());
    worst = std::max(worst, res[n] / scale);
  }
  report(6, "exactness and conservation", ident_err <= 1e-12 && drift <= 1e-10 && worst <= 1e-9,
         fmt("identity R rel err %.1e, mass drift %.1e over %d steps, Galerkin residual %.1e", ident_err, drift,
             tg.steps, worst));
}

// 7: assembly, snapshots and offline eigenvalues against dense oracles on 4 x 4 cells.
void oracle_equivalence() {
  const auto mesh = build_hierarchy({1.0, 1.0}, 2, 2, 2);
  const auto fm = embed_fractures(mesh, {{{0.0, 0.5}, {0.5, 0.5}, {0.5, 1.0}}}, {{300.0, 0.2, 1.0, 0}});
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.2, 3.0);
  CellField kappa, c;
  for (int k = 0; k < mesh.fine.cell_count(); ++k) {
    kappa.push_back(u(rng));
    c.push_back(u(rng));
  }
  const auto sys = ContinuumSystem::single(kappa, c);
  const auto ops = assemble_multi(mesh, sys, fm);
  const auto& fg = mesh.fine;
  std::vector<oracle::Edge> e, ek;
  for (const auto& fe : fm.edges) {
    e.push_back({fe.a, fe.b, 300.0, 0.2});
    ek.push_back({fe.a, fe.b, 300.0, 300.0});
  }
  const auto d = oracle::assemble(fg.nx, fg.ny, fg.hx, fg.hy, kappa, c, e);
  const auto w = oracle::assemble(fg.nx, fg.ny, fg.hx, fg.hy, kappa, kappa, ek);
  const double e_asm = std::max(oracle::rel_diff(Mat(ops.stiffness), d.k), oracle::rel_diff(Mat(ops.mass), d.m));

  const auto snap = uncoupled_snapshots(mesh, sys, fm, 4, 0);
  const Mat v = oracle::extensions(d.k, box_boundary(snap.box));
  const double e_snap = oracle::rel_diff(snap.vectors, v);

  const auto eig = offline_eig(mesh, sys, fm, snap, Weighting::KappaMass, Bilinear::A);
  const auto ref = oracle::generalized_eigenvalues(v.transpose() * d.k * v, v.transpose() * w.m * v);
  double e_eig = eig.size() == static_cast<int>(ref.size()) ? 0.0 : 1.0;
  for (int k = 0; k < eig.size() && k < static_cast<int>(ref.size()); ++k)
    e_eig = std::max(e_eig, std::abs(eig.lambda[k] - ref[k]) / ref.back());
  report(7, "oracle equivalence", e_asm <= 1e-8 && e_snap <= 1e-8 && e_eig <= 1e-8,
         fmt("assembly %.1e, snapshots %.1e, eigenvalues %.1e (relative, 4x4 cells)", e_asm, e_snap, e_eig));
}

// 8: projection bounds on the dual desk problem.
void bounds() {
  const auto cfg = preset("dual");
  const Model model = build_model(cfg);
  VerifyOptions vo = cfg.verify_options;
  vo.schedule = {2, 4, 6, 8, 0};
  const auto rep = check_bounds(model.mesh, model.sys, model.fm, model.ops, model.time, model.reference,
                                VerifyMode::Uncoupled, vo);
  bool monotone = true;
  double cmin = INFINITY, cmax = 0.0, cea = 0.0;
  std::string cs;
  for (std::size_t k = 0; k + 1 < rep.rows.size(); ++k) {
    if (k > 0) monotone = monotone && rep.rows[k].lambda >= rep.rows[k - 1].lambda;
    cmin = std::min(cmin, rep.rows[k].c_emp);
    cmax = std::max(cmax, rep.rows[k].c_emp);
    cs += fmt("%s%.3f", cs.empty() ? "" : " ", rep.rows[k].c_emp);
    cea = std::max(cea, rep.rows[k].cea_ratio);
  }
  const auto& full = rep.rows.back();
  const double full_rel = full.lhs / rep.rows.front().lhs;
  const double spread = cmax / cmin;
  report(8, "projection bounds",
         full_rel <= 1e-10 && monotone && spread <= 3.0 && std::isfinite(rep.assume_constant),
         fmt("LHS(full)/LHS(2) = %.1e, Lambda monotone %s, C_emp = %s (spread %.2fx), D = %.3g, "
             "Cea ratio max %.2e, Caccioppoli %.2f",
             full_rel, monotone ? "yes" : "no", cs.c_str(), spread, rep.assume_constant, cea, rep.caccioppoli));
}

// 9: RVE relaxation on the two-node toy.
void rve_toy() {
  const double h = 0.5, c = 0.4, kappa = 2e-3;
  const auto mesh = build_hierarchy({h, h}, 1, 1, 1);
  const auto fm = embed_fractures(mesh, {{{0.0, 0.0}, {0.0, h}}}, {FractureProps{}});
  const TimeGrid tg{300.0, 1200};
  const auto r = rve_transfer(mesh, fm, uniform_field(mesh, c), uniform_field(mesh, kappa), tg);
  const auto ref = oracle::rve_ode(1, 1, h, h, c, kappa, {1, 0, 1, 0}, r.t_asymptote);
  RveOptions to_end;
  to_end.window = 1 << 20;
  const auto tail = rve_transfer(mesh, fm, uniform_field(mesh, c), uniform_field(mesh, kappa), tg, to_end);
  bool positive = true;
  for (const auto& s : tail.trace) positive = positive && s.q > 0.0;
  const double last_mean = tail.trace.empty() ? 0.0 : tail.trace.back().mean;
  const double rel = std::abs(r.q - ref.q) / ref.q;
  report(9, "RVE calibration",
         r.status == RveStatus::Converged && r.q > 0.0 && positive && last_mean > 0.999 && rel <= 0.02,
         fmt("status %s at t = %.3g, Q = %.5g vs oracle %.5g (rel %.1e), <xi>(T) = %.6f",
             std::string(to_string(r.status)).c_str(), r.t_asymptote, r.q, ref.q, rel, last_mean));
}

// 10: shale gas desk run.
void shale() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto cfg = preset("shale");
  const auto mesh = build_hierarchy(cfg.domain, cfg.coarse_nx, cfg.coarse_ny, cfg.refinement);
  const auto fm = build_fractures(cfg, mesh);
  const auto r = shale_run(mesh, fm, cfg.shale.params, cfg.shale.wells, cfg.time, true);
  const double secs = seconds_since(t0);
  report(10, "shale gas scenario", r.l2 <= 0.02 && secs < 120.0,
         fmt("relative L2 at T = %.4f (inorganic %.4f, kerogen %.4f), dof %d, %.1f s", r.l2, r.l2_continuum[0],
             r.l2_continuum[1], r.coarse_dim, secs));
}

// 11: identical runs give identical errors.csv.
void determinism() {
  const auto base = std::filesystem::temp_directory_path() / "msfrac_acceptance";
  std::string text[2];
  for (int k = 0; k < 2; ++k) {
    auto cfg = preset("single");
    cfg.seed = 1234;
    cfg.output.dir = (base / std::to_string(k)).string();
    std::filesystem::remove_all(cfg.output.dir);
    run(cfg);
    text[k] = read_text((std::filesystem::path(cfg.output.dir) / "errors.csv").string());
  }
  std::filesystem::remove_all(base);
  report(11, "determinism", !text[0].empty() && text[0] == text[1],
         fmt("errors.csv %zu bytes, identical: %s", text[0].size(), text[0] == text[1] ? "yes" : "no"));
}

}  // namespace

// Optional arguments select criteria by number; the default runs all of them.
int main(int argc, char** argv) {
  std::set<int> only;
  for (int k = 1; k < argc; ++k) only.insert(std::atoi(argv[k]));
  const auto want = [&](std::initializer_list<int> ids) {
    if (only.empty()) return true;
    for (int id : ids)
      if (only.count(id)) return true;
    return false;
  };
  if (want({1})) guarded(1, "spectral network detection", network_detection);
  if (want({2, 3, 5})) single_desk();
  if (want({4})) guarded(4, "coupled beats un-coupled", coupled_vs_uncoupled);
  if (want({6})) guarded(6, "exactness and conservation", exactness);
  if (want({7})) guarded(7, "oracle equivalence", oracle_equivalence);
  if (want({8})) guarded(8, "projection bounds", bounds);
  if (want({9})) guarded(9, "RVE calibration", rve_toy);
  if (want({10})) guarded(10, "shale gas scenario", shale);
  if (want({11})) guarded(11, "determinism", determinism);
  std::printf("%d criteria failed\n", failures);
  return 0;
}
