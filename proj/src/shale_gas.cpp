// Copyright The msfrac Authors
// SPDX-License-Identifier: Apache-2.0

#include "msfrac/shale_gas.hpp"

#include <chrono>
#include <cmath>

#include "msfrac/simplified_basis.hpp"

namespace msfrac {

void ShaleParams::validate() const {
  const double pos[] = {phi_i, phi_k, phi_f, kappa_i, kappa_nf, kappa_hf, d_i, d_k, d_s,
                        k_h,   sigma, mu,    z,     r_gas,    t_k,      p_init, p_well, aperture};
  for (double v : pos) require(v > 0.0, ErrorKind::InvalidArgument, "shale parameters must be positive");
  require(kappa_k >= 0.0, ErrorKind::InvalidArgument, "kerogen permeability must be non-negative");
  require(p_init > p_well, ErrorKind::InvalidArgument, "initial pressure must exceed the well pressure");
}

FractureProps shale_fracture(const ShaleParams& p, int tag) {
  FractureProps f;
  f.permeability = tag == kHydraulicFracture ? p.kappa_hf : p.kappa_nf;
  f.porosity = p.phi_f;
  f.aperture = p.aperture;
  f.tag = tag;
  return f;
}

Vec shale_initial(const MeshHierarchy& mesh, const ShaleParams& p) {
  return Vec::Constant(2 * mesh.fine.node_count(), p.c_init());
}

ShaleCoefficients shale_coefficients(const MeshHierarchy& mesh, const FractureMesh& fm,
                                     const ShaleParams& p, const Vec& state) {
  const auto& fg = mesh.fine;
  const int nn = fg.node_count();
  require(state.size() == 2 * nn, ErrorKind::InvalidArgument, "shale state size mismatch");
  for (Eigen::Index k = 0; k < state.size(); ++k)
    if (state[k] < 0.0)
      fail(ErrorKind::NegativeConcentration,
           "concentration " + std::to_string(state[k]) + " at dof " + std::to_string(k));
  const double zrt_mu = p.zrt() / p.mu;
  ShaleCoefficients out;
  out.inorganic.resize(fg.cell_count());
  out.kerogen.resize(fg.cell_count());
  for (int c = 0; c < fg.cell_count(); ++c) {
    double ci = 0.0, ck = 0.0;
    for (int n : fg.cells[c]) {
      ci += 0.25 * state[n];
      ck += 0.25 * state[nn + n];
    }
    out.inorganic[c] = p.phi_i * p.d_i + ci * zrt_mu * p.kappa_i;
    out.kerogen[c] = p.tau_ki() + ck * zrt_mu * p.kappa_k;
  }
  out.fracture.reserve(fm.edges.size());
  for (const auto& e : fm.edges) {
    const double ce = 0.5 * (state[e.a] + state[e.b]);
    out.fracture.push_back(ce * zrt_mu * fm.fractures[e.fracture].permeability);
  }
  return out;
}

FineOperators shale_assemble(const MeshHierarchy& mesh, const FractureMesh& fm,
                             const ShaleParams& p, const Vec& state) {
  const ShaleCoefficients k = shale_coefficients(mesh, fm, p, state);
  const NodeBox all = mesh.fine.all_nodes();
  const FractureMesh none;
  std::vector<double> frac_storage;
  for (const auto& f : fm.fractures) frac_storage.push_back(f.porosity);
  FormSpec edge_stiff{FormKind::Stiffness};
  edge_stiff.per_edge = true;

  const SpMat a_i = assemble_form(mesh, fm, all, edge_stiff, k.inorganic, k.fracture);
  const SpMat a_k = assemble_form(mesh, none, all, {FormKind::Stiffness}, k.kerogen, {});
  const SpMat m_i = assemble_form(mesh, fm, all, {FormKind::LumpedMass},
                                  uniform_field(mesh, p.phi_i), frac_storage);
  const SpMat m_k = assemble_form(mesh, none, all, {FormKind::LumpedMass},
                                  uniform_field(mesh, p.kerogen_storage()), {});
  const SpMat unit = assemble_form(mesh, none, all, {FormKind::LumpedMass}, uniform_field(mesh, 1.0), {});

  ContinuumSystem exch;
  exch.continua.resize(2);
  exch.transfers.push_back({0, 1, uniform_field(mesh, p.tau_ki() * p.sigma)});

  FineOperators ops;
  ops.continua = 2;
  ops.nodes = all.size();
  ops.stiffness = block_diagonal({a_i, a_k});
  ops.mass = block_diagonal({m_i, m_k});
  ops.transfer = assemble_transfer(mesh, exch, all, true);
  ops.weighted_mass = block_diagonal({unit, unit});
  ops.load = Vec::Zero(ops.dofs());
  ops.storage = ops.mass;
  ops.energy = ops.stiffness;
  ops.energy_transfer = ops.transfer;
  return ops;
}

double lumped_l2(const MeshHierarchy& mesh, const Vec& v, int blocks) {
  const FractureMesh none;
  const NodeBox all = mesh.fine.all_nodes();
  const Vec w = assemble_form(mesh, none, all, {FormKind::LumpedMass}, uniform_field(mesh, 1.0), {}) *
                Vec::Ones(all.size());
  double s = 0.0;
  for (int b = 0; b < blocks; ++b)
    s += v.segment(static_cast<Eigen::Index>(b) * all.size(), all.size()).cwiseAbs2().dot(w);
  return std::sqrt(s);
}

namespace {

// Basis system: mobilities at the initial state, fracture conductance only in
// the inorganic continuum.
OfflineSpace shale_basis(const MeshHierarchy& mesh, const FractureMesh& fm, const ShaleParams& p) {
  const Vec s0 = shale_initial(mesh, p);
  const ShaleCoefficients k = shale_coefficients(mesh, fm, p, s0);
  FractureMesh fm0 = fm;
  for (auto& f : fm0.fractures) f.permeability *= p.c_init() * p.zrt() / p.mu;
  ContinuumSystem sys;
  sys.continua.push_back({uniform_field(mesh, p.phi_i), k.inorganic});
  sys.continua.push_back({uniform_field(mesh, p.kerogen_storage()), k.kerogen});
  sys.gamma = {1.0, 0.0};
  return build_simplified(mesh, sys, fm0);
}

std::vector<DirichletPoint> well_points(const ShaleParams& p, const std::vector<Point>& wells) {
  std::vector<DirichletPoint> out;
  for (const auto& w : wells) out.push_back({w, 0, p.c_well()});
  return out;
}

}  // namespace

ShaleResult shale_run(const MeshHierarchy& mesh, const FractureMesh& fm, const ShaleParams& p,
                      const std::vector<Point>& wells, const TimeGrid& tg, bool coarse) {
  p.validate();
  tg.validate();
  const double tau = tg.tau();
  const auto pts = well_points(p, wells);

  ShaleResult out;
  {
    const auto t0 = std::chrono::steady_clock::now();
    Vec u = shale_initial(mesh, p);
    FineOperators ops = apply_bc(shale_assemble(mesh, fm, p, u), mesh, pts);
    out.fine.times.push_back(0.0);
    out.fine.states.push_back(u);
    u = constrained_initial(ops, u);
    for (int n = 0; n < tg.steps; ++n) {
      if (n > 0) ops = apply_bc(shale_assemble(mesh, fm, p, u), mesh, pts);
      const LinearSolver solver(ops.step_matrix(tau));
      u = solver.solve(ops.mass * u / tau + ops.load);
      out.fine.states.push_back(u);
      out.fine.times.push_back(tg.time(n + 1));
    }
    out.fine.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    out.min_value = out.max_value = p.c_init();
    for (const auto& s : out.fine.states) {
      out.min_value = std::min(out.min_value, s.minCoeff());
      out.max_value = std::max(out.max_value, s.maxCoeff());
    }
  }
  if (!coarse) return out;

  const auto t0 = std::chrono::steady_clock::now();
  const OfflineSpace space = shale_basis(mesh, fm, p);
  Vec u = shale_initial(mesh, p);
  FineOperators ops = apply_bc(shale_assemble(mesh, fm, p, u), mesh, pts);
  CoarseProblem cp = coarse_problem(ops, space.R);
  out.coarse_dim = cp.dim();
  const LinearSolver proj(cp.mass);
  Vec c = proj.solve(cp.basis * (ops.mass * (constrained_initial(ops, u) - cp.lift)));
  u = cp.downscale(c);
  out.coarse.times.push_back(0.0);
  out.coarse.coarse.push_back(c);
  out.coarse.states.push_back(u);
  for (int n = 0; n < tg.steps; ++n) {
    if (n > 0) {
      ops = apply_bc(shale_assemble(mesh, fm, p, u), mesh, pts);
      cp.stiffness = cp.basis * (ops.stiffness - ops.transfer) * SpMat(cp.basis.transpose());
    }
    const LinearSolver solver(SpMat(cp.mass / tau + cp.stiffness));
    c = solver.solve(cp.mass * c / tau + cp.basis * ops.load);
    u = cp.downscale(c);
    out.coarse.coarse.push_back(c);
    out.coarse.states.push_back(u);
    out.coarse.times.push_back(tg.time(n + 1));
  }
  out.coarse.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  const Vec& uh = out.fine.final_state();
  const Vec e = out.coarse.final_state() - uh;
  out.l2 = lumped_l2(mesh, e, 2) / lumped_l2(mesh, uh, 2);
  const int nn = mesh.fine.node_count();
  for (int s = 0; s < 2; ++s) {
    const Vec es = e.segment(static_cast<Eigen::Index>(s) * nn, nn);
    const Vec us = uh.segment(static_cast<Eigen::Index>(s) * nn, nn);
    out.l2_continuum.push_back(lumped_l2(mesh, es, 1) / lumped_l2(mesh, us, 1));
  }
  return out;
}

}  // namespace msfrac
