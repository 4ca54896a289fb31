// Copyright The msfrac Authors
// SPDX-License-Identifier: Apache-2.0

#include "msfrac/rve.hpp"

#include <cmath>
#include <cstdio>

namespace msfrac {

std::string_view to_string(RveStatus s) {
  switch (s) {
    case RveStatus::Converged: return "converged";
    case RveStatus::NoAsymptote: return "no_asymptote";
    case RveStatus::DivisionNearOne: return "division_near_one";
  }
  return "unknown";
}

RveResult rve_transfer(const MeshHierarchy& mesh, const FractureMesh& fm, const CellField& porosity,
                       const CellField& permeability, const TimeGrid& tg, const RveOptions& opts) {
  tg.validate();
  require(!fm.empty(), ErrorKind::InvalidArgument, "an RVE needs at least one fracture");
  AssemblyOptions ao;
  ao.lumped_mass = opts.lumped_mass;
  const FineOperators raw = assemble_single(mesh, permeability, porosity, fm, {}, ao);

  std::vector<DirichletPoint> pts;
  for (int n : fm.fracture_nodes()) pts.push_back({mesh.fine.vertices[n], -1, 1.0});
  const FineOperators ops = apply_bc(raw, mesh, pts);

  const NodeBox all = mesh.fine.all_nodes();
  const Vec ones = Vec::Ones(all.size());
  const Vec cw = raw.mass * ones;  // int c xi = cw . xi
  const FractureMesh none;
  const Vec vw = assemble_form(mesh, none, all, {FormKind::Mass}, uniform_field(mesh, 1.0), {}) * ones;
  const double volume = vw.sum();

  const double tau = tg.tau();
  const LinearSolver solver(ops.step_matrix(tau));
  const SpMat mt = ops.mass / tau;
  Vec xi = constrained_initial(ops, Vec::Zero(all.size()));
  double stored = cw.dot(xi);

  RveResult out;
  int streak = 0;
  double prev_q = 0.0;
  for (int n = 0; n < tg.steps; ++n) {
    xi = solver.solve(mt * xi + ops.load);
    const double now = cw.dot(xi);
    RveSample s;
    s.t = tg.time(n + 1);
    s.flux = (now - stored) / (tau * volume);
    s.mean = vw.dot(xi) / volume;
    stored = now;
    if (s.mean >= 1.0 - opts.near_one) {
      out.status = RveStatus::DivisionNearOne;
      out.q = prev_q;
      out.t_asymptote = s.t;
      return out;
    }
    s.q = s.flux / (1.0 - s.mean);
    out.trace.push_back(s);
    if (n > 0 && std::abs(s.q - prev_q) < opts.rel_tol * std::abs(s.q))
      ++streak;
    else
      streak = 0;
    prev_q = s.q;
    if (streak >= opts.window) {
      out.status = RveStatus::Converged;
      out.q = s.q;
      out.t_asymptote = s.t;
      return out;
    }
  }
  out.status = RveStatus::NoAsymptote;
  out.q = prev_q;
  out.t_asymptote = tg.t_max;
  return out;
}

CellField spatial_Q_field(double q1, double q2, double y_lo, double y_hi, const MeshHierarchy& mesh) {
  require(y_lo < y_hi, ErrorKind::InvalidArgument, "profile needs y_lo < y_hi");
  const auto& fg = mesh.fine;
  CellField q(static_cast<std::size_t>(fg.cell_count()));
  for (int j = 0; j < fg.ny; ++j) {
    const double y = (j + 0.5) * fg.hy;
    double v = q1;
    if (y > y_hi)
      v = q2;
    else if (y > y_lo)
      v = q1 + (q2 - q1) * (y - y_lo) / (y_hi - y_lo);
    for (int i = 0; i < fg.nx; ++i) q[fg.cell(i, j)] = v;
  }
  return q;
}

std::string rve_trace_csv(const RveResult& r) {
  std::string out = "t,Q,mean_xi,flux\n";
  char buf[128];
  for (const auto& s : r.trace) {
    std::snprintf(buf, sizeof buf, "%.12e,%.12e,%.12e,%.12e\n", s.t, s.q, s.mean, s.flux);
    out += buf;
  }
  return out;
}

}  // namespace msfrac
