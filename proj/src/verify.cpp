// Copyright The msfrac Authors
// SPDX-License-Identifier: Apache-2.0

#include "msfrac/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>

namespace msfrac {

std::string_view to_string(VerifyMode m) { return m == VerifyMode::Coupled ? "coupled" : "uncoupled"; }

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

int first_block(const LocalSpectrum& ls) { return ls.continuum == kCoupled ? 0 : ls.continuum; }

// Adds chi_j * f (box-local, block layout) into the global vector.
void stitch(const MeshHierarchy& mesh, const LocalSpectrum& ls, const Vec& f, Vec& out) {
  const auto& fg = mesh.fine;
  const int nn = fg.node_count();
  const NodeBox& box = ls.snap.box;
  const Vec chi = pou_on_box(mesh, mesh.neighborhoods[ls.omega].node, box);
  const int first = first_block(ls);
  for (int s = 0; s < ls.snap.blocks; ++s)
    for (int j = box.j0; j <= box.j1; ++j)
      for (int i = box.i0; i <= box.i1; ++i) {
        const int l = box.local(i, j);
        out[(first + s) * nn + fg.node(i, j)] += chi[l] * f[s * box.size() + l];
      }
}

double trapezoid(const std::vector<double>& v, double tau) {
  if (v.size() < 2) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return tau * (s - 0.5 * (v.front() + v.back()));
}

double quad(const SpMat& m, const Vec& v) { return v.dot(m * v); }

// int ||d/dt x||^2_m dt + int ||x||^2_k dt + ||x(0)||^2_init with backward
// differences for the derivative (the first sample reuses the first difference).
struct Functional {
  double derivative = 0.0, value = 0.0, initial = 0.0;
  double total(double value_weight = 1.0) const { return derivative + value_weight * value + initial; }
};

Functional evaluate(const std::vector<Vec>& x, double tau, const SpMat& m_dt, const SpMat& k,
                    const SpMat& m_init) {
  Functional f;
  std::vector<double> dt, val;
  for (std::size_t n = 0; n < x.size(); ++n) {
    val.push_back(quad(k, x[n]));
    if (n > 0) dt.push_back(quad(m_dt, Vec((x[n] - x[n - 1]) / tau)));
  }
  if (!dt.empty()) dt.insert(dt.begin(), dt.front());
  f.derivative = trapezoid(dt, tau);
  f.value = trapezoid(val, tau);
  f.initial = x.empty() ? 0.0 : quad(m_init, x.front());
  return f;
}

}  // namespace

VerifySpace verify_space(const MeshHierarchy& mesh, const ContinuumSystem& sys, const FractureMesh& fm,
                         VerifyMode mode) {
  VerifySpace vs;
  vs.mode = mode;
  vs.continua = sys.size();
  const int per = mode == VerifyMode::Coupled ? 1 : sys.size();
  const int n_omega = static_cast<int>(mesh.neighborhoods.size());
  vs.local.resize(static_cast<std::size_t>(n_omega) * per);
  vs.gram.resize(vs.local.size());
  parallel_for(static_cast<int>(vs.local.size()), [&](int task) {
    LocalSpectrum& ls = vs.local[task];
    ls.omega = task / per;
    ls.continuum = mode == VerifyMode::Coupled ? kCoupled : task % per;
    ls.snap = mode == VerifyMode::Coupled ? coupled_trace_snapshots(mesh, sys, fm, ls.omega)
                                          : uncoupled_snapshots(mesh, sys, fm, ls.omega, ls.continuum);
    const auto m = offline_matrices(mesh, sys, fm, ls.snap, Weighting::PouGradient,
                                    mode == VerifyMode::Coupled ? Bilinear::AQ : Bilinear::A);
    ls.eig = solve_reduced(m.a, m.s);
    vs.gram[task] = m.s;
  });
  return vs;
}

std::vector<Vec> snapshot_coordinates(const MeshHierarchy& mesh, const VerifySpace& vs, const Vec& u) {
  const auto& fg = mesh.fine;
  const int nn = fg.node_count();
  require(u.size() == static_cast<Eigen::Index>(vs.continua) * nn, ErrorKind::InvalidArgument,
          "state size mismatch");
  std::vector<Vec> out;
  out.reserve(vs.local.size());
  for (const auto& ls : vs.local) {
    const NodeBox& box = ls.snap.box;
    const auto bnd = box_boundary(box);
    Vec t(static_cast<Eigen::Index>(bnd.size()) * ls.snap.blocks);
    const int first = first_block(ls);
    for (int s = 0; s < ls.snap.blocks; ++s)
      for (std::size_t k = 0; k < bnd.size(); ++k) {
        const int i = box.i0 + bnd[k] % box.width(), j = box.j0 + bnd[k] / box.width();
        t[s * static_cast<Eigen::Index>(bnd.size()) + k] = u[(first + s) * nn + fg.node(i, j)];
      }
    out.push_back(std::move(t));
  }
  return out;
}

Vec snapshot_projection(const MeshHierarchy& mesh, const VerifySpace& vs, const Vec& u) {
  const auto t = snapshot_coordinates(mesh, vs, u);
  Vec out = Vec::Zero(u.size());
  for (std::size_t k = 0; k < vs.local.size(); ++k)
    stitch(mesh, vs.local[k], vs.local[k].snap.vectors * t[k], out);
  return out;
}

Vec eigen_projection(const MeshHierarchy& mesh, const VerifySpace& vs, const Vec& u,
                     std::span<const int> keep) {
  require(keep.size() == vs.local.size(), ErrorKind::InvalidArgument, "one count per local space");
  const auto t = snapshot_coordinates(mesh, vs, u);
  Vec out = Vec::Zero(u.size());
  for (std::size_t k = 0; k < vs.local.size(); ++k) {
    const auto& ls = vs.local[k];
    const int l = std::clamp(keep[k], 0, ls.eig.size());
    if (l == 0) continue;
    const Mat psi = ls.eig.coeffs.leftCols(l);
    const Vec a = psi.transpose() * (vs.gram[k] * t[k]);
    stitch(mesh, ls, ls.snap.vectors * (psi * a), out);
  }
  return out;
}

OfflineSpace verify_offline_space(const MeshHierarchy& mesh, const VerifySpace& vs,
                                  std::span<const int> keep) {
  std::vector<LocalBasis> bases;
  for (std::size_t k = 0; k < vs.local.size(); ++k) {
    const auto& ls = vs.local[k];
    const int l = std::clamp(keep[k], 0, ls.eig.size());
    if (l == 0) continue;
    LocalBasis b;
    b.omega = ls.omega;
    b.coarse_node = mesh.neighborhoods[ls.omega].node;
    b.continuum = ls.continuum;
    b.box = ls.snap.box;
    b.blocks = ls.snap.blocks;
    b.functions = ls.snap.vectors * ls.eig.coeffs.leftCols(l);
    bases.push_back(std::move(b));
  }
  return make_offline_space(mesh, vs.continua, std::move(bases));
}

int overlap_constant(const MeshHierarchy& mesh) {
  const auto ov = mesh.cell_overlap();
  return ov.empty() ? 0 : *std::max_element(ov.begin(), ov.end());
}

double weight_constant(const MeshHierarchy& mesh, const ContinuumSystem& sys, const FractureMesh& fm) {
  const auto& fg = mesh.fine;
  const double g[3] = {0.5 - 0.3872983346207417, 0.5, 0.5 + 0.3872983346207417};
  const double floor = 1e-12 / (mesh.coarse.hx * mesh.coarse.hy);
  double best = 0.0;
  for (const auto& nb : mesh.neighborhoods) {
    for (int s = 0; s < sys.size(); ++s) {
      const auto& c = sys.continua[s];
      for (int j = nb.box.j0; j < nb.box.j1; ++j)
        for (int i = nb.box.i0; i < nb.box.i1; ++i) {
          const int cell = fg.cell(i, j);
          for (double a : g)
            for (double b : g) {
              const double x = (i + a) * fg.hx, y = (j + b) * fg.hy;
              const double chi = mesh.pou(nb.node, x, y);
              const auto d = mesh.pou_gradient(nb.node, x, y);
              const double g2 = d[0] * d[0] + d[1] * d[1];
              if (g2 <= floor || chi == 0.0) continue;
              if (c.permeability[cell] == 0.0) return kInf;
              best = std::max(best, c.porosity[cell] * chi * chi / (c.permeability[cell] * g2));
            }
        }
      if (sys.gamma[s] == 0.0) continue;
      for (const auto& e : fm.edges) {
        if (!nb.box.contains(fg.node_i(e.a), fg.node_j(e.a)) ||
            !nb.box.contains(fg.node_i(e.b), fg.node_j(e.b)))
          continue;
        const auto& f = fm.fractures[e.fracture];
        if (f.permeability == 0.0) continue;
        const Point pa = fg.vertices[e.a], pb = fg.vertices[e.b];
        const double tx = (pb.x - pa.x) / e.length, ty = (pb.y - pa.y) / e.length;
        for (double a : g) {
          const double x = pa.x + a * (pb.x - pa.x), y = pa.y + a * (pb.y - pa.y);
          const double chi = mesh.pou(nb.node, x, y);
          const auto d = mesh.pou_gradient(nb.node, x, y);
          const double t = d[0] * tx + d[1] * ty;
          if (t * t <= floor || chi == 0.0) continue;
          best = std::max(best, f.porosity * chi * chi / (f.permeability * t * t));
        }
      }
    }
  }
  return best;
}

double assumption_constant(const FineOperators& ops, std::uint64_t seed, int iterations) {
  if (ops.transfer.nonZeros() == 0) return 0.0;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  Vec x(ops.dofs());
  for (Eigen::Index k = 0; k < x.size(); ++k) x[k] = unif(rng);
  for (const auto& d : ops.dirichlet) x[d.dof] = 0.0;
  try {
    const LinearSolver a(ops.stiffness);
    const SpMat negq = -ops.transfer;
    double rho = 0.0;
    for (int it = 0; it < iterations; ++it) {
      x = a.solve(negq * x);
      const double nrm = std::sqrt(std::max(x.dot(ops.stiffness * x), 0.0));
      if (!(nrm > 0.0)) return 0.0;
      x /= nrm;
      rho = x.dot(negq * x);
    }
    return rho;
  } catch (const Error&) {
    return kInf;
  }
}

double caccioppoli_ratio(const MeshHierarchy& mesh, const ContinuumSystem& sys, const FractureMesh& fm,
                         int samples, std::uint64_t seed) {
  std::vector<int> interior;
  for (int k = 0; k < static_cast<int>(mesh.neighborhoods.size()); ++k) {
    const auto& b = mesh.neighborhoods[k].box;
    if (b.i0 > 0 && b.j0 > 0 && b.i1 < mesh.fine.nx && b.j1 < mesh.fine.ny) interior.push_back(k);
  }
  if (interior.empty() || samples <= 0) return 0.0;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  std::uniform_int_distribution<std::size_t> pick(0, interior.size() - 1);
  const auto kf = sys.fracture_permeability(fm, 0);
  const auto& perm = sys.continua[0].permeability;
  double best = 0.0;
  for (int s = 0; s < samples; ++s) {
    const int omega = interior[pick(rng)];
    const auto snap = uncoupled_snapshots(mesh, sys, fm, omega, 0);
    const int node = mesh.neighborhoods[omega].node;
    const SpMat num = assemble_form(mesh, fm, snap.box, {FormKind::PouStiffness, node}, perm, kf);
    const SpMat den = assemble_form(mesh, fm, snap.box, {FormKind::PouMass, node}, perm, kf);
    Vec r(snap.count());
    for (Eigen::Index k = 0; k < r.size(); ++k) r[k] = unif(rng);
    const Vec w = snap.vectors * r;
    const double d = quad(den, w);
    if (d > 0.0) best = std::max(best, quad(num, w) / d);
  }
  return best;
}

BoundReport check_bounds(const MeshHierarchy& mesh, const ContinuumSystem& sys, const FractureMesh& fm,
                         const FineOperators& ops, const TimeGrid& tg, const SimulationResult& reference,
                         VerifyMode mode, const VerifyOptions& opts) {
  require(!reference.states.empty(), ErrorKind::InvalidArgument, "empty reference trajectory");
  const double tau = tg.tau();
  const VerifySpace vs = verify_space(mesh, sys, fm, mode);

  BoundReport rep;
  const double d_overlap = overlap_constant(mesh);
  const double e_weight = weight_constant(mesh, sys, fm);
  rep.assume_constant = assumption_constant(ops, opts.seed, opts.power_iterations);
  rep.assumption_ok = std::isfinite(rep.assume_constant) && rep.assume_constant < opts.assume_limit;
  rep.caccioppoli = caccioppoli_ratio(mesh, sys, fm, opts.caccioppoli_samples, mix_seed(opts.seed, 7));

  const SpMat& c_norm = ops.storage;
  const SpMat a_norm = mode == VerifyMode::Coupled ? SpMat(ops.energy - ops.energy_transfer) : ops.energy;
  const SpMat aq_norm = ops.energy - ops.energy_transfer;
  const auto& u = reference.states;

  std::vector<Vec> usnap;
  usnap.reserve(u.size());
  for (const auto& x : u) usnap.push_back(snapshot_projection(mesh, vs, x));
  const Functional ref = evaluate(u, tau, a_norm, a_norm, a_norm);
  const double init_floor = 1e-10 * quad(c_norm, u.front());

  for (int L : opts.schedule) {
    BoundRow row;
    row.mode = mode;
    row.L = L;
    row.d = d_overlap;
    row.e = e_weight;
    std::vector<int> keep;
    row.lambda = kInf;
    for (const auto& ls : vs.local) {
      const int k = L <= 0 ? ls.eig.size() : std::min(L, ls.eig.size());
      keep.push_back(k);
      if (k < ls.eig.size()) row.lambda = std::min(row.lambda, ls.eig.lambda[k]);
    }
    std::vector<Vec> err;
    err.reserve(u.size());
    for (std::size_t n = 0; n < u.size(); ++n)
      err.push_back(eigen_projection(mesh, vs, u[n], keep) - usnap[n]);
    const Functional f = evaluate(err, tau, c_norm, a_norm, c_norm);
    row.lhs = f.total();
    row.rhs = std::isfinite(row.lambda) ? ref.total() / row.lambda : 0.0;
    row.c_emp = row.lhs == 0.0 ? 0.0 : (row.rhs > 0.0 ? row.lhs / row.rhs : kInf);
    // A constant u(0) has zero a-norm and is reproduced by every space; both
    // sides then carry only roundoff.
    row.lhs_initial = f.initial > init_floor ? f.initial : 0.0;
    row.rhs_initial = std::isfinite(row.lambda) ? e_weight / row.lambda * std::max(ref.initial, 0.0) : 0.0;
    row.c_initial = row.lhs_initial == 0.0 ? 0.0
                                           : (row.rhs_initial > 0.0 ? row.lhs_initial / row.rhs_initial : kInf);

    // Galerkin error against the Ritz projection of the reference. Skipped for
    // the full snapshot space, whose coarse system is nearly the fine one.
    const OfflineSpace space = verify_offline_space(mesh, vs, keep);
    row.dim = space.dim();
    if (space.dim() > 0 && L > 0) {
      const SimulationResult ms = solve_coarse(ops, space.R, tg, u.front());
      const CoarseProblem cp = coarse_problem(ops, space.R);
      const LinearSolver ritz(cp.stiffness);
      const SpMat k_bc = ops.stiffness - ops.transfer;
      std::vector<Vec> gal, best;
      for (std::size_t n = 0; n < u.size(); ++n) {
        gal.push_back(ms.states[n] - u[n]);
        const Vec c = ritz.solve(cp.basis * (k_bc * (u[n] - cp.lift)));
        best.push_back(cp.downscale(c) - u[n]);
      }
      const Functional g = evaluate(gal, tau, c_norm, aq_norm, c_norm);
      const Functional b = evaluate(best, tau, c_norm, a_norm, c_norm);
      const double weight =
          mode == VerifyMode::Uncoupled && std::isfinite(rep.assume_constant) ? rep.assume_constant + 1.0 : 1.0;
      row.cea_lhs = g.total();
      row.cea_rhs = b.total(weight);
      row.cea_ratio = row.cea_rhs > 0.0 ? row.cea_lhs / row.cea_rhs : 0.0;
    }
    rep.rows.push_back(row);
  }
  return rep;
}

std::string BoundReport::bounds_csv() const {
  std::string out = "mode,L,Lambda,D,E,LHS,RHS,C_emp\n";
  char buf[512];
  for (const auto& r : rows) {
    const std::string l = r.L <= 0 ? "full" : std::to_string(r.L);
    std::snprintf(buf, sizeof buf, "%s,%s,%.12e,%.12e,%.12e,%.12e,%.12e,%.12e\n",
                  std::string(to_string(r.mode)).c_str(), l.c_str(), r.lambda, r.d, r.e, r.lhs, r.rhs,
                  r.c_emp);
    out += buf;
  }
  return out;
}

std::string BoundReport::lemma_csv() const {
  std::string out =
      "mode,L,dim,init_lhs,init_rhs,C_init,cea_lhs,cea_rhs,cea_ratio,assume_D,assume_ok,caccioppoli\n";
  char buf[512];
  for (const auto& r : rows) {
    const std::string l = r.L <= 0 ? "full" : std::to_string(r.L);
    std::snprintf(buf, sizeof buf, "%s,%s,%d,%.12e,%.12e,%.12e,%.12e,%.12e,%.12e,%.12e,%d,%.12e\n",
                  std::string(to_string(r.mode)).c_str(), l.c_str(), r.dim, r.lhs_initial, r.rhs_initial,
                  r.c_initial, r.cea_lhs, r.cea_rhs, r.cea_ratio, assume_constant, assumption_ok ? 1 : 0,
                  caccioppoli);
    out += buf;
  }
  return out;
}

}  // namespace msfrac
