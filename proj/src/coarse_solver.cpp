// Copyright The msfrac Authors
// SPDX-License-Identifier: Apache-2.0

#include "msfrac/coarse_solver.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include <chrono>
#include <cmath>

namespace msfrac {

void TimeGrid::validate() const {
  require(t_max > 0.0, ErrorKind::InvalidArgument, "final time must be positive");
  require(steps >= 1, ErrorKind::InvalidArgument, "at least one time step is required");
}

struct LinearSolver::Impl {
  Eigen::SimplicialLDLT<SpMat> ldlt;
  Eigen::SparseLU<SpMat> lu;
  bool use_lu = false;
};

LinearSolver::LinearSolver(const SpMat& a) : impl_(std::make_unique<Impl>()) {
  impl_->ldlt.compute(a);
  bool ok = impl_->ldlt.info() == Eigen::Success;
  if (ok) {
    const Vec d = impl_->ldlt.vectorD();
    ok = d.allFinite() && (d.array() > 0.0).all();
  }
  if (!ok) {
    impl_->use_lu = true;
    impl_->lu.compute(a);
    if (impl_->lu.info() != Eigen::Success)
      fail(ErrorKind::SolverFailure, "factorization of the step matrix failed");
  }
}

LinearSolver::~LinearSolver() = default;
LinearSolver::LinearSolver(LinearSolver&&) noexcept = default;

Vec LinearSolver::solve(const Vec& b) const {
  Vec x = impl_->use_lu ? Vec(impl_->lu.solve(b)) : Vec(impl_->ldlt.solve(b));
  if (!x.allFinite()) fail(ErrorKind::SolverFailure, "linear solve produced non-finite values");
  return x;
}

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

Vec constrained_initial(const FineOperators& ops, const Vec& u0) {
  require(u0.size() == ops.dofs(), ErrorKind::InvalidArgument, "initial state size mismatch");
  Vec u = u0;
  for (const auto& d : ops.dirichlet) u[d.dof] = d.value;
  return u;
}

SimulationResult solve_fine(const FineOperators& ops, const TimeGrid& tg, const Vec& u0) {
  tg.validate();
  const auto t0 = std::chrono::steady_clock::now();
  const double tau = tg.tau();
  const LinearSolver solver(ops.step_matrix(tau));
  const SpMat mt = ops.mass / tau;

  // Slice 0 is the configured state; the recurrence starts from its
  // constrained version (identical unless u0 violates the point values).
  SimulationResult out;
  out.times.push_back(0.0);
  out.states.push_back(u0);
  Vec u = constrained_initial(ops, u0);
  for (int n = 0; n < tg.steps; ++n) {
    u = solver.solve(Vec(mt * u + ops.load));
    out.states.push_back(u);
    out.times.push_back(tg.time(n + 1));
  }
  out.seconds = seconds_since(t0);
  return out;
}

CoarseProblem coarse_problem(const FineOperators& ops, const SpMat& R) {
  require(R.cols() == ops.dofs(), ErrorKind::InvalidArgument, "basis size does not match the fine grid");
  std::vector<char> fixed(ops.dofs(), 0);
  CoarseProblem cp;
  cp.lift = Vec::Zero(ops.dofs());
  for (const auto& d : ops.dirichlet) {
    fixed[d.dof] = 1;
    cp.lift[d.dof] = d.value;
  }
  SpMat r = R;
  r.prune([&](Eigen::Index, Eigen::Index c, double v) { return !fixed[c] && v != 0.0; });
  // Row-major copy to read row norms.
  Eigen::SparseMatrix<double, Eigen::RowMajor> rr = r;
  std::vector<int> keep;
  for (int i = 0; i < rr.outerSize(); ++i) {
    double nrm = 0.0;
    for (decltype(rr)::InnerIterator it(rr, i); it; ++it) nrm += it.value() * it.value();
    if (nrm > 0.0) keep.push_back(i);
  }
  Triplets trips;
  for (std::size_t k = 0; k < keep.size(); ++k)
    for (decltype(rr)::InnerIterator it(rr, keep[k]); it; ++it)
      trips.emplace_back(static_cast<int>(k), it.col(), it.value());
  cp.basis.resize(static_cast<Eigen::Index>(keep.size()), ops.dofs());
  cp.basis.setFromTriplets(trips.begin(), trips.end());
  const SpMat bt = cp.basis.transpose();
  cp.mass = cp.basis * ops.mass * bt;
  cp.stiffness = cp.basis * (ops.stiffness - ops.transfer) * bt;
  return cp;
}

SimulationResult solve_coarse(const FineOperators& ops, const SpMat& R, const TimeGrid& tg,
                              const Vec& u0, std::vector<double>* residuals) {
  tg.validate();
  const auto t0 = std::chrono::steady_clock::now();
  const double tau = tg.tau();
  const CoarseProblem cp = coarse_problem(ops, R);
  require(cp.dim() > 0, ErrorKind::SolverFailure, "the coarse space is empty");

  const SpMat kc = SpMat(cp.mass / tau + cp.stiffness);
  const LinearSolver step(kc);
  const LinearSolver proj(cp.mass);
  const Vec bc = cp.basis * ops.load;

  const Vec u_init = constrained_initial(ops, u0);
  Vec c = proj.solve(cp.basis * (ops.mass * (u_init - cp.lift)));

  SpMat fine_step;
  SpMat mt;
  if (residuals) {
    residuals->clear();
    fine_step = ops.step_matrix(tau);
    mt = ops.mass / tau;
  }

  SimulationResult out;
  out.times.push_back(0.0);
  out.coarse.push_back(c);
  out.states.push_back(cp.downscale(c));
  for (int n = 0; n < tg.steps; ++n) {
    const Vec rhs = (cp.mass * c) / tau + bc;
    c = step.solve(rhs);
    out.coarse.push_back(c);
    out.states.push_back(cp.downscale(c));
    out.times.push_back(tg.time(n + 1));
    if (residuals) {
      const Vec& un1 = out.states.back();
      const Vec& un = out.states[out.states.size() - 2];
      const Vec r = cp.basis * (fine_step * un1 - mt * un - ops.load);
      residuals->push_back(r.size() ? r.cwiseAbs().maxCoeff() : 0.0);
    }
  }
  out.seconds = seconds_since(t0);
  return out;
}

ErrorNorms error_norms(const Vec& u_ms, const Vec& u_h, const FineOperators& ops) {
  require(u_ms.size() == ops.dofs() && u_h.size() == ops.dofs(), ErrorKind::InvalidArgument,
          "solution size mismatch");
  const Vec e = u_ms - u_h;
  const Vec we = ops.weighted_mass * e, wu = ops.weighted_mass * u_h;
  const Vec ae = ops.energy * e, au = ops.energy * u_h;
  auto ratio = [](double num, double den) {
    if (!(den > 1e-300)) fail(ErrorKind::ZeroReference, "reference solution has zero norm");
    return std::sqrt(std::max(num, 0.0) / den);
  };
  ErrorNorms out;
  const int n = ops.nodes;
  for (int s = 0; s < ops.continua; ++s) {
    const auto seg = [&](const Vec& v) { return v.segment(static_cast<Eigen::Index>(s) * n, n); };
    out.l2.push_back(ratio(seg(e).dot(seg(we)), seg(u_h).dot(seg(wu))));
    out.h1.push_back(ratio(seg(e).dot(seg(ae)), seg(u_h).dot(seg(au))));
  }
  if (ops.continua >= 2) {
    const SpMat aq = ops.energy - ops.energy_transfer;
    out.hq = ratio(e.dot(aq * e), u_h.dot(aq * u_h));
  }
  return out;
}

}  // namespace msfrac
