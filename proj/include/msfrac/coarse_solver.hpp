// Copyright The msfrac Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <limits>
#include <memory>
#include <vector>

#include "msfrac/assembly.hpp"

namespace msfrac {

/// Uniform implicit Euler steps on [0, t_max].
struct TimeGrid {
  double t_max = 1.0;
  int steps = 50;

  double tau() const { return t_max / steps; }
  double time(int n) const { return n * tau(); }
  void validate() const;
};

struct SimulationResult {
  std::vector<double> times;
  /// Fine-grid state per time level, n_t + 1 entries.
  std::vector<Vec> states;
  /// Coarse coefficients per time level (coarse solves only).
  std::vector<Vec> coarse;
  double seconds = 0.0;

  const Vec& final_state() const { return states.back(); }
};

/// u0 with Dirichlet values imposed.
Vec constrained_initial(const FineOperators& ops, const Vec& u0);

SimulationResult solve_fine(const FineOperators& ops, const TimeGrid& tg, const Vec& u0);

/// Galerkin problem of a basis with the Dirichlet dofs removed: fine states are
/// basis^T c + lift.
struct CoarseProblem {
  SpMat basis;  // R with constrained columns cleared and empty rows dropped
  Vec lift;     // Dirichlet values, zero elsewhere
  SpMat mass;
  SpMat stiffness;  // basis (A - Bq) basis^T

  int dim() const { return static_cast<int>(basis.rows()); }
  Vec downscale(const Vec& c) const { return basis.transpose() * c + lift; }
};

CoarseProblem coarse_problem(const FineOperators& ops, const SpMat& R);

/// Multiscale solve. The initial coarse state is the mass projection of u0.
/// With `residuals`, records per step the max-norm of the projected fine
/// residual basis [(M/tau + A - Bq) u^{n+1} - (M/tau) u^n - b].
SimulationResult solve_coarse(const FineOperators& ops, const SpMat& R, const TimeGrid& tg,
                              const Vec& u0, std::vector<double>* residuals = nullptr);

struct ErrorNorms {
  std::vector<double> l2;  // per continuum, kappa-weighted
  std::vector<double> h1;  // per continuum, energy seminorm
  double hq = std::numeric_limits<double>::quiet_NaN();  // a_Q over all blocks, N >= 2
};

/// Relative errors of u_ms against the reference u_h, using the unconstrained
/// operators of `ops`.
ErrorNorms error_norms(const Vec& u_ms, const Vec& u_h, const FineOperators& ops);

/// Sparse symmetric solver with LU fallback; throws SolverFailure.
class LinearSolver {
 public:
  explicit LinearSolver(const SpMat& a);
  ~LinearSolver();
  LinearSolver(LinearSolver&&) noexcept;
  Vec solve(const Vec& b) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace msfrac
