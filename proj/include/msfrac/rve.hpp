// Copyright The msfrac Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "msfrac/coarse_solver.hpp"

namespace msfrac {

struct RveOptions {
  double rel_tol = 1e-3;  // asymptote: relative change below this ...
  int window = 5;         // ... for this many consecutive steps
  double near_one = 1e-10;
  bool lumped_mass = false;
};

enum class RveStatus { Converged, NoAsymptote, DivisionNearOne };

std::string_view to_string(RveStatus s);

struct RveSample {
  double t = 0.0;
  double q = 0.0;
  double mean = 0.0;  // volume average of xi
  double flux = 0.0;  // (1/|D|) d/dt int c xi
};

struct RveResult {
  double q = 0.0;
  RveStatus status = RveStatus::NoAsymptote;
  double t_asymptote = 0.0;
  std::vector<RveSample> trace;
};

/// Relaxation of c xi_t - div(kappa grad xi) = 0 with xi = 1 on every fracture
/// node, xi(0) = 0 elsewhere and no-flux outer boundary. Q(t) is the uptake
/// rate divided by 1 - <xi>; the first value after `window` consecutive steps
/// of relative change below `rel_tol` is returned.
RveResult rve_transfer(const MeshHierarchy& mesh, const FractureMesh& fm, const CellField& porosity,
                       const CellField& permeability, const TimeGrid& tg, const RveOptions& opts = {});

/// Q(y) = q1 below y_lo, q2 above y_hi, linear in between; sampled at cell centers.
CellField spatial_Q_field(double q1, double q2, double y_lo, double y_hi, const MeshHierarchy& mesh);

/// CSV text with columns t,Q,mean_xi,flux.
std::string rve_trace_csv(const RveResult& r);

}  // namespace msfrac
