// Copyright The msfrac Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "msfrac/coarse_solver.hpp"
#include "msfrac/spectral.hpp"

namespace msfrac {

/// Fracture tags used by the shale model.
inline constexpr int kNaturalFracture = 0;
inline constexpr int kHydraulicFracture = 1;

struct ShaleParams {
  double phi_i = 0.025, phi_k = 0.025, phi_f = 0.01;  // -
  double kappa_i = 1e-19, kappa_k = 0.0;               // m^2
  double kappa_nf = 1e-14, kappa_hf = 1e-13;           // m^2
  double d_i = 1e-8, d_k = 1e-8, d_s = 1e-8;           // m^2/s
  double k_h = 0.1;                                    // Henry coefficient, F(c) = k_h c
  double sigma = 10.0;                                 // 1/m^2
  double mu = 1e-5;                                    // Pa s
  double z = 1.0;
  double r_gas = 8.31;  // J/(K mol)
  double t_k = 323.0;   // K
  double p_init = 2e7;  // Pa
  double p_well = 5e6;  // Pa
  double aperture = 1.0;  // m, multiplies fracture permeability and porosity

  double zrt() const { return z * r_gas * t_k; }
  double c_init() const { return p_init / zrt(); }  // mol/m^3
  double c_well() const { return p_well / zrt(); }
  /// tau_ki = phi_k D_k + (1 - phi_k) D_s F'.
  double tau_ki() const { return phi_k * d_k + (1.0 - phi_k) * d_s * k_h; }
  double kerogen_storage() const { return phi_k + (1.0 - phi_k) * k_h; }
  void validate() const;
};

/// Fracture properties for a tag (natural or hydraulic) before aperture folding.
FractureProps shale_fracture(const ShaleParams& p, int tag);

/// Two-block operators (inorganic c, kerogen c_k) with coefficients frozen at
/// `state`. Fracture terms live in the inorganic block on fracture edges.
/// Masses are lumped. Throws NegativeConcentration if state has c < 0.
FineOperators shale_assemble(const MeshHierarchy& mesh, const FractureMesh& fm,
                             const ShaleParams& p, const Vec& state);

/// Per-cell mobilities of both continua and per-edge fracture mobilities at `state`.
struct ShaleCoefficients {
  CellField inorganic, kerogen;
  std::vector<double> fracture;
};
ShaleCoefficients shale_coefficients(const MeshHierarchy& mesh, const FractureMesh& fm,
                                     const ShaleParams& p, const Vec& state);

struct ShaleResult {
  SimulationResult fine;
  SimulationResult coarse;
  int coarse_dim = 0;
  /// Relative unit-weight L2 error at the final time, both continua together
  /// and per continuum.
  double l2 = 0.0;
  std::vector<double> l2_continuum;
  double min_value = 0.0, max_value = 0.0;  // over the fine trajectory
};

/// Semi-implicit runs on the fine grid and, if `coarse`, with the simplified
/// basis. Wells are Dirichlet c_well at the given points in the inorganic block.
ShaleResult shale_run(const MeshHierarchy& mesh, const FractureMesh& fm, const ShaleParams& p,
                      const std::vector<Point>& wells, const TimeGrid& tg, bool coarse = true);

/// State at rest: both continua at c_init.
Vec shale_initial(const MeshHierarchy& mesh, const ShaleParams& p);

/// Unit-weight lumped L2 norm of the given blocks.
double lumped_l2(const MeshHierarchy& mesh, const Vec& v, int blocks);

}  // namespace msfrac
