// Copyright The msfrac Authors
// SPDX-License-Identifier: Apache-2.0

#include "msfrac/simplified_basis.hpp"

#include <algorithm>

namespace msfrac {

namespace {

bool conductive_fractures(const ContinuumSystem& sys, const FractureMesh& fm, int continuum) {
  if (fm.empty()) return false;
  const auto kf = sys.fracture_permeability(fm, continuum);
  return std::any_of(kf.begin(), kf.end(), [](double v) { return v > 0.0; });
}

LocalBasis background(const MeshHierarchy& mesh, int omega, int continuum) {
  const auto& nb = mesh.neighborhoods.at(omega);
  LocalBasis b;
  b.omega = omega;
  b.coarse_node = nb.node;
  b.continuum = continuum;
  b.box = nb.box;
  b.blocks = 1;
  b.functions = Mat::Ones(nb.box.size(), 1);
  return b;
}

// Harmonic functions on `box` with unit values at each node group and zero on
// the remaining boundary nodes. Groups are global fine node ids.
Mat network_functions(const MeshHierarchy& mesh, const ContinuumSystem& sys, const FractureMesh& fm,
                      const NodeBox& box, int continuum, const std::vector<std::vector<int>>& groups) {
  const LocalSystem loc = local_system(mesh, sys, fm, box, continuum);
  const HarmonicExtension ext(loc.stiffness, box, 1);
  std::vector<int> pos(box.size(), -1);
  for (std::size_t k = 0; k < ext.boundary().size(); ++k) pos[ext.boundary()[k]] = static_cast<int>(k);
  Mat g = Mat::Zero(static_cast<Eigen::Index>(ext.boundary().size()),
                    static_cast<Eigen::Index>(groups.size()));
  const auto& fg = mesh.fine;
  for (std::size_t m = 0; m < groups.size(); ++m)
    for (int n : groups[m]) g(pos[box.local(fg.node_i(n), fg.node_j(n))], m) = 1.0;
  return ext.extend(g);
}

}  // namespace

LocalBasis simplified_basis(const MeshHierarchy& mesh, const ContinuumSystem& sys,
                            const FractureMesh& fm, int omega, int continuum,
                            std::vector<std::string>* warnings) {
  LocalBasis b = background(mesh, omega, continuum);
  if (!conductive_fractures(sys, fm, continuum)) return b;
  std::vector<std::vector<int>> groups;
  for (auto& pts : network_boundary_points(mesh, mesh.neighborhoods[omega], fm)) {
    if (pts.empty()) {
      if (warnings)
        warnings->push_back("neighborhood " + std::to_string(omega) +
                            ": interior network gets no simplified function");
      continue;
    }
    groups.push_back(std::move(pts));
  }
  if (groups.empty()) return b;
  const Mat phi = network_functions(mesh, sys, fm, b.box, continuum, groups);
  Mat f(b.box.size(), 1 + phi.cols());
  f.col(0).setOnes();
  f.rightCols(phi.cols()) = phi;
  b.functions = std::move(f);
  return b;
}

LocalBasis simplified_basis_cellwise(const MeshHierarchy& mesh, const ContinuumSystem& sys,
                                     const FractureMesh& fm, int omega, int continuum,
                                     std::vector<std::string>* warnings) {
  LocalBasis b = background(mesh, omega, continuum);
  if (!conductive_fractures(sys, fm, continuum)) return b;
  const auto& nb = mesh.neighborhoods[omega];
  std::vector<Vec> cols;
  for (int cell : nb.cells) {
    const NodeBox kbox = mesh.coarse_cell_box(cell);
    std::vector<std::vector<int>> groups;
    for (auto& net : local_networks(mesh, fm, kbox)) {
      if (net.boundary_nodes.empty()) {
        if (warnings)
          warnings->push_back("neighborhood " + std::to_string(omega) + ", cell " +
                              std::to_string(cell) + ": interior network gets no function");
        continue;
      }
      groups.push_back(std::move(net.boundary_nodes));
    }
    if (groups.empty()) continue;
    const Mat phi = network_functions(mesh, sys, fm, kbox, continuum, groups);
    for (Eigen::Index m = 0; m < phi.cols(); ++m) {
      Vec col = Vec::Zero(b.box.size());
      for (int j = kbox.j0; j <= kbox.j1; ++j)
        for (int i = kbox.i0; i <= kbox.i1; ++i) col[b.box.local(i, j)] = phi(kbox.local(i, j), m);
      cols.push_back(std::move(col));
    }
  }
  Mat f(b.box.size(), 1 + static_cast<Eigen::Index>(cols.size()));
  f.col(0).setOnes();
  for (std::size_t m = 0; m < cols.size(); ++m) f.col(1 + m) = cols[m];
  b.functions = std::move(f);
  return b;
}

OfflineSpace build_simplified(const MeshHierarchy& mesh, const ContinuumSystem& sys,
                              const FractureMesh& fm, bool cellwise) {
  const int n_omega = static_cast<int>(mesh.neighborhoods.size());
  const int n = sys.size();
  std::vector<LocalBasis> bases(static_cast<std::size_t>(n_omega) * n);
  std::vector<std::vector<std::string>> warn(bases.size());
  parallel_for(static_cast<int>(bases.size()), [&](int task) {
    const int omega = task / n, s = task % n;
    bases[task] = cellwise ? simplified_basis_cellwise(mesh, sys, fm, omega, s, &warn[task])
                           : simplified_basis(mesh, sys, fm, omega, s, &warn[task]);
  });
  OfflineSpace out = make_offline_space(mesh, n, std::move(bases));
  for (auto& w : warn) out.warnings.insert(out.warnings.end(), w.begin(), w.end());
  return out;
}

}  // namespace msfrac
