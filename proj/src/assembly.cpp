// Copyright The msfrac Authors
// SPDX-License-Identifier: Apache-2.0

#include "msfrac/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace msfrac {

ContinuumSystem ContinuumSystem::single(CellField permeability, CellField porosity) {
  ContinuumSystem sys;
  sys.continua.push_back({std::move(porosity), std::move(permeability)});
  sys.gamma = {1.0};
  return sys;
}

std::vector<double> ContinuumSystem::fracture_permeability(const FractureMesh& fm, int s) const {
  std::vector<double> out;
  out.reserve(fm.fractures.size());
  for (const auto& f : fm.fractures) out.push_back(gamma[s] * f.permeability);
  return out;
}

std::vector<double> ContinuumSystem::fracture_porosity(const FractureMesh& fm, int s) const {
  std::vector<double> out;
  out.reserve(fm.fractures.size());
  for (const auto& f : fm.fractures) out.push_back(gamma[s] * f.porosity);
  return out;
}

void ContinuumSystem::validate(const MeshHierarchy& mesh) const {
  const auto cells = static_cast<std::size_t>(mesh.fine.cell_count());
  require(!continua.empty(), ErrorKind::InvalidArgument, "at least one continuum is required");
  require(gamma.size() == continua.size(), ErrorKind::InvalidArgument,
          "one fracture weight per continuum is required");
  const double total = std::accumulate(gamma.begin(), gamma.end(), 0.0);
  if (std::abs(total - 1.0) > 1e-12)
    fail(ErrorKind::GammaNotNormalized, "fracture weights sum to " + std::to_string(total));
  for (const auto& c : continua) {
    require(c.porosity.size() == cells && c.permeability.size() == cells,
            ErrorKind::InvalidArgument, "continuum fields must have one value per fine cell");
    require(std::all_of(c.porosity.begin(), c.porosity.end(), [](double v) { return v > 0.0; }),
            ErrorKind::InvalidArgument, "porosity must be positive");
    require(std::all_of(c.permeability.begin(), c.permeability.end(), [](double v) { return v >= 0.0; }),
            ErrorKind::InvalidArgument, "permeability must be non-negative");
  }
  for (const auto& t : transfers) {
    require(t.first != t.second && t.first >= 0 && t.second >= 0 && t.first < size() &&
                t.second < size(),
            ErrorKind::InvalidArgument, "transfer must couple two distinct continua");
    require(t.coefficient.size() == cells, ErrorKind::InvalidArgument,
            "transfer field must have one value per fine cell");
    require(std::all_of(t.coefficient.begin(), t.coefficient.end(), [](double v) { return v >= 0.0; }),
            ErrorKind::InvalidArgument, "transfer coefficients must be non-negative");
  }
  for (const auto& f : source)
    require(f.empty() || f.size() == cells, ErrorKind::InvalidArgument, "source size mismatch");
}

SpMat FineOperators::step_matrix(double tau) const {
  SpMat k = mass / tau + stiffness - transfer;
  k.makeCompressed();
  return k;
}

CellField uniform_field(const MeshHierarchy& mesh, double value) {
  return CellField(static_cast<std::size_t>(mesh.fine.cell_count()), value);
}

SpMat assemble_transfer(const MeshHierarchy& mesh, const ContinuumSystem& sys,
                        const NodeBox& region, bool lumped) {
  const Eigen::Index n = region.size();
  const Eigen::Index total = n * sys.size();
  Triplets trips;
  const FractureMesh none;
  for (const auto& t : sys.transfers) {
    const SpMat mq = assemble_form(mesh, none, region,
                                   {lumped ? FormKind::LumpedMass : FormKind::Mass},
                                   t.coefficient, {});
    const Eigen::Index a = t.first * n, b = t.second * n;
    for (int k = 0; k < mq.outerSize(); ++k)
      for (SpMat::InnerIterator it(mq, k); it; ++it) {
        trips.emplace_back(a + it.row(), a + it.col(), -it.value());
        trips.emplace_back(b + it.row(), b + it.col(), -it.value());
        trips.emplace_back(a + it.row(), b + it.col(), it.value());
        trips.emplace_back(b + it.row(), a + it.col(), it.value());
      }
  }
  SpMat out(total, total);
  out.setFromTriplets(trips.begin(), trips.end());
  return out;
}

FineOperators assemble_multi(const MeshHierarchy& mesh, const ContinuumSystem& sys,
                             const FractureMesh& fm, const AssemblyOptions& opts) {
  sys.validate(mesh);
  const NodeBox all = mesh.fine.all_nodes();
  const FormKind mass_kind = opts.lumped_mass ? FormKind::LumpedMass : FormKind::Mass;

  std::vector<SpMat> a, m, w;
  Vec load = Vec::Zero(static_cast<Eigen::Index>(all.size()) * sys.size());
  for (int s = 0; s < sys.size(); ++s) {
    const auto& c = sys.continua[s];
    const auto kf = sys.fracture_permeability(fm, s);
    const auto cf = sys.fracture_porosity(fm, s);
    a.push_back(assemble_form(mesh, fm, all, {FormKind::Stiffness}, c.permeability, kf));
    m.push_back(assemble_form(mesh, fm, all, {mass_kind}, c.porosity, cf));
    w.push_back(assemble_form(mesh, fm, all, {FormKind::Mass}, c.permeability, kf));
    if (s < static_cast<int>(sys.source.size()) && !sys.source[s].empty())
      load.segment(static_cast<Eigen::Index>(s) * all.size(), all.size()) =
          assemble_load(mesh, all, sys.source[s]);
  }

  FineOperators ops;
  ops.continua = sys.size();
  ops.nodes = all.size();
  ops.stiffness = block_diagonal(a);
  ops.mass = block_diagonal(m);
  ops.weighted_mass = block_diagonal(w);
  ops.transfer = assemble_transfer(mesh, sys, all, opts.lumped_transfer);
  ops.load = std::move(load);
  ops.storage = ops.mass;
  ops.energy = ops.stiffness;
  ops.energy_transfer = ops.transfer;
  return ops;
}

FineOperators assemble_single(const MeshHierarchy& mesh, const CellField& permeability,
                              const CellField& porosity, const FractureMesh& fm,
                              const CellField& source, const AssemblyOptions& opts) {
  auto sys = ContinuumSystem::single(permeability, porosity);
  if (!source.empty()) sys.source = {source};
  return assemble_multi(mesh, sys, fm, opts);
}

FineOperators apply_bc(FineOperators ops, const MeshHierarchy& mesh,
                       std::span<const DirichletPoint> points) {
  if (points.empty()) return ops;
  std::vector<double> value(ops.dofs(), 0.0);
  std::vector<char> fixed(ops.dofs(), 0);
  for (const auto& d : ops.dirichlet) {
    fixed[d.dof] = 1;
    value[d.dof] = d.value;
  }
  for (const auto& p : points) {
    const auto node = mesh.find_node(p.at);
    if (!node)
      fail(ErrorKind::NodeNotFound, "no fine node at (" + std::to_string(p.at.x) + ", " +
                                        std::to_string(p.at.y) + ")");
    require(p.continuum < ops.continua, ErrorKind::InvalidArgument, "continuum out of range");
    for (int s = 0; s < ops.continua; ++s) {
      if (p.continuum >= 0 && p.continuum != s) continue;
      const int dof = s * ops.nodes + *node;
      fixed[dof] = 1;
      value[dof] = p.value;
    }
  }

  Vec g = Vec::Zero(ops.dofs());
  for (int i = 0; i < ops.dofs(); ++i)
    if (fixed[i]) g[i] = value[i];
  const SpMat k = ops.stiffness - ops.transfer;
  ops.load -= k * g;

  auto keep_free = [&](Eigen::Index r, Eigen::Index c, double) { return !fixed[r] && !fixed[c]; };
  ops.stiffness.prune(keep_free);
  ops.transfer.prune(keep_free);
  ops.mass.prune([&](Eigen::Index r, Eigen::Index c, double) {
    return r == c || (!fixed[r] && !fixed[c]);
  });

  Triplets eye;
  ops.dirichlet.clear();
  for (int i = 0; i < ops.dofs(); ++i)
    if (fixed[i]) {
      eye.emplace_back(i, i, 1.0);
      ops.load[i] = value[i];
      ops.dirichlet.push_back({i, value[i]});
    }
  SpMat id(ops.dofs(), ops.dofs());
  id.setFromTriplets(eye.begin(), eye.end());
  ops.stiffness += id;
  return ops;
}

}  // namespace msfrac
