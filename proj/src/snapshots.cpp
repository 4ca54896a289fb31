// Copyright The msfrac Authors
// SPDX-License-Identifier: Apache-2.0

#include "msfrac/snapshots.hpp"

#include <random>

namespace msfrac {

std::string_view to_string(SnapshotKind kind) {
  switch (kind) {
    case SnapshotKind::Harmonic: return "harmonic";
    case SnapshotKind::Randomized: return "randomized";
    case SnapshotKind::Uncoupled: return "uncoupled";
    case SnapshotKind::Coupled: return "coupled";
  }
  return "unknown";
}

namespace {

// Boundary deltas repeated across all blocks: column l carries 1 at boundary
// node l of every block.
Mat shared_deltas(std::size_t per_block, int blocks) {
  const auto n = static_cast<Eigen::Index>(per_block);
  Mat g = Mat::Zero(n * blocks, n);
  for (int s = 0; s < blocks; ++s) g.block(s * n, 0, n, n).setIdentity();
  return g;
}

SnapshotSpace trace_snapshots(const MeshHierarchy& mesh, const ContinuumSystem& sys,
                              const FractureMesh& fm, int omega, int continuum,
                              SnapshotKind kind, bool shared = true) {
  const auto& nb = mesh.neighborhoods.at(omega);
  const LocalSystem loc = local_system(mesh, sys, fm, nb.box, continuum);
  const HarmonicExtension ext(loc.energy(), nb.box, loc.blocks);
  const std::size_t per_block = ext.boundary().size() / loc.blocks;

  SnapshotSpace out;
  out.omega = omega;
  out.kind = kind;
  out.continuum = continuum;
  out.box = nb.box;
  out.blocks = loc.blocks;
  out.vectors = shared ? ext.extend(shared_deltas(per_block, loc.blocks))
                       : ext.extend(Mat::Identity(per_block * loc.blocks, per_block * loc.blocks));
  return out;
}

}  // namespace

SnapshotSpace uncoupled_snapshots(const MeshHierarchy& mesh, const ContinuumSystem& sys,
                                  const FractureMesh& fm, int omega, int continuum) {
  require(continuum >= 0, ErrorKind::InvalidArgument, "un-coupled snapshots need a continuum");
  return trace_snapshots(mesh, sys, fm, omega, continuum,
                         sys.size() == 1 ? SnapshotKind::Harmonic : SnapshotKind::Uncoupled);
}

SnapshotSpace harmonic_snapshots(const MeshHierarchy& mesh, const CellField& permeability,
                                 const FractureMesh& fm, int omega) {
  const auto sys = ContinuumSystem::single(permeability, uniform_field(mesh, 1.0));
  return trace_snapshots(mesh, sys, fm, omega, 0, SnapshotKind::Harmonic);
}

SnapshotSpace coupled_snapshots(const MeshHierarchy& mesh, const ContinuumSystem& sys,
                                const FractureMesh& fm, int omega) {
  return trace_snapshots(mesh, sys, fm, omega, kCoupled, SnapshotKind::Coupled);
}

SnapshotSpace coupled_trace_snapshots(const MeshHierarchy& mesh, const ContinuumSystem& sys,
                                      const FractureMesh& fm, int omega) {
  return trace_snapshots(mesh, sys, fm, omega, kCoupled, SnapshotKind::Coupled, false);
}

int numerical_rank(const Mat& a, double rel_tol) {
  if (a.size() == 0) return 0;
  Eigen::ColPivHouseholderQR<Mat> qr(a);
  qr.setThreshold(rel_tol);
  return static_cast<int>(qr.rank());
}

SnapshotSpace randomized_snapshots(const MeshHierarchy& mesh, const ContinuumSystem& sys,
                                   const FractureMesh& fm, int omega, int continuum,
                                   const RandomizedOptions& opts) {
  require(opts.target >= 1, ErrorKind::InvalidArgument, "randomized snapshots need n >= 1");
  const auto& nb = mesh.neighborhoods.at(omega);
  const NodeBox outer = mesh.oversampled_box(nb, opts.ring);
  const LocalSystem loc = local_system(mesh, sys, fm, outer, continuum);
  const HarmonicExtension ext(loc.energy(), outer, loc.blocks);

  // Restriction rows from the oversampled box to the neighborhood box.
  std::vector<int> rows;
  for (int s = 0; s < loc.blocks; ++s)
    for (int j = nb.box.j0; j <= nb.box.j1; ++j)
      for (int i = nb.box.i0; i <= nb.box.i1; ++i)
        rows.push_back(s * outer.size() + outer.local(i, j));

  const int count = opts.target + 4;
  const auto nb_rows = static_cast<Eigen::Index>(ext.boundary().size());
  SnapshotSpace out;
  out.omega = omega;
  out.kind = SnapshotKind::Randomized;
  out.continuum = continuum;
  out.box = nb.box;
  out.blocks = loc.blocks;

  for (int attempt = 0; attempt < 2; ++attempt) {
    std::mt19937_64 rng(mix_seed(opts.seed, (static_cast<std::uint64_t>(omega) << 1) | attempt));
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    Mat g(nb_rows, count);
    for (Eigen::Index c = 0; c < g.cols(); ++c)
      for (Eigen::Index r = 0; r < g.rows(); ++r) g(r, c) = unif(rng);
    const Mat full = ext.extend(g);
    out.vectors.resize(static_cast<Eigen::Index>(rows.size()), count);
    for (std::size_t k = 0; k < rows.size(); ++k) out.vectors.row(k) = full.row(rows[k]);
    if (numerical_rank(out.vectors, opts.rank_tol) >= opts.target) return out;
  }
  fail(ErrorKind::RankDeficient, "randomized snapshots of neighborhood " + std::to_string(omega) +
                                     " have rank below " + std::to_string(opts.target));
}

}  // namespace msfrac
