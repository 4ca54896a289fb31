// Copyright The msfrac Authors
// SPDX-License-Identifier: Apache-2.0

#include "msfrac/spectral.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace msfrac {

std::string_view to_string(Weighting w) {
  return w == Weighting::KappaMass ? "kappa_mass" : "pou_gradient";
}

std::string_view to_string(Bilinear b) { return b == Bilinear::A ? "a" : "a_Q"; }

Eigenpairs solve_reduced(const Mat& a, const Mat& s, double drop_tol) {
  require(a.rows() == a.cols() && s.rows() == s.cols() && a.rows() == s.rows(),
          ErrorKind::InvalidArgument, "offline matrices must be square and equal in size");
  Eigenpairs out;
  if (a.rows() == 0) fail(ErrorKind::SingularGram, "empty snapshot space");
  // Jacobi equilibration first: high-contrast weights put the Gram diagonal
  // over many decades, and a relative cut on the raw spectrum would discard
  // genuine low-coefficient directions.
  Vec scale(s.rows());
  for (Eigen::Index k = 0; k < s.rows(); ++k) scale[k] = s(k, k) > 0.0 ? 1.0 / std::sqrt(s(k, k)) : 0.0;
  const Mat ss = scale.asDiagonal() * (0.5 * (s + s.transpose())) * scale.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Mat> gram(ss);
  const Vec& d = gram.eigenvalues();
  const double dmax = d.maxCoeff();
  if (!(dmax > 0.0)) fail(ErrorKind::SingularGram, "snapshot Gram matrix is not positive");
  std::vector<int> keep;
  for (Eigen::Index k = 0; k < d.size(); ++k)
    if (d[k] > drop_tol * dmax) keep.push_back(static_cast<int>(k));
  if (keep.empty()) fail(ErrorKind::SingularGram, "snapshot Gram matrix is numerically zero");

  Mat t(a.rows(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t k = 0; k < keep.size(); ++k)
    t.col(k) = scale.asDiagonal() * gram.eigenvectors().col(keep[k]) / std::sqrt(d[keep[k]]);
  Mat reduced = t.transpose() * a * t;
  reduced = 0.5 * (reduced + reduced.transpose());
  Eigen::SelfAdjointEigenSolver<Mat> eig(reduced);
  out.lambda = eig.eigenvalues();
  out.coeffs = t * eig.eigenvectors();
  return out;
}

OfflineMatrices offline_matrices(const MeshHierarchy& mesh, const ContinuumSystem& sys,
                                 const FractureMesh& fm, const SnapshotSpace& snap,
                                 Weighting weighting, Bilinear bilinear) {
  require(bilinear == Bilinear::A || snap.continuum == kCoupled, ErrorKind::InvalidArgument,
          "the a_Q form needs coupled snapshots");
  const LocalSystem loc = local_system(mesh, sys, fm, snap.box, snap.continuum);
  const SpMat k = bilinear == Bilinear::A ? loc.stiffness : loc.energy();
  SpMat w;
  if (weighting == Weighting::KappaMass) {
    w = loc.weighted_mass;
  } else {
    const int node = mesh.neighborhoods.at(snap.omega).node;
    std::vector<SpMat> blocks;
    const int first = snap.continuum == kCoupled ? 0 : snap.continuum;
    for (int s = first; s < first + loc.blocks; ++s)
      blocks.push_back(assemble_form(mesh, fm, snap.box, {FormKind::PouMass, node},
                                     sys.continua[s].permeability,
                                     sys.fracture_permeability(fm, s)));
    w = block_diagonal(blocks);
  }
  OfflineMatrices out;
  out.a = snap.vectors.transpose() * (k * snap.vectors);
  out.s = snap.vectors.transpose() * (w * snap.vectors);
  return out;
}

Eigenpairs offline_eig(const MeshHierarchy& mesh, const ContinuumSystem& sys,
                       const FractureMesh& fm, const SnapshotSpace& snap, Weighting weighting,
                       Bilinear bilinear) {
  const auto m = offline_matrices(mesh, sys, fm, snap, weighting, bilinear);
  return solve_reduced(m.a, m.s);
}

int count_networks(std::span<const double> eigs, double gap_ratio) {
  if (eigs.size() < 2) return 0;
  const double top = *std::max_element(eigs.begin(), eigs.end());
  const double eps = 1e-8 * std::abs(top);
  int best = 0;
  double best_gap = gap_ratio;
  for (std::size_t k = 0; k + 1 < eigs.size(); ++k) {
    const double below = std::max(eigs[k], eps);
    if (!(below > 0.0)) continue;
    const double gap = eigs[k + 1] / below;
    if (gap > best_gap) {
      best_gap = gap;
      best = static_cast<int>(k) + 1;
    }
  }
  return best;
}

SpMat assemble_R(const MeshHierarchy& mesh, int continua, std::span<const LocalBasis> bases) {
  const auto& fg = mesh.fine;
  const int nn = fg.node_count();
  int rows = 0;
  for (const auto& b : bases) rows += b.count();
  Triplets trips;
  int row = 0;
  for (const auto& b : bases) {
    const Vec chi = pou_on_box(mesh, b.coarse_node, b.box);
    const int first = b.continuum == kCoupled ? 0 : b.continuum;
    require(first + b.blocks <= continua, ErrorKind::InvalidArgument, "basis block out of range");
    for (int c = 0; c < b.count(); ++c, ++row)
      for (int s = 0; s < b.blocks; ++s)
        for (int j = b.box.j0; j <= b.box.j1; ++j)
          for (int i = b.box.i0; i <= b.box.i1; ++i) {
            const int l = b.box.local(i, j);
            const double v = chi[l] * b.functions(s * b.box.size() + l, c);
            if (v != 0.0) trips.emplace_back(row, (first + s) * nn + fg.node(i, j), v);
          }
  }
  SpMat r(rows, static_cast<Eigen::Index>(continua) * nn);
  r.setFromTriplets(trips.begin(), trips.end());
  return r;
}

OfflineSpace make_offline_space(const MeshHierarchy& mesh, int continua,
                                std::vector<LocalBasis> bases) {
  OfflineSpace out;
  out.counts.assign(mesh.neighborhoods.size(), 0);
  for (const auto& b : bases) out.counts[b.omega] += b.count();
  out.bases = std::move(bases);
  out.R = assemble_R(mesh, continua, out.bases);
  return out;
}

namespace {

void check_spectral_options(const SpectralOptions& opts) {
  require(opts.snapshots == SnapshotKind::Harmonic || opts.snapshots == SnapshotKind::Randomized,
          ErrorKind::InvalidArgument, "spectra use harmonic or randomized snapshots");
  require(opts.bilinear == Bilinear::A || opts.coupled, ErrorKind::InvalidArgument,
          "the a_Q form needs the coupled method");
}

}  // namespace

std::vector<SnapshotSpace> compute_snapshots(const MeshHierarchy& mesh, const ContinuumSystem& sys,
                                             const FractureMesh& fm, const SpectralOptions& opts) {
  check_spectral_options(opts);
  const int per_omega = opts.coupled ? 1 : sys.size();
  const int n_omega = static_cast<int>(mesh.neighborhoods.size());
  std::vector<SnapshotSpace> out(static_cast<std::size_t>(n_omega) * per_omega);
  parallel_for(n_omega * per_omega, [&](int task) {
    const int omega = task / per_omega;
    const int continuum = opts.coupled ? kCoupled : task % per_omega;
    if (opts.snapshots == SnapshotKind::Randomized) {
      RandomizedOptions ro = opts.randomized;
      ro.seed = mix_seed(opts.randomized.seed, static_cast<std::uint64_t>(continuum + 1));
      out[task] = randomized_snapshots(mesh, sys, fm, omega, continuum, ro);
    } else if (opts.coupled) {
      out[task] = opts.independent_traces ? coupled_trace_snapshots(mesh, sys, fm, omega)
                                          : coupled_snapshots(mesh, sys, fm, omega);
    } else {
      out[task] = uncoupled_snapshots(mesh, sys, fm, omega, continuum);
    }
  });
  return out;
}

Spectra spectra_from_snapshots(const MeshHierarchy& mesh, const ContinuumSystem& sys,
                               const FractureMesh& fm, const SpectralOptions& opts,
                               std::vector<SnapshotSpace> snaps) {
  check_spectral_options(opts);
  Spectra out;
  out.continua = sys.size();
  out.coupled = opts.coupled;
  out.local.resize(snaps.size());
  parallel_for(static_cast<int>(snaps.size()), [&](int task) {
    LocalSpectrum& ls = out.local[task];
    ls.snap = std::move(snaps[task]);
    ls.omega = ls.snap.omega;
    ls.continuum = ls.snap.continuum;
    ls.eig = offline_eig(mesh, sys, fm, ls.snap, opts.weighting, opts.bilinear);
  });
  return out;
}

Spectra compute_spectra(const MeshHierarchy& mesh, const ContinuumSystem& sys,
                        const FractureMesh& fm, const SpectralOptions& opts) {
  return spectra_from_snapshots(mesh, sys, fm, opts, compute_snapshots(mesh, sys, fm, opts));
}

int selected_count(const LocalSpectrum& ls, const Selection& sel, int continua, bool coupled) {
  const int avail = ls.eig.size();
  int k = 0;
  switch (sel.kind) {
    case SelectionKind::Fixed:
      k = coupled ? sel.count * continua : sel.count;
      break;
    case SelectionKind::LambdaThreshold: {
      std::vector<double> l(ls.eig.lambda.data(), ls.eig.lambda.data() + avail);
      std::nth_element(l.begin(), l.begin() + avail / 2, l.end());
      const double cut = sel.threshold_rel * l[avail / 2];
      for (int i = 0; i < avail; ++i) k += ls.eig.lambda[i] < cut;
      k = std::max(k, 1) + sel.offset;
      break;
    }
    case SelectionKind::Networks: {
      const std::span<const double> l(ls.eig.lambda.data(), static_cast<std::size_t>(avail));
      k = std::max(count_networks(l, sel.gap_ratio), 1) + sel.offset;
      break;
    }
  }
  return std::clamp(k, 0, avail);
}

OfflineSpace select_basis(const MeshHierarchy& mesh, const Spectra& spectra, const Selection& sel) {
  std::vector<LocalBasis> bases;
  std::vector<std::string> warnings;
  for (const auto& ls : spectra.local) {
    const int k = selected_count(ls, sel, spectra.continua, spectra.coupled);
    if (k == 0) {
      warnings.push_back("neighborhood " + std::to_string(ls.omega) + " selected no basis function");
      continue;
    }
    LocalBasis b;
    b.omega = ls.omega;
    b.coarse_node = mesh.neighborhoods[ls.omega].node;
    b.continuum = ls.continuum;
    b.box = ls.snap.box;
    b.blocks = ls.snap.blocks;
    b.functions = ls.snap.vectors * ls.eig.coeffs.leftCols(k);
    bases.push_back(std::move(b));
  }
  OfflineSpace out = make_offline_space(mesh, spectra.continua, std::move(bases));
  out.warnings = std::move(warnings);
  return out;
}

}  // namespace msfrac
