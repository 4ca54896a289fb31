// Copyright The msfrac Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "msfrac/snapshots.hpp"

namespace msfrac {

enum class Weighting {
  KappaMass,    // s(u, v) = int kappa u v
  PouGradient,  // s(u, v) = int kappa |grad chi_j|^2 u v
};
enum class Bilinear { A, AQ };

std::string_view to_string(Weighting w);
std::string_view to_string(Bilinear b);

/// Eigenpairs in snapshot coordinates, ascending, with coeffs^T S coeffs = I.
struct Eigenpairs {
  Vec lambda;
  Mat coeffs;

  int size() const { return static_cast<int>(lambda.size()); }
};

/// Dense symmetric-definite solve of A x = lambda S x. Directions of S with
/// eigenvalue below drop_tol * max are removed first; fails with SingularGram
/// if nothing remains.
Eigenpairs solve_reduced(const Mat& a, const Mat& s, double drop_tol = 1e-12);

/// Offline matrices of a snapshot space: A_off = V^T K V, S_off = V^T W V.
struct OfflineMatrices {
  Mat a;
  Mat s;
};

OfflineMatrices offline_matrices(const MeshHierarchy& mesh, const ContinuumSystem& sys,
                                 const FractureMesh& fm, const SnapshotSpace& snap,
                                 Weighting weighting, Bilinear bilinear);

Eigenpairs offline_eig(const MeshHierarchy& mesh, const ContinuumSystem& sys,
                       const FractureMesh& fm, const SnapshotSpace& snap, Weighting weighting,
                       Bilinear bilinear);

/// Index before the largest multiplicative gap lambda_{k+1} / max(lambda_k, eps)
/// exceeding gap_ratio, with eps = 1e-8 * max(lambda); 0 if none.
int count_networks(std::span<const double> eigs, double gap_ratio = 1e3);

/// Pre-partition-of-unity functions of one neighborhood. Single-continuum
/// functions (continuum >= 0) live in that block of the global vector, N-block
/// functions (kCoupled) in all blocks.
struct LocalBasis {
  int omega = 0;
  int coarse_node = 0;
  int continuum = 0;
  NodeBox box;
  int blocks = 1;
  Mat functions;

  int count() const { return static_cast<int>(functions.cols()); }
};

/// Coarse-to-fine operator, one row per basis function: row = chi_i * phi.
SpMat assemble_R(const MeshHierarchy& mesh, int continua, std::span<const LocalBasis> bases);

struct OfflineSpace {
  std::vector<LocalBasis> bases;
  SpMat R;
  /// Basis count per neighborhood, summed over continua.
  std::vector<int> counts;
  std::vector<std::string> warnings;

  int dim() const { return static_cast<int>(R.rows()); }
};

OfflineSpace make_offline_space(const MeshHierarchy& mesh, int continua,
                                std::vector<LocalBasis> bases);

struct SpectralOptions {
  bool coupled = false;
  SnapshotKind snapshots = SnapshotKind::Harmonic;  // Harmonic or Randomized
  Weighting weighting = Weighting::KappaMass;
  Bilinear bilinear = Bilinear::A;
  /// Coupled harmonic snapshots: one delta per (node, continuum) instead of
  /// the same delta on every continuum.
  bool independent_traces = false;
  RandomizedOptions randomized;
};

struct LocalSpectrum {
  int omega = 0;
  int continuum = 0;
  SnapshotSpace snap;
  Eigenpairs eig;
};

/// Offline spectra of every neighborhood (and continuum for the un-coupled
/// method), ordered by neighborhood then continuum.
struct Spectra {
  int continua = 1;
  bool coupled = false;
  std::vector<LocalSpectrum> local;
};

Spectra compute_spectra(const MeshHierarchy& mesh, const ContinuumSystem& sys,
                        const FractureMesh& fm, const SpectralOptions& opts);

/// The two halves of compute_spectra: snapshot spaces in task order, then
/// their offline eigenproblems.
std::vector<SnapshotSpace> compute_snapshots(const MeshHierarchy& mesh, const ContinuumSystem& sys,
                                             const FractureMesh& fm, const SpectralOptions& opts);
Spectra spectra_from_snapshots(const MeshHierarchy& mesh, const ContinuumSystem& sys,
                               const FractureMesh& fm, const SpectralOptions& opts,
                               std::vector<SnapshotSpace> snaps);

enum class SelectionKind {
  Fixed,            // M per neighborhood and continuum (N * M for coupled)
  LambdaThreshold,  // lambda < threshold_rel * median(lambda)
  Networks,         // count_networks per spectrum, plus offset
};

struct Selection {
  SelectionKind kind = SelectionKind::Fixed;
  int count = 1;
  int offset = 0;
  double threshold_rel = 1e-3;
  double gap_ratio = 1e3;
};

/// Number of modes kept for one local spectrum.
int selected_count(const LocalSpectrum& ls, const Selection& sel, int continua, bool coupled);

OfflineSpace select_basis(const MeshHierarchy& mesh, const Spectra& spectra, const Selection& sel);

}  // namespace msfrac
