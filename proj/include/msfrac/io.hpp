// Copyright The msfrac Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "msfrac/coarse_solver.hpp"
#include "msfrac/spectral.hpp"

namespace msfrac {

struct ErrorRow {
  std::string mode;
  std::string m;  // basis count label
  int dof = 0;
  ErrorNorms norms;
};

/// basis_mode,M,dof,l2_c1,h1_c1,l2_c2,h1_c2,hq with blank cells when N = 1.
std::string errors_csv(const std::vector<ErrorRow>& rows);

/// omega_id,continuum,k,lambda; continuum is "all" for coupled spectra.
std::string spectra_csv(const Spectra& s);

/// x,y,continuum,value for every fine node and continuum.
std::string field_csv(const MeshHierarchy& mesh, const Vec& state, int continua);

void write_text(const std::string& path, const std::string& text);
std::string read_text(const std::string& path);

/// Cache key of snapshot spaces over a mesh and coefficient set.
std::uint64_t snapshot_cache_key(const MeshHierarchy& mesh, const ContinuumSystem& sys,
                                 const FractureMesh& fm, const SpectralOptions& opts);

void save_snapshots(const std::string& path, const std::vector<SnapshotSpace>& spaces);
/// Empty if the file is missing or malformed.
std::optional<std::vector<SnapshotSpace>> load_snapshots(const std::string& path);

/// compute_spectra with snapshot spaces read from / written to `cache_dir`.
Spectra compute_spectra_cached(const MeshHierarchy& mesh, const ContinuumSystem& sys,
                               const FractureMesh& fm, const SpectralOptions& opts,
                               const std::string& cache_dir);

}  // namespace msfrac
