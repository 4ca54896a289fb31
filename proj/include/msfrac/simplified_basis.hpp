// Copyright The msfrac Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "msfrac/spectral.hpp"

namespace msfrac {

/// Pre-partition-of-unity functions of one neighborhood for one continuum:
/// the constant 1 (so chi * 1 is the background hat) followed by one local
/// a-harmonic function per network touching the boundary, equal to 1 at that
/// network's boundary points and 0 on the rest of the boundary. Continua
/// without fracture conductivity only get the background function.
LocalBasis simplified_basis(const MeshHierarchy& mesh, const ContinuumSystem& sys,
                            const FractureMesh& fm, int omega, int continuum,
                            std::vector<std::string>* warnings = nullptr);

/// Per coarse cell variant: for every cell K of the neighborhood and every
/// network of K touching the boundary of K, a solve on K with unit values at
/// that network's points on the boundary of K, extended by zero to the rest
/// of the neighborhood.
LocalBasis simplified_basis_cellwise(const MeshHierarchy& mesh, const ContinuumSystem& sys,
                                     const FractureMesh& fm, int omega, int continuum,
                                     std::vector<std::string>* warnings = nullptr);

/// Global simplified space over all neighborhoods and continua.
OfflineSpace build_simplified(const MeshHierarchy& mesh, const ContinuumSystem& sys,
                              const FractureMesh& fm, bool cellwise = false);

}  // namespace msfrac
