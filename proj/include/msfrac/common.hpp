// Copyright The msfrac Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace msfrac {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using SpMat = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;
using Triplets = std::vector<Triplet>;

/// Per fine-cell scalar field (row-major over the fine grid).
using CellField = std::vector<double>;

enum class ErrorKind {
  InvalidArgument,
  ConfigInvalid,
  PolylineOffGrid,
  NonAdjacentSegment,
  OverlappingFracture,
  GammaNotNormalized,
  NodeNotFound,
  SingularLocalSystem,
  RankDeficient,
  SingularGram,
  SolverFailure,
  ZeroReference,
  NegativeConcentration,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what);
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& what);

inline void require(bool cond, ErrorKind kind, const std::string& what) {
  if (!cond) fail(kind, what);
}

struct Point {
  double x = 0.0;
  double y = 0.0;
};

/// Caps the worker count used by parallel_for (<= 0 restores the default).
void set_thread_count(int n);
int thread_count();

/// Runs body(i) for i in [0, n). Iterations must not share mutable state.
template <class Body>
void parallel_for(int n, Body&& body) {
#if defined(MSFRAC_HAVE_OPENMP)
  const int threads = thread_count();
#pragma omp parallel for schedule(dynamic) num_threads(threads)
  for (int i = 0; i < n; ++i) body(i);
#else
  for (int i = 0; i < n; ++i) body(i);
#endif
}

/// 64-bit FNV-1a, used for cache keys.
class Hasher {
 public:
  Hasher& bytes(const void* data, std::size_t len);
  template <class T>
  Hasher& value(const T& v) {
    return bytes(&v, sizeof(T));
  }
  Hasher& doubles(const std::vector<double>& v) {
    return bytes(v.data(), v.size() * sizeof(double));
  }
  std::uint64_t digest() const { return state_; }

 private:
  std::uint64_t state_ = 1469598103934665603ULL;
};

/// splitmix64 step; decorrelates per-neighborhood seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace msfrac
