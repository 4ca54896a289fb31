// Copyright The msfrac Authors
// SPDX-License-Identifier: Apache-2.0

#include "msfrac/common.hpp"

#include <atomic>
#include <thread>

#if defined(MSFRAC_HAVE_OPENMP)
#include <omp.h>
#endif

namespace msfrac {

namespace {
std::atomic<int> g_threads{0};
}

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::ConfigInvalid: return "ConfigInvalid";
    case ErrorKind::PolylineOffGrid: return "PolylineOffGrid";
    case ErrorKind::NonAdjacentSegment: return "NonAdjacentSegment";
    case ErrorKind::OverlappingFracture: return "OverlappingFracture";
    case ErrorKind::GammaNotNormalized: return "GammaNotNormalized";
    case ErrorKind::NodeNotFound: return "NodeNotFound";
    case ErrorKind::SingularLocalSystem: return "SingularLocalSystem";
    case ErrorKind::RankDeficient: return "RankDeficient";
    case ErrorKind::SingularGram: return "SingularGram";
    case ErrorKind::SolverFailure: return "SolverFailure";
    case ErrorKind::ZeroReference: return "ZeroReference";
    case ErrorKind::NegativeConcentration: return "NegativeConcentration";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

void set_thread_count(int n) { g_threads.store(n > 0 ? n : 0); }

int thread_count() {
  const int n = g_threads.load();
  if (n > 0) return n;
#if defined(MSFRAC_HAVE_OPENMP)
  return omp_get_max_threads();
#else
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
#endif
}

Hasher& Hasher::bytes(const void* data, std::size_t len) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < len; ++i) {
    state_ ^= p[i];
    state_ *= 1099511628211ULL;
  }
  return *this;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace msfrac
