// Copyright The msfrac Authors
// SPDX-License-Identifier: Apache-2.0

#include "msfrac/io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace msfrac {

namespace {

std::string num(double v) {
  if (!std::isfinite(v)) return "";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12e", v);
  return buf;
}

constexpr std::uint32_t kCacheMagic = 0x6d736672;  // "msfr"
constexpr std::uint32_t kCacheVersion = 1;

template <class T>
void put(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
bool get(std::istream& is, T& v) {
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  return static_cast<bool>(is);
}

}  // namespace

std::string errors_csv(const std::vector<ErrorRow>& rows) {
  std::ostringstream os;
  os << "basis_mode,M,dof,l2_c1,h1_c1,l2_c2,h1_c2,hq\n";
  for (const auto& r : rows) {
    os << r.mode << ',' << r.m << ',' << r.dof;
    for (std::size_t s = 0; s < 2; ++s) {
      const bool have = s < r.norms.l2.size();
      os << ',' << (have ? num(r.norms.l2[s]) : "") << ','
         << (have && s < r.norms.h1.size() ? num(r.norms.h1[s]) : "");
    }
    os << ',' << num(r.norms.hq) << '\n';
  }
  return os.str();
}

std::string spectra_csv(const Spectra& s) {
  std::ostringstream os;
  os << "omega_id,continuum,k,lambda\n";
  for (const auto& ls : s.local) {
    const std::string c = ls.continuum == kCoupled ? "all" : std::to_string(ls.continuum);
    for (int k = 0; k < ls.eig.size(); ++k)
      os << ls.omega << ',' << c << ',' << k << ',' << num(ls.eig.lambda[k]) << '\n';
  }
  return os.str();
}

std::string field_csv(const MeshHierarchy& mesh, const Vec& state, int continua) {
  const auto& fg = mesh.fine;
  const int nn = fg.node_count();
  require(state.size() == static_cast<Eigen::Index>(continua) * nn, ErrorKind::InvalidArgument,
          "state size does not match the mesh");
  std::ostringstream os;
  os << "x,y,continuum,value\n";
  for (int s = 0; s < continua; ++s)
    for (int n = 0; n < nn; ++n)
      os << num(fg.vertices[n].x) << ',' << num(fg.vertices[n].y) << ',' << s << ','
         << num(state[s * nn + n]) << '\n';
  return os.str();
}

void write_text(const std::string& path, const std::string& text) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream os(p, std::ios::binary);
  require(static_cast<bool>(os), ErrorKind::InvalidArgument, "cannot write " + path);
  os << text;
}

std::string read_text(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  require(static_cast<bool>(is), ErrorKind::InvalidArgument, "cannot read " + path);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

std::uint64_t snapshot_cache_key(const MeshHierarchy& mesh, const ContinuumSystem& sys,
                                 const FractureMesh& fm, const SpectralOptions& opts) {
  Hasher h;
  h.value(kCacheVersion)
      .value(mesh.domain.lx)
      .value(mesh.domain.ly)
      .value(mesh.coarse.nx)
      .value(mesh.coarse.ny)
      .value(mesh.fine.refinement);
  h.value(sys.size());
  for (const auto& c : sys.continua) h.doubles(c.permeability).doubles(c.porosity);
  h.doubles(sys.gamma);
  for (const auto& t : sys.transfers) h.value(t.first).value(t.second).doubles(t.coefficient);
  for (const auto& f : fm.fractures) h.value(f.permeability).value(f.porosity).value(f.aperture);
  for (const auto& e : fm.edges) h.value(e.a).value(e.b).value(e.fracture);
  h.value(opts.coupled).value(opts.independent_traces).value(static_cast<int>(opts.snapshots));
  if (opts.snapshots == SnapshotKind::Randomized)
    h.value(opts.randomized.target)
        .value(opts.randomized.ring)
        .value(opts.randomized.seed)
        .value(opts.randomized.rank_tol);
  return h.digest();
}

void save_snapshots(const std::string& path, const std::vector<SnapshotSpace>& spaces) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  const std::string tmp = path + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary);
    require(static_cast<bool>(os), ErrorKind::InvalidArgument, "cannot write " + tmp);
    put(os, kCacheMagic);
    put(os, kCacheVersion);
    put(os, static_cast<std::uint64_t>(spaces.size()));
    for (const auto& s : spaces) {
      put(os, s.omega);
      put(os, static_cast<int>(s.kind));
      put(os, s.continuum);
      put(os, s.box);
      put(os, s.blocks);
      put(os, static_cast<std::int64_t>(s.vectors.rows()));
      put(os, static_cast<std::int64_t>(s.vectors.cols()));
      os.write(reinterpret_cast<const char*>(s.vectors.data()),
               static_cast<std::streamsize>(s.vectors.size() * sizeof(double)));
    }
  }
  std::filesystem::rename(tmp, path);
}

std::optional<std::vector<SnapshotSpace>> load_snapshots(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) return std::nullopt;
  std::uint32_t magic = 0, version = 0;
  std::uint64_t n = 0;
  if (!get(is, magic) || !get(is, version) || !get(is, n)) return std::nullopt;
  if (magic != kCacheMagic || version != kCacheVersion || n > (1u << 24)) return std::nullopt;
  std::vector<SnapshotSpace> out(n);
  for (auto& s : out) {
    int kind = 0;
    std::int64_t rows = 0, cols = 0;
    if (!get(is, s.omega) || !get(is, kind) || !get(is, s.continuum) || !get(is, s.box) ||
        !get(is, s.blocks) || !get(is, rows) || !get(is, cols))
      return std::nullopt;
    if (rows < 0 || cols < 0 || rows * cols > (std::int64_t{1} << 31)) return std::nullopt;
    s.kind = static_cast<SnapshotKind>(kind);
    s.vectors.resize(rows, cols);
    is.read(reinterpret_cast<char*>(s.vectors.data()),
            static_cast<std::streamsize>(rows * cols * sizeof(double)));
    if (!is) return std::nullopt;
  }
  return out;
}

Spectra compute_spectra_cached(const MeshHierarchy& mesh, const ContinuumSystem& sys,
                               const FractureMesh& fm, const SpectralOptions& opts,
                               const std::string& cache_dir) {
  if (cache_dir.empty()) return compute_spectra(mesh, sys, fm, opts);
  char name[32];
  std::snprintf(name, sizeof name, "%016llx.snap",
                static_cast<unsigned long long>(snapshot_cache_key(mesh, sys, fm, opts)));
  const std::string path = (std::filesystem::path(cache_dir) / name).string();
  auto snaps = load_snapshots(path);
  if (!snaps || snaps->size() != mesh.neighborhoods.size() * (opts.coupled ? 1 : sys.size())) {
    snaps = compute_snapshots(mesh, sys, fm, opts);
    save_snapshots(path, *snaps);
  }
  return spectra_from_snapshots(mesh, sys, fm, opts, std::move(*snaps));
}

}  // namespace msfrac
