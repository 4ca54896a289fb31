// Copyright The msfrac Authors
// SPDX-License-Identifier: Apache-2.0

#include "msfrac/local_problem.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

namespace msfrac {

LocalSystem local_system(const MeshHierarchy& mesh, const ContinuumSystem& sys,
                         const FractureMesh& fm, const NodeBox& box, int continuum) {
  require(continuum >= kCoupled && continuum < sys.size(), ErrorKind::InvalidArgument,
          "continuum index out of range");
  LocalSystem out;
  out.box = box;
  std::vector<SpMat> a, w;
  const int first = continuum == kCoupled ? 0 : continuum;
  const int last = continuum == kCoupled ? sys.size() : continuum + 1;
  for (int s = first; s < last; ++s) {
    const auto& c = sys.continua[s];
    const auto kf = sys.fracture_permeability(fm, s);
    a.push_back(assemble_form(mesh, fm, box, {FormKind::Stiffness}, c.permeability, kf));
    w.push_back(assemble_form(mesh, fm, box, {FormKind::Mass}, c.permeability, kf));
  }
  out.blocks = last - first;
  out.stiffness = block_diagonal(a);
  out.weighted_mass = block_diagonal(w);
  if (continuum == kCoupled)
    out.transfer = assemble_transfer(mesh, sys, box, false);
  else
    out.transfer = SpMat(box.size(), box.size());
  return out;
}

std::vector<int> box_boundary(const NodeBox& box) {
  std::vector<int> out;
  for (int j = box.j0; j <= box.j1; ++j)
    for (int i = box.i0; i <= box.i1; ++i)
      if (box.on_boundary(i, j)) out.push_back(box.local(i, j));
  return out;
}

std::vector<int> box_interior(const NodeBox& box) {
  std::vector<int> out;
  for (int j = box.j0; j <= box.j1; ++j)
    for (int i = box.i0; i <= box.i1; ++i)
      if (!box.on_boundary(i, j)) out.push_back(box.local(i, j));
  return out;
}

SpMat submatrix(const SpMat& a, const std::vector<int>& rows, const std::vector<int>& cols) {
  std::vector<int> rmap(a.rows(), -1), cmap(a.cols(), -1);
  for (std::size_t k = 0; k < rows.size(); ++k) rmap[rows[k]] = static_cast<int>(k);
  for (std::size_t k = 0; k < cols.size(); ++k) cmap[cols[k]] = static_cast<int>(k);
  Triplets trips;
  for (int k = 0; k < a.outerSize(); ++k)
    for (SpMat::InnerIterator it(a, k); it; ++it) {
      const int r = rmap[it.row()], c = cmap[it.col()];
      if (r >= 0 && c >= 0) trips.emplace_back(r, c, it.value());
    }
  SpMat out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
  out.setFromTriplets(trips.begin(), trips.end());
  return out;
}

struct HarmonicExtension::Factor {
  Eigen::SimplicialLDLT<SpMat> ldlt;
  Eigen::SparseLU<SpMat> lu;
  bool use_lu = false;

  Mat solve(const Mat& rhs) const {
    Mat x = use_lu ? Mat(lu.solve(rhs)) : Mat(ldlt.solve(rhs));
    if (!x.allFinite()) fail(ErrorKind::SingularLocalSystem, "local solve produced non-finite values");
    return x;
  }
};

HarmonicExtension::HarmonicExtension(const SpMat& k, const NodeBox& box, int blocks)
    : size_(blocks * box.size()), factor_(std::make_unique<Factor>()) {
  require(k.rows() == size_ && k.cols() == size_, ErrorKind::InvalidArgument,
          "local operator size does not match the box");
  const auto bnd = box_boundary(box);
  const auto inn = box_interior(box);
  for (int s = 0; s < blocks; ++s) {
    for (int l : bnd) boundary_.push_back(s * box.size() + l);
    for (int l : inn) interior_.push_back(s * box.size() + l);
  }
  if (interior_.empty()) return;
  const SpMat kii = submatrix(k, interior_, interior_);
  kib_ = submatrix(k, interior_, boundary_);
  factor_->ldlt.compute(kii);
  if (factor_->ldlt.info() != Eigen::Success) {
    factor_->use_lu = true;
    factor_->lu.compute(kii);
    if (factor_->lu.info() != Eigen::Success)
      fail(ErrorKind::SingularLocalSystem, "interior block of the local operator is singular");
  }
}

HarmonicExtension::~HarmonicExtension() = default;
HarmonicExtension::HarmonicExtension(HarmonicExtension&&) noexcept = default;
HarmonicExtension& HarmonicExtension::operator=(HarmonicExtension&&) noexcept = default;

Mat HarmonicExtension::solve_interior(const Mat& rhs) const {
  if (interior_.empty()) return Mat(0, rhs.cols());
  return factor_->solve(rhs);
}

Mat HarmonicExtension::extend(const Mat& values) const {
  require(values.rows() == static_cast<Eigen::Index>(boundary_.size()), ErrorKind::InvalidArgument,
          "boundary data size mismatch");
  Mat out = Mat::Zero(size_, values.cols());
  for (std::size_t k = 0; k < boundary_.size(); ++k) out.row(boundary_[k]) = values.row(k);
  if (interior_.empty()) return out;
  const Mat rhs = -(kib_ * values);
  const Mat x = factor_->solve(rhs);
  for (std::size_t k = 0; k < interior_.size(); ++k) out.row(interior_[k]) = x.row(k);
  return out;
}

}  // namespace msfrac
