// Copyright The msfrac Authors
// SPDX-License-Identifier: Apache-2.0

// Dense brute-force reference implementations used by the tests. Nothing here
// calls into the library's assembly or the Eigen decompositions; element
// matrices come from closed-form tensor products and the linear algebra is
// hand-rolled.

#pragma once

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "msfrac/grid.hpp"

namespace oracle {

using msfrac::Mat;
using msfrac::Vec;

// 1-D linear element matrices on a segment of length h.
inline double k1(double h, int a, int b) { return (a == b ? 1.0 : -1.0) / h; }
inline double m1(double h, int a, int b) { return h / 6.0 * (a == b ? 2.0 : 1.0); }

struct Edge {
  int a, b;  // global node ids of a fine-grid structured mesh
  double coef_k, coef_m;
};

/// Q1 stiffness and mass on an nx x ny structured grid of hx x hy cells with
/// per-cell coefficients, plus 1-D fracture elements on edges. Node numbering
/// is j * (nx + 1) + i.
struct Dense {
  Mat k, m;
};

inline Dense assemble(int nx, int ny, double hx, double hy, const std::vector<double>& kappa,
                      const std::vector<double>& c, const std::vector<Edge>& edges) {
  const int nn = (nx + 1) * (ny + 1);
  Dense d{Mat::Zero(nn, nn), Mat::Zero(nn, nn)};
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const int cell = j * nx + i;
      for (int ay = 0; ay < 2; ++ay)
        for (int ax = 0; ax < 2; ++ax)
          for (int by = 0; by < 2; ++by)
            for (int bx = 0; bx < 2; ++bx) {
              const int na = (j + ay) * (nx + 1) + i + ax;
              const int nb = (j + by) * (nx + 1) + i + bx;
              const double kk = k1(hx, ax, bx) * m1(hy, ay, by) + m1(hx, ax, bx) * k1(hy, ay, by);
              d.k(na, nb) += kappa[cell] * kk;
              d.m(na, nb) += c[cell] * m1(hx, ax, bx) * m1(hy, ay, by);
            }
    }
  for (const auto& e : edges) {
    const int ia = e.a % (nx + 1), ja = e.a / (nx + 1);
    const int ib = e.b % (nx + 1), jb = e.b / (nx + 1);
    const double len = std::hypot((ib - ia) * hx, (jb - ja) * hy);
    const int n[2] = {e.a, e.b};
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) {
        d.k(n[a], n[b]) += e.coef_k * k1(len, a, b);
        d.m(n[a], n[b]) += e.coef_m * m1(len, a, b);
      }
  }
  return d;
}

/// Gaussian elimination with partial pivoting; columns of b are solved at once.
inline Mat solve(Mat a, Mat b) {
  const int n = static_cast<int>(a.rows());
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(a(r, col)) > std::abs(a(piv, col))) piv = r;
    if (piv != col) {
      a.row(piv).swap(a.row(col));
      b.row(piv).swap(b.row(col));
    }
    for (int r = col + 1; r < n; ++r) {
      const double f = a(r, col) / a(col, col);
      if (f == 0.0) continue;
      for (int k = col; k < n; ++k) a(r, k) -= f * a(col, k);
      for (int k = 0; k < b.cols(); ++k) b(r, k) -= f * b(col, k);
    }
  }
  for (int col = n - 1; col >= 0; --col) {
    for (int k = 0; k < b.cols(); ++k) {
      double s = b(col, k);
      for (int r = col + 1; r < n; ++r) s -= a(col, r) * b(r, k);
      b(col, k) = s / a(col, col);
    }
  }
  return b;
}

inline Vec solve(const Mat& a, const Vec& b) { return solve(a, Mat(b)).col(0); }

/// Cyclic Jacobi eigenvalues of a symmetric matrix, ascending.
inline std::vector<double> jacobi_eigenvalues(Mat a, int sweeps = 100) {
  const int n = static_cast<int>(a.rows());
  for (int sweep = 0; sweep < sweeps; ++sweep) {
    double off = 0.0, diag = 0.0;
    for (int p = 0; p < n; ++p) {
      diag += a(p, p) * a(p, p);
      for (int q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    }
    if (off <= 1e-32 * diag) break;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) {
        if (a(p, q) == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
        for (int k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
      }
  }
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) out[i] = a(i, i);
  std::sort(out.begin(), out.end());
  return out;
}

/// Lower Cholesky factor of an SPD matrix.
inline Mat cholesky(const Mat& s) {
  const int n = static_cast<int>(s.rows());
  Mat l = Mat::Zero(n, n);
  for (int j = 0; j < n; ++j) {
    double d = s(j, j);
    for (int k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    l(j, j) = std::sqrt(d);
    for (int i = j + 1; i < n; ++i) {
      double v = s(i, j);
      for (int k = 0; k < j; ++k) v -= l(i, k) * l(j, k);
      l(i, j) = v / l(j, j);
    }
  }
  return l;
}

/// Eigenvalues of A x = lambda S x through C = L^{-1} A L^{-T}.
inline std::vector<double> generalized_eigenvalues(const Mat& a, const Mat& s) {
  const Mat l = cholesky(s);
  const int n = static_cast<int>(a.rows());
  // Forward substitution of L Y = A, then L C^T = Y^T.
  auto lower_solve = [&](const Mat& b) {
    Mat x = b;
    for (int c = 0; c < b.cols(); ++c)
      for (int i = 0; i < n; ++i) {
        double v = x(i, c);
        for (int k = 0; k < i; ++k) v -= l(i, k) * x(k, c);
        x(i, c) = v / l(i, i);
      }
    return x;
  };
  const Mat y = lower_solve(a);
  Mat c = lower_solve(Mat(y.transpose()));
  c = 0.5 * (c + c.transpose()).eval();
  return jacobi_eigenvalues(c);
}

/// Harmonic extensions of unit boundary deltas: one column per boundary index,
/// in the order given.
inline Mat extensions(const Mat& k, const std::vector<int>& boundary) {
  const int n = static_cast<int>(k.rows());
  std::vector<char> on(n, 0);
  for (int b : boundary) on[b] = 1;
  std::vector<int> interior;
  for (int i = 0; i < n; ++i)
    if (!on[i]) interior.push_back(i);
  const int ni = static_cast<int>(interior.size()), nb = static_cast<int>(boundary.size());
  Mat kii(ni, ni), kib(ni, nb);
  for (int r = 0; r < ni; ++r) {
    for (int c = 0; c < ni; ++c) kii(r, c) = k(interior[r], interior[c]);
    for (int c = 0; c < nb; ++c) kib(r, c) = k(interior[r], boundary[c]);
  }
  const Mat xi = ni > 0 ? solve(kii, Mat(-kib)) : Mat(0, nb);
  Mat out = Mat::Zero(n, nb);
  for (int c = 0; c < nb; ++c) {
    out(boundary[c], c) = 1.0;
    for (int r = 0; r < ni; ++r) out(interior[r], c) = xi(r, c);
  }
  return out;
}

struct OdeQ {
  double q = 0.0;
  double mean = 0.0;
};

/// Q(t) of the relaxation from a dense RK4 integration of M_FF e' = -A_FF e,
/// e = 1 - xi on the free nodes, e(0) = 1.
inline OdeQ rve_ode(int nx, int ny, double hx, double hy, double c, double kappa,
                    const std::vector<char>& fixed, double t) {
  const int nn = (nx + 1) * (ny + 1);
  const std::vector<double> cf(nx * ny, c), kf(nx * ny, kappa), one(nx * ny, 1.0);
  const auto d = assemble(nx, ny, hx, hy, kf, cf, {});
  const Mat vol = assemble(nx, ny, hx, hy, one, one, {}).m;
  std::vector<int> free;
  for (int i = 0; i < nn; ++i)
    if (!fixed[i]) free.push_back(i);
  const int nf = static_cast<int>(free.size());
  Mat m(nf, nf), a(nf, nf);
  Vec wc(nf), wv(nf);
  for (int r = 0; r < nf; ++r) {
    wc[r] = d.m.col(free[r]).sum();
    wv[r] = vol.col(free[r]).sum();
    for (int s = 0; s < nf; ++s) {
      m(r, s) = d.m(free[r], free[s]);
      a(r, s) = d.k(free[r], free[s]);
    }
  }
  const Mat g = solve(m, Mat(-a));  // e' = G e
  const int steps = 20000;
  const double h = t / steps;
  Vec e = Vec::Ones(nf);
  for (int n = 0; n < steps; ++n) {
    const Vec k1 = g * e, k2 = g * (e + 0.5 * h * k1), k3 = g * (e + 0.5 * h * k2), k4 = g * (e + h * k3);
    e += h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
  }
  const double area = nx * hx * ny * hy;
  const double flux = -wc.dot(g * e) / area;
  OdeQ out;
  out.mean = 1.0 - wv.dot(e) / area;
  out.q = flux / (1.0 - out.mean);
  return out;
}

inline double rel_diff(const Mat& a, const Mat& b) {
  const double scale = std::max(a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff());
  return scale == 0.0 ? 0.0 : (a - b).cwiseAbs().maxCoeff() / scale;
}

}  // namespace oracle
