// Copyright 2026 The omgap Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Dense non-Hermitian eigendecomposition on top of LAPACK zgeev.

#ifndef OMGAP_LINALG_HPP
#define OMGAP_LINALG_HPP

#ifndef LAPACK_COMPLEX_CPP
#define LAPACK_COMPLEX_CPP
#endif
#include <lapacke.h>

#include <algorithm>
#include <numeric>
#include <optional>

#include "omgap/common.hpp"

namespace omgap::linalg {

inline constexpr std::size_t kDefaultMaxEigDim = 5000;
inline constexpr double kResidualBound = 1e-8;

struct EigOptions {
  bool vectors = false;
  std::size_t max_dim = kDefaultMaxEigDim;
};

/// Eigenvalues sorted by (Re descending, Im ascending, original index), with
/// optional right eigenvectors (unit-norm columns) and left eigenvectors.
///
/// Left vectors are the rows of V^{-1}, conjugated into columns, so that
/// left.col(a).dot(right.col(b)) == delta_ab within roundoff even inside
/// degenerate eigenspaces. Each left column w satisfies A^H w = conj(lambda) w.
struct EigenSystem {
  Vector values;
  std::optional<Matrix> right;
  std::optional<Matrix> left;
  /// max |A v - lambda v| / |A|_F over returned pairs (0 without vectors).
  double residual_max = 0.0;
  /// Set when eigenvectors miss the residual bound or V is numerically
  /// singular (near an exceptional point). Eigenvalues remain usable.
  bool degraded = false;

  std::size_t size() const { return static_cast<std::size_t>(values.size()); }
  Spectrum spectrum() const { return Spectrum(values.data(), values.data() + values.size()); }
};

/// Deterministic ordering used by every spectrum in the library.
inline bool spectral_less(const cplx& a, const cplx& b) {
  if (a.real() != b.real()) return a.real() > b.real();
  return a.imag() < b.imag();
}

inline void sort_spectrum(Spectrum& s) { std::stable_sort(s.begin(), s.end(), spectral_less); }

namespace detail {

inline void check_finite(const Matrix& a) {
  if (!a.allFinite()) throw NumericalError("matrix has non-finite entries");
}

}  // namespace detail

inline EigenSystem eig_general(const Matrix& a, const EigOptions& opt = {}) {
  const Eigen::Index n = a.rows();
  if (a.cols() != n) throw ConfigError("eig_general needs a square matrix");
  if (static_cast<std::size_t>(n) > opt.max_dim)
    throw ConfigError("matrix side " + std::to_string(n) + " exceeds the eigensolver limit " +
                      std::to_string(opt.max_dim));
  detail::check_finite(a);
  EigenSystem out;
  if (n == 0) return out;

  Matrix work = a;
  Vector w(n);
  Matrix vr;
  if (opt.vectors) vr.resize(n, n);
  const lapack_int info = LAPACKE_zgeev(
      LAPACK_COL_MAJOR, 'N', opt.vectors ? 'V' : 'N', static_cast<lapack_int>(n),
      reinterpret_cast<lapack_complex_double*>(work.data()), static_cast<lapack_int>(n),
      reinterpret_cast<lapack_complex_double*>(w.data()), nullptr, 1,
      opt.vectors ? reinterpret_cast<lapack_complex_double*>(vr.data()) : nullptr,
      static_cast<lapack_int>(opt.vectors ? n : 1));
  if (info < 0) throw NumericalError("zgeev: invalid argument " + std::to_string(-info));
  if (info > 0) {
    throw NumericalError("zgeev: QR iteration failed to converge; " + std::to_string(n - info) +
                         " eigenvalues converged");
  }

  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index x, Eigen::Index y) { return spectral_less(w[x], w[y]); });
  out.values.resize(n);
  for (Eigen::Index k = 0; k < n; ++k) out.values[k] = w[order[k]];
  if (!opt.vectors) return out;

  Matrix right(n, n);
  for (Eigen::Index k = 0; k < n; ++k) right.col(k) = vr.col(order[k]).normalized();

  const double anorm = std::max(a.norm(), 1e-300);
  double res = 0.0;
  for (Eigen::Index k = 0; k < n; ++k)
    res = std::max(res, (a * right.col(k) - out.values[k] * right.col(k)).norm() / anorm);
  out.residual_max = res;

  Eigen::PartialPivLU<Matrix> lu(right);
  const double rcond = lu.rcond();
  Matrix inv = lu.inverse();
  out.left = inv.adjoint();
  out.right = std::move(right);
  out.degraded = !(res <= kResidualBound) || !(rcond > 1e-13) || !out.left->allFinite();
  return out;
}

/// Unit-norm v with A v ~ 0. `tol` is relative to the spectral radius of A:
/// exactly one eigenvalue must satisfy |lambda| < tol * rho(A).
inline Vector null_vector(const Matrix& a, double tol) {
  const Eigen::Index n = a.rows();
  if (a.cols() != n || n == 0) throw ConfigError("null_vector needs a nonempty square matrix");
  EigenSystem es = eig_general(a, {.vectors = true});
  const double scale = std::max(spectral_radius(es.spectrum()), 1e-300);
  std::vector<Eigen::Index> near;
  for (Eigen::Index k = 0; k < n; ++k)
    if (std::abs(es.values[k]) < tol * scale) near.push_back(k);
  if (near.empty()) throw NumericalError("no eigenvalue within tolerance of zero");
  if (near.size() > 1)
    throw NumericalError("degenerate null space: " + std::to_string(near.size()) +
                         " eigenvalues within tolerance of zero");
  Vector v = es.right->col(near[0]);
  // Two steps of inverse iteration sharpen the vector against roundoff.
  const double shift = 1e-12 * scale;
  Eigen::PartialPivLU<Matrix> lu(a - (es.values[near[0]] + shift) * Matrix::Identity(n, n));
  for (int it = 0; it < 2; ++it) {
    Vector next = lu.solve(v);
    if (!next.allFinite() || next.norm() == 0.0) break;
    v = next.normalized();
  }
  return v;
}

}  // namespace omgap::linalg

#endif  // OMGAP_LINALG_HPP
