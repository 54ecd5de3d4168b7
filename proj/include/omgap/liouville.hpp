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

// Lindblad superoperators on vectorized density matrices.
//
// Vectorization stacks columns: rho(m, n) lives at m + n * D, which is
// Eigen's native column-major layout. With that convention
// vec(A rho B) = (B^T kron A) vec(rho).

#ifndef OMGAP_LIOUVILLE_HPP
#define OMGAP_LIOUVILLE_HPP

#include <algorithm>
#include <fstream>
#include <ostream>
#include <vector>

#include "omgap/fock.hpp"
#include "omgap/linalg.hpp"

namespace omgap::liouville {

inline std::size_t vec_index(std::size_t m, std::size_t n, std::size_t dim) {
  if (m >= dim || n >= dim) throw ConfigError("vec_index out of bounds");
  return m + n * dim;
}

inline Vector vectorize(const Matrix& rho) {
  return Eigen::Map<const Vector>(rho.data(), rho.size());
}

inline Matrix devectorize(const Vector& v, Eigen::Index dim) {
  if (v.size() != dim * dim) throw ConfigError("devectorize: length is not dim^2");
  return Eigen::Map<const Matrix>(v.data(), dim, dim);
}

struct SuperOperator {
  Eigen::Index hilbert_dim = 0;
  Matrix matrix;  // side hilbert_dim^2
};

namespace detail {

// Appends scale * (outer kron inner) to the triplet list.
inline void kron_into(std::vector<Eigen::Triplet<cplx>>& trips, const SparseMatrix& outer,
                      const SparseMatrix& inner, cplx scale) {
  const Eigen::Index d = inner.rows();
  for (Eigen::Index r = 0; r < outer.outerSize(); ++r)
    for (SparseMatrix::InnerIterator a(outer, r); a; ++a)
      for (Eigen::Index q = 0; q < inner.outerSize(); ++q)
        for (SparseMatrix::InnerIterator b(inner, q); b; ++b)
          trips.emplace_back(static_cast<int>(a.row() * d + b.row()), static_cast<int>(a.col() * d + b.col()),
                             scale * a.value() * b.value());
}

inline void check_dims(const OperatorMatrix& h, const std::vector<OperatorMatrix>& jumps) {
  if (h.rows() != h.cols()) throw ConfigError("Hamiltonian must be square");
  for (const auto& l : jumps)
    if (l.rows() != h.rows() || l.cols() != h.cols()) throw ConfigError("jump operator dimension mismatch");
}

inline SparseMatrix sparse_transpose(const SparseMatrix& m) { return SparseMatrix(m.transpose()); }
inline SparseMatrix sparse_conj(const SparseMatrix& m) { return SparseMatrix(m.conjugate()); }

}  // namespace detail

/// Sparse superoperator of rho -> -i[H, rho] + sum (L rho L^+ - {L^+L, rho}/2).
inline SparseMatrix liouvillian_sparse(const OperatorMatrix& h, const std::vector<OperatorMatrix>& jumps) {
  detail::check_dims(h, jumps);
  const Eigen::Index d = h.rows();
  SparseMatrix id(d, d);
  id.setIdentity();
  std::vector<Eigen::Triplet<cplx>> trips;
  detail::kron_into(trips, id, h.sparse(), -kI);
  detail::kron_into(trips, detail::sparse_transpose(h.sparse()), id, kI);
  for (const auto& l : jumps) {
    const SparseMatrix ldl = SparseMatrix(l.sparse().adjoint() * l.sparse());
    detail::kron_into(trips, detail::sparse_conj(l.sparse()), l.sparse(), 1.0);
    detail::kron_into(trips, id, ldl, -0.5);
    detail::kron_into(trips, detail::sparse_transpose(ldl), id, -0.5);
  }
  SparseMatrix s(d * d, d * d);
  s.setFromTriplets(trips.begin(), trips.end());
  return s;
}

inline SuperOperator build_superoperator(const OperatorMatrix& h, const std::vector<OperatorMatrix>& jumps) {
  return {h.rows(), Matrix(liouvillian_sparse(h, jumps))};
}

/// Heisenberg-picture generator A -> -i[A, H] + sum (L^+ A L - {L^+L, A}/2).
inline SuperOperator adjoint_liouvillian(const OperatorMatrix& h, const std::vector<OperatorMatrix>& jumps) {
  detail::check_dims(h, jumps);
  const Eigen::Index d = h.rows();
  SparseMatrix id(d, d);
  id.setIdentity();
  std::vector<Eigen::Triplet<cplx>> trips;
  detail::kron_into(trips, detail::sparse_transpose(h.sparse()), id, -kI);
  detail::kron_into(trips, id, h.sparse(), kI);
  for (const auto& l : jumps) {
    const SparseMatrix ldl = SparseMatrix(l.sparse().adjoint() * l.sparse());
    detail::kron_into(trips, detail::sparse_transpose(l.sparse()), SparseMatrix(l.sparse().adjoint()), 1.0);
    detail::kron_into(trips, id, ldl, -0.5);
    detail::kron_into(trips, detail::sparse_transpose(ldl), id, -0.5);
  }
  SparseMatrix s(d * d, d * d);
  s.setFromTriplets(trips.begin(), trips.end());
  return {d, Matrix(s)};
}

/// Matrix-free Lindbladian, reusable across many applications.
class LindbladGenerator {
 public:
  LindbladGenerator(const OperatorMatrix& h, const std::vector<OperatorMatrix>& jumps) {
    detail::check_dims(h, jumps);
    dim_ = h.rows();
    SparseMatrix decay(dim_, dim_);
    for (const auto& l : jumps) {
      jumps_.push_back(l.sparse());
      jumps_adj_.push_back(SparseMatrix(l.sparse().adjoint()));
      decay += SparseMatrix(jumps_adj_.back() * jumps_.back());
    }
    // H_eff = H - (i/2) sum L^+ L, so L(rho) = -i(H_eff rho - rho H_eff^+) + sum L rho L^+.
    heff_ = SparseMatrix(h.sparse() - cplx(0.0, 0.5) * decay);
    heff_adj_ = SparseMatrix(heff_.adjoint());
  }

  Eigen::Index dim() const { return dim_; }

  Matrix apply(const Matrix& rho) const {
    if (rho.rows() != dim_ || rho.cols() != dim_) throw ConfigError("density matrix dimension mismatch");
    Matrix out = -kI * (heff_ * rho);
    out += kI * (rho * heff_adj_);
    for (std::size_t k = 0; k < jumps_.size(); ++k) {
      Matrix lr = jumps_[k] * rho;
      out += lr * jumps_adj_[k];
    }
    return out;
  }

 private:
  Eigen::Index dim_ = 0;
  SparseMatrix heff_, heff_adj_;
  std::vector<SparseMatrix> jumps_, jumps_adj_;
};

inline Matrix apply_liouvillian(const OperatorMatrix& h, const std::vector<OperatorMatrix>& jumps,
                                const Matrix& rho) {
  return LindbladGenerator(h, jumps).apply(rho);
}

inline constexpr double kDefaultZeroTol = 1e-8;

/// Unique steady state, Hermitized and normalized to unit trace. `tol` is
/// relative to the spectral radius of the superoperator.
inline Matrix steady_state(const SuperOperator& s, double tol = kDefaultZeroTol) {
  const Vector v = linalg::null_vector(s.matrix, tol);
  Matrix rho = devectorize(v, s.hilbert_dim);
  rho = 0.5 * (rho + rho.adjoint()).eval();
  const cplx tr = rho.trace();
  if (std::abs(tr) < 1e-14) throw NumericalError("steady-state null vector is traceless");
  rho /= tr;
  return rho;
}

/// Expansion of an operator in right eigenmodes, c_a = <l_a, O> / <l_a, r_a>.
struct ModeExpansion {
  Vector coefficients;
  Vector eigenvalues;
  const Matrix* right = nullptr;  // columns are vectorized right modes
  Eigen::Index hilbert_dim = 0;
  double reconstruction_residual = 0.0;

  /// sum_a c_a exp(lambda_a t) rho_a.
  Matrix evolve(double t) const {
    Vector w = coefficients.array() * (eigenvalues.array() * t).exp();
    return devectorize(*right * w, hilbert_dim);
  }
  Matrix reconstruct() const { return devectorize(*right * coefficients, hilbert_dim); }
};

/// `es` must outlive the returned expansion and carry left and right vectors.
inline ModeExpansion mode_expansion(const linalg::EigenSystem& es, const Matrix& op) {
  if (!es.right || !es.left) throw ConfigError("mode_expansion needs left and right eigenvectors");
  if (es.degraded) throw NumericalError("eigensystem is flagged as ill-conditioned (near an exceptional point)");
  const Eigen::Index n = es.right->rows();
  const Eigen::Index d = static_cast<Eigen::Index>(std::llround(std::sqrt(double(n))));
  if (d * d != n || op.rows() != d || op.cols() != d) throw ConfigError("operator does not match eigensystem");
  const Vector o = vectorize(op);
  ModeExpansion ex;
  ex.hilbert_dim = d;
  ex.eigenvalues = es.values;
  ex.right = &*es.right;
  ex.coefficients.resize(n);
  for (Eigen::Index a = 0; a < n; ++a) {
    const cplx norm = es.left->col(a).dot(es.right->col(a));
    if (std::abs(norm) < 1e-12 * es.left->col(a).norm())
      throw NumericalError("vanishing left/right normalizer: exceptional point");
    ex.coefficients[a] = es.left->col(a).dot(o) / norm;
  }
  ex.reconstruction_residual = (vectorize(ex.reconstruct()) - o).norm() / std::max(o.norm(), 1e-300);
  return ex;
}

/// Writes `re,im` rows at 17 significant digits.
/// Steady-state change of a truncated chain under cutoff -> cutoff + extra:
/// the largest elementwise difference after embedding the smaller state into
/// the larger basis (states absent from the small basis count as zero).
struct TruncationDrift {
  double max_abs_diff = 0.0;
  double trace_outside = 0.0;  // weight of the large state beyond the small cutoff
};

inline TruncationDrift truncation_drift(const ModelParams& p, Model model, int extra = 2) {
  if (extra < 1) throw ConfigError("truncation_drift needs extra >= 1");
  const FockBasis small = build_basis(BasisSpec::truncated(p.sites, p.cutoff));
  const FockBasis large = build_basis(BasisSpec::truncated(p.sites, p.cutoff + extra));
  auto solve = [&](const FockBasis& b) {
    return steady_state(build_superoperator(hamiltonian(b, p), jump_set(b, p, model)));
  };
  const Matrix rs = solve(small);
  const Matrix rl = solve(large);
  std::vector<std::size_t> map(small.dim());
  for (std::size_t i = 0; i < small.dim(); ++i) map[i] = large.index_of(small.state(i));
  Matrix embedded = Matrix::Zero(rl.rows(), rl.cols());
  for (std::size_t i = 0; i < small.dim(); ++i)
    for (std::size_t j = 0; j < small.dim(); ++j) embedded(map[i], map[j]) = rs(i, j);
  TruncationDrift d;
  d.max_abs_diff = (rl - embedded).cwiseAbs().maxCoeff();
  double inside = 0.0;
  for (std::size_t i = 0; i < small.dim(); ++i) inside += rl(map[i], map[i]).real();
  d.trace_outside = std::max(0.0, 1.0 - inside);
  return d;
}

inline void write_spectrum_csv(std::ostream& os, const Spectrum& s) {
  os << "re,im\n";
  for (const auto& z : s) os << format_double(z.real()) << ',' << format_double(z.imag()) << '\n';
}

inline void write_spectrum_csv(const std::string& path, const Spectrum& s) {
  std::ofstream f(path);
  if (!f) throw ConfigError("cannot open " + path + " for writing");
  write_spectrum_csv(f, s);
}

}  // namespace omgap::liouville

#endif  // OMGAP_LIOUVILLE_HPP
