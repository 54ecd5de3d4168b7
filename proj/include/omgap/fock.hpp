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

// Truncated bosonic Fock bases and sparse Hamiltonian / jump operators for
// the dissipative Bose-Hubbard ring.

#ifndef OMGAP_FOCK_HPP
#define OMGAP_FOCK_HPP

#include <cmath>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "omgap/common.hpp"

namespace omgap {

/// Which processes are present. Model 1 has bond dissipation and dephasing
/// (strong U(1)); Model 2 has bond dissipation, pumping, one- and two-body
/// loss (weak U(1)).
enum class Model { bond_dephasing = 1, pump_loss = 2 };

inline Model model_from_int(int m) {
  if (m == 1) return Model::bond_dephasing;
  if (m == 2) return Model::pump_loss;
  throw ConfigError("model must be 1 or 2, got " + std::to_string(m));
}

struct ModelParams {
  double J = 1.0;
  double U = 0.0;
  double mu = 0.0;
  double kappa = 1.0;
  double gamma = 0.0;
  double r_p = 0.0;
  double r_l = 0.0;
  double r_t = 0.0;
  int sites = 2;
  int particles = 1;     // exact Model 1 only
  double density = 0.5;  // mean-field initial density
  int cutoff = 20;       // single-site dimension d_max

  bool conserves_number() const { return r_p == 0.0 && r_l == 0.0 && r_t == 0.0; }

  /// Checks the generic bounds; throws ConfigError.
  void validate() const {
    if (!(J > 0.0)) throw ConfigError("J must be > 0");
    for (auto [name, v] : {std::pair{"kappa", kappa}, {"gamma", gamma}, {"r_p", r_p},
                           {"r_l", r_l}, {"r_t", r_t}}) {
      if (!(v >= 0.0)) throw ConfigError(std::string(name) + " must be >= 0");
    }
    if (sites < 1) throw ConfigError("sites must be >= 1");
    if (cutoff < 2) throw ConfigError("cutoff (d_max) must be >= 2");
  }

  /// Generic bounds plus the model-specific rate constraints.
  void validate(Model m) const {
    validate();
    if (m == Model::bond_dephasing && !conserves_number())
      throw ConfigError("model 1 requires r_p = r_l = r_t = 0");
    if (m == Model::pump_loss) {
      if (gamma != 0.0) throw ConfigError("model 2 requires gamma = 0");
      if (!(r_t > 0.0)) throw ConfigError("model 2 requires r_t > 0");
    }
  }
};

// ---------------------------------------------------------------------------
// Bases

using Occupation = std::vector<int>;

enum class BasisMode { single_site, chain_fixed_n, chain_truncated };

struct BasisSpec {
  BasisMode mode = BasisMode::single_site;
  int sites = 1;
  int particles = 0;
  int cutoff = 2;

  static BasisSpec single_site(int cutoff) { return {BasisMode::single_site, 1, 0, cutoff}; }
  static BasisSpec fixed_n(int sites, int particles) {
    return {BasisMode::chain_fixed_n, sites, particles, particles + 1};
  }
  static BasisSpec truncated(int sites, int cutoff) {
    return {BasisMode::chain_truncated, sites, 0, cutoff};
  }
};

inline constexpr std::size_t kDefaultMaxBasisDim = 10000;

/// Ordered, indexed list of occupation tuples.
///
/// single_site and chain_truncated enumerate in ascending lexicographic order
/// (so a single-site index equals the occupation); chain_fixed_n enumerates
/// in descending lexicographic order, starting from (N, 0, ..., 0).
class FockBasis {
 public:
  FockBasis() = default;

  const BasisSpec& spec() const { return spec_; }
  std::size_t dim() const { return states_.size(); }
  int sites() const { return spec_.sites; }
  /// Largest occupation allowed on a site, plus one.
  int local_dim() const { return spec_.cutoff; }
  bool conserves_number() const { return spec_.mode == BasisMode::chain_fixed_n; }

  const Occupation& state(std::size_t i) const { return states_.at(i); }
  const std::vector<Occupation>& states() const { return states_; }

  std::optional<std::size_t> find(const Occupation& occ) const {
    auto it = index_.find(occ);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  std::size_t index_of(const Occupation& occ) const {
    auto i = find(occ);
    if (!i) throw ConfigError("occupation pattern is not in the basis");
    return *i;
  }

 private:
  friend FockBasis build_basis(const BasisSpec&, std::size_t);
  BasisSpec spec_;
  std::vector<Occupation> states_;
  std::map<Occupation, std::size_t> index_;
};

namespace detail {

inline double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return std::round(r);
}

inline void enumerate_fixed_n(int site, int remaining, Occupation& cur, std::vector<Occupation>& out) {
  const int L = static_cast<int>(cur.size());
  if (site == L - 1) {
    cur[site] = remaining;
    out.push_back(cur);
    return;
  }
  for (int k = remaining; k >= 0; --k) {
    cur[site] = k;
    enumerate_fixed_n(site + 1, remaining - k, cur, out);
  }
}

}  // namespace detail

/// Dimension a basis spec would have, as a double so overflow is detectable.
inline double basis_dimension(const BasisSpec& s) {
  switch (s.mode) {
    case BasisMode::single_site: return s.cutoff;
    case BasisMode::chain_fixed_n: return detail::binomial(s.sites + s.particles - 1, s.particles);
    case BasisMode::chain_truncated: return std::pow(double(s.cutoff), s.sites);
  }
  return 0.0;
}

inline FockBasis build_basis(const BasisSpec& spec, std::size_t max_dim = kDefaultMaxBasisDim) {
  if (spec.sites < 1) throw ConfigError("basis needs at least one site");
  if (spec.mode == BasisMode::chain_fixed_n && spec.particles < 0)
    throw ConfigError("particle number must be >= 0");
  if (spec.mode != BasisMode::chain_fixed_n && spec.cutoff < 1)
    throw ConfigError("cutoff must be >= 1");
  const double dim = basis_dimension(spec);
  if (dim > double(max_dim)) {
    throw ConfigError("basis dimension " + format_double(dim) + " exceeds the limit of " +
                      std::to_string(max_dim) + " states");
  }

  FockBasis b;
  b.spec_ = spec;
  if (spec.mode == BasisMode::chain_fixed_n) {
    b.spec_.cutoff = spec.particles + 1;
    Occupation cur(spec.sites, 0);
    detail::enumerate_fixed_n(0, spec.particles, cur, b.states_);
  } else {
    const int L = spec.mode == BasisMode::single_site ? 1 : spec.sites;
    b.spec_.sites = L;
    Occupation cur(L, 0);
    const auto n = static_cast<std::size_t>(dim);
    b.states_.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
      b.states_.push_back(cur);
      for (int s = L - 1; s >= 0; --s) {  // mixed-radix increment, last site fastest
        if (++cur[s] < spec.cutoff) break;
        cur[s] = 0;
      }
    }
  }
  for (std::size_t i = 0; i < b.states_.size(); ++i) b.index_.emplace(b.states_[i], i);
  return b;
}

// ---------------------------------------------------------------------------
// Operators

/// Sparse complex operator between two Fock bases (square when they agree).
/// Entries are kept in (row, col) order with duplicates merged.
class OperatorMatrix {
 public:
  OperatorMatrix() = default;
  explicit OperatorMatrix(SparseMatrix m) : m_(std::move(m)) { m_.makeCompressed(); }

  static OperatorMatrix identity(std::size_t n) {
    SparseMatrix s(n, n);
    s.setIdentity();
    return OperatorMatrix(std::move(s));
  }

  Eigen::Index rows() const { return m_.rows(); }
  Eigen::Index cols() const { return m_.cols(); }
  Eigen::Index dim() const { return m_.rows(); }
  Eigen::Index nonzeros() const { return m_.nonZeros(); }
  const SparseMatrix& sparse() const { return m_; }
  Matrix dense() const { return Matrix(m_); }
  cplx coeff(Eigen::Index r, Eigen::Index c) const { return m_.coeff(r, c); }

  struct Entry {
    Eigen::Index row, col;
    cplx value;
  };
  std::vector<Entry> entries() const {
    std::vector<Entry> out;
    out.reserve(m_.nonZeros());
    for (Eigen::Index r = 0; r < m_.outerSize(); ++r)
      for (SparseMatrix::InnerIterator it(m_, r); it; ++it) out.push_back({it.row(), it.col(), it.value()});
    return out;
  }

  OperatorMatrix adjoint() const { return OperatorMatrix(SparseMatrix(m_.adjoint())); }

  friend OperatorMatrix operator*(const OperatorMatrix& a, const OperatorMatrix& b) {
    if (a.cols() != b.rows()) throw ConfigError("operator product dimension mismatch");
    return OperatorMatrix(SparseMatrix(a.m_ * b.m_));
  }
  friend OperatorMatrix operator+(const OperatorMatrix& a, const OperatorMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw ConfigError("operator sum dimension mismatch");
    return OperatorMatrix(SparseMatrix(a.m_ + b.m_));
  }
  friend OperatorMatrix operator-(const OperatorMatrix& a, const OperatorMatrix& b) {
    return a + (-1.0) * b;
  }
  friend OperatorMatrix operator*(cplx s, const OperatorMatrix& a) { return OperatorMatrix(SparseMatrix(s * a.m_)); }

 private:
  SparseMatrix m_;
};

/// One creation or annihilation operator at a site.
struct Ladder {
  int site;
  bool create;
};

/// Matrix of the operator word w[0] w[1] ... w[k-1] mapping states of `from`
/// into `to`. Amplitudes that would exceed the target cutoff are dropped,
/// which equals the product of truncated single-site matrices.
inline OperatorMatrix ladder_product(const FockBasis& from, const FockBasis& to, std::span<const Ladder> word) {
  std::vector<Eigen::Triplet<cplx>> trips;
  const int cap = to.conserves_number() ? std::numeric_limits<int>::max() : to.local_dim() - 1;
  Occupation occ;
  for (std::size_t c = 0; c < from.dim(); ++c) {
    occ = from.state(c);
    double amp = 1.0;
    bool alive = true;
    for (auto it = word.rbegin(); it != word.rend() && alive; ++it) {
      int& nu = occ.at(it->site);
      if (it->create) {
        if (nu + 1 > cap) {
          alive = false;
        } else {
          amp *= std::sqrt(double(nu + 1));
          ++nu;
        }
      } else {
        if (nu == 0) {
          alive = false;
        } else {
          amp *= std::sqrt(double(nu));
          --nu;
        }
      }
    }
    if (!alive) continue;
    if (auto r = to.find(occ)) trips.emplace_back(static_cast<int>(*r), static_cast<int>(c), amp);
  }
  SparseMatrix m(to.dim(), from.dim());
  m.setFromTriplets(trips.begin(), trips.end());
  return OperatorMatrix(std::move(m));
}

inline OperatorMatrix ladder_product(const FockBasis& basis, std::initializer_list<Ladder> word) {
  return ladder_product(basis, basis, std::span<const Ladder>(word.begin(), word.size()));
}

enum class SiteOp { annihilate, create, number };

/// b_j, b_j^dagger or n_j. In chain_fixed_n mode `annihilate` maps the
/// N-particle basis into the (N-1)-particle basis and `create` is its
/// adjoint; products that conserve N should be built with ladder_product.
inline OperatorMatrix site_operator(const FockBasis& basis, int j, SiteOp kind) {
  if (j < 0 || j >= basis.sites()) throw ConfigError("site index " + std::to_string(j) + " out of range");
  if (kind == SiteOp::number) return ladder_product(basis, {{j, true}, {j, false}});
  if (basis.conserves_number()) {
    const auto& s = basis.spec();
    if (s.particles == 0) throw ConfigError("cannot annihilate in the zero-particle sector");
    const FockBasis lower = build_basis(BasisSpec::fixed_n(s.sites, s.particles - 1));
    const Ladder a{j, false};
    OperatorMatrix b = ladder_product(basis, lower, std::span<const Ladder>(&a, 1));
    return kind == SiteOp::annihilate ? b : b.adjoint();
  }
  OperatorMatrix b = ladder_product(basis, {{j, false}});
  return kind == SiteOp::annihilate ? b : b.adjoint();
}

inline OperatorMatrix total_number(const FockBasis& basis) {
  OperatorMatrix n = ladder_product(basis, {{0, true}, {0, false}});
  for (int j = 1; j < basis.sites(); ++j) n = n + ladder_product(basis, {{j, true}, {j, false}});
  return n;
}

/// Ring Hamiltonian with periodic boundary conditions. The sum runs over
/// j = 1..L literally, so for L = 2 the single bond is counted twice.
inline OperatorMatrix hamiltonian(const FockBasis& basis, const ModelParams& p) {
  const int L = basis.sites();
  OperatorMatrix h(SparseMatrix(basis.dim(), basis.dim()));
  for (int j = 0; j < L; ++j) {
    if (L > 1) {
      const int k = (j + 1) % L;
      h = h + cplx(-p.J) * (ladder_product(basis, {{j, true}, {k, false}}) +
                            ladder_product(basis, {{k, true}, {j, false}}));
    }
    h = h + cplx(0.5 * p.U) * ladder_product(basis, {{j, true}, {j, true}, {j, false}, {j, false}});
    h = h + cplx(-p.mu) * ladder_product(basis, {{j, true}, {j, false}});
  }
  return h;
}

/// Jump operators, bond terms first and then the on-site channels site by
/// site: Model 1 gives {L_b,j} then {L_d,j}; Model 2 gives {L_b,j}, {L_p,j},
/// {L_l,j}, {L_t,j}. Bond terms are omitted on a single site.
inline std::vector<OperatorMatrix> jump_set(const FockBasis& basis, const ModelParams& p, Model model) {
  p.validate(model);
  if (model == Model::pump_loss && basis.conserves_number())
    throw ConfigError("model 2 does not conserve N; use a chain_truncated basis");
  const int L = basis.sites();
  std::vector<OperatorMatrix> out;
  if (L > 1) {
    const cplx s = std::sqrt(p.kappa);
    for (int j = 0; j < L; ++j) {
      const int k = (j + 1) % L;
      // (b_j^+ + b_k^+)(b_j - b_k)
      OperatorMatrix lb = ladder_product(basis, {{j, true}, {j, false}}) -
                          ladder_product(basis, {{j, true}, {k, false}}) +
                          ladder_product(basis, {{k, true}, {j, false}}) -
                          ladder_product(basis, {{k, true}, {k, false}});
      out.push_back(s * lb);
    }
  }
  auto per_site = [&](double rate, auto&& make) {
    const cplx s = std::sqrt(rate);
    for (int j = 0; j < L; ++j) out.push_back(s * make(j));
  };
  if (model == Model::bond_dephasing) {
    per_site(p.gamma, [&](int j) { return ladder_product(basis, {{j, true}, {j, false}}); });
  } else {
    per_site(p.r_p, [&](int j) { return ladder_product(basis, {{j, true}}); });
    per_site(p.r_l, [&](int j) { return ladder_product(basis, {{j, false}}); });
    per_site(p.r_t, [&](int j) { return ladder_product(basis, {{j, false}, {j, false}}); });
  }
  return out;
}

/// The k = 0 condensate (b~_0^+)^N |vac> / sqrt(N!) in a fixed-N basis.
inline Vector bec_state(const FockBasis& basis) {
  if (!basis.conserves_number()) throw ConfigError("BEC state needs a chain_fixed_n basis");
  const int L = basis.sites();
  const int N = basis.spec().particles;
  // Expanding (sum_j b_j^+)^N / (L^{N/2} sqrt(N!)) gives amplitude
  // sqrt(N! / prod_j n_j!) / L^{N/2} on each occupation pattern.
  Vector v(basis.dim());
  for (std::size_t i = 0; i < basis.dim(); ++i) {
    double logamp = std::lgamma(N + 1.0);
    for (int n : basis.state(i)) logamp -= std::lgamma(n + 1.0);
    v[i] = std::exp(0.5 * logamp - 0.5 * N * std::log(double(L)));
  }
  return v;
}

}  // namespace omgap

#endif  // OMGAP_FOCK_HPP
