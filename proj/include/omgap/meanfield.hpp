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

// Gutzwiller mean-field dynamics of the dissipative Bose-Hubbard ring.
//
// Every site carries a d x d density matrix. The bond dissipator couples a
// site to the 4 x 4 correlation matrix Gamma of each neighbour, built from
// the operator basis A = (1, b^+, b, n). The linearization around a uniform
// steady state is block diagonal in lattice momentum.

#ifndef OMGAP_MEANFIELD_HPP
#define OMGAP_MEANFIELD_HPP

#include <array>
#include <functional>
#include <future>
#include <limits>
#include <optional>

#include "omgap/fock.hpp"
#include "omgap/linalg.hpp"
#include "omgap/liouville.hpp"

namespace omgap::meanfield {

using Gamma = Eigen::Matrix4cd;

struct ChainState {
  std::vector<Matrix> sites;
  double time = 0.0;

  int size() const { return static_cast<int>(sites.size()); }
  int cutoff() const { return sites.empty() ? 0 : static_cast<int>(sites.front().rows()); }
};

/// Single-site expectation values tr(rho O). They are kept as independent
/// complex numbers because linearized perturbations are not Hermitian.
struct Moments {
  cplx b, bd, n, n2, bd_n, b_n, n_b, n_bd, bb, bdbd;
  /// tr(rho b b^+) with truncated matrices: <n> + tr(rho) minus the weight
  /// of the top level.
  cplx bbd;
};

// ---------------------------------------------------------------------------
// Banded single-site products. b, b^+ and n have one nonzero diagonal each,
// so products with a dense d x d matrix cost O(d^2).

namespace ops {

inline Matrix b_left(const Matrix& x) {  // b x
  const Eigen::Index d = x.rows();
  Matrix out = Matrix::Zero(d, x.cols());
  for (Eigen::Index m = 0; m + 1 < d; ++m) out.row(m) = std::sqrt(double(m + 1)) * x.row(m + 1);
  return out;
}
inline Matrix bd_left(const Matrix& x) {  // b^+ x
  const Eigen::Index d = x.rows();
  Matrix out = Matrix::Zero(d, x.cols());
  for (Eigen::Index m = 1; m < d; ++m) out.row(m) = std::sqrt(double(m)) * x.row(m - 1);
  return out;
}
inline Matrix n_left(const Matrix& x) {
  Matrix out = x;
  for (Eigen::Index m = 0; m < x.rows(); ++m) out.row(m) *= double(m);
  return out;
}
inline Matrix b_right(const Matrix& x) {  // x b
  const Eigen::Index d = x.cols();
  Matrix out = Matrix::Zero(x.rows(), d);
  for (Eigen::Index n = 1; n < d; ++n) out.col(n) = std::sqrt(double(n)) * x.col(n - 1);
  return out;
}
inline Matrix bd_right(const Matrix& x) {  // x b^+
  const Eigen::Index d = x.cols();
  Matrix out = Matrix::Zero(x.rows(), d);
  for (Eigen::Index n = 0; n + 1 < d; ++n) out.col(n) = std::sqrt(double(n + 1)) * x.col(n + 1);
  return out;
}
inline Matrix n_right(const Matrix& x) {
  Matrix out = x;
  for (Eigen::Index n = 0; n < x.cols(); ++n) out.col(n) *= double(n);
  return out;
}

// A_r x for A = (1, b^+, b, n).
inline Matrix a_left(int r, const Matrix& x) {
  switch (r) {
    case 0: return x;
    case 1: return bd_left(x);
    case 2: return b_left(x);
    default: return n_left(x);
  }
}
// A_s^+ x, with A^+ = (1, b, b^+, n).
inline Matrix ad_left(int s, const Matrix& x) {
  switch (s) {
    case 0: return x;
    case 1: return b_left(x);
    case 2: return bd_left(x);
    default: return n_left(x);
  }
}
inline Matrix a_right(int r, const Matrix& x) {
  switch (r) {
    case 0: return x;
    case 1: return bd_right(x);
    case 2: return b_right(x);
    default: return n_right(x);
  }
}
inline Matrix ad_right(int s, const Matrix& x) {
  switch (s) {
    case 0: return x;
    case 1: return b_right(x);
    case 2: return bd_right(x);
    default: return n_right(x);
  }
}

}  // namespace ops

inline Moments moments(const Matrix& rho) {
  const Eigen::Index d = rho.rows();
  Moments m{};
  for (Eigen::Index k = 0; k < d; ++k) {
    const double kk = double(k);
    m.n += kk * rho(k, k);
    if (k + 1 < d) m.bbd += (kk + 1.0) * rho(k, k);
    m.n2 += kk * kk * rho(k, k);
    if (k >= 1) {
      // tr(rho b) = sum_k sqrt(k) rho(k, k-1); tr(rho b^+) = sum_k sqrt(k) rho(k-1, k)
      const double s = std::sqrt(kk);
      m.b += s * rho(k, k - 1);
      m.bd += s * rho(k - 1, k);
      // b n |k> = k sqrt(k) |k-1>, n b |k> = (k-1) sqrt(k) |k-1>
      m.b_n += kk * s * rho(k, k - 1);
      m.n_b += (kk - 1.0) * s * rho(k, k - 1);
      m.bd_n += (kk - 1.0) * s * rho(k - 1, k);
      m.n_bd += kk * s * rho(k - 1, k);
    }
    if (k >= 2) {
      const double s2 = std::sqrt(kk * (kk - 1.0));
      m.bb += s2 * rho(k, k - 2);
      m.bdbd += s2 * rho(k - 2, k);
    }
  }
  return m;
}

/// Bond correlation matrix of a neighbour, Gamma_rs = <B_s^+ B_r> with
/// B = (-n, -b, b^+, 1). The (3,3) entry <b b^+> is evaluated in the
/// truncated space (it equals <n> + 1 up to the top-level weight), which
/// keeps the truncated flow exactly number conserving. With `constants`
/// the (4,4) entry is 1; without it the matrix is the linear part used for
/// perturbations.
inline Gamma gamma_matrix(const Moments& m, bool constants) {
  Gamma g;
  g << m.n2, m.bd_n, -m.b_n, -m.n,  //
      m.n_b, m.n, -m.bb, -m.b,      //
      -m.n_bd, -m.bdbd, m.bbd, m.bd,  //
      -m.n, -m.bd, m.b, 0.0;
  if (constants) g(3, 3) = 1.0;
  return g;
}

namespace detail {

// Banded pieces of the single-site generator: pentadiagonal P = -i h - K/2
// and Q = i h - K/2, and the kappa-scaled tridiagonal B_s = sum_r W_rs A_r.
struct GeneratorParts {
  Matrix pm, qm;
  std::array<Matrix, 4> bs;
  std::vector<double> sq;
};

inline GeneratorParts generator_parts(int d, cplx a, cplx c, const Gamma& w, const ModelParams& p,
                                      bool include_local) {
  GeneratorParts g;
  g.sq.resize(d + 2);
  for (int k = 0; k < d + 2; ++k) g.sq[k] = std::sqrt(double(k));
  const auto& sq = g.sq;
  for (int s = 0; s < 4; ++s) {
    g.bs[s] = Matrix::Zero(d, d);
    for (int m = 0; m < d; ++m) {
      g.bs[s](m, m) = p.kappa * (w(0, s) + w(3, s) * double(m));
      if (m + 1 < d) {
        g.bs[s](m + 1, m) = p.kappa * w(1, s) * sq[m + 1];  // b^+
        g.bs[s](m, m + 1) = p.kappa * w(2, s) * sq[m + 1];  // b
      }
    }
  }
  // K = sum_s A_s^+ B_s with truncated matrix products.
  Matrix k = g.bs[0] + ops::b_left(g.bs[1]) + ops::bd_left(g.bs[2]) + ops::n_left(g.bs[3]);
  Matrix hm = Matrix::Zero(d, d);
  for (int m = 0; m + 1 < d; ++m) {
    hm(m + 1, m) = -p.J * a * sq[m + 1];  // a b^+
    hm(m, m + 1) = -p.J * c * sq[m + 1];  // c b
  }
  if (include_local) {
    for (int m = 0; m < d; ++m) {
      const double bbd = m + 1 < d ? m + 1.0 : 0.0;
      hm(m, m) += 0.5 * p.U * m * (m - 1.0) - p.mu * m;
      k(m, m) += p.gamma * double(m) * m + p.r_p * bbd + p.r_l * m + p.r_t * m * (m - 1.0);
    }
  }
  g.pm = -kI * hm - 0.5 * k;
  g.qm = kI * hm - 0.5 * k;
  return g;
}

}  // namespace detail

/// Single-site generator shared by the nonlinear flow and its linearization:
///   -i[h, x] + kappa sum_{r,s} W_rs [A_r x A_s^+ - {A_s^+ A_r, x}/2] [+ on-site channels]
/// with h = -J (a b^+ + c b) [+ U/2 n(n-1) - mu n].
///
/// Every operator involved is banded, so the map is evaluated in one pass:
/// out = P x + x Q + (bond and on-site sandwiches).
inline Matrix site_generator(const Matrix& x, cplx a, cplx c, const Gamma& w, const ModelParams& p,
                             bool include_local) {
  const int d = static_cast<int>(x.rows());
  const auto g = detail::generator_parts(d, a, c, w, p, include_local);
  const auto& sq = g.sq;
  const auto& bs = g.bs;
  const Matrix& pm = g.pm;
  const Matrix& qm = g.qm;

  Matrix out(d, d);
  const cplx* xd = x.data();
  for (int n = 0; n < d; ++n) {
    const cplx* xn = xd + std::size_t(n) * d;
    for (int m = 0; m < d; ++m) {
      cplx acc = 0.0;
      // P x and the s = 0, 3 sandwiches (B_0 + n B_3) x.
      const int lo = std::max(0, m - 2), hi = std::min(d - 1, m + 2);
      for (int q = lo; q <= hi; ++q) acc += pm(m, q) * xn[q];
      const int lo1 = std::max(0, m - 1), hi1 = std::min(d - 1, m + 1);
      for (int q = lo1; q <= hi1; ++q) acc += (bs[0](m, q) + double(n) * bs[3](m, q)) * xn[q];
      // (B_1 x) b and (B_2 x) b^+.
      if (n >= 1) {
        const cplx* xp = xn - d;
        cplx t = 0.0;
        for (int q = lo1; q <= hi1; ++q) t += bs[1](m, q) * xp[q];
        acc += sq[n] * t;
      }
      if (n + 1 < d) {
        const cplx* xq = xn + d;
        cplx t = 0.0;
        for (int q = lo1; q <= hi1; ++q) t += bs[2](m, q) * xq[q];
        acc += sq[n + 1] * t;
      }
      // x Q.
      const int lo2 = std::max(0, n - 2), hi2 = std::min(d - 1, n + 2);
      for (int q = lo2; q <= hi2; ++q) acc += xd[m + std::size_t(q) * d] * qm(q, n);
      out(m, n) = acc;
    }
  }
  if (!include_local) return out;

  // On-site sandwiches: gamma n x n, r_p b^+ x b, r_l b x b^+, r_t b^2 x b^+2.
  for (int n = 0; n < d; ++n)
    for (int m = 0; m < d; ++m) {
      cplx acc = p.gamma * double(m) * n * x(m, n);
      if (m >= 1 && n >= 1) acc += p.r_p * sq[m] * sq[n] * x(m - 1, n - 1);
      if (m + 1 < d && n + 1 < d) acc += p.r_l * sq[m + 1] * sq[n + 1] * x(m + 1, n + 1);
      if (m + 2 < d && n + 2 < d)
        acc += p.r_t * sq[m + 1] * sq[m + 2] * sq[n + 1] * sq[n + 2] * x(m + 2, n + 2);
      out(m, n) += acc;
    }
  return out;
}

/// Gershgorin bound on the spectral radius of the single-site map x ->
/// site_generator(x): the largest |diagonal coefficient| plus the absolute
/// couplings to other elements, over all (m, n).
inline double generator_bound(cplx a, cplx c, const Gamma& w, const ModelParams& p, int d) {
  const auto g = detail::generator_parts(d, a, c, w, p, true);
  const auto& sq = g.sq;
  const auto& bs = g.bs;
  double bound = 0.0;
  for (int n = 0; n < d; ++n)
    for (int m = 0; m < d; ++m) {
      cplx diag = g.pm(m, m) + g.qm(n, n) + bs[0](m, m) + double(n) * bs[3](m, m) + p.gamma * double(m) * n;
      double off = 0.0;
      for (int q = std::max(0, m - 2); q <= std::min(d - 1, m + 2); ++q)
        if (q != m) off += std::abs(g.pm(m, q));
      for (int q = std::max(0, n - 2); q <= std::min(d - 1, n + 2); ++q)
        if (q != n) off += std::abs(g.qm(q, n));
      for (int q = std::max(0, m - 1); q <= std::min(d - 1, m + 1); ++q) {
        if (q != m) off += std::abs(bs[0](m, q) + double(n) * bs[3](m, q));
        if (n >= 1) off += sq[n] * std::abs(bs[1](m, q));
        if (n + 1 < d) off += sq[n + 1] * std::abs(bs[2](m, q));
      }
      if (m >= 1 && n >= 1) off += p.r_p * sq[m] * sq[n];
      if (m + 1 < d && n + 1 < d) off += p.r_l * sq[m + 1] * sq[n + 1];
      if (m + 2 < d && n + 2 < d) off += p.r_t * sq[m + 1] * sq[m + 2] * sq[n + 1] * sq[n + 2];
      bound = std::max(bound, std::abs(diag) + off);
    }
  return bound;
}

/// Time derivative of every site. Throws NumericalError on non-finite input.
inline std::vector<Matrix> mf_rhs(const ChainState& s, const ModelParams& p) {
  const int L = s.size();
  if (L == 0) throw ConfigError("empty chain state");
  std::vector<Moments> mom(L);
  for (int j = 0; j < L; ++j) {
    if (s.sites[j].rows() != p.cutoff || s.sites[j].cols() != p.cutoff)
      throw ConfigError("site dimension does not match the configured cutoff");
    mom[j] = moments(s.sites[j]);
    if (!std::isfinite(std::abs(mom[j].n2)) || !std::isfinite(std::abs(mom[j].b)))
      throw NumericalError("non-finite expectation values at site " + std::to_string(j));
  }
  std::vector<Matrix> out(L);
  for (int j = 0; j < L; ++j) {
    const Moments& l = mom[(j + L - 1) % L];
    const Moments& r = mom[(j + 1) % L];
    const Gamma w = gamma_matrix(l, true) + gamma_matrix(r, true);
    out[j] = site_generator(s.sites[j], l.b + r.b, l.bd + r.bd, w, p, true);
  }
  return out;
}

inline double rhs_norm(const std::vector<Matrix>& d) {
  double m = 0.0;
  for (const auto& x : d) m = std::max(m, x.norm());
  return m;
}

// ---------------------------------------------------------------------------
// States

/// Normalized truncated coherent state |psi><psi|.
inline Matrix coherent_state(cplx psi, int cutoff) {
  Vector c(cutoff);
  c[0] = 1.0;
  for (int k = 1; k < cutoff; ++k) c[k] = c[k - 1] * psi / std::sqrt(double(k));
  c.normalize();
  return c * c.adjoint();
}

inline double thermal_tail_mass(double nbar, int cutoff) {
  return nbar <= 0.0 ? 0.0 : std::pow(nbar / (nbar + 1.0), cutoff);
}

/// Diagonal state with p_k proportional to (nbar / (nbar + 1))^k, normalized
/// to unit trace on the truncated space.
inline Matrix thermal_steady(double nbar, int cutoff, bool warn = true) {
  if (nbar < 0.0) throw ConfigError("thermal_steady needs nbar >= 0");
  Matrix rho = Matrix::Zero(cutoff, cutoff);
  const double q = nbar / (nbar + 1.0);
  double w = 1.0, z = 0.0;
  for (int k = 0; k < cutoff; ++k, w *= q) {
    rho(k, k) = w;
    z += w;
  }
  rho /= z;
  const double tail = thermal_tail_mass(nbar, cutoff);
  if (warn && tail > 1e-8)
    log_warning("thermal state truncation tail " + format_double(tail) + " exceeds 1e-8; raise the cutoff");
  return rho;
}

inline ChainState uniform_chain(const Matrix& site, int sites) {
  ChainState s;
  s.sites.assign(sites, site);
  return s;
}

/// Coherent start used by the steady-state search. Number-conserving
/// parameters start at psi = sqrt(nbar) so the conserved density equals
/// nbar; otherwise the amplitude carries a +0.01 symmetry-breaking offset.
inline Matrix default_initial_site(const ModelParams& p) {
  const double amp = std::sqrt(p.density) + (p.conserves_number() ? 0.0 : 0.01);
  return coherent_state(amp, p.cutoff);
}

// ---------------------------------------------------------------------------
// Time evolution

struct EvolveOptions {
  double dt = 0.005;
  /// Steps between recorded samples (0 records only the endpoints).
  std::size_t stride = 200;
  /// Per-site |tr - 1| that aborts the run as a step-size failure.
  double trace_tol = 1e-5;
};

struct TrajectorySample {
  double t;
  std::vector<cplx> psi;
  std::vector<double> density;
};

struct Trajectory {
  std::vector<TrajectorySample> samples;
  ChainState final_state;
};

inline TrajectorySample sample_state(const ChainState& s) {
  TrajectorySample smp{s.time, {}, {}};
  for (const auto& r : s.sites) {
    const Moments m = moments(r);
    smp.psi.push_back(m.b);
    smp.density.push_back(m.n.real());
  }
  return smp;
}

inline double max_trace_drift(const ChainState& s) {
  double drift = 0.0;
  for (const auto& r : s.sites) drift = std::max(drift, std::abs(r.trace() - 1.0));
  return drift;
}

/// Gershgorin bound on the spectral radius of the on-site part of the chain
/// map, which sets the stable RK4 step.
inline double stiffness(const ChainState& s, const ModelParams& p) {
  const int L = s.size();
  std::vector<Moments> mom(L);
  for (int j = 0; j < L; ++j) mom[j] = moments(s.sites[j]);
  double r = 0.0;
  for (int j = 0; j < L; ++j) {
    const Moments& l = mom[(j + L - 1) % L];
    const Moments& rr = mom[(j + 1) % L];
    const Gamma w = gamma_matrix(l, true) + gamma_matrix(rr, true);
    r = std::max(r, generator_bound(l.b + rr.b, l.bd + rr.bd, w, p, s.cutoff()));
  }
  return r;
}

/// |lambda| dt bound kept inside the classical RK4 stability region.
inline constexpr double kStableStep = 2.5;

/// One classical RK4 step of every matrix element.
inline void rk4_step(ChainState& s, const ModelParams& p, double dt) {
  const int L = s.size();
  ChainState tmp = s;
  auto k1 = mf_rhs(s, p);
  for (int j = 0; j < L; ++j) tmp.sites[j] = s.sites[j] + 0.5 * dt * k1[j];
  auto k2 = mf_rhs(tmp, p);
  for (int j = 0; j < L; ++j) tmp.sites[j] = s.sites[j] + 0.5 * dt * k2[j];
  auto k3 = mf_rhs(tmp, p);
  for (int j = 0; j < L; ++j) tmp.sites[j] = s.sites[j] + dt * k3[j];
  auto k4 = mf_rhs(tmp, p);
  for (int j = 0; j < L; ++j) s.sites[j] += (dt / 6.0) * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
  s.time += dt;
}

/// Advances by dt with as many equal RK4 substeps as the current stiffness
/// requires; large cutoffs make the on-site map too stiff for dt = 0.005.
inline void advance(ChainState& s, const ModelParams& p, double dt) {
  const double t0 = s.time;
  const int sub = std::max(1, static_cast<int>(std::ceil(stiffness(s, p) * dt / kStableStep)));
  for (int k = 0; k < sub; ++k) rk4_step(s, p, dt / sub);
  s.time = t0 + dt;
}

inline Trajectory evolve_mf(ChainState s, const ModelParams& p, double t_end, const EvolveOptions& opt = {}) {
  if (!(opt.dt > 0.0)) throw ConfigError("dt must be > 0");
  if (t_end < 0.0) throw ConfigError("t_end must be >= 0");
  const auto steps = static_cast<std::size_t>(std::ceil(t_end / opt.dt - 1e-9));
  const double dt = steps > 0 ? t_end / double(steps) : opt.dt;
  const double t0 = s.time;
  Trajectory tr;
  tr.samples.push_back(sample_state(s));
  for (std::size_t k = 1; k <= steps; ++k) {
    advance(s, p, dt);
    s.time = t0 + dt * double(k);
    const bool record = (opt.stride > 0 && k % opt.stride == 0) || k == steps;
    if (record || k % 64 == 0) {
      const double drift = max_trace_drift(s);
      if (!(drift <= opt.trace_tol))
        throw NumericalError("trace drift " + format_double(drift) + " at t = " + format_double(s.time) +
                             "; reduce the time step");
    }
    if (record) tr.samples.push_back(sample_state(s));
  }
  tr.final_state = std::move(s);
  return tr;
}

/// Writes `t,site,re_psi,im_psi,n` rows.
inline void write_trajectory_csv(std::ostream& os, const Trajectory& tr) {
  os << "t,site,re_psi,im_psi,n\n";
  for (const auto& smp : tr.samples)
    for (std::size_t j = 0; j < smp.psi.size(); ++j)
      os << format_double(smp.t) << ',' << j << ',' << format_double(smp.psi[j].real()) << ','
         << format_double(smp.psi[j].imag()) << ',' << format_double(smp.density[j]) << '\n';
}

// ---------------------------------------------------------------------------
// Chemical-potential tuning and steady states

/// Raised when the relaxed state develops a site-to-site density modulation.
class NonUniformError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

struct TuneOptions {
  double dt = 0.005;
  /// |Im omega| below this marks the superfluid branch.
  double superfluid_tol = 1e-4;
  /// Site-to-site density spread that rejects the parameter point.
  double uniformity_tol = 1e-4;
  /// Relative staggered density seed on the two-site probe ring.
  double probe_seed = 1e-3;
  /// |psi| below which the order parameter counts as decayed.
  double psi_floor = 1e-10;
  /// Rotating-frame derivative norm that ends the relaxation early.
  double stationary_tol = 1e-8;
};

struct MuTuning {
  double mu = 0.0;
  cplx omega{0.0, 0.0};
  bool superfluid = false;
  /// |d arg(psi)/dt| after the re-run (superfluid) or final |psi| (normal).
  double residual = 0.0;
  ChainState state;  // the re-run's final two-site probe state
};

namespace detail {

// omega = -i <dpsi/dt / psi> over the given samples, centred differences.
inline cplx rotation_frequency(const std::vector<cplx>& psi, std::size_t begin, std::size_t end, double dt) {
  cplx acc = 0.0;
  std::size_t count = 0;
  for (std::size_t k = std::max<std::size_t>(begin, 1); k + 1 < end; ++k) {
    if (psi[k] == 0.0) continue;
    acc += (psi[k + 1] - psi[k - 1]) / (2.0 * dt) / psi[k];
    ++count;
  }
  if (count == 0) return 0.0;
  return -kI * acc / double(count);
}

inline ChainState probe_ring(const ModelParams& p, double seed) {
  const Matrix base = default_initial_site(p);
  ChainState s;
  const cplx psi = moments(base).b;
  for (int j = 0; j < 2; ++j) {
    const double f = j == 0 ? 1.0 + seed : 1.0 - seed;
    s.sites.push_back(coherent_state(psi * std::sqrt(f), p.cutoff));
  }
  return s;
}

}  // namespace detail

namespace detail {

// Largest per-site derivative left after removing one common phase rotation.
inline double rotating_residual(const ChainState& s, const ModelParams& p) {
  const auto d = mf_rhs(s, p);
  const Matrix g0 = kI * (ops::n_left(s.sites[0]) - ops::n_right(s.sites[0]));
  const double g2 = g0.squaredNorm();
  const double dmu = g2 > 1e-20 ? -(g0.adjoint() * d[0]).trace().real() / g2 : 0.0;
  double r = 0.0;
  for (int j = 0; j < s.size(); ++j) {
    const Matrix g = kI * (ops::n_left(s.sites[j]) - ops::n_right(s.sites[j]));
    r = std::max(r, (d[j] + dmu * g).norm());
  }
  return r;
}

}  // namespace detail

inline MuTuning tune_mu(const ModelParams& p, double t_relax, const TuneOptions& opt = {}) {
  p.validate();
  if (!(t_relax > 0.0)) throw ConfigError("t_relax must be > 0");
  ModelParams q = p;
  q.mu = 0.0;
  ChainState s = detail::probe_ring(q, opt.probe_seed);
  const auto steps = static_cast<std::size_t>(std::ceil(t_relax / opt.dt));
  std::vector<cplx> psi;
  psi.reserve(steps + 1);
  psi.push_back(moments(s.sites[0]).b);
  bool decayed = false;
  const auto per_unit = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(1.0 / opt.dt)));
  for (std::size_t k = 1; k <= steps; ++k) {
    advance(s, q, opt.dt);
    psi.push_back(moments(s.sites[0]).b);
    if (k % 64 == 0 && max_trace_drift(s) > 1e-5) throw NumericalError("trace drift while tuning mu");
    if (std::abs(psi.back()) < opt.psi_floor) {
      decayed = true;
      break;
    }
    // A condensate that only rotates is already relaxed; the window below
    // then sees a pure phase winding.
    if (k % per_unit == 0 && std::abs(psi.back()) > 1e-6 && detail::rotating_residual(s, q) < opt.stationary_tol) break;
  }
  const double spread = std::abs(moments(s.sites[0]).n.real() - moments(s.sites[1]).n.real());
  if (spread > opt.uniformity_tol)
    throw NonUniformError("non-uniform steady state: density spread " + format_double(spread));

  MuTuning out;
  const std::size_t end = psi.size();
  const std::size_t begin = end - std::max<std::size_t>(end / 10, 3);
  out.omega = detail::rotation_frequency(psi, begin, end, opt.dt);
  out.superfluid = !decayed && std::abs(out.omega.imag()) < opt.superfluid_tol;
  out.mu = -out.omega.real();

  // Re-run once at the tuned chemical potential.
  q.mu = out.mu;
  const double t_rerun = std::max(0.1 * t_relax, 20.0 * opt.dt);
  const auto rerun = static_cast<std::size_t>(std::ceil(t_rerun / opt.dt));
  psi.assign(1, moments(s.sites[0]).b);
  for (std::size_t k = 1; k <= rerun; ++k) {
    advance(s, q, opt.dt);
    psi.push_back(moments(s.sites[0]).b);
  }
  if (out.superfluid) {
    out.residual = std::abs(detail::rotation_frequency(psi, psi.size() / 2, psi.size(), opt.dt).real());
  } else {
    out.residual = std::abs(psi.back());
  }
  out.state = std::move(s);
  return out;
}

// ---------------------------------------------------------------------------
// Linearization

/// The linear map d(delta rho_j)/dt = M(delta rho_j; delta rho_{j-1}, delta rho_{j+1})
/// around a steady chain state.
class LinearizedMap {
 public:
  LinearizedMap(ChainState steady, ModelParams p) : ss_(std::move(steady)), p_(std::move(p)) {
    const int L = ss_.size();
    if (L == 0) throw ConfigError("empty steady state");
    for (const auto& r : ss_.sites) mom_.push_back(moments(r));
    for (int j = 0; j < L; ++j) {
      const Moments& l = mom_[(j + L - 1) % L];
      const Moments& r = mom_[(j + 1) % L];
      gamma_ss_.push_back(gamma_matrix(l, true) + gamma_matrix(r, true));
      field_.emplace_back(l.b + r.b, l.bd + r.bd);
    }
  }

  int sites() const { return ss_.size(); }
  int cutoff() const { return ss_.cutoff(); }
  const ModelParams& params() const { return p_; }
  const ChainState& steady() const { return ss_; }

  /// On-site part at site j: perturbation of rho_j with neighbours fixed.
  Matrix local(int j, const Matrix& x) const {
    return site_generator(x, field_[j].first, field_[j].second, gamma_ss_[j], p_, true);
  }

  /// Response of site j to a perturbation y of one of its neighbours.
  Matrix neighbor(int j, const Matrix& y) const {
    const Moments dm = moments(y);
    return site_generator(ss_.sites[j], dm.b, dm.bd, gamma_matrix(dm, false), p_, false);
  }

  std::vector<Matrix> apply(const std::vector<Matrix>& delta) const {
    const int L = sites();
    if (static_cast<int>(delta.size()) != L) throw ConfigError("perturbation has the wrong number of sites");
    std::vector<Matrix> out(L);
    for (int j = 0; j < L; ++j) {
      out[j] = local(j, delta[j]) + neighbor(j, delta[(j + L - 1) % L]);
      if (L > 1) out[j] += neighbor(j, delta[(j + 1) % L]);
      else out[j] += neighbor(j, delta[j]);
    }
    return out;
  }

  /// Dense matrix of the whole chain map, site-major with column-stacked sites.
  Matrix full_matrix() const {
    const int L = sites();
    const Eigen::Index d = cutoff(), d2 = d * d;
    Matrix out = Matrix::Zero(L * d2, L * d2);
    std::vector<Matrix> delta(L, Matrix::Zero(d, d));
    for (int j = 0; j < L; ++j)
      for (Eigen::Index k = 0; k < d2; ++k) {
        delta[j](k % d, k / d) = 1.0;
        const auto col = apply(delta);
        for (int i = 0; i < L; ++i) out.block(i * d2, j * d2 + k, d2, 1) = liouville::vectorize(col[i]);
        delta[j](k % d, k / d) = 0.0;
      }
    return out;
  }

  /// Local and single-neighbour matrices (side d^2) of a uniform state.
  std::pair<Matrix, Matrix> block_parts() const {
    const Eigen::Index d = cutoff(), d2 = d * d;
    Matrix loc(d2, d2), nb(d2, d2);
    Matrix e = Matrix::Zero(d, d);
    for (Eigen::Index k = 0; k < d2; ++k) {
      e(k % d, k / d) = 1.0;
      loc.col(k) = liouville::vectorize(local(0, e));
      nb.col(k) = liouville::vectorize(neighbor(0, e));
      e(k % d, k / d) = 0.0;
    }
    return {std::move(loc), std::move(nb)};
  }

 private:
  ChainState ss_;
  ModelParams p_;
  std::vector<Moments> mom_;
  std::vector<Gamma> gamma_ss_;
  std::vector<std::pair<cplx, cplx>> field_;
};

inline LinearizedMap linearize(const ChainState& steady, const ModelParams& p) { return LinearizedMap(steady, p); }

/// Gauge direction -i[n, rho] of a site state.
inline Matrix gauge_direction(const Matrix& rho) { return -kI * (ops::n_left(rho) - ops::n_right(rho)); }

inline double momentum(int m, int sites) { return 2.0 * kPi * m / sites; }

/// Block of the linearized map for plane waves delta rho_j ~ e^{i phi j}.
/// The two neighbour terms combine to 2 cos(phi), so blocks m and L - m
/// coincide.
struct MFBlock {
  double phi = 0.0;
  Matrix matrix;
};

inline MFBlock block_from_parts(const std::pair<Matrix, Matrix>& parts, int m, int sites) {
  const double phi = momentum(m, sites);
  return {phi, parts.first + (2.0 * std::cos(phi)) * parts.second};
}

inline void require_uniform(const ChainState& s) {
  for (const auto& r : s.sites)
    if ((r - s.sites.front()).norm() > 1e-10) throw ConfigError("block decomposition needs a uniform steady state");
}

inline MFBlock block_matrix(const ChainState& steady, const ModelParams& p, int m) {
  require_uniform(steady);
  LinearizedMap lin(uniform_chain(steady.sites.front(), 1), p);
  return block_from_parts(lin.block_parts(), m, steady.size());
}

// ---------------------------------------------------------------------------
// Steady states

struct SteadyOptions {
  double t_relax = 200.0;
  double t_max = 2000.0;
  double dt = 0.005;
  double tol = 1e-9;
  /// Time between convergence checks and chemical-potential corrections.
  double check_interval = 1.0;
  /// Newton steps on the uniform fixed point, tried every `newton_interval`
  /// once the residual is below `newton_start`.
  bool newton = true;
  double newton_interval = 50.0;
  double newton_start = 1e-3;
  TuneOptions tune;
};

struct SteadyStateReport {
  cplx psi{0.0, 0.0};
  double n0 = 0.0;
  double n = 0.0;
  double n1 = 0.0;
  double mu = 0.0;
  cplx omega{0.0, 0.0};
  bool superfluid = false;
  bool converged = false;
  double residual = 0.0;
  double time = 0.0;
};

struct SteadyState {
  ChainState state;  // p.sites identical copies of the uniform site
  SteadyStateReport report;
  ModelParams params;  // with the tuned chemical potential
};

namespace detail {

inline void fill_report(SteadyStateReport& r, const Matrix& site) {
  const Moments m = moments(site);
  r.psi = m.b;
  r.n0 = std::norm(m.b);
  r.n = m.n.real();
  r.n1 = r.n - r.n0;
}

// Least-squares chemical-potential shift removing the residual phase
// rotation: minimizes |rhs + i dmu [n, rho]|.
inline double mu_correction(const Matrix& rho, const Matrix& rhs) {
  const Matrix g = kI * (ops::n_left(rho) - ops::n_right(rho));
  const double g2 = g.squaredNorm();
  if (g2 < 1e-20) return 0.0;
  return -(g.adjoint() * rhs).trace().real() / g2;
}

// Newton iteration for the uniform fixed point. The phi = 0 block is the
// exact Jacobian of the one-site reduction; the trace row (and the density
// row for number-conserving models) pins the neutral directions, and with
// `track_mu` mu is solved for as well. The minimum-norm step leaves the
// Goldstone phase alone. Inputs are untouched unless the residual ends
// below `tol`.
inline bool newton_polish(Matrix& site, ModelParams& p, bool track_mu, double tol, double& residual,
                          int max_iter = 12) {
  const Eigen::Index d = site.rows(), d2 = d * d;
  Matrix rho = site;
  ModelParams q = p;
  const bool conserve = q.conserves_number();
  const double n_target = moments(rho).n.real();
  auto norm_at = [&](const Matrix& r, const ModelParams& pp) { return rhs_norm(mf_rhs(uniform_chain(r, 1), pp)); };
  double res = norm_at(rho, q);
  for (int it = 0; it < max_iter && res >= tol; ++it) {
    const Matrix f = mf_rhs(uniform_chain(rho, 1), q)[0];
    const auto parts = LinearizedMap(uniform_chain(rho, 1), q).block_parts();
    const bool mu_col = track_mu && std::abs(moments(rho).b) > 1e-6;
    const Eigen::Index rows = d2 + 1 + (conserve ? 1 : 0), cols = d2 + (mu_col ? 1 : 0);
    Matrix a = Matrix::Zero(rows, cols);
    a.topLeftCorner(d2, d2) = parts.first + 2.0 * parts.second;
    if (mu_col) a.block(0, d2, d2, 1) = liouville::vectorize(Matrix(kI * (ops::n_left(rho) - ops::n_right(rho))));
    Vector rhs(rows);
    rhs.head(d2) = -liouville::vectorize(f);
    rhs(d2) = 1.0 - rho.trace();
    cplx n_now{0.0, 0.0};
    for (Eigen::Index i = 0; i < d; ++i) {
      a(d2, i * d + i) = 1.0;
      if (conserve) a(d2 + 1, i * d + i) = static_cast<double>(i);
      n_now += static_cast<double>(i) * rho(i, i);
    }
    if (conserve) rhs(d2 + 1) = n_target - n_now;
    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(a);
    cod.setThreshold(1e-10);
    const Vector x = cod.solve(rhs);
    const Matrix step = liouville::devectorize(x.head(d2), d);
    const double dmu = mu_col ? x(d2).real() : 0.0;

    // Backtracking keeps a wild step from the wrong basin from being taken.
    bool improved = false;
    for (double t = 1.0; t > 0.05; t *= 0.5) {
      Matrix trial = rho + t * step;
      trial = 0.5 * (trial + trial.adjoint()).eval();
      ModelParams qt = q;
      qt.mu += t * dmu;
      double r = std::numeric_limits<double>::infinity();
      try {
        r = norm_at(trial, qt);
      } catch (const NumericalError&) {
      }
      if (r < res) {
        rho = std::move(trial);
        q = qt;
        res = r;
        improved = true;
        break;
      }
    }
    if (!improved) return false;
  }
  if (!(res < tol)) return false;
  Eigen::SelfAdjointEigenSolver<Matrix> es(rho, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-8) return false;
  site = std::move(rho);
  p = q;
  residual = res;
  return true;
}

/// Relaxes a uniform state with the one-site reduction of the ring, where
/// both neighbours equal the site itself. With `track_mu` the chemical
/// potential follows the least-squares rotation correction.
inline bool relax_uniform(Matrix& site, ModelParams& p, const SteadyOptions& opt, bool track_mu, double& residual,
                          double& elapsed) {
  ChainState s = uniform_chain(site, 1);
  const auto per_check = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(opt.check_interval / opt.dt)));
  bool ok = false;
  elapsed = 0.0;
  double next_newton = 0.0;
  for (;;) {
    if (opt.newton && elapsed >= next_newton) {
      residual = rhs_norm(mf_rhs(s, p));
      if (residual < opt.newton_start) {
        Matrix r = s.sites[0];
        if (newton_polish(r, p, track_mu, opt.tol, residual)) {
          site = std::move(r);
          return true;
        }
        next_newton = elapsed + opt.newton_interval;
      }
    }
    auto d = mf_rhs(s, p);
    if (track_mu && std::abs(moments(s.sites[0]).b) > 1e-6) {
      p.mu += mu_correction(s.sites[0], d[0]);
      d = mf_rhs(s, p);
    }
    residual = rhs_norm(d);
    if (residual < opt.tol) {
      ok = true;
      break;
    }
    if (elapsed >= opt.t_max) break;
    for (std::size_t k = 0; k < per_check; ++k) advance(s, p, opt.dt);
    elapsed += per_check * opt.dt;
    if (std::abs(s.sites[0].trace() - 1.0) > 1e-5) throw NumericalError("trace drift during relaxation");
  }
  site = s.sites[0];
  return ok;
}

}  // namespace detail

/// Tunes mu, then relaxes until the per-site derivative norm drops below
/// `opt.tol` or `opt.t_max` elapses.
inline SteadyState find_steady(const ModelParams& p, const SteadyOptions& opt = {}) {
  MuTuning tuning = tune_mu(p, opt.t_relax, opt.tune);
  ModelParams q = p;
  q.mu = tuning.mu;
  Matrix site = 0.5 * (tuning.state.sites[0] + tuning.state.sites[1]);
  double residual = 0.0, elapsed = 0.0;
  const bool ok = detail::relax_uniform(site, q, opt, tuning.superfluid, residual, elapsed);
  SteadyState out;
  out.params = q;
  out.state = uniform_chain(site, p.sites);
  detail::fill_report(out.report, site);
  out.report.mu = q.mu;
  out.report.omega = tuning.omega;
  out.report.superfluid = out.report.n0 > 1e-8;
  out.report.converged = ok;
  out.report.residual = residual;
  out.report.time = elapsed;
  return out;
}

/// The symmetric (psi = 0) uniform state, reached from a thermal start.
/// Diagonal states stay diagonal under the flow, so this follows the normal
/// branch even where it is unstable. The chemical potential is left as given.
inline SteadyState normal_steady(const ModelParams& p, const SteadyOptions& opt = {}) {
  p.validate();
  Matrix site = thermal_steady(p.density, p.cutoff, false);
  ModelParams q = p;
  double residual = 0.0, elapsed = 0.0;
  const bool ok = detail::relax_uniform(site, q, opt, false, residual, elapsed);
  SteadyState out;
  out.params = q;
  out.state = uniform_chain(site, p.sites);
  detail::fill_report(out.report, site);
  out.report.mu = q.mu;
  out.report.converged = ok;
  out.report.residual = residual;
  out.report.time = elapsed;
  return out;
}

struct MeanFieldSpectrum {
  /// blocks[m] holds the sorted eigenvalues at phi = 2 pi m / L.
  std::vector<Spectrum> blocks;

  Spectrum all() const {
    Spectrum s;
    for (const auto& b : blocks) s.insert(s.end(), b.begin(), b.end());
    linalg::sort_spectrum(s);
    return s;
  }
  std::size_t size() const {
    std::size_t n = 0;
    for (const auto& b : blocks) n += b.size();
    return n;
  }
};

/// Union of all L momentum-block spectra (d^2 L eigenvalues). Blocks m and
/// L - m are equal, so only m <= L/2 are diagonalized; `threads` > 1 runs
/// blocks concurrently and the result does not depend on it.
inline MeanFieldSpectrum mf_spectrum(const ChainState& steady, const ModelParams& p, int threads = 1) {
  require_uniform(steady);
  const int L = steady.size();
  LinearizedMap lin(uniform_chain(steady.sites.front(), 1), p);
  const auto parts = lin.block_parts();
  MeanFieldSpectrum out;
  out.blocks.resize(L);
  const int half = L / 2;
  auto solve = [&](int m) { return linalg::eig_general(block_from_parts(parts, m, L).matrix).spectrum(); };
  if (threads <= 1) {
    for (int m = 0; m <= half; ++m) out.blocks[m] = solve(m);
  } else {
    for (int start = 0; start <= half; start += threads) {
      std::vector<std::future<Spectrum>> jobs;
      for (int m = start; m <= std::min(half, start + threads - 1); ++m)
        jobs.push_back(std::async(std::launch::async, solve, m));
      for (int m = start; m <= std::min(half, start + threads - 1); ++m) out.blocks[m] = jobs[m - start].get();
    }
  }
  for (int m = half + 1; m < L; ++m) out.blocks[m] = out.blocks[L - m];
  return out;
}

// ---------------------------------------------------------------------------
// Phase boundary

/// Largest real part among the nonzero phi = 0 eigenvalues around the
/// symmetric (psi = 0) state. Positive values mean the normal state is
/// unstable towards a uniform condensate. `eps_zero` < 0 selects 1e-8 x the
/// spectral radius.
inline double normal_growth_rate(const ModelParams& p, const SteadyOptions& opt = {}, double eps_zero = -1.0) {
  const SteadyState ns = normal_steady(p, opt);
  if (!ns.report.converged) throw NumericalError("symmetric state did not converge");
  const Spectrum s = linalg::eig_general(block_matrix(uniform_chain(ns.state.sites.front(), 1), ns.params, 0).matrix)
                         .spectrum();
  double radius = 0.0;
  for (const auto& z : s) radius = std::max(radius, std::abs(z));
  const double eps = eps_zero < 0.0 ? 1e-8 * radius : eps_zero;
  double g = -std::numeric_limits<double>::infinity();
  for (const auto& z : s)
    if (std::abs(z) > eps) g = std::max(g, z.real());
  return g;
}

/// Bisects `set(p, x)` on [lo, hi] for the sign change of
/// normal_growth_rate. The ends must straddle the boundary.
inline double find_boundary(const ModelParams& p, const std::function<void(ModelParams&, double)>& set, double lo,
                            double hi, double tol = 1e-6, const SteadyOptions& opt = {}) {
  if (!(hi > lo) || !(tol > 0.0)) throw ConfigError("boundary search needs lo < hi and tol > 0");
  auto rate = [&](double x) {
    ModelParams q = p;
    set(q, x);
    return normal_growth_rate(q, opt);
  };
  double glo = rate(lo), ghi = rate(hi);
  if ((glo > 0.0) == (ghi > 0.0)) throw NumericalError("boundary search interval does not bracket a sign change");
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    const double g = rate(mid);
    if ((g > 0.0) == (glo > 0.0)) {
      lo = mid;
      glo = g;
    } else {
      hi = mid;
      ghi = g;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace omgap::meanfield

#endif  // OMGAP_MEANFIELD_HPP
