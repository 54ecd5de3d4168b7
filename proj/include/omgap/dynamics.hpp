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

// Relaxation experiments: density-modulated initial states, exact and
// mean-field trajectories, the modulation amplitude and damped-cosine fits.

#ifndef OMGAP_DYNAMICS_HPP
#define OMGAP_DYNAMICS_HPP

#include <functional>
#include <limits>
#include <ostream>
#include <tuple>
#include <unsupported/Eigen/FFT>
#include <unsupported/Eigen/LevenbergMarquardt>

#include "omgap/fock.hpp"
#include "omgap/liouville.hpp"
#include "omgap/meanfield.hpp"

namespace omgap::dynamics {

/// Site phase cos(2 pi j / L); site index 0 plays the role of j = L.
inline double site_phase(int j, int sites) { return std::cos(2.0 * kPi * double(j % sites) / sites); }

/// Coherent sites with psi_j = sqrt(nbar (1 + delta cos(2 pi j / L))).
inline meanfield::ChainState modulated_coherent_chain(double nbar, double delta, int sites, int cutoff) {
  if (!(delta >= 0.0) || !(delta < 1.0)) throw ConfigError("modulation amplitude must satisfy 0 <= delta < 1");
  if (!(nbar >= 0.0)) throw ConfigError("density must be >= 0");
  if (sites < 1) throw ConfigError("sites must be >= 1");
  meanfield::ChainState s;
  for (int j = 0; j < sites; ++j) {
    const double arg = nbar * (1.0 + delta * site_phase(j, sites));
    s.sites.push_back(meanfield::coherent_state(std::sqrt(arg), cutoff));
  }
  return s;
}

/// Pure projector onto one occupation pattern.
inline Matrix exact_fock_initial(const Occupation& pattern, const FockBasis& basis) {
  const std::size_t k = basis.index_of(pattern);
  Matrix rho = Matrix::Zero(basis.dim(), basis.dim());
  rho(k, k) = 1.0;
  return rho;
}

inline std::vector<double> site_densities(const Matrix& rho, const FockBasis& basis) {
  std::vector<double> n(basis.sites(), 0.0);
  for (std::size_t k = 0; k < basis.dim(); ++k) {
    const double p = rho(k, k).real();
    const Occupation& occ = basis.state(k);
    for (int j = 0; j < basis.sites(); ++j) n[j] += p * occ[j];
  }
  return n;
}

struct ExactOptions {
  double dt = 0.005;
  std::size_t stride = 20;
  /// |tr - 1| or anti-Hermitian norm that aborts the run.
  double drift_tol = 1e-5;
};

struct ExactSample {
  double t;
  std::vector<double> density;  // empty without a basis
};

struct ExactTrajectory {
  std::vector<ExactSample> samples;
  Matrix final_state;
  double max_trace_drift = 0.0;
};

/// RK4 on the full density matrix. `observer` (optional) sees every recorded
/// sample; `basis` (optional) enables per-site densities.
inline ExactTrajectory evolve_exact(const Matrix& rho0, const OperatorMatrix& h, const std::vector<OperatorMatrix>& jumps,
                                    double t_end, const ExactOptions& opt = {}, const FockBasis* basis = nullptr,
                                    const std::function<void(double, const Matrix&)>& observer = {}) {
  if (!(opt.dt > 0.0)) throw ConfigError("dt must be > 0");
  if (t_end < 0.0) throw ConfigError("t_end must be >= 0");
  const liouville::LindbladGenerator gen(h, jumps);
  if (rho0.rows() != gen.dim() || rho0.cols() != gen.dim()) throw ConfigError("initial state dimension mismatch");
  const auto steps = static_cast<std::size_t>(std::ceil(t_end / opt.dt - 1e-9));
  const double dt = steps > 0 ? t_end / double(steps) : opt.dt;

  ExactTrajectory tr;
  Matrix rho = rho0;
  auto record = [&](double t) {
    ExactSample s{t, {}};
    if (basis) s.density = site_densities(rho, *basis);
    tr.samples.push_back(std::move(s));
    if (observer) observer(t, rho);
  };
  record(0.0);
  for (std::size_t k = 1; k <= steps; ++k) {
    const Matrix k1 = gen.apply(rho);
    const Matrix k2 = gen.apply(rho + 0.5 * dt * k1);
    const Matrix k3 = gen.apply(rho + 0.5 * dt * k2);
    const Matrix k4 = gen.apply(rho + dt * k3);
    rho += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    const double t = dt * double(k);
    const bool rec = (opt.stride > 0 && k % opt.stride == 0) || k == steps;
    if (rec || k % 64 == 0) {
      const double drift = std::abs(rho.trace() - rho0.trace());
      const double herm = (rho - rho.adjoint()).norm();
      tr.max_trace_drift = std::max(tr.max_trace_drift, drift);
      if (!(drift <= opt.drift_tol) || !(herm <= opt.drift_tol))
        throw NumericalError("trace/Hermiticity drift at t = " + format_double(t) + "; reduce the time step");
    }
    if (rec) record(t);
  }
  tr.final_state = std::move(rho);
  return tr;
}

// ---------------------------------------------------------------------------
// Modulation amplitude

struct ModulationSeries {
  std::vector<double> t;
  std::vector<double> delta_n;

  std::size_t size() const { return t.size(); }
};

/// delta_n = sum_j n_j cos(2 pi j / L). For L >= 2 the phases sum to zero,
/// so n_0 is subtracted first and a uniform chain gives exactly 0.
inline double modulation(const std::vector<double>& density) {
  const int L = static_cast<int>(density.size());
  const double ref = L >= 2 ? density[0] : 0.0;
  double acc = 0.0;
  for (int j = 0; j < L; ++j) acc += (density[j] - ref) * site_phase(j, L);
  return acc;
}

inline ModulationSeries density_modulation(const meanfield::Trajectory& tr) {
  ModulationSeries s;
  for (const auto& smp : tr.samples) {
    s.t.push_back(smp.t);
    s.delta_n.push_back(modulation(smp.density));
  }
  return s;
}

inline ModulationSeries density_modulation(const ExactTrajectory& tr) {
  ModulationSeries s;
  for (const auto& smp : tr.samples) {
    if (smp.density.empty()) throw ConfigError("trajectory carries no site densities");
    s.t.push_back(smp.t);
    s.delta_n.push_back(modulation(smp.density));
  }
  return s;
}

/// Writes `t,delta_n` rows.
inline void write_series_csv(std::ostream& os, const ModulationSeries& s) {
  os << "t,delta_n\n";
  for (std::size_t i = 0; i < s.size(); ++i) os << format_double(s.t[i]) << ',' << format_double(s.delta_n[i]) << '\n';
}

// ---------------------------------------------------------------------------
// Damped-cosine fit

struct RelaxationFit {
  double A = 0.0;
  double Gamma = 0.0;
  double Omega = 0.0;
  double residual = 0.0;  // rms over the window
  double t_begin = 0.0;
  double t_end = 0.0;
  bool converged = false;
  bool omega_clamped = false;
};

struct FitOptions {
  /// Samples before this time are skipped.
  double t_start = 0.0;
  std::size_t min_samples = 50;
};

namespace detail {

// A e^{-Gamma t} cos(Omega t) with parameters x = (A, Gamma, Omega); with
// `fixed_omega` the model has two parameters and Omega = 0.
struct DampedCosine : Eigen::DenseFunctor<double> {
  DampedCosine(const std::vector<double>& t, const std::vector<double>& y, bool fixed_omega)
      : Eigen::DenseFunctor<double>(fixed_omega ? 2 : 3, static_cast<int>(t.size())), t_(t), y_(y),
        fixed_(fixed_omega) {}

  int operator()(const InputType& x, ValueType& f) const {
    const double om = fixed_? 0.0 : x[2];
    for (std::size_t i = 0; i < t_.size(); ++i) f[i] = x[0] * std::exp(-x[1] * t_[i]) * std::cos(om * t_[i]) - y_[i];
    return 0;
  }
  int df(const InputType& x, JacobianType& j) const {
    const double om = fixed_? 0.0 : x[2];
    for (std::size_t i = 0; i < t_.size(); ++i) {
      const double e = std::exp(-x[1] * t_[i]), c = std::cos(om * t_[i]), s = std::sin(om * t_[i]);
      j(i, 0) = e * c;
      j(i, 1) = -t_[i] * x[0] * e * c;
      if (!fixed_) j(i, 2) = -t_[i] * x[0] * e * s;
    }
    return 0;
  }

  const std::vector<double>& t_;
  const std::vector<double>& y_;
  bool fixed_;
};

inline bool lm_success(Eigen::LevenbergMarquardtSpace::Status s) {
  using namespace Eigen::LevenbergMarquardtSpace;
  return s == RelativeReductionTooSmall || s == RelativeErrorTooSmall || s == RelativeErrorAndReductionTooSmall ||
         s == CosinusTooSmall || s == FtolTooSmall || s == XtolTooSmall || s == GtolTooSmall;
}

struct Attempt {
  Eigen::VectorXd x;
  double rms = std::numeric_limits<double>::infinity();
  bool ok = false;
};

inline Attempt run_lm(const std::vector<double>& t, const std::vector<double>& y, Eigen::VectorXd x, bool fixed) {
  DampedCosine f(t, y, fixed);
  Eigen::LevenbergMarquardt<DampedCosine> lm(f);
  lm.setXtol(1e-14);
  lm.setFtol(1e-14);
  lm.setGtol(0.0);
  lm.setMaxfev(5000);
  const auto status = lm.minimize(x);
  Eigen::VectorXd res(t.size());
  f(x, res);
  Attempt a;
  a.x = x;
  a.rms = std::sqrt(res.squaredNorm() / double(t.size()));
  a.ok = lm_success(status) && x.allFinite() && std::isfinite(a.rms);
  return a;
}

// Dominant angular frequency of the linearly detrended series (k >= 1).
inline double dft_peak(const std::vector<double>& t, const std::vector<double>& y) {
  const std::size_t n = y.size();
  std::vector<double> x(t.size()), yy(y);
  double mt = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mt += t[i];
    my += y[i];
  }
  mt /= n;
  my /= n;
  double stt = 0.0, sty = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    stt += (t[i] - mt) * (t[i] - mt);
    sty += (t[i] - mt) * (y[i] - my);
  }
  const double slope = stt > 0.0 ? sty / stt : 0.0;
  for (std::size_t i = 0; i < n; ++i) yy[i] = y[i] - my - slope * (t[i] - mt);
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> spec;
  fft.fwd(spec, yy);
  std::size_t best = 0;
  double peak = 0.0;
  for (std::size_t k = 1; k <= n / 2; ++k)
    if (std::abs(spec[k]) > peak) {
      peak = std::abs(spec[k]);
      best = k;
    }
  const double span = (t.back() - t.front()) * double(n) / double(n - 1);
  return 2.0 * kPi * double(best) / span;
}

// Envelope decay rate from local maxima of |y|; falls back to the log-slope
// of |y| itself when fewer than two maxima exist. Returns (Gamma, t0, |y0|).
inline std::tuple<double, double, double> envelope_guess(const std::vector<double>& t, const std::vector<double>& y) {
  std::vector<double> et, ey;
  for (std::size_t i = 1; i + 1 < y.size(); ++i) {
    const double a = std::abs(y[i]);
    if (a > 0.0 && a >= std::abs(y[i - 1]) && a > std::abs(y[i + 1])) {
      et.push_back(t[i]);
      ey.push_back(std::log(a));
    }
  }
  if (et.size() < 2) {
    et.clear();
    ey.clear();
    for (std::size_t i = 0; i < y.size(); ++i)
      if (std::abs(y[i]) > 0.0) {
        et.push_back(t[i]);
        ey.push_back(std::log(std::abs(y[i])));
      }
  }
  if (et.size() < 2) return {0.0, t.front(), std::abs(y.front())};
  double mt = 0.0, my = 0.0;
  for (std::size_t i = 0; i < et.size(); ++i) {
    mt += et[i];
    my += ey[i];
  }
  mt /= et.size();
  my /= et.size();
  double stt = 0.0, sty = 0.0;
  for (std::size_t i = 0; i < et.size(); ++i) {
    stt += (et[i] - mt) * (et[i] - mt);
    sty += (et[i] - mt) * (ey[i] - my);
  }
  const double gamma = stt > 0.0 ? -sty / stt : 0.0;
  return {gamma, et.front(), std::exp(ey.front())};
}

}  // namespace detail

/// Least-squares fit of A e^{-Gamma t} cos(Omega t) on samples with
/// t >= opt.t_start, restarted from Omega = 0, 2 peak and a comb across the
/// DFT bin around the peak. The phase is anchored at t = 0, so the comb spacing
/// keeps the phase error at the window end below half a radian. A fitted
/// |Omega| below 2 pi / window is clamped to 0 and (A, Gamma) refitted.
inline RelaxationFit fit_damped_cosine(const ModulationSeries& series, const FitOptions& opt = {}) {
  std::vector<double> t, y;
  for (std::size_t i = 0; i < series.size(); ++i)
    if (series.t[i] >= opt.t_start) {
      t.push_back(series.t[i]);
      y.push_back(series.delta_n[i]);
    }
  if (t.size() < opt.min_samples)
    throw ConfigError("damped-cosine fit needs at least " + std::to_string(opt.min_samples) + " samples");
  RelaxationFit fit;
  fit.t_begin = t.front();
  fit.t_end = t.back();
  double ymax = 0.0;
  for (double v : y) ymax = std::max(ymax, std::abs(v));
  if (ymax == 0.0) {
    fit.converged = true;  // identically zero signal: A = 0
    return fit;
  }

  const double peak = detail::dft_peak(t, y);
  const auto [g0, te, ye] = detail::envelope_guess(t, y);
  detail::Attempt best;
  std::vector<double> starts{0.0, 2.0 * peak};
  const double bin = 2.0 * kPi / (t.back() - t.front()), step = 0.5 / std::abs(t.back());
  const int comb = static_cast<int>(std::ceil(bin / step));
  for (int k = -comb; k <= comb; ++k)
    if (peak + k * step > 0.0) starts.push_back(peak + k * step);
  for (double om0 : starts) {
    Eigen::VectorXd x(3);
    const double c = std::cos(om0 * t.front());
    x << (std::abs(c) > 0.2 ? y.front() / c : ye) * std::exp(g0 * (std::abs(c) > 0.2 ? t.front() : te)), g0, om0;
    const detail::Attempt a = detail::run_lm(t, y, x, false);
    if (a.ok && a.rms < best.rms) best = a;
  }
  if (!best.ok) throw NumericalError("damped-cosine fit failed to converge for every restart");

  fit.A = best.x[0];
  fit.Gamma = best.x[1];
  fit.Omega = std::abs(best.x[2]);
  fit.residual = best.rms;
  fit.converged = true;
  const double floor = 2.0 * kPi / (fit.t_end - fit.t_begin);
  if (fit.Omega < floor) {
    Eigen::VectorXd x(2);
    x << fit.A, fit.Gamma;
    const detail::Attempt a = detail::run_lm(t, y, x, true);
    fit.omega_clamped = true;
    fit.Omega = 0.0;
    if (a.ok) {
      fit.A = a.x[0];
      fit.Gamma = a.x[1];
      fit.residual = a.rms;
    }
  }
  return fit;
}

inline void write_fit_header(std::ostream& os) { os << "A,Gamma,Omega,residual"; }
inline void write_fit_record(std::ostream& os, const RelaxationFit& f) {
  os << format_double(f.A) << ',' << format_double(f.Gamma) << ',' << format_double(f.Omega) << ','
     << format_double(f.residual);
}

// ---------------------------------------------------------------------------
// Pipelines

struct MFRelaxationOptions {
  double delta = 0.05;
  double t_end = 100.0;
  meanfield::EvolveOptions evolve{0.005, 20, 1e-5};
};

/// Mean-field relaxation from a modulated coherent chain. The chemical
/// potential drops out of site densities, so the given value is used as is.
inline ModulationSeries relax_mf(const ModelParams& p, const MFRelaxationOptions& opt = {}) {
  p.validate();
  auto s = modulated_coherent_chain(p.density, opt.delta, p.sites, p.cutoff);
  return density_modulation(meanfield::evolve_mf(std::move(s), p, opt.t_end, opt.evolve));
}

/// Exact relaxation from a Fock pattern in the model's natural basis.
inline ModulationSeries relax_exact(const ModelParams& p, Model model, const Occupation& pattern, double t_end,
                                    const ExactOptions& opt = {}) {
  p.validate(model);
  int n = 0;
  for (int v : pattern) n += v;
  if (static_cast<int>(pattern.size()) != p.sites) throw ConfigError("initial pattern length differs from sites");
  const BasisSpec spec = model == Model::bond_dephasing ? BasisSpec::fixed_n(p.sites, n)
                                                        : BasisSpec::truncated(p.sites, p.cutoff);
  const FockBasis basis = build_basis(spec);
  const Matrix rho0 = exact_fock_initial(pattern, basis);
  const auto tr = evolve_exact(rho0, hamiltonian(basis, p), jump_set(basis, p, model), t_end, opt, &basis);
  return density_modulation(tr);
}

}  // namespace omgap::dynamics

#endif  // OMGAP_DYNAMICS_HPP
