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

// Gap extraction, spectral types, gap-scaling fits and kernel-density edge
// detection on complex spectra.

#ifndef OMGAP_SPECTRA_HPP
#define OMGAP_SPECTRA_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <ostream>

#include "omgap/common.hpp"

namespace omgap::spectra {

/// Tolerances at or below zero mean "1e-8 x spectral radius".
inline constexpr double kAuto = -1.0;
inline constexpr double kRelativeTol = 1e-8;

inline double resolve_tol(const Spectrum& s, double tol) {
  return tol > 0.0 ? tol : kRelativeTol * spectral_radius(s);
}

struct GapValue {
  double delta = 0.0;
  cplx lambda;           // the minimizing eigenvalue
  std::size_t index = 0;  // its position in the input
};

namespace detail {

// Among candidates with equal |Re| (to roundoff) prefer smaller |Im|, then
// Im >= 0, then the earlier index.
inline bool better(const cplx& a, const cplx& b, double scale) {
  const double tie = 1e-12 * std::max(scale, 1.0);
  const double ra = std::abs(a.real()), rb = std::abs(b.real());
  if (std::abs(ra - rb) > tie) return ra < rb;
  const double ia = std::abs(a.imag()), ib = std::abs(b.imag());
  if (std::abs(ia - ib) > tie) return ia < ib;
  return a.imag() >= 0.0 && b.imag() < 0.0;
}

template <class Pred>
std::optional<GapValue> min_abs_re(const Spectrum& s, Pred keep) {
  const double scale = spectral_radius(s);
  std::optional<GapValue> best;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!keep(s[i])) continue;
    if (!best || better(s[i], best->lambda, scale)) best = GapValue{std::abs(s[i].real()), s[i], i};
  }
  return best;
}

}  // namespace detail

/// Smallest |Re| over eigenvalues with |lambda| > eps_zero, with lambda*.
inline GapValue liouvillian_gap_value(const Spectrum& s, double eps_zero = kAuto) {
  if (s.empty()) throw ConfigError("liouvillian_gap needs a nonempty spectrum");
  const double eps = resolve_tol(s, eps_zero);
  auto g = detail::min_abs_re(s, [&](const cplx& z) { return std::abs(z) > eps; });
  if (!g) throw NumericalError("every eigenvalue lies within eps_zero of zero");
  return *g;
}

inline double liouvillian_gap(const Spectrum& s, double eps_zero = kAuto) {
  return liouvillian_gap_value(s, eps_zero).delta;
}

/// Smallest |Re| over eigenvalues with |Im| > eps_im; empty when none oscillate.
inline std::optional<GapValue> om_gap_value(const Spectrum& s, double eps_im = kAuto) {
  const double eps = resolve_tol(s, eps_im);
  return detail::min_abs_re(s, [&](const cplx& z) { return std::abs(z.imag()) > eps; });
}

inline std::optional<double> om_gap(const Spectrum& s, double eps_im = kAuto) {
  auto g = om_gap_value(s, eps_im);
  return g ? std::optional<double>(g->delta) : std::nullopt;
}

// ---------------------------------------------------------------------------
// Spectral types

enum class SpectralType { type1 = 1, type2 = 2, type3 = 3, type4 = 4 };

/// Type 1: both gaps open and distinct; type 2: both open and equal;
/// type 3: Liouvillian gap closed, OM gap open; type 4: both closed.
/// A missing OM gap counts as infinite.
inline SpectralType classify(double delta_l, std::optional<double> delta_om, double eps_gap) {
  const double om = delta_om.value_or(std::numeric_limits<double>::infinity());
  if (delta_l > eps_gap) return om > delta_l + eps_gap ? SpectralType::type1 : SpectralType::type2;
  return om > eps_gap ? SpectralType::type3 : SpectralType::type4;
}

/// Closure threshold for finite-size sweeps: ten times the Liouvillian gap of
/// a reference point whose gap is known to close in the thermodynamic limit.
inline double reference_eps_gap(double reference_delta_l) { return 10.0 * reference_delta_l; }

struct GapReport {
  double delta_l = 0.0;
  std::optional<double> delta_om;
  cplx lambda_star;
  std::optional<SpectralType> type;
  double eps_zero = 0.0;
  double eps_im = 0.0;
};

inline GapReport gap_report(const Spectrum& s, std::optional<double> eps_gap = std::nullopt,
                            double eps_zero = kAuto, double eps_im = kAuto) {
  GapReport r;
  r.eps_zero = resolve_tol(s, eps_zero);
  r.eps_im = resolve_tol(s, eps_im);
  const GapValue g = liouvillian_gap_value(s, r.eps_zero);
  r.delta_l = g.delta;
  r.lambda_star = g.lambda;
  r.delta_om = om_gap(s, r.eps_im);
  if (eps_gap) r.type = classify(r.delta_l, r.delta_om, *eps_gap);
  return r;
}

inline void write_gap_header(std::ostream& os) { os << "delta_L,delta_OM,re_lambda_star,im_lambda_star,type"; }

/// One `delta_L,delta_OM,re_lambda_star,im_lambda_star,type` record; absent
/// values are left empty.
inline void write_gap_record(std::ostream& os, const GapReport& r) {
  os << format_double(r.delta_l) << ',' << (r.delta_om ? format_double(*r.delta_om) : "") << ','
     << format_double(r.lambda_star.real()) << ',' << format_double(r.lambda_star.imag()) << ','
     << (r.type ? std::to_string(static_cast<int>(*r.type)) : "");
}

// ---------------------------------------------------------------------------
// Scaling fits

struct PowerLawFit {
  double exponent = 0.0;   // z in delta = prefactor * L^-z
  double prefactor = 0.0;
  double r_squared = 0.0;
};

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

/// Ordinary least squares y = intercept + slope x.
inline LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n) throw ConfigError("fit_line needs at least two matched points");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx <= 0.0) throw NumericalError("fit_line: abscissae are all equal");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r_squared = syy > 0.0 ? sxy * sxy / (sxx * syy) : 1.0;
  return f;
}

inline PowerLawFit gap_scaling_fit(const std::vector<std::pair<double, double>>& gaps) {
  if (gaps.size() < 3) throw ConfigError("gap_scaling_fit needs at least three sizes");
  std::vector<double> x, y;
  for (auto [l, d] : gaps) {
    if (!(d > 0.0) || !(l > 0.0)) throw ConfigError("gap_scaling_fit needs positive sizes and gaps");
    x.push_back(std::log(l));
    y.push_back(std::log(d));
  }
  const LineFit f = fit_line(x, y);
  return {-f.slope, std::exp(f.intercept), f.r_squared};
}

// ---------------------------------------------------------------------------
// Edge detection

struct EdgeConfig {
  double sigma = 1.0;
  double density_threshold = 1.5;
  /// Half-width of the real-axis band; kAuto means 1e-8 x spectral radius.
  double band = kAuto;
  /// An edge point belongs to the right envelope when no eigenvalue within
  /// this vertical distance lies further right.
  double envelope_window = 0.5;
  /// Only envelope points with |Im| up to this fraction of the branch's
  /// largest |Im| enter the line fit.
  double fit_fraction = 0.5;
};

struct EdgeLine {
  /// Re = intercept + slope * Im along the branch.
  double slope = 0.0;
  double intercept = 0.0;
  std::size_t points = 0;
};

struct EdgeReport {
  std::vector<double> density;
  std::vector<std::size_t> edge_points;
  std::vector<std::size_t> band_points;  // edge points inside the real-axis band
  std::optional<EdgeLine> upper;
  std::optional<EdgeLine> lower;
  std::optional<double> delta_om_estimate;
  double band = 0.0;
};

/// D_i = sum_j exp(-|z_i - z_j|^2 / (2 sigma^2)) / (2 pi sigma^2), self-term
/// included. Summation follows input order for each i.
inline std::vector<double> kernel_density(const Spectrum& s, double sigma) {
  if (!(sigma > 0.0)) throw ConfigError("kernel width must be > 0");
  const double norm = 1.0 / (2.0 * kPi * sigma * sigma);
  const double inv = 1.0 / (2.0 * sigma * sigma);
  std::vector<double> d(s.size(), 0.0);
  for (std::size_t i = 0; i < s.size(); ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < s.size(); ++j) acc += std::exp(-std::norm(s[i] - s[j]) * inv);
    d[i] = norm * acc;
  }
  return d;
}

/// Flags low-density points, splits them into the upper and lower
/// half-planes and the real-axis band, and fits the right-hand envelope of
/// each oscillating branch with a straight line Re = a + b Im. The OM-gap
/// estimate is the decay rate -Re where the lines meet the band edge
/// (0 if they meet at Re > 0), averaged over the two mirrored branches.
inline EdgeReport edge_detect(const Spectrum& s, const EdgeConfig& cfg = {}) {
  if (s.size() < 10) throw ConfigError("edge_detect needs at least 10 eigenvalues");
  EdgeReport rep;
  rep.band = resolve_tol(s, cfg.band);
  rep.density = kernel_density(s, cfg.sigma);
  for (std::size_t i = 0; i < s.size(); ++i)
    if (rep.density[i] < cfg.density_threshold) rep.edge_points.push_back(i);

  auto on_envelope = [&](std::size_t i) {
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (j == i) continue;
      if (std::abs(s[j].imag() - s[i].imag()) <= cfg.envelope_window && s[j].real() > s[i].real()) return false;
    }
    return true;
  };

  auto fit_branch = [&](int sign) -> std::optional<EdgeLine> {
    std::vector<std::size_t> pts;
    double ymax = 0.0;
    for (std::size_t i : rep.edge_points) {
      const double y = sign * s[i].imag();
      if (y > rep.band && on_envelope(i)) {
        pts.push_back(i);
        ymax = std::max(ymax, y);
      }
    }
    std::vector<double> x, y;
    for (std::size_t i : pts) {
      if (sign * s[i].imag() <= cfg.fit_fraction * ymax) {
        y.push_back(s[i].real());
        x.push_back(sign * s[i].imag());
      }
    }
    if (x.size() < 3) return std::nullopt;
    double mx = 0.0;
    for (double v : x) mx += v;
    mx /= double(x.size());
    double sxx = 0.0;
    for (double v : x) sxx += (v - mx) * (v - mx);
    if (sxx <= 0.0) return std::nullopt;
    const LineFit f = fit_line(x, y);
    return EdgeLine{f.slope, f.intercept, x.size()};
  };

  for (std::size_t i : rep.edge_points)
    if (std::abs(s[i].imag()) <= rep.band) rep.band_points.push_back(i);
  rep.upper = fit_branch(+1);
  rep.lower = fit_branch(-1);

  // A crossing right of the imaginary axis means the edge runs into the
  // origin, i.e. a closed gap.
  double acc = 0.0;
  int count = 0;
  for (const auto& line : {rep.upper, rep.lower}) {
    if (!line) continue;
    acc += std::max(0.0, -(line->intercept + line->slope * rep.band));
    ++count;
  }
  if (count > 0) rep.delta_om_estimate = acc / count;
  return rep;
}

}  // namespace omgap::spectra

#endif  // OMGAP_SPECTRA_HPP
