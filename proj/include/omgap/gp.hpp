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

// Closed-form Gross-Pitaevskii results for the pumped ring (model 2):
// uniform condensate, linear excitation rates and their small-k limits.

#ifndef OMGAP_GP_HPP
#define OMGAP_GP_HPP

#include <cmath>
#include <ostream>
#include <vector>

#include "omgap/common.hpp"
#include "omgap/fock.hpp"

namespace omgap::gp {

struct GPParams {
  double J = 1.0;
  double U = 0.0;
  double kappa = 1.0;
  double r_p = 0.0;
  double r_l = 0.0;
  double r_t = 1.0;

  /// Net linear gain (r_p - r_l) / 2.
  double r_d() const { return 0.5 * (r_p - r_l); }

  static GPParams from(const ModelParams& p) { return {p.J, p.U, p.kappa, p.r_p, p.r_l, p.r_t}; }
};

struct Uniform {
  double n0;
  double mu;
};

/// n0 = r_d / r_t above threshold (0 otherwise) and mu = -2J + U n0.
inline Uniform gp_uniform(const GPParams& p) {
  const double rd = p.r_d();
  double n0 = 0.0;
  if (rd > 0.0) {
    if (!(p.r_t > 0.0)) throw ConfigError("a uniform condensate needs r_t > 0");
    n0 = rd / p.r_t;
  }
  return {n0, -2.0 * p.J + p.U * n0};
}

struct DispersionPoint {
  double k = 0.0;
  cplx lambda_plus;
  cplx lambda_minus;
};

/// lambda = -2 kappa (1 + 2 n0)(1 - cos k) - r_t n0 +/- i sqrt(X), with
/// X = [2J(1 - cos k) + U n0]^2 - (U^2 + r_t^2) n0^2. For X < 0 both roots
/// are real and lambda_plus is the larger one.
inline DispersionPoint gp_dispersion(const GPParams& p, double n0, double k) {
  if (n0 < 0.0) throw ConfigError("gp_dispersion needs n0 >= 0");
  const double c = 1.0 - std::cos(k);
  const double re = -2.0 * p.kappa * (1.0 + 2.0 * n0) * c - p.r_t * n0;
  const double e = 2.0 * p.J * c + p.U * n0;
  const double x = e * e - (p.U * p.U + p.r_t * p.r_t) * n0 * n0;
  DispersionPoint d{k, {}, {}};
  if (x >= 0.0) {
    const double s = std::sqrt(x);
    d.lambda_plus = {re, s};
    d.lambda_minus = {re, -s};
  } else {
    const double s = std::sqrt(-x);
    d.lambda_plus = {re + s, 0.0};
    d.lambda_minus = {re - s, 0.0};
  }
  return d;
}

struct SmallK {
  double d_eff;     // lambda ~ -d_eff k^2 on the diffusive branch
  double constant;  // the gapped branch sits at -constant
};

inline SmallK gp_small_k(const GPParams& p, double n0) {
  if (!(n0 > 0.0)) throw ConfigError("gp_small_k needs n0 > 0");
  if (!(p.r_t > 0.0)) throw ConfigError("gp_small_k needs r_t > 0");
  return {p.kappa * (1.0 + 2.0 * n0) + p.J * p.U / p.r_t, 2.0 * p.r_t * n0};
}

/// Spectrum at the transition (n0 = 0): -2 kappa (1 - cos k) + 2 i J (1 - cos k);
/// the conjugate root is the other branch.
inline cplx gp_critical(const GPParams& p, double k) {
  const double c = 1.0 - std::cos(k);
  return {-2.0 * p.kappa * c, 2.0 * p.J * c};
}

/// Writes `k,re_plus,im_plus,re_minus,im_minus` rows.
inline void write_dispersion_csv(std::ostream& os, const std::vector<DispersionPoint>& pts) {
  os << "k,re_plus,im_plus,re_minus,im_minus\n";
  for (const auto& d : pts)
    os << format_double(d.k) << ',' << format_double(d.lambda_plus.real()) << ','
       << format_double(d.lambda_plus.imag()) << ',' << format_double(d.lambda_minus.real()) << ','
       << format_double(d.lambda_minus.imag()) << '\n';
}

}  // namespace omgap::gp

#endif  // OMGAP_GP_HPP
