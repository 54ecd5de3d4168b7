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

#ifndef OMGAP_COMMON_HPP
#define OMGAP_COMMON_HPP

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <complex>
#include <cstdio>
#include <iostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace omgap {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using SparseMatrix = Eigen::SparseMatrix<cplx, Eigen::RowMajor>;

/// A set of complex eigenvalues.
using Spectrum = std::vector<cplx>;

inline constexpr cplx kI{0.0, 1.0};
inline constexpr double kPi = 3.14159265358979323846;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid parameters, configuration or arguments.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Solver failures: non-convergence, blowups, degenerate zero modes.
class NumericalError : public Error {
 public:
  using Error::Error;
};

inline void log_warning(const std::string& msg) {
  std::cerr << "omgap: warning: " << msg << '\n';
}

/// Formats a double with 17 significant digits, which round-trips exactly.
inline std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

inline double spectral_radius(const Spectrum& s) {
  double r = 0.0;
  for (const auto& z : s) r = std::max(r, std::abs(z));
  return r;
}

}  // namespace omgap

#endif  // OMGAP_COMMON_HPP
