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

#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "omgap/gp.hpp"
#include "omgap/spectra.hpp"

namespace omgap {
namespace {

using gp::GPParams;

GPParams deep() { return {1.0, 2.0, 1.0, 3.0, 1.0, 1.0}; }

TEST(Uniform, AboveThreshold) {
  const auto u = gp::gp_uniform(deep());
  EXPECT_DOUBLE_EQ(u.n0, 1.0);
  EXPECT_DOUBLE_EQ(u.mu, 0.0);
}

TEST(Uniform, AtAndBelowThreshold) {
  GPParams p = deep();
  p.r_p = p.r_l = 1.5;
  auto u = gp::gp_uniform(p);
  EXPECT_EQ(u.n0, 0.0);
  EXPECT_DOUBLE_EQ(u.mu, -2.0 * p.J);
  p.r_p = 0.0;
  p.r_l = 1.0;
  EXPECT_EQ(gp::gp_uniform(p).n0, 0.0);
}

TEST(Uniform, NeedsTwoBodyLossAboveThreshold) {
  GPParams p = deep();
  p.r_t = 0.0;
  EXPECT_THROW(gp::gp_uniform(p), ConfigError);
}

TEST(Dispersion, ZeroMomentum) {
  const auto d = gp::gp_dispersion(deep(), 1.0, 0.0);
  EXPECT_NEAR(std::abs(d.lambda_plus), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(d.lambda_minus - cplx(-2.0)), 0.0, 1e-15);
}

TEST(Dispersion, ZoneBoundary) {
  const auto d = gp::gp_dispersion(deep(), 1.0, kPi);
  EXPECT_NEAR(std::abs(d.lambda_plus - cplx(-13.0, std::sqrt(31.0))), 0.0, 1e-13);
  EXPECT_NEAR(std::abs(d.lambda_minus - cplx(-13.0, -std::sqrt(31.0))), 0.0, 1e-13);
}

TEST(Dispersion, PhononicWithoutDissipation) {
  const GPParams p{1.0, 2.0, 0.0, 0.0, 0.0, 0.0};
  const double k = 1e-3;
  const auto d = gp::gp_dispersion(p, 1.0, k);
  EXPECT_NEAR(std::abs(d.lambda_plus - cplx(0.0, 2e-3)), 0.0, 1e-9);
  EXPECT_NEAR(std::abs(d.lambda_minus - cplx(0.0, -2e-3)), 0.0, 1e-9);
}

TEST(Dispersion, RealBranchesOrderedDescending) {
  const auto d = gp::gp_dispersion(deep(), 1.0, 0.05);
  ASSERT_EQ(d.lambda_plus.imag(), 0.0);
  ASSERT_EQ(d.lambda_minus.imag(), 0.0);
  EXPECT_GT(d.lambda_plus.real(), d.lambda_minus.real());
  EXPECT_THROW(gp::gp_dispersion(deep(), -0.1, 0.0), ConfigError);
}

TEST(SmallK, ClosedForm) {
  const auto s = gp::gp_small_k(deep(), 1.0);
  EXPECT_DOUBLE_EQ(s.d_eff, 5.0);
  EXPECT_DOUBLE_EQ(s.constant, 2.0);
  GPParams p = deep();
  p.U = 0.0;
  EXPECT_DOUBLE_EQ(gp::gp_small_k(p, 0.7).d_eff, p.kappa * (1 + 2 * 0.7));
  EXPECT_THROW(gp::gp_small_k(p, 0.0), ConfigError);
}

// Quadratic regression of the dispersion over k in [1e-3, 1e-2].
TEST(SmallK, MatchesQuadraticFit) {
  for (const GPParams& p : {deep(), GPParams{1.0, 0.5, 2.0, 2.0, 0.4, 0.7}}) {
    const double n0 = gp::gp_uniform(p).n0;
    const auto s = gp::gp_small_k(p, n0);
    std::vector<double> k2, diff, gapped;
    for (int i = 0; i <= 20; ++i) {
      const double k = 1e-3 + (1e-2 - 1e-3) * i / 20.0;
      const auto d = gp::gp_dispersion(p, n0, k);
      k2.push_back(k * k);
      diff.push_back(d.lambda_plus.real());
      gapped.push_back(d.lambda_minus.real());
    }
    const auto f = spectra::fit_line(k2, diff);
    EXPECT_NEAR(-f.slope, s.d_eff, 1e-3 * s.d_eff);
    EXPECT_NEAR(-spectra::fit_line(k2, gapped).intercept, s.constant, 1e-3 * s.constant);
  }
}

TEST(Critical, Values) {
  const GPParams p = deep();
  EXPECT_EQ(gp::gp_critical(p, 0.0), cplx(0.0));
  EXPECT_NEAR(std::abs(gp::gp_critical(p, kPi / 2) - cplx(-2.0, 2.0)), 0.0, 1e-15);
}

TEST(Critical, RatioIsKappaOverJ) {
  const GPParams p{1.3, 2.0, 0.7, 0.0, 0.0, 1.0};
  for (double k : {0.01, 0.3, 1.0, 2.5}) {
    const cplx z = gp::gp_critical(p, k);
    EXPECT_NEAR(std::abs(z.real()) / std::abs(z.imag()), p.kappa / p.J, 1e-14);
  }
}

// Invariant: the dispersion at n0 = 0 is the critical spectrum.
TEST(GpProperty, ZeroDensityIsCritical) {
  const GPParams p{1.1, 3.0, 0.6, 1.0, 2.0, 0.8};
  for (int i = 0; i <= 40; ++i) {
    const double k = kPi * i / 40.0;
    const auto d = gp::gp_dispersion(p, 0.0, k);
    const cplx c = gp::gp_critical(p, k);
    EXPECT_NEAR(std::abs(d.lambda_plus - c), 0.0, 1e-14);
    EXPECT_NEAR(std::abs(d.lambda_minus - std::conj(c)), 0.0, 1e-14);
  }
}

// Invariant: the uniform solution is linearly stable and the branches are
// conjugate whenever they oscillate.
TEST(GpProperty, StabilityAndConjugation) {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(0.0, 4.0);
  for (int trial = 0; trial < 200; ++trial) {
    const GPParams p{0.2 + u(rng), u(rng), u(rng), u(rng), u(rng), 0.1 + u(rng)};
    const double n0 = gp::gp_uniform(p).n0;
    for (int i = 0; i <= 32; ++i) {
      const auto d = gp::gp_dispersion(p, n0, kPi * i / 32.0);
      EXPECT_LE(d.lambda_plus.real(), 1e-12);
      EXPECT_LE(d.lambda_minus.real(), 1e-12);
      if (d.lambda_plus.imag() != 0.0) EXPECT_EQ(d.lambda_plus, std::conj(d.lambda_minus));
    }
  }
}

TEST(Dump, DispersionCsv) {
  std::ostringstream os;
  gp::write_dispersion_csv(os, {gp::gp_dispersion(deep(), 1.0, 0.0)});
  EXPECT_EQ(os.str(), "k,re_plus,im_plus,re_minus,im_minus\n0,0,0,-2,0\n");
}

}  // namespace
}  // namespace omgap
