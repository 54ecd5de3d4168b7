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

#include <cmath>
#include <random>
#include <sstream>

#include "omgap/dynamics.hpp"
#include "omgap/liouville.hpp"
#include "omgap/spectra.hpp"

namespace omgap {
namespace {

ModelParams model1(double gamma, double U, int sites, int cutoff = 20) {
  ModelParams p;
  p.gamma = gamma;
  p.U = U;
  p.sites = sites;
  p.cutoff = cutoff;
  return p;
}

dynamics::ModulationSeries synthetic(double A, double G, double W, double dt, double t_end) {
  dynamics::ModulationSeries s;
  for (int i = 0; i * dt <= t_end + 1e-12; ++i) {
    const double t = i * dt;
    s.t.push_back(t);
    s.delta_n.push_back(A * std::exp(-G * t) * std::cos(W * t));
  }
  return s;
}

// ---------------------------------------------------------------------------
// Initial states

TEST(ModulatedChain, UniformWithoutModulation) {
  const auto s = dynamics::modulated_coherent_chain(0.5, 0.0, 6, 12);
  for (const auto& r : s.sites) {
    EXPECT_LE((r - s.sites[0]).norm(), 0.0);
    EXPECT_NEAR(std::abs(meanfield::moments(r).b - std::sqrt(0.5)), 0.0, 1e-9);
  }
}

TEST(ModulatedChain, SiteDensitiesAndModulation) {
  const auto s = dynamics::modulated_coherent_chain(0.5, 0.1, 8, 20);
  EXPECT_NEAR(meanfield::moments(s.sites[0]).n.real(), 0.55, 1e-9);
  EXPECT_NEAR(meanfield::moments(s.sites[4]).n.real(), 0.45, 1e-9);
  std::vector<double> n;
  for (const auto& r : s.sites) n.push_back(meanfield::moments(r).n.real());
  EXPECT_NEAR(dynamics::modulation(n), 0.5 * 0.1 * 8 / 2.0, 1e-9);
}

TEST(ModulatedChain, RejectsBadAmplitude) {
  EXPECT_THROW(dynamics::modulated_coherent_chain(0.5, 1.0, 8, 10), ConfigError);
  EXPECT_THROW(dynamics::modulated_coherent_chain(0.5, -0.1, 8, 10), ConfigError);
}

TEST(FockInitial, HalfFilledChain) {
  const FockBasis b = build_basis(BasisSpec::fixed_n(6, 3));
  const Matrix r = dynamics::exact_fock_initial({1, 1, 1, 0, 0, 0}, b);
  EXPECT_EQ(r.trace(), cplx(1.0));
  EXPECT_EQ((r - r.adjoint()).norm(), 0.0);
  EXPECT_EQ((r * r - r).norm(), 0.0);
  const auto n = dynamics::site_densities(r, b);
  EXPECT_EQ(n, (std::vector<double>{1, 1, 1, 0, 0, 0}));
}

TEST(FockInitial, FollowsBasisOrdering) {
  const FockBasis b = build_basis(BasisSpec::fixed_n(2, 2));
  const Matrix r = dynamics::exact_fock_initial({2, 0}, b);
  const std::size_t k = b.index_of({2, 0});
  EXPECT_EQ(r(k, k), cplx(1.0));
  EXPECT_EQ(r.cwiseAbs().sum(), 1.0);
  EXPECT_ANY_THROW(dynamics::exact_fock_initial({1, 0}, b));
}

// ---------------------------------------------------------------------------
// Exact evolution

TEST(EvolveExact, SingleSiteLoss) {
  ModelParams p;
  p.sites = 1;
  p.r_l = 1.0;
  p.r_t = 1e-300;  // two-body loss is inert on |1><1|
  const FockBasis b = build_basis(BasisSpec::single_site(4));
  const Matrix rho0 = dynamics::exact_fock_initial({1}, b);
  const auto tr =
      dynamics::evolve_exact(rho0, hamiltonian(b, p), jump_set(b, p, Model::pump_loss), 1.0, {0.005, 20, 1e-5}, &b);
  for (const auto& s : tr.samples) EXPECT_NEAR(s.density[0], std::exp(-s.t), 1e-8);
}

TEST(EvolveExact, Model1ConservesParticleNumberAndTrace) {
  const ModelParams p = model1(1.0, 2.0, 4);
  const FockBasis b = build_basis(BasisSpec::fixed_n(4, 2));
  const Matrix rho0 = dynamics::exact_fock_initial({1, 1, 0, 0}, b);
  const auto tr = dynamics::evolve_exact(rho0, hamiltonian(b, p), jump_set(b, p, Model::bond_dephasing), 50.0,
                                         {0.005, 200, 1e-5}, &b);
  for (const auto& s : tr.samples) {
    double n = 0.0;
    for (double x : s.density) n += x;
    EXPECT_NEAR(n, 2.0, 1e-9);
  }
  EXPECT_LE(tr.max_trace_drift, 1e-8);
}

TEST(EvolveExact, MatchesEigenmodeReconstruction) {
  ModelParams p = model1(0.7, 1.5, 3);
  p.kappa = 1.2;
  const FockBasis b = build_basis(BasisSpec::fixed_n(3, 2));
  const auto h = hamiltonian(b, p);
  const auto jumps = jump_set(b, p, Model::bond_dephasing);
  const auto es = linalg::eig_general(liouville::build_superoperator(h, jumps).matrix, {.vectors = true});
  const Matrix rho0 = dynamics::exact_fock_initial({2, 0, 0}, b);
  const auto ex = liouville::mode_expansion(es, rho0);
  const auto tr = dynamics::evolve_exact(rho0, h, jumps, 1.0);
  EXPECT_LE((tr.final_state - ex.evolve(1.0)).cwiseAbs().maxCoeff(), 1e-6);
}

// Invariant: halving dt shrinks the RK4 error about sixteenfold.
TEST(EvolveExactProperty, FourthOrderConvergence) {
  const ModelParams p = model1(1.0, 2.0, 3);
  const FockBasis b = build_basis(BasisSpec::fixed_n(3, 2));
  const auto h = hamiltonian(b, p);
  const auto jumps = jump_set(b, p, Model::bond_dephasing);
  const Matrix rho0 = dynamics::exact_fock_initial({2, 0, 0}, b);
  auto run = [&](double dt) { return dynamics::evolve_exact(rho0, h, jumps, 2.0, {dt, 0, 1e-5}).final_state; };
  const Matrix a = run(0.05), c = run(0.025), e = run(0.0125);
  const double ratio = (a - c).norm() / (c - e).norm();
  EXPECT_GE(ratio, 8.0);
  EXPECT_LE(ratio, 32.0);
}

TEST(EvolveExact, Errors) {
  const FockBasis b = build_basis(BasisSpec::single_site(3));
  const OperatorMatrix h(SparseMatrix(3, 3));
  EXPECT_THROW(dynamics::evolve_exact(Matrix::Identity(2, 2), h, {}, 1.0), ConfigError);
  EXPECT_THROW(dynamics::evolve_exact(Matrix::Identity(3, 3) / 3.0, h, {}, 1.0, {0.0, 1, 1e-5}), ConfigError);
  EXPECT_THROW(dynamics::evolve_exact(Matrix::Identity(3, 3) / 3.0, h, {}, -1.0), ConfigError);
}

TEST(RelaxExact, PatternValidation) {
  const ModelParams p = model1(1.0, 2.0, 4);
  EXPECT_THROW(dynamics::relax_exact(p, Model::bond_dephasing, {1, 1, 0}, 1.0), ConfigError);
  const auto s = dynamics::relax_exact(p, Model::bond_dephasing, {1, 1, 0, 0}, 1.0);
  ASSERT_GE(s.size(), 2u);
  // Index 0 is site j = L: cos(2 pi) + cos(pi/2) = 1.
  EXPECT_NEAR(s.delta_n[0], 1.0, 1e-12);
}

// ---------------------------------------------------------------------------
// Modulation

TEST(Modulation, Examples) {
  EXPECT_NEAR(dynamics::modulation(std::vector<double>(8, 0.5)), 0.0, 1e-15);
  std::vector<double> n(8);
  for (int j = 1; j <= 8; ++j) n[j % 8] = 0.5 + 0.1 * std::cos(2.0 * kPi * j / 8.0);
  EXPECT_NEAR(dynamics::modulation(n), 0.4, 1e-12);
  EXPECT_NEAR(dynamics::modulation({0.0, 1.0, 0.0, 0.0}), 0.0, 1e-15);
  EXPECT_NEAR(dynamics::modulation({1.0, 0.0, 0.0, 0.0}), 1.0, 1e-15);
}

TEST(Modulation, SeriesCsv) {
  dynamics::ModulationSeries s{{0.0, 0.5}, {0.2, -0.1}};
  std::ostringstream os;
  dynamics::write_series_csv(os, s);
  EXPECT_EQ(os.str(), "t,delta_n\n0,0.20000000000000001\n0.5,-0.10000000000000001\n");
}

TEST(Modulation, ExactTrajectoryNeedsDensities) {
  const FockBasis b = build_basis(BasisSpec::single_site(2));
  const auto tr = dynamics::evolve_exact(dynamics::exact_fock_initial({1}, b), OperatorMatrix(SparseMatrix(2, 2)), {},
                                         0.1);
  EXPECT_THROW(dynamics::density_modulation(tr), ConfigError);
}

// ---------------------------------------------------------------------------
// Damped-cosine fit

TEST(Fit, RecoversOscillatingSignal) {
  const auto f = dynamics::fit_damped_cosine(synthetic(2.0, 0.3, 1.5, 0.1, 40.0));
  ASSERT_TRUE(f.converged);
  EXPECT_NEAR(f.A, 2.0, 1e-6);
  EXPECT_NEAR(f.Gamma, 0.3, 1e-6);
  EXPECT_NEAR(f.Omega, 1.5, 1e-6);
  EXPECT_LE(f.residual, 1e-8);
  EXPECT_FALSE(f.omega_clamped);
}

TEST(Fit, PureDecayHasNoFrequency) {
  const auto f = dynamics::fit_damped_cosine(synthetic(1.0, 0.7, 0.0, 0.1, 40.0));
  EXPECT_EQ(f.Omega, 0.0);
  EXPECT_NEAR(f.Gamma, 0.7, 1e-6);
  EXPECT_NEAR(f.A, 1.0, 1e-6);
}

TEST(Fit, ZeroSignalIsGraceful) {
  const auto f = dynamics::fit_damped_cosine(synthetic(0.0, 0.3, 1.0, 0.1, 40.0));
  EXPECT_TRUE(f.converged);
  EXPECT_EQ(f.A, 0.0);
}

TEST(Fit, WindowAndSampleCount) {
  const auto s = synthetic(2.0, 0.3, 1.5, 0.1, 40.0);
  const auto f = dynamics::fit_damped_cosine(s, {2.0, 50});
  EXPECT_NEAR(f.t_begin, 2.0, 1e-12);
  EXPECT_NEAR(f.Gamma, 0.3, 1e-6);
  EXPECT_THROW(dynamics::fit_damped_cosine(synthetic(1.0, 0.3, 1.0, 0.1, 3.0)), ConfigError);
}

TEST(Fit, FitRecordCsv) {
  dynamics::RelaxationFit f;
  f.A = 1.0;
  f.Gamma = 0.5;
  f.Omega = 0.0;
  f.residual = 0.25;
  std::ostringstream os;
  dynamics::write_fit_header(os);
  os << '\n';
  dynamics::write_fit_record(os, f);
  EXPECT_EQ(os.str(), "A,Gamma,Omega,residual\n1,0.5,0,0.25");
}

// ---------------------------------------------------------------------------
// Mean-field relaxation

// Superfluid point (gamma = 1, U = 2) at L = 16: the fitted rates follow the
// slowest mean-field eigenvalue, and a second-half refit agrees within 10%.
TEST(RelaxMf, FitMatchesSlowestEigenvalue) {
  const ModelParams p = model1(1.0, 2.0, 16);
  const auto ss = meanfield::find_steady(p);
  ASSERT_TRUE(ss.report.converged);
  const auto gap = spectra::liouvillian_gap_value(meanfield::mf_spectrum(ss.state, ss.params).all());
  const auto series = dynamics::relax_mf(p);
  const auto f = dynamics::fit_damped_cosine(series, {2.0 / p.kappa, 50});
  EXPECT_NEAR(f.Gamma, gap.delta, 0.05 * gap.delta);
  EXPECT_NEAR(f.Omega, std::abs(gap.lambda.imag()), 0.05 * std::abs(gap.lambda.imag()));

  const auto half = dynamics::fit_damped_cosine(series, {0.5 * series.t.back(), 50});
  EXPECT_NEAR(half.Gamma, f.Gamma, 0.1 * f.Gamma);
  EXPECT_NEAR(half.Omega, f.Omega, 0.1 * f.Omega);
}

// Invariant: oscillating relaxation in the superfluid, exponential in the
// normal fluid (small chain, short cutoff).
TEST(RelaxMfProperty, OscillatoryExponentialDichotomy) {
  const double omega_min = 0.01;
  const auto sf = dynamics::relax_mf(model1(1.0, 2.0, 8, 10));
  EXPECT_GT(dynamics::fit_damped_cosine(sf, {2.0, 50}).Omega, omega_min);
  const auto nf = dynamics::relax_mf(model1(2.0, 4.0, 8, 10));
  EXPECT_LE(dynamics::fit_damped_cosine(nf, {2.0, 50}).Omega, omega_min);
}

// Invariant: for a converged single-mode signal, refitting the second half of
// the window moves (Gamma, Omega) by less than 10%. Frequencies keep at least
// one and a half periods inside the half window.
TEST(FitProperty, SecondHalfRefitIsConsistent) {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> noise(0.0, 1e-6);
  for (int trial = 0; trial < 50; ++trial) {
    const double A = 0.05 + u(rng), G = 0.05 + 0.3 * u(rng), W = 0.5 + 2.0 * u(rng);
    auto s = synthetic(A, G, W, 0.1, 40.0);
    for (double& x : s.delta_n) x += A * noise(rng);
    const auto full = dynamics::fit_damped_cosine(s);
    const auto half = dynamics::fit_damped_cosine(s, {20.0, 50});
    ASSERT_TRUE(full.converged && half.converged);
    EXPECT_NEAR(half.Gamma, full.Gamma, 0.1 * full.Gamma) << "trial " << trial;
    EXPECT_NEAR(half.Omega, full.Omega, 0.1 * full.Omega) << "trial " << trial;
  }
}

}  // namespace
}  // namespace omgap
