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

// omgap: command-line driver for sweeps, spectra and relaxation runs.
//
// Exit codes: 0 success, 2 configuration error, 3 numerical failure.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "omgap/config.hpp"
#include "omgap/sweep.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct GlobalFlags {
  std::string config_path;
  std::optional<int> model;
  std::string out;
  int threads = 1;
  std::vector<std::string> overrides;
};

omgap::config::SweepConfig load(const GlobalFlags& g) {
  omgap::config::RawConfig raw;
  if (!g.config_path.empty()) raw = omgap::config::parse_file(g.config_path);
  for (const auto& o : g.overrides) omgap::config::apply_override(raw, o);
  if (!g.out.empty()) raw.set("output.dir", g.out);
  auto cfg = omgap::config::build(raw, g.model);
  if (g.threads < 1) throw omgap::ConfigError("--threads must be >= 1");
  return cfg;
}

std::string opt(const std::optional<double>& v) { return v ? omgap::format_double(*v) : "none"; }

int run(const std::string& cmd, const GlobalFlags& g) {
  using namespace omgap;
  const auto cfg = load(g);
  if (cmd == "phase-diagram") {
    const auto r = sweep::run_phase_diagram(cfg, g.threads);
    std::size_t flagged = 0;
    for (const auto& c : r.records) flagged += c.converged ? 0 : 1;
    std::printf("phase-diagram: %zu cells computed, %zu skipped, %zu flagged -> %s\n", r.records.size(), r.skipped,
                flagged, r.csv.string().c_str());
  } else if (cmd == "spectrum") {
    const auto r = sweep::run_spectrum(cfg, g.threads);
    std::printf("spectrum: %zu eigenvalues, delta_L = %s, delta_OM = %s\n", r.spectrum.size(),
                format_double(r.gaps.delta_l).c_str(), opt(r.gaps.delta_om).c_str());
    if (r.edge) std::printf("edge estimate: %s\n", opt(r.edge->delta_om_estimate).c_str());
  } else if (cmd == "relax") {
    const auto r = sweep::run_relaxation(cfg);
    std::printf("relax: %zu samples, A = %s, Gamma = %s, Omega = %s\n", r.series.size(),
                format_double(r.fit.A).c_str(), format_double(r.fit.Gamma).c_str(),
                format_double(r.fit.Omega).c_str());
  } else if (cmd == "gp-dispersion") {
    const auto r = sweep::run_gp_dispersion(cfg);
    std::printf("gp-dispersion: %zu momenta\n", r.size());
  } else if (cmd == "edge-detect") {
    const auto r = sweep::run_edge_detect(cfg);
    std::printf("edge-detect: %zu edge points, estimate = %s\n", r.edge_points.size(),
                opt(r.delta_om_estimate).c_str());
  } else if (cmd == "gap-scaling") {
    const auto r = sweep::run_gap_scaling(cfg, g.threads);
    std::printf("gap-scaling: exponent = %s (R^2 = %s)\n", format_double(r.fit.exponent).c_str(),
                format_double(r.fit.r_squared).c_str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Liouvillian and oscillating-mode gaps of dissipative lattice bosons"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalFlags g;
  int model = 0;
  app.add_option("--config", g.config_path, "Configuration file")->check(CLI::ExistingFile);
  auto* model_opt = app.add_option("--model", model, "Model (1: bond dephasing, 2: pump/loss)")
                        ->check(CLI::IsMember({1, 2}));
  app.add_option("--out", g.out, "Output directory (output.dir)");
  app.add_option("--threads", g.threads, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--set", g.overrides, "Override a key: section.key=value or key=value")->allow_extra_args(false);

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"phase-diagram", "Mean-field gaps and spectral types over a parameter grid"},
      {"spectrum", "Exact or mean-field spectrum with gap sidecar"},
      {"relax", "Density-modulation relaxation and damped-cosine fit"},
      {"gp-dispersion", "Linearized Gross-Pitaevskii dispersion"},
      {"edge-detect", "Edge detection on a re,im spectrum file"},
      {"gap-scaling", "Mean-field Liouvillian gap versus system size"},
  };
  for (const auto& [name, help] : commands) app.add_subcommand(name, help);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }
  if (*model_opt) g.model = model;

  try {
    return run(app.get_subcommands().front()->get_name(), g);
  } catch (const omgap::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const omgap::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  }
}
