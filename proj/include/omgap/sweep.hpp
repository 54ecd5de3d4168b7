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

// Sweep drivers behind the command-line tool. Every pipeline writes
// plot-ready CSVs (17 significant digits) into the configured directory.

#ifndef OMGAP_SWEEP_HPP
#define OMGAP_SWEEP_HPP

#include <algorithm>
#include <atomic>
#include <condition_variable>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "omgap/config.hpp"
#include "omgap/dynamics.hpp"
#include "omgap/gp.hpp"
#include "omgap/liouville.hpp"
#include "omgap/meanfield.hpp"
#include "omgap/spectra.hpp"

namespace omgap::sweep {

using config::Mode;
using config::Output;
using config::SweepConfig;

inline meanfield::SteadyOptions steady_options(const SweepConfig& c) {
  meanfield::SteadyOptions o;
  o.dt = c.dt;
  o.t_relax = c.t_relax;
  o.t_max = c.t_max;
  o.tol = c.tol;
  o.newton = c.newton;
  o.tune.dt = c.dt;
  return o;
}

namespace detail {

inline std::ofstream open_output(const std::filesystem::path& path, std::ios::openmode mode = std::ios::out) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream os(path, mode | std::ios::binary);
  if (!os) throw ConfigError("cannot write '" + path.string() + "'");
  return os;
}

inline std::string opt_field(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

inline Spectrum exact_spectrum(const ModelParams& p, Model model) {
  p.validate(model);
  const BasisSpec spec = model == Model::bond_dephasing ? BasisSpec::fixed_n(p.sites, p.particles)
                                                        : BasisSpec::truncated(p.sites, p.cutoff);
  const FockBasis basis = build_basis(spec);
  const auto sup = liouville::build_superoperator(hamiltonian(basis, p), jump_set(basis, p, model));
  return linalg::eig_general(sup.matrix).spectrum();
}

}  // namespace detail

/// Mean-field steady state and spectrum at one parameter point.
struct MFPoint {
  meanfield::SteadyState steady;
  meanfield::MeanFieldSpectrum spectrum;
};

inline MFPoint mf_point(const ModelParams& p, const meanfield::SteadyOptions& opt, int threads = 1) {
  MFPoint out;
  out.steady = meanfield::find_steady(p, opt);
  if (!out.steady.report.converged) throw NumericalError("steady state did not converge within t_max");
  out.spectrum = meanfield::mf_spectrum(out.steady.state, out.steady.params, threads);
  return out;
}

/// eps_gap from the configuration: 10 x the Liouvillian gap at the reference
/// point when one is given, the literal value otherwise. The reference is
/// evaluated in the given mode with the reference assignments applied on
/// top of the fixed parameters.
inline double resolve_eps_gap(const SweepConfig& c, Mode mode, int threads = 1) {
  if (c.reference.empty()) return c.eps_gap;
  ModelParams q = c.params;
  for (const auto& [name, v] : c.reference) config::set_parameter(q, name, v);
  Spectrum s;
  if (mode == Mode::exact) {
    Model m = q.conserves_number() ? Model::bond_dephasing : Model::pump_loss;
    s = detail::exact_spectrum(q, m);
  } else {
    q.validate();
    s = mf_point(q, steady_options(c), threads).spectrum.all();
  }
  return spectra::reference_eps_gap(spectra::liouvillian_gap(s, c.eps_zero));
}

// ---------------------------------------------------------------------------
// Phase diagrams

struct CellRecord {
  std::optional<double> axis1;
  std::optional<double> axis2;
  std::optional<double> n0;
  std::optional<double> n;
  std::optional<double> delta_l;
  std::optional<double> delta_om;
  std::optional<int> type;
  std::optional<double> omega_relax;
  bool converged = false;
  std::string error;  // empty unless the cell failed
};

inline std::string header(const SweepConfig& c) {
  std::string h = "axis1,axis2,n0,n,delta_L,delta_OM,type,converged";
  if (c.outputs.count(Output::omega_relax)) h += ",omega_relax";
  return h;
}

inline std::string cell_key(const std::optional<double>& a1, const std::optional<double>& a2) {
  return detail::opt_field(a1) + "," + detail::opt_field(a2);
}

/// One CSV row (no newline). Outputs that were not requested stay empty.
inline std::string format_row(const SweepConfig& c, const CellRecord& r) {
  auto want = [&](Output o) { return c.outputs.count(o) != 0; };
  std::ostringstream os;
  os << cell_key(r.axis1, r.axis2) << ',' << (want(Output::n0) ? detail::opt_field(r.n0) : "") << ','
     << (want(Output::n) ? detail::opt_field(r.n) : "") << ','
     << (want(Output::delta_L) ? detail::opt_field(r.delta_l) : "") << ','
     << (want(Output::delta_OM) ? detail::opt_field(r.delta_om) : "") << ','
     << (want(Output::type) && r.type ? std::to_string(*r.type) : "") << ',' << (r.converged ? 1 : 0);
  if (want(Output::omega_relax)) os << ',' << detail::opt_field(r.omega_relax);
  return os.str();
}

/// Runs one grid cell. Numerical failures are recorded in the returned
/// record; configuration errors propagate.
inline CellRecord evaluate_cell(const SweepConfig& c, const ModelParams& p, double eps_gap, int threads = 1) {
  CellRecord r;
  try {
    p.validate(c.model);
    const meanfield::SteadyState st = meanfield::find_steady(p, steady_options(c));
    r.n0 = st.report.n0;
    r.n = st.report.n;
    if (!st.report.converged) {
      r.error = "steady state did not converge (residual " + format_double(st.report.residual) + ")";
      return r;
    }
    const Spectrum s = meanfield::mf_spectrum(st.state, st.params, threads).all();
    const spectra::GapReport g = spectra::gap_report(s, eps_gap, c.eps_zero, c.eps_im);
    r.delta_l = g.delta_l;
    r.delta_om = g.delta_om;
    r.type = static_cast<int>(*g.type);
    if (c.outputs.count(Output::omega_relax)) {
      dynamics::MFRelaxationOptions ro;
      ro.delta = c.delta;
      ro.t_end = c.t_end;
      ro.evolve.dt = c.dt;
      ro.evolve.stride = static_cast<std::size_t>(c.stride);
      const auto series = dynamics::relax_mf(p, ro);
      r.omega_relax = dynamics::fit_damped_cosine(series, {c.fit_start()}).Omega;
    }
    r.converged = true;
  } catch (const ConfigError&) {
    throw;
  } catch (const NumericalError& e) {
    r.error = e.what();
    r.converged = false;
  }
  return r;
}

struct GridCell {
  std::optional<double> axis1;
  std::optional<double> axis2;
  ModelParams params;
};

/// Cells in row-major order: axis2 varies fastest.
inline std::vector<GridCell> grid_cells(const SweepConfig& c) {
  std::vector<GridCell> cells;
  const std::vector<double> v1 = c.axes.size() > 0 ? c.axes[0].values() : std::vector<double>{};
  const std::vector<double> v2 = c.axes.size() > 1 ? c.axes[1].values() : std::vector<double>{};
  auto make = [&](std::optional<double> a, std::optional<double> b) {
    GridCell g{a, b, c.params};
    if (a) config::set_parameter(g.params, c.axes[0].name, *a);
    if (b) config::set_parameter(g.params, c.axes[1].name, *b);
    cells.push_back(g);
  };
  if (v1.empty()) {
    make(std::nullopt, std::nullopt);
  } else {
    for (double a : v1) {
      if (v2.empty()) make(a, std::nullopt);
      else
        for (double b : v2) make(a, b);
    }
  }
  return cells;
}

struct GridResult {
  std::vector<CellRecord> records;  // newly computed cells, in grid order
  std::size_t skipped = 0;          // cells already present in the output
  std::filesystem::path csv;
};

namespace detail {

// Reads the keys of an existing phase-diagram CSV. A trailing partial line
// (interrupted write) is cut off.
inline std::set<std::string> existing_keys(const std::filesystem::path& path, const std::string& expected_header) {
  std::set<std::string> keys;
  std::ifstream in(path, std::ios::binary);
  if (!in) return keys;
  std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  in.close();
  if (content.empty()) return keys;
  const auto last_nl = content.rfind('\n');
  if (last_nl == std::string::npos || last_nl + 1 != content.size()) {
    content.resize(last_nl == std::string::npos ? 0 : last_nl + 1);
    std::ofstream(path, std::ios::binary | std::ios::trunc) << content;
  }
  std::istringstream is(content);
  std::string line;
  if (!std::getline(is, line)) return keys;
  if (line != expected_header)
    throw ConfigError("existing '" + path.string() + "' has a different header; remove it or change output.dir");
  while (std::getline(is, line)) {
    const auto c1 = line.find(',');
    const auto c2 = c1 == std::string::npos ? c1 : line.find(',', c1 + 1);
    if (c2 == std::string::npos) continue;
    keys.insert(line.substr(0, c2));
  }
  return keys;
}

}  // namespace detail

/// Runs the grid on `threads` workers. Rows are emitted in grid order as
/// soon as their predecessors are done; cells already present in the output
/// are skipped, so an interrupted sweep resumes where it stopped.
inline GridResult run_phase_diagram(const SweepConfig& c, int threads = 1) {
  GridResult out;
  out.csv = std::filesystem::path(c.out_dir) / "phase_diagram.csv";
  const std::string head = header(c);
  const std::set<std::string> done = detail::existing_keys(out.csv, head);

  std::vector<GridCell> todo;
  for (auto& cell : grid_cells(c)) {
    if (done.count(cell_key(cell.axis1, cell.axis2))) ++out.skipped;
    else todo.push_back(std::move(cell));
  }
  if (done.empty()) {
    auto os = detail::open_output(out.csv, std::ios::trunc);
    os << head << '\n';
  }
  {
    auto axes = detail::open_output(std::filesystem::path(c.out_dir) / "phase_diagram_axes.csv", std::ios::trunc);
    axes << "axis,name,min,max,steps\n";
    for (std::size_t i = 0; i < c.axes.size(); ++i)
      axes << "axis" << i + 1 << ',' << c.axes[i].name << ',' << format_double(c.axes[i].min) << ','
           << format_double(c.axes[i].max) << ',' << c.axes[i].steps << '\n';
  }
  if (todo.empty()) return out;

  const double eps_gap = resolve_eps_gap(c, Mode::meanfield, std::max(1, threads));
  const int workers = std::max(1, std::min<int>(threads, static_cast<int>(todo.size())));
  const int inner = std::max(1, threads / workers);

  std::vector<std::optional<CellRecord>> results(todo.size());
  std::mutex mtx;
  std::condition_variable cv;
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;

  auto work = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= todo.size()) return;
      CellRecord r;
      try {
        r = evaluate_cell(c, todo[i].params, eps_gap, inner);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mtx);
        if (!failure) failure = std::current_exception();
        next = todo.size();
        cv.notify_all();
        return;
      }
      r.axis1 = todo[i].axis1;
      r.axis2 = todo[i].axis2;
      std::lock_guard<std::mutex> lock(mtx);
      results[i] = std::move(r);
      cv.notify_all();
    }
  };

  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) pool.emplace_back(work);

  auto os = detail::open_output(out.csv, std::ios::app);
  for (std::size_t i = 0; i < todo.size(); ++i) {
    std::unique_lock<std::mutex> lock(mtx);
    cv.wait(lock, [&] { return results[i].has_value() || failure; });
    if (!results[i]) break;
    const CellRecord r = *results[i];
    lock.unlock();
    if (!r.converged) log_warning("cell (" + cell_key(r.axis1, r.axis2) + ") flagged: " + r.error);
    os << format_row(c, r) << '\n';
    os.flush();
    out.records.push_back(r);
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return out;
}

// ---------------------------------------------------------------------------
// Spectra and edges

inline void write_gap_sidecar(const std::filesystem::path& path, const spectra::GapReport& g, double eps_gap) {
  auto os = detail::open_output(path, std::ios::trunc);
  spectra::write_gap_header(os);
  os << ",eps_zero,eps_im,eps_gap\n";
  spectra::write_gap_record(os, g);
  os << ',' << format_double(g.eps_zero) << ',' << format_double(g.eps_im) << ',' << format_double(eps_gap) << '\n';
}

inline void write_edge_report(const std::filesystem::path& dir, const Spectrum& s, const spectra::EdgeReport& e) {
  {
    auto os = detail::open_output(dir / "edge.csv", std::ios::trunc);
    os << "delta_OM_estimate,upper_slope,upper_intercept,upper_points,lower_slope,lower_intercept,lower_points,"
          "band,edge_points\n";
    auto line = [&](const std::optional<spectra::EdgeLine>& l) {
      if (!l) return std::string(",,");
      return format_double(l->slope) + "," + format_double(l->intercept) + "," + std::to_string(l->points);
    };
    os << detail::opt_field(e.delta_om_estimate) << ',' << line(e.upper) << ',' << line(e.lower) << ','
       << format_double(e.band) << ',' << e.edge_points.size() << '\n';
  }
  auto os = detail::open_output(dir / "edge_points.csv", std::ios::trunc);
  os << "re,im,density,edge\n";
  std::vector<char> flag(s.size(), 0);
  for (auto i : e.edge_points) flag[i] = 1;
  for (std::size_t i = 0; i < s.size(); ++i)
    os << format_double(s[i].real()) << ',' << format_double(s[i].imag()) << ',' << format_double(e.density[i])
       << ',' << int(flag[i]) << '\n';
}

struct SpectrumResult {
  Spectrum spectrum;
  spectra::GapReport gaps;
  std::optional<spectra::EdgeReport> edge;
  std::optional<meanfield::SteadyStateReport> steady;
};

/// Writes spectrum.csv (re,im), gaps.csv and, for mean-field runs,
/// steady.csv; with `spectrum.edge` also edge.csv and edge_points.csv.
inline SpectrumResult run_spectrum(const SweepConfig& c, int threads = 1) {
  SpectrumResult out;
  const std::filesystem::path dir(c.out_dir);
  if (c.spectrum_mode == Mode::exact) {
    out.spectrum = detail::exact_spectrum(c.params, c.model);
  } else {
    const MFPoint pt = mf_point(c.params, steady_options(c), threads);
    out.spectrum = pt.spectrum.all();
    out.steady = pt.steady.report;
    auto os = detail::open_output(dir / "steady.csv", std::ios::trunc);
    os << "n0,n,mu,residual,converged\n"
       << format_double(pt.steady.report.n0) << ',' << format_double(pt.steady.report.n) << ','
       << format_double(pt.steady.report.mu) << ',' << format_double(pt.steady.report.residual) << ','
       << (pt.steady.report.converged ? 1 : 0) << '\n';
  }
  const double eps_gap = resolve_eps_gap(c, c.spectrum_mode, threads);
  out.gaps = spectra::gap_report(out.spectrum, eps_gap, c.eps_zero, c.eps_im);
  {
    auto os = detail::open_output(dir / "spectrum.csv", std::ios::trunc);
    liouville::write_spectrum_csv(os, out.spectrum);
  }
  write_gap_sidecar(dir / "gaps.csv", out.gaps, eps_gap);
  if (c.edge) {
    spectra::EdgeConfig ec;
    ec.sigma = c.sigma;
    ec.density_threshold = c.threshold;
    out.edge = spectra::edge_detect(out.spectrum, ec);
    write_edge_report(dir, out.spectrum, *out.edge);
  }
  return out;
}

/// Parses a `re,im` spectrum dump.
inline Spectrum read_spectrum_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open spectrum file '" + path + "'");
  std::string line;
  if (!std::getline(in, line) || config::trim(line) != "re,im")
    throw ConfigError("'" + path + "' does not start with the header 're,im'");
  Spectrum s;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    line = config::trim(line);
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw ConfigError(path + ":" + std::to_string(lineno) + ": expected re,im");
    const std::string key = path + ":" + std::to_string(lineno);
    s.emplace_back(config::to_double(key, config::trim(line.substr(0, comma))),
                   config::to_double(key, config::trim(line.substr(comma + 1))));
  }
  return s;
}

inline spectra::EdgeReport run_edge_detect(const SweepConfig& c) {
  if (c.edge_input.empty()) throw ConfigError("edge-detect needs 'edge.input' (a re,im spectrum CSV)");
  const Spectrum s = read_spectrum_csv(c.edge_input);
  spectra::EdgeConfig ec;
  ec.sigma = c.sigma;
  ec.density_threshold = c.threshold;
  spectra::EdgeReport e = spectra::edge_detect(s, ec);
  write_edge_report(std::filesystem::path(c.out_dir), s, e);
  return e;
}

// ---------------------------------------------------------------------------
// Relaxation

struct RelaxationResult {
  dynamics::ModulationSeries series;
  dynamics::RelaxationFit fit;
};

/// Writes relax_series.csv (t,delta_n) and relax_fit.csv.
inline RelaxationResult run_relaxation(const SweepConfig& c) {
  RelaxationResult out;
  const std::filesystem::path dir(c.out_dir);
  if (c.relax_mode == Mode::exact) {
    Occupation pattern = c.pattern;
    if (pattern.empty()) {
      // First N sites singly occupied.
      if (c.params.particles > c.params.sites) throw ConfigError("default pattern needs N <= L; set relax.pattern");
      pattern.assign(c.params.sites, 0);
      std::fill(pattern.begin(), pattern.begin() + c.params.particles, 1);
    }
    dynamics::ExactOptions eo;
    eo.dt = c.dt;
    eo.stride = static_cast<std::size_t>(c.stride);
    out.series = dynamics::relax_exact(c.params, c.model, pattern, c.t_end, eo);
  } else {
    dynamics::MFRelaxationOptions ro;
    ro.delta = c.delta;
    ro.t_end = c.t_end;
    ro.evolve.dt = c.dt;
    ro.evolve.stride = static_cast<std::size_t>(c.stride);
    out.series = dynamics::relax_mf(c.params, ro);
  }
  {
    auto os = detail::open_output(dir / "relax_series.csv", std::ios::trunc);
    dynamics::write_series_csv(os, out.series);
  }
  dynamics::FitOptions fo;
  fo.t_start = c.fit_start();
  out.fit = dynamics::fit_damped_cosine(out.series, fo);
  auto os = detail::open_output(dir / "relax_fit.csv", std::ios::trunc);
  dynamics::write_fit_header(os);
  os << '\n';
  dynamics::write_fit_record(os, out.fit);
  os << '\n';
  return out;
}

// ---------------------------------------------------------------------------
// GP dispersion

/// Writes gp_dispersion.csv on k in [0, k_max]. n0 is `gp.n0` when given,
/// otherwise the mean-field condensate density (or the total density with
/// `gp.use_total_density`).
inline std::vector<gp::DispersionPoint> run_gp_dispersion(const SweepConfig& c) {
  double n0 = 0.0;
  if (c.gp_n0) {
    n0 = *c.gp_n0;
  } else {
    const auto st = meanfield::find_steady(c.params, steady_options(c));
    if (!st.report.converged) throw NumericalError("steady state did not converge within t_max");
    n0 = c.use_total_density ? st.report.n : st.report.n0;
  }
  const gp::GPParams g = gp::GPParams::from(c.params);
  std::vector<gp::DispersionPoint> pts;
  for (int i = 0; i < c.k_steps; ++i) {
    const double k = c.k_steps == 1 ? 0.0 : c.k_max * double(i) / double(c.k_steps - 1);
    pts.push_back(gp::gp_dispersion(g, n0, k));
  }
  auto os = detail::open_output(std::filesystem::path(c.out_dir) / "gp_dispersion.csv", std::ios::trunc);
  gp::write_dispersion_csv(os, pts);
  return pts;
}

// ---------------------------------------------------------------------------
// Gap scaling

struct ScalingResult {
  std::vector<int> sizes;
  std::vector<double> delta_l;
  std::vector<std::optional<double>> delta_om;
  spectra::PowerLawFit fit;
};

/// Mean-field gaps over `scaling.sizes`; the uniform steady state does not
/// depend on L, so it is found once. Writes gap_scaling.csv and
/// gap_scaling_fit.csv.
inline ScalingResult run_gap_scaling(const SweepConfig& c, int threads = 1) {
  if (c.sizes.size() < 3) throw ConfigError("gap-scaling needs at least three sizes");
  for (int L : c.sizes)
    if (L < 2) throw ConfigError("gap-scaling sizes must be >= 2");
  const auto st = meanfield::find_steady(c.params, steady_options(c));
  if (!st.report.converged) throw NumericalError("steady state did not converge within t_max");
  ScalingResult out;
  std::vector<std::pair<double, double>> pts;
  for (int L : c.sizes) {
    ModelParams q = st.params;
    q.sites = L;
    const Spectrum s = meanfield::mf_spectrum(meanfield::uniform_chain(st.state.sites.front(), L), q, threads).all();
    const double dl = spectra::liouvillian_gap(s, c.eps_zero);
    out.sizes.push_back(L);
    out.delta_l.push_back(dl);
    out.delta_om.push_back(spectra::om_gap(s, c.eps_im));
    pts.emplace_back(L, dl);
  }
  const std::filesystem::path dir(c.out_dir);
  {
    auto os = detail::open_output(dir / "gap_scaling.csv", std::ios::trunc);
    os << "L,delta_L,delta_OM\n";
    for (std::size_t i = 0; i < out.sizes.size(); ++i)
      os << out.sizes[i] << ',' << format_double(out.delta_l[i]) << ',' << detail::opt_field(out.delta_om[i]) << '\n';
  }
  out.fit = spectra::gap_scaling_fit(pts);
  auto os = detail::open_output(dir / "gap_scaling_fit.csv", std::ios::trunc);
  os << "exponent,prefactor,r_squared\n"
     << format_double(out.fit.exponent) << ',' << format_double(out.fit.prefactor) << ','
     << format_double(out.fit.r_squared) << '\n';
  return out;
}

// ---------------------------------------------------------------------------
// Cutoff convergence

struct CutoffDrift {
  double delta_l = 0.0;
  double delta_l_extended = 0.0;
  std::optional<double> delta_om;
  std::optional<double> delta_om_extended;

  double delta_l_drift() const { return std::abs(delta_l_extended - delta_l); }
  std::optional<double> delta_om_drift() const {
    if (!delta_om || !delta_om_extended) return std::nullopt;
    return std::abs(*delta_om_extended - *delta_om);
  }
};

/// Reruns the mean-field steady state and spectrum at d_max + extra and
/// reports how far both gaps move.
inline CutoffDrift cutoff_drift(const ModelParams& p, const meanfield::SteadyOptions& opt = {}, int extra = 4,
                                int threads = 1) {
  if (extra < 1) throw ConfigError("cutoff_drift needs extra >= 1");
  auto gaps = [&](int cutoff, double& dl, std::optional<double>& dom) {
    ModelParams q = p;
    q.cutoff = cutoff;
    const Spectrum s = mf_point(q, opt, threads).spectrum.all();
    dl = spectra::liouvillian_gap(s);
    dom = spectra::om_gap(s);
  };
  CutoffDrift d;
  gaps(p.cutoff, d.delta_l, d.delta_om);
  gaps(p.cutoff + extra, d.delta_l_extended, d.delta_om_extended);
  return d;
}

}  // namespace omgap::sweep

#endif  // OMGAP_SWEEP_HPP
