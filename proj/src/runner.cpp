// Copyright 2026 The braggsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "braggsim/runner.hpp"

#include <openssl/evp.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <limits>
#include <sstream>

#include "braggsim/entanglement.hpp"
#include "braggsim/error.hpp"
#include "braggsim/parallel.hpp"
#include "braggsim/spectrum.hpp"

#ifndef BRAGGSIM_VERSION
#define BRAGGSIM_VERSION "0.0.0"
#endif

namespace braggsim {

namespace {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

class CsvWriter {
 public:
  CsvWriter(const fs::path& dir, const std::string& name, const std::vector<std::string>& header,
            std::vector<std::string>& registry)
      : path_(dir / name) {
    out_.open(path_, std::ios::binary | std::ios::trunc);
    if (!out_) throw Error(ErrorCode::IoError, "cannot write " + path_.string());
    for (std::size_t k = 0; k < header.size(); ++k) out_ << (k ? "," : "") << header[k];
    out_ << '\n';
    registry.push_back(name);
  }

  void row(std::initializer_list<double> values) {
    bool first = true;
    for (const double v : values) {
      out_ << (first ? "" : ",") << format_double(v);
      first = false;
    }
    out_ << '\n';
  }

  ~CsvWriter() noexcept(false) {
    out_.flush();
    if (!out_ && std::uncaught_exceptions() == 0) throw Error(ErrorCode::IoError, "write failed for " + path_.string());
  }

 private:
  fs::path path_;
  std::ofstream out_;
};

struct Context {
  const RunConfig& cfg;
  unsigned workers;
  fs::path dir;
  std::vector<std::string> files;
  json summary = json::object();
};

double horizon(const RunConfig& cfg) { return cfg.params.t_max; }

void write_correlation(Context& ctx, const CorrelationGrid& G, const std::string& name) {
  CsvWriter csv(ctx.dir, name, {"t_g", "tau_g", "G_re", "G_im", "stderr"}, ctx.files);
  for (std::size_t i = 0; i < G.n; ++i) {
    for (std::size_t j = 0; G.contains(i, j); ++j) {
      const cplx v = G.at(i, j);
      if (std::isnan(v.real())) continue;
      csv.row({G.t_g(i), G.tau_g(j), v.real(), v.imag(), G.error_at(i, j)});
    }
  }
}

CorrelationGrid correlation_for(const RunConfig& cfg, const AtomicState& state, double t_max_g, unsigned workers,
                                CorrelationSource source) {
  switch (source) {
    case CorrelationSource::Trajectories: {
      CorrelationOptions opt;
      opt.n_traj_t = cfg.n_traj;
      opt.n_traj_tau = cfg.n_traj_tau;
      opt.seed = cfg.seed;
      opt.workers = workers;
      opt.step_g = cfg.corr_dt;
      opt.t_max_g = t_max_g;
      return two_time_correlation(state, cfg.params, opt);
    }
    case CorrelationSource::Oracle: {
      QrtOptions opt;
      opt.workers = workers;
      opt.base_stride = cfg.oracle_stride;
      opt.min_weight = cfg.oracle_min_weight;
      return qrt_oracle_grid(state, cfg.params, cfg.corr_dt, t_max_g, opt);
    }
    case CorrelationSource::Ensemble:
      break;
  }
  return ensemble_correlation(state, cfg.params, cfg.corr_dt, t_max_g);
}

const char* to_string(CorrelationSource s) {
  switch (s) {
    case CorrelationSource::Trajectories: return "trajectories";
    case CorrelationSource::Oracle: return "oracle";
    case CorrelationSource::Ensemble: break;
  }
  return "ensemble";
}

void write_intensity(Context& ctx, const IntensitySeries& s, const std::string& name) {
  CsvWriter csv(ctx.dir, name, {"t_g", "mean_n_mk", "stderr", "mean_n_k"}, ctx.files);
  for (std::size_t k = 0; k < s.t_g.size(); ++k) csv.row({s.t_g[k], s.mean_n_mk[k], s.stderr_n_mk[k], s.mean_n_k[k]});
}

void run_intensity(Context& ctx) {
  const auto& cfg = ctx.cfg;
  EnsembleOptions opt;
  opt.n_traj = cfg.n_traj;
  opt.seed = cfg.seed;
  opt.workers = ctx.workers;
  opt.sample_dt_g = cfg.sample_dt;
  opt.t_max_g = horizon(cfg);
  const bool branch = cfg.engine != EngineChoice::Dense;
  const auto primary = reflected_intensity(branch ? Engine::Branch : Engine::Dense, cfg.atomic_state, cfg.params, opt);
  write_intensity(ctx, primary, "intensity.csv");
  ctx.summary["samples"] = primary.t_g.size();
  ctx.summary["final_mean_n_mk"] = primary.mean_n_mk.back();
  double peak = 0.0;
  for (const double v : primary.mean_n_mk) peak = std::max(peak, v);
  ctx.summary["max_mean_n_mk"] = peak;
  if (cfg.engine == EngineChoice::Both) {
    const auto dense = reflected_intensity(Engine::Dense, cfg.atomic_state, cfg.params, opt);
    write_intensity(ctx, dense, "intensity_dense.csv");
    double dev = 0.0;
    for (std::size_t k = 0; k < dense.t_g.size(); ++k)
      dev = std::max(dev, std::abs(dense.mean_n_mk[k] - primary.mean_n_mk[k]));
    ctx.summary["max_engine_deviation"] = dev;
  }
}

void run_correlate(Context& ctx) {
  const auto source = ctx.cfg.resolved_correlation_source();
  const auto G = correlation_for(ctx.cfg, ctx.cfg.atomic_state, horizon(ctx.cfg), ctx.workers, source);
  write_correlation(ctx, G, "correlation.csv");
  ctx.summary["correlation_source"] = to_string(source);
  ctx.summary["grid_points"] = G.n;
  ctx.summary["warnings"] = G.warnings;
}

double default_omega_max(const RunConfig& cfg, const AtomicState& state) {
  if (cfg.omega_max > 0.0) return cfg.omega_max;
  const int atoms = mean_total_atoms(state);
  if (atoms < 1) throw Error(ErrorCode::ValidationError, "omega_max: must be set when the state has no atoms");
  return 1.5 * atoms;
}

double spectrum_horizon(const RunConfig& cfg) { return cfg.spectrum_time > 0.0 ? cfg.spectrum_time : horizon(cfg); }

std::vector<double> real_parts(const std::vector<cplx>& z) {
  std::vector<double> out(z.size());
  for (std::size_t k = 0; k < z.size(); ++k) out[k] = z[k].real();
  return out;
}

void run_spectrum(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const auto source = cfg.resolved_correlation_source();
  const auto G = correlation_for(cfg, cfg.atomic_state, spectrum_horizon(cfg), ctx.workers, source);
  write_correlation(ctx, G, "correlation.csv");
  const auto omega = omega_grid(default_omega_max(cfg, cfg.atomic_state), cfg.omega_points);
  const auto S = physical_spectrum(G, omega, cfg.Gamma, G.t_g(G.n - 1));
  {
    CsvWriter csv(ctx.dir, "spectrum.csv", {"omega_over_g", "S0_re", "S0_im"}, ctx.files);
    for (std::size_t k = 0; k < omega.size(); ++k) csv.row({omega[k], S.s0[k].real(), S.s0[k].imag()});
  }
  {
    CsvWriter csv(ctx.dir, "physical_spectrum.csv", {"omega_over_g", "S"}, ctx.files);
    for (std::size_t k = 0; k < omega.size(); ++k) csv.row({omega[k], S.physical[k]});
  }
  const auto re = real_parts(S.s0);
  const auto peaks = prominent_maxima(re, kFeatureProminence);
  const auto prom = prominence(re, peaks);
  json features = json::array();
  {
    CsvWriter csv(ctx.dir, "features.csv", {"omega_over_g", "S0_re", "prominence"}, ctx.files);
    for (std::size_t p = 0; p < peaks.size(); ++p) {
      csv.row({omega[peaks[p]], re[peaks[p]], prom[p]});
      features.push_back(omega[peaks[p]]);
    }
  }
  ctx.summary["correlation_source"] = to_string(source);
  ctx.summary["evaluation_time_g"] = S.t;
  ctx.summary["Gamma"] = cfg.Gamma;
  ctx.summary["features_omega_over_g"] = features;
  ctx.summary["physical_imag_residue"] = S.physical_imag_residue;
  if (!peaks.empty()) {
    std::size_t top = 0;
    for (std::size_t p = 1; p < peaks.size(); ++p)
      if (re[peaks[p]] > re[peaks[top]]) top = p;
    ctx.summary["dominant_feature_omega_over_g"] = omega[peaks[top]];
  }
  if (std::holds_alternative<Mott>(cfg.atomic_state) && peaks.size() >= 2) {
    // The two most prominent lines stand for omega_+ and omega_-.
    std::vector<std::size_t> order(peaks.size());
    for (std::size_t p = 0; p < order.size(); ++p) order[p] = p;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return prom[a] > prom[b]; });
    const double w1 = omega[peaks[order[0]]], w2 = omega[peaks[order[1]]];
    const auto pops = well_populations_from_peaks(std::max(w1, w2) * cfg.params.g, std::min(w1, w2) * cfg.params.g,
                                                  cfg.params.g);
    ctx.summary["well_populations"] = {pops.n0, pops.n1};
    ctx.summary["well_populations_non_integer"] = pops.non_integer;
  }
  if (cfg.envelope) {
    const auto fit = envelope_fwhm(omega, re, true, kCombProminence);
    CsvWriter csv(ctx.dir, "envelope.csv", {"omega_over_g", "envelope"}, ctx.files);
    for (std::size_t k = 0; k < fit.omega.size(); ++k) csv.row({fit.omega[k], fit.envelope[k]});
    ctx.summary["envelope"] = {{"fwhm", fit.fwhm},     {"left", fit.left},          {"right", fit.right},
                               {"maximum", fit.maximum}, {"peak_omega", fit.peak_omega}, {"teeth", fit.peak_count}};
  }
}

void run_fwhm_scan(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const double step = cfg.omega_max > 0.0 ? cfg.omega_max / static_cast<double>(cfg.omega_points - 1) : 0.02;
  struct Row {
    int N;
    double sigma, fwhm;
  };
  std::vector<Row> rows(cfg.fwhm_N.size());
  // Sequential over N; each spectrum is cheap next to the grid it consumes.
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const int N = cfg.fwhm_N[k];
    const AtomicState state = NumberConserving{N};
    const auto G = correlation_for(cfg, state, spectrum_horizon(cfg), ctx.workers, cfg.resolved_correlation_source());
    const double span = std::max(1.5 * N, N + 4.0);
    const auto points = static_cast<std::size_t>(std::ceil(span / step - 1e-9)) + 1;
    const auto omega = omega_grid(step * static_cast<double>(points - 1), points);
    const auto S = physical_spectrum(G, omega, cfg.Gamma, G.t_g(G.n - 1));
    const auto fit = envelope_fwhm(omega, real_parts(S.s0), true, kCombProminence);
    rows[k] = {N, number_uncertainty(N), fit.fwhm};
  }
  std::vector<std::pair<double, double>> points;
  {
    CsvWriter csv(ctx.dir, "fwhm_scan.csv", {"N", "sigma", "fwhm"}, ctx.files);
    for (const auto& r : rows) {
      csv.row({static_cast<double>(r.N), r.sigma, r.fwhm});
      points.emplace_back(r.sigma, r.fwhm);
    }
  }
  const auto line = fit_line(points);
  {
    CsvWriter csv(ctx.dir, "fwhm_fit.csv", {"slope", "intercept", "r_squared"}, ctx.files);
    csv.row({line.slope, line.intercept, line.r_squared});
  }
  ctx.summary["slope"] = line.slope;
  ctx.summary["intercept"] = line.intercept;
  ctx.summary["r_squared"] = line.r_squared;
}

void run_negativity(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const auto& p = cfg.params;
  const auto steps = sample_steps(p, cfg.negativity_dt, horizon(cfg));
  const auto sectors = sector_list(cfg.atomic_state, p);
  const BranchTables tables(sectors, p, steps.back());
  const bool mixed = cfg.negativity_mode == NegativityMode::Mixed;
  const std::size_t M = mixed ? cfg.n_traj : 1;

  int cutoff = 0;
  if (mixed) {
    cutoff = cfg.negativity_cutoff > 0 ? cfg.negativity_cutoff : min_cutoff_for(std::norm(p.alpha0));
    const double dim = static_cast<double>(sectors.size()) * (cutoff + 1.0) * (cutoff + 1.0);
    if (dim > 3000.0)
      throw Error(ErrorCode::ValidationError,
                  "negativity_mode: mixed needs sectors x (cutoff+1)^2 <= 3000, got " + format_double(dim));
  }

  std::vector<TrajectoryRecord> records(M);
  parallel_for(M, ctx.workers, [&](std::size_t i) {
    UniformStream stream(cfg.seed, static_cast<std::uint32_t>(i), 0);
    records[i] = run_branch_trajectory(tables, steps, stream, true);
  });

  std::vector<double> en(steps.size());
  parallel_for(steps.size(), ctx.workers, [&](std::size_t k) {
    const double t = static_cast<double>(steps[k]) * p.step();
    if (!mixed) {
      en[k] = pure_log_negativity(to_lab_frame(records[0].branch_snapshots[k], t));
      return;
    }
    std::vector<Vector> states;
    states.reserve(M);
    int d_field = 0;
    for (const auto& rec : records) {
      DenseState dense = branch_to_dense(to_lab_frame(rec.branch_snapshots[k], t), cutoff);
      dense.normalize();
      d_field = dense.basis.dim();
      states.push_back(dense.flatten());
    }
    const auto rho = average_density_matrix(states, static_cast<int>(sectors.size()), d_field);
    en[k] = log_negativity(rho, Bipartition::of(rho));
  });

  CsvWriter csv(ctx.dir, "negativity.csv", {"t_g", "E_N"}, ctx.files);
  double peak = 0.0;
  for (std::size_t k = 0; k < steps.size(); ++k) {
    csv.row({records[0].t_g[k], en[k]});
    peak = std::max(peak, en[k]);
  }
  ctx.summary["mode"] = mixed ? "mixed" : "pure";
  ctx.summary["trajectories"] = M;
  if (mixed) ctx.summary["cutoff"] = cutoff;
  ctx.summary["max_E_N"] = peak;
  ctx.summary["final_E_N"] = en.back();
}

void run_oracle_check(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const auto est = correlation_for(cfg, cfg.atomic_state, horizon(cfg), ctx.workers, CorrelationSource::Trajectories);
  const auto ref = correlation_for(cfg, cfg.atomic_state, horizon(cfg), ctx.workers, CorrelationSource::Oracle);
  write_correlation(ctx, est, "correlation.csv");
  std::size_t points = 0, within3 = 0, within5 = 0;
  double max_dev = 0.0;
  {
    CsvWriter csv(ctx.dir, "oracle_check.csv",
                  {"t_g", "tau_g", "G_re", "G_im", "stderr", "oracle_re", "oracle_im", "abs_dev"}, ctx.files);
    for (std::size_t i = 0; i < est.n; ++i) {
      for (std::size_t j = 0; est.contains(i, j); ++j) {
        const cplx o = ref.at(i, j);
        if (std::isnan(o.real())) continue;
        const cplx e = est.at(i, j);
        const double se = est.error_at(i, j);
        const double dev = std::abs(e - o);
        csv.row({est.t_g(i), est.tau_g(j), e.real(), e.imag(), se, o.real(), o.imag(), dev});
        ++points;
        if (dev <= 3.0 * se + kOracleFloor) ++within3;
        if (dev <= 5.0 * se + kOracleFloor) ++within5;
        max_dev = std::max(max_dev, dev);
      }
    }
  }
  const double frac3 = points ? static_cast<double>(within3) / static_cast<double>(points) : 0.0;
  ctx.summary["points"] = points;
  ctx.summary["within_3_sigma"] = within3;
  ctx.summary["within_5_sigma"] = within5;
  ctx.summary["fraction_within_3_sigma"] = frac3;
  ctx.summary["max_abs_deviation"] = max_dev;
  ctx.summary["pass"] = points > 0 && frac3 >= kOracleFraction3 && within5 == points;
}

void write_manifest(const Context& ctx, double wall) {
  json files = json::object();
  for (const auto& name : ctx.files) files[name] = sha256_file((ctx.dir / name).string());
  json manifest = json::object();
  manifest["name"] = ctx.cfg.name;
  manifest["experiment"] = to_string(ctx.cfg.experiment);
  manifest["version"] = BRAGGSIM_VERSION;
  manifest["wall_seconds"] = wall;
  manifest["config"] = json::parse(ctx.cfg.canonical_json.empty() ? "{}" : ctx.cfg.canonical_json);
  manifest["files"] = files;
  std::ofstream out(ctx.dir / "manifest.json", std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + (ctx.dir / "manifest.json").string());
  out << manifest.dump(2) << '\n';
  if (!out) throw Error(ErrorCode::IoError, "write failed for manifest.json");
}

}  // namespace

RunResult run_experiment(const RunConfig& config, unsigned workers) {
  const auto start = std::chrono::steady_clock::now();
  Context ctx{config, std::max(1u, workers), fs::path(config.output_dir), {}, json::object()};
  std::error_code ec;
  fs::create_directories(ctx.dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + ctx.dir.string() + ": " + ec.message());

  switch (config.experiment) {
    case Experiment::Intensity: run_intensity(ctx); break;
    case Experiment::Correlate: run_correlate(ctx); break;
    case Experiment::Spectrum: run_spectrum(ctx); break;
    case Experiment::FwhmScan: run_fwhm_scan(ctx); break;
    case Experiment::Negativity: run_negativity(ctx); break;
    case Experiment::OracleCheck: run_oracle_check(ctx); break;
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  write_manifest(ctx, wall);

  RunResult result;
  result.output_dir = ctx.dir.string();
  result.files = ctx.files;
  result.files.push_back("manifest.json");
  result.wall_seconds = wall;
  json summary = json::object();
  summary["name"] = config.name;
  summary["experiment"] = to_string(config.experiment);
  summary["output_dir"] = result.output_dir;
  summary["files"] = result.files;
  summary["results"] = ctx.summary;
  summary["wall_seconds"] = wall;
  result.summary_json = summary.dump();
  return result;
}

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t k = 0; k < header.size(); ++k)
    if (header[k] == name) return k;
  throw Error(ErrorCode::InvalidArgument, "CSV has no column " + name);
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::IoError, path + " is empty");
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) table.header.push_back(cell);
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::strtod(cell.c_str(), nullptr));
    if (row.size() != table.header.size()) throw Error(ErrorCode::IoError, path + ": ragged row");
    table.rows.push_back(std::move(row));
  }
  return table;
}

CorrelationGrid correlation_grid_from_csv(const CsvTable& table) {
  const auto ct = table.column("t_g"), cj = table.column("tau_g"), cr = table.column("G_re"),
             ci = table.column("G_im"), ce = table.column("stderr");
  if (table.rows.size() < 2) throw Error(ErrorCode::GridMismatch, "correlation table too small");
  double step = std::numeric_limits<double>::infinity(), t_max = 0.0;
  for (const auto& r : table.rows) {
    if (r[cj] > 0.0) step = std::min(step, r[cj]);
    t_max = std::max(t_max, r[ct] + r[cj]);
  }
  auto grid = CorrelationGrid::make(step, t_max);
  for (const auto& r : table.rows) {
    const double ri = r[ct] / step, rj = r[cj] / step;
    const auto i = static_cast<std::size_t>(std::lround(ri));
    const auto j = static_cast<std::size_t>(std::lround(rj));
    if (std::abs(ri - static_cast<double>(i)) > 1e-6 || std::abs(rj - static_cast<double>(j)) > 1e-6 ||
        !grid.contains(i, j))
      throw Error(ErrorCode::GridMismatch, "correlation row off the lattice");
    grid.values[i * grid.n + j] = {r[cr], r[ci]};
    grid.std_error[i * grid.n + j] = r[ce];
  }
  return grid;
}

std::string sha256_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  EVP_MD_CTX* md = EVP_MD_CTX_new();
  if (!md || EVP_DigestInit_ex(md, EVP_sha256(), nullptr) != 1) {
    EVP_MD_CTX_free(md);
    throw Error(ErrorCode::IoError, "SHA-256 unavailable");
  }
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof buf);
    if (in.gcount() > 0) EVP_DigestUpdate(md, buf, static_cast<std::size_t>(in.gcount()));
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(md, digest, &len);
  EVP_MD_CTX_free(md);
  std::string hex;
  char byte[3];
  for (unsigned int k = 0; k < len; ++k) {
    std::snprintf(byte, sizeof byte, "%02x", digest[k]);
    hex += byte;
  }
  return hex;
}

}  // namespace braggsim
