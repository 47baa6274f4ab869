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

// Acceptance suite. Every criterion prints exactly one PASS or FAIL line with
// the measured numbers next to the threshold. Where a criterion carries a
// runtime budget the wall time counts towards the verdict.
//
// Stochastic checks that are not plain preset reruns use kAcceptanceSeed so
// that the suite is reproducible and the seed is not tuned per criterion.

#include <CLI11.hpp>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <json.hpp>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "braggsim/config.hpp"
#include "braggsim/entanglement.hpp"
#include "braggsim/error.hpp"
#include "braggsim/observables.hpp"
#include "braggsim/runner.hpp"
#include "braggsim/spectrum.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace braggsim;

namespace {

constexpr std::uint64_t kAcceptanceSeed = 1;
constexpr double kPi = std::numbers::pi;

struct Verdict {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  const char* title;
  double budget_s;  // 0 means no runtime requirement
  std::function<Verdict()> run;
};

fs::path g_scratch;
unsigned g_workers = 1;

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string sci(double v) { return fmt("%.3g", v); }

RunConfig with_output(RunConfig cfg, const std::string& tag) {
  cfg.output_dir = (g_scratch / tag).string();
  return cfg;
}

json run_summary(const RunConfig& cfg, unsigned workers) {
  return json::parse(run_experiment(cfg, workers).summary_json);
}

CsvTable output_csv(const RunConfig& cfg, const std::string& file) {
  return read_csv((fs::path(cfg.output_dir) / file).string());
}

std::vector<double> column(const CsvTable& t, const std::string& name) {
  const std::size_t c = t.column(name);
  std::vector<double> out;
  out.reserve(t.rows.size());
  for (const auto& row : t.rows) out.push_back(row[c]);
  return out;
}

bool near_integer_multiple(double omega, double step, int m) { return std::abs(omega - m) <= step * (1.0 + 1e-9); }

int nearest_int(double x) { return static_cast<int>(std::lround(x)); }

std::string list(const std::vector<double>& v) {
  std::string s = "[";
  for (std::size_t k = 0; k < v.size(); ++k) s += (k ? " " : "") + fmt("%.2f", v[k]);
  return s + "]";
}

// ---------------------------------------------------------------------------

Verdict closed_form_amplitudes() {
  double worst = 0.0;
  for (const auto [n0, n1] : {std::pair{3, 1}, std::pair{6, 2}}) {
    SimParams p;
    p.dt = 5e-4;
    const AtomicState state = Mott{n0, n1};
    EnsembleOptions opt;
    opt.seed = kAcceptanceSeed;
    opt.sample_dt_g = 0.01;
    for (const Engine engine : {Engine::Dense, Engine::Branch}) {
      const auto series = reflected_intensity(engine, state, p, opt);
      for (std::size_t k = 0; k < series.t_g.size(); ++k) {
        const double s = std::sin((n0 - n1) * series.t_g[k]);
        worst = std::max(worst, std::abs(series.mean_n_mk[k] - std::norm(p.alpha0) * s * s));
      }
    }
  }
  return {worst < 1e-8, "max |n_-k - |alpha|^2 sin^2| = " + sci(worst) + " (< 1e-8)"};
}

Verdict mott_identity() {
  double worst = 0.0;
  std::string detail;
  for (const char* name : {"fig2a", "fig2b"}) {
    const RunConfig cfg = preset_config(name);
    EnsembleOptions opt;
    opt.n_traj = 100;
    opt.seed = kAcceptanceSeed;
    opt.workers = g_workers;
    opt.sample_dt_g = cfg.sample_dt;
    opt.keep_records = true;
    std::vector<std::pair<Engine, std::size_t>> runs{{Engine::Branch, 100}};
    if (std::string(name) == "fig2a") runs.emplace_back(Engine::Dense, 10);
    for (const auto& [engine, n] : runs) {
      opt.n_traj = n;
      const auto series = reflected_intensity(engine, cfg.atomic_state, cfg.params, opt);
      double dev = 0.0;
      std::size_t jumps = 0;
      for (std::size_t k = 0; k < series.t_g.size(); ++k) {
        double lo = series.records[0].n_mk[k], hi = lo;
        for (const auto& rec : series.records) {
          lo = std::min(lo, rec.n_mk[k]);
          hi = std::max(hi, rec.n_mk[k]);
        }
        dev = std::max(dev, hi - lo);
      }
      for (const auto& rec : series.records) jumps += rec.jumps.size();
      worst = std::max(worst, dev);
      detail += std::string(detail.empty() ? "" : ", ") + name + (engine == Engine::Dense ? " dense x" : " branch x") +
                std::to_string(n) + " " + sci(dev) + " (" + std::to_string(jumps) + " jumps)";
    }
  }
  return {worst < 1e-10, "max pairwise deviation: " + detail + " (< 1e-10)"};
}

Verdict engine_equivalence() {
  struct Case {
    const char* label;
    double eta, gamma;
    WellSeparation sep;
    bool with_sf1;
  };
  const Case cases[] = {{"eta1.5/gamma0.9 lambda/4", 1.5, 0.9, WellSeparation::QuarterWave, true},
                        {"eta1.5/gamma0.9 lambda/2", 1.5, 0.9, WellSeparation::HalfWave, false},
                        {"eta0.1/gamma0.5 lambda/4", 0.1, 0.5, WellSeparation::QuarterWave, true}};
  double worst = 0.0;
  std::string detail;
  for (const auto& c : cases) {
    SimParams p;
    p.eta = c.eta;
    p.gamma = c.gamma;
    p.separation_phase = separation_phase(c.sep);
    std::vector<std::pair<std::string, AtomicState>> states{{"Mott{6,2}", Mott{6, 2}}, {"NC{8}", NumberConserving{8}}};
    if (c.with_sf1) states.emplace_back("SF1{2,2}", CoherentProduct{2.0, 2.0, {}});
    double dev = 0.0;
    for (const auto& [label, state] : states) {
      EnsembleOptions opt;
      opt.n_traj = 1;
      opt.seed = kAcceptanceSeed;
      opt.sample_dt_g = 0.01;
      const auto dense = reflected_intensity(Engine::Dense, state, p, opt);
      const auto branch = reflected_intensity(Engine::Branch, state, p, opt);
      for (std::size_t k = 0; k < dense.t_g.size(); ++k)
        dev = std::max(dev, std::abs(dense.mean_n_mk[k] - branch.mean_n_mk[k]));
    }
    worst = std::max(worst, dev);
    detail += std::string(detail.empty() ? "" : ", ") + c.label + " " + sci(dev);
  }
  return {worst < 1e-6, "max |dense - branch|: " + detail + " (< 1e-6)"};
}

Verdict master_equation_consistency() {
  const RunConfig cfg = preset_config("fig4");
  EnsembleOptions opt;
  opt.n_traj = 1000;
  opt.seed = kAcceptanceSeed;
  opt.workers = g_workers;
  opt.sample_dt_g = 0.3;
  opt.t_max_g = 6.0;
  const auto series = reflected_intensity(Engine::Branch, cfg.atomic_state, cfg.params, opt);
  std::vector<double> t(series.t_g.begin() + 1, series.t_g.end());
  const auto reference = master_equation_intensity(cfg.atomic_state, cfg.params, t);
  std::size_t inside = 0;
  double worst_z = 0.0;
  for (std::size_t k = 0; k < t.size(); ++k) {
    const double dev = std::abs(series.mean_n_mk[k + 1] - reference[k]);
    const double se = series.stderr_n_mk[k + 1];
    if (dev <= 3.0 * se) ++inside;
    worst_z = std::max(worst_z, dev / se);
  }
  return {t.size() == 20 && inside == t.size(),
          std::to_string(inside) + "/" + std::to_string(t.size()) + " checkpoints within 3 SE, largest |z| " +
              fmt("%.2f", worst_z)};
}

Verdict correlation_oracle() {
  bool ok = true;
  std::string detail;
  for (const char* name : {"fig5", "fig6", "fig7"}) {
    RunConfig cfg = with_output(preset_config(name), std::string("c5_") + name);
    cfg.experiment = Experiment::OracleCheck;
    cfg.seed = kAcceptanceSeed;
    cfg.oracle_stride = 16;
    cfg.oracle_min_weight = 1e-7;
    const auto r = run_summary(cfg, g_workers)["results"];
    ok = ok && r["pass"].get<bool>();
    detail += std::string(detail.empty() ? "" : ", ") + name + " " + std::to_string(r["within_3_sigma"].get<int>()) +
              "/" + std::to_string(r["points"].get<int>()) + " in 3 SE, " +
              std::to_string(r["within_5_sigma"].get<int>()) + " in 5 SE";
  }
  return {ok, detail + " (need >= 99% in 3 SE and all in 5 SE)"};
}

struct Features {
  std::vector<double> omega;
  std::vector<double> height;
  double step = 0.0;
};

Features spectrum_features(RunConfig cfg, const std::string& tag) {
  cfg = with_output(std::move(cfg), tag);
  run_experiment(cfg, g_workers);
  Features f;
  const auto table = output_csv(cfg, "features.csv");
  f.omega = column(table, "omega_over_g");
  f.height = column(table, "S0_re");
  f.step = cfg.omega_max / static_cast<double>(cfg.omega_points - 1);
  return f;
}

Verdict spectrum_peaks() {
  const auto f = spectrum_features(preset_config("fig8"), "c6_fig8");
  if (f.omega.size() < 2) return {false, "fewer than two features: " + list(f.omega)};
  std::vector<std::size_t> order(f.omega.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return f.height[a] > f.height[b]; });
  const double dominant = f.omega[order[0]], secondary = f.omega[order[1]];
  const bool ok = near_integer_multiple(dominant, f.step, 4) && near_integer_multiple(secondary, f.step, 8);
  return {ok, "dominant " + fmt("%.2f", dominant) + ", secondary " + fmt("%.2f", secondary) + " (4 and 8 within " +
                  fmt("%.2f", f.step) + "), features " + list(f.omega)};
}

Verdict parity_structure() {
  const auto nc = spectrum_features(preset_config("fig10"), "c7_fig10");
  const auto sf = spectrum_features(preset_config("fig9"), "c7_fig9");
  bool nc_even = !nc.omega.empty();
  for (const double w : nc.omega) {
    const int m = nearest_int(w);
    nc_even = nc_even && m % 2 == 0 && near_integer_multiple(w, nc.step, m);
  }
  bool sf_odd = false;
  for (const double w : sf.omega) {
    const int m = nearest_int(w);
    sf_odd = sf_odd || (m % 2 != 0 && near_integer_multiple(w, sf.step, m));
  }
  return {nc_even && sf_odd,
          "NC{8} features " + list(nc.omega) + (nc_even ? " all even" : " NOT all even") + "; SF1 features " +
              list(sf.omega) + (sf_odd ? " include odd" : " lack odd")};
}

Verdict half_wave_contrast() {
  RunConfig nc = preset_config("fig10");
  RunConfig sf = preset_config("fig9");
  nc.params.separation_phase = separation_phase(WellSeparation::HalfWave);
  sf.params.separation_phase = separation_phase(WellSeparation::HalfWave);
  const auto fn = spectrum_features(nc, "c8_nc");
  const auto fs_ = spectrum_features(sf, "c8_sf");
  const bool single = fn.omega.size() == 1 && near_integer_multiple(fn.omega[0], fn.step, 8);
  const bool multi = fs_.omega.size() >= 2;
  return {single && multi, "NC{8} features " + list(fn.omega) + ", SF1 features " + list(fs_.omega)};
}

Verdict fwhm_linearity() {
  const RunConfig cfg = with_output(preset_config("fig12"), "c9_fig12");
  const auto r = run_summary(cfg, g_workers)["results"];
  const double r2 = r["r_squared"].get<double>();
  const auto scan = output_csv(cfg, "fwhm_scan.csv");
  return {r2 > 0.99, "R^2 = " + fmt("%.4f", r2) + " (> 0.99), slope " + fmt("%.3f", r["slope"].get<double>()) +
                         ", widths " + list(column(scan, "fwhm"))};
}

struct PureNegativity {
  std::vector<double> t;
  std::vector<double> en;
  std::vector<BranchState> lab;
};

// Single trajectory of a closed or driven system, sampled at the given steps.
PureNegativity pure_negativity(const AtomicState& state, const SimParams& p, const std::vector<long>& steps) {
  const BranchTables tables(sector_list(state, p), p, steps.back());
  UniformStream stream(kAcceptanceSeed, 0, 0);
  const auto rec = run_branch_trajectory(tables, steps, stream, true);
  PureNegativity out;
  for (std::size_t k = 0; k < steps.size(); ++k) {
    const double t = static_cast<double>(steps[k]) * p.step();
    out.t.push_back(t);
    out.lab.push_back(to_lab_frame(rec.branch_snapshots[k], t));
    out.en.push_back(pure_log_negativity(out.lab.back()));
  }
  return out;
}

double dense_negativity(const BranchState& lab, int cutoff) {
  DenseState d = branch_to_dense(lab, cutoff);
  d.normalize();
  const auto rho = average_density_matrix({d.flatten()}, static_cast<int>(lab.size()), d.basis.dim());
  return log_negativity(rho, Bipartition::of(rho));
}

Verdict negativity_revivals() {
  const RunConfig cfg = preset_config("fig13");
  const auto& p = cfg.params;
  const long quarter = p.steps_for(kPi / 2.0);
  const auto r = pure_negativity(cfg.atomic_state, p, {quarter, 2 * quarter, 4 * quarter});
  double agree = 0.0;
  for (std::size_t k = 0; k < r.lab.size(); ++k)
    agree = std::max(agree, std::abs(r.en[k] - dense_negativity(r.lab[k], p.cutoff)));
  const bool ok = r.en[0] > 0.1 && r.en[1] < 1e-6 && r.en[2] < 1e-6 && agree < 1e-8;
  return {ok, "E_N(pi/2) " + fmt("%.6f", r.en[0]) + " (> 0.1), E_N(pi) " + sci(r.en[1]) + ", E_N(2pi) " +
                  sci(r.en[2]) + " (< 1e-6), |pure - dense| " + sci(agree) + " (< 1e-8)"};
}

Verdict pump_breaks_revival() {
  const RunConfig cfg = preset_config("fig14");
  const auto& p = cfg.params;
  const auto r = pure_negativity(cfg.atomic_state, p, {p.steps_for(kPi)});
  return {r.en[0] > 1e-5, "E_N(pi) = " + sci(r.en[0]) + " (> 1e-5)"};
}

Verdict dissipative_decay() {
  const RunConfig cfg = with_output(preset_config("fig15"), "c12_fig15");
  run_experiment(cfg, g_workers);
  const auto table = output_csv(cfg, "negativity.csv");
  const auto t = column(table, "t_g");
  const auto en = column(table, "E_N");
  // Centred moving average over nine samples (0.2 pi at the preset spacing).
  constexpr std::size_t half = 4;
  std::vector<double> smooth(en.size());
  for (std::size_t k = 0; k < en.size(); ++k) {
    const std::size_t lo = k >= half ? k - half : 0, hi = std::min(en.size() - 1, k + half);
    double s = 0.0;
    for (std::size_t j = lo; j <= hi; ++j) s += en[j];
    smooth[k] = s / static_cast<double>(hi - lo + 1);
  }
  const double peak = *std::max_element(smooth.begin(), smooth.end());
  double tail = 0.0;
  for (std::size_t k = 0; k < t.size(); ++k)
    if (t[k] >= 0.75 * t.back() - 1e-9) tail = std::max(tail, smooth[k]);
  return {peak > 0.0 && tail < 0.25 * peak,
          "smoothed max " + fmt("%.4f", peak) + ", final-quarter max " + fmt("%.4g", tail) + " (< 25% = " +
              fmt("%.4f", 0.25 * peak) + ")"};
}

Verdict product_state_zero() {
  double worst = 0.0;
  std::size_t samples = 0;
  for (const auto& name : preset_names()) {
    const SimParams p = preset_config(name).params;
    const long stride = std::max(1L, p.steps_for(0.05));
    std::vector<long> steps;
    for (long n = 0; n <= p.steps_for(p.final_time()); n += stride) steps.push_back(n);
    for (const auto [n0, n1] : {std::pair{3, 3}, std::pair{6, 2}, std::pair{1, 1}}) {
      const auto r = pure_negativity(Mott{n0, n1}, p, steps);
      for (const double e : r.en) worst = std::max(worst, std::abs(e));
      samples += r.en.size();
    }
  }
  // The mixed-state route on the dissipative preset, averaged over trajectories.
  RunConfig mixed = with_output(preset_config("fig15"), "c13_mixed");
  mixed.atomic_state = Mott{1, 1};
  mixed.n_traj = 20;
  mixed.seed = kAcceptanceSeed;
  run_experiment(mixed, g_workers);
  for (const double e : column(output_csv(mixed, "negativity.csv"), "E_N")) {
    worst = std::max(worst, std::abs(e));
    ++samples;
  }
  return {worst < 1e-10, "max |E_N| " + sci(worst) + " over " + std::to_string(samples) + " samples (< 1e-10)"};
}

std::string file_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Verdict determinism() {
  std::size_t files = 0;
  std::vector<std::string> differing;
  for (const auto& name : preset_names()) {
    const RunConfig one = with_output(preset_config(name), "c14_w1/" + name);
    const RunConfig eight = with_output(preset_config(name), "c14_w8/" + name);
    const auto a = run_experiment(one, 1);
    run_experiment(eight, 8);
    for (const auto& f : a.files) {
      if (fs::path(f).extension() != ".csv") continue;
      ++files;
      if (file_bytes(fs::path(one.output_dir) / f) != file_bytes(fs::path(eight.output_dir) / f))
        differing.push_back(name + "/" + f);
    }
  }
  std::string detail = std::to_string(files) + " CSV files compared across " +
                       std::to_string(preset_names().size()) + " presets";
  for (const auto& d : differing) detail += ", differs: " + d;
  return {files > 0 && differing.empty(), detail};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"braggsim acceptance suite"};
  std::vector<int> only, expect_fail;
  std::string scratch = "acceptance_out";
  app.add_option("--only", only, "Run only these criteria");
  app.add_option("--expect-fail", expect_fail, "Criteria known to fail; the exit status requires them to stay red");
  app.add_option("--workers", g_workers, "Worker threads for ensembles")->check(CLI::PositiveNumber);
  app.add_option("--scratch", scratch, "Directory for run outputs");
  CLI11_PARSE(app, argc, argv);
  g_scratch = scratch;

  const std::vector<Criterion> criteria{
      {1, "closed-form amplitudes", 1.0, closed_form_amplitudes},
      {2, "Mott trajectory identity", 10.0, mott_identity},
      {3, "engine equivalence", 120.0, engine_equivalence},
      {4, "trajectory vs master equation", 300.0, master_equation_consistency},
      {5, "correlation oracle", 600.0, correlation_oracle},
      {6, "spectrum peaks", 120.0, spectrum_peaks},
      {7, "parity structure", 0.0, parity_structure},
      {8, "half-wave contrast", 0.0, half_wave_contrast},
      {9, "FWHM linearity", 900.0, fwhm_linearity},
      {10, "negativity revivals", 30.0, negativity_revivals},
      {11, "pump breaks revival", 0.0, pump_breaks_revival},
      {12, "dissipative decay of entanglement", 600.0, dissipative_decay},
      {13, "product-state zero", 0.0, product_state_zero},
      {14, "determinism across worker counts", 0.0, determinism},
  };

  const std::set<int> selected(only.begin(), only.end());
  const std::set<int> expected_red(expect_fail.begin(), expect_fail.end());
  int unexpected = 0;
  for (const auto& c : criteria) {
    if (!selected.empty() && !selected.count(c.id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::string timing = fmt("%.1f s", secs);
    if (c.budget_s > 0.0) {
      timing += fmt(" of %.0f s", c.budget_s);
      if (secs > c.budget_s) {
        v.pass = false;
        v.detail += "; over the runtime budget";
      }
    }
    const bool red_expected = expected_red.count(c.id) > 0;
    if (v.pass == red_expected) ++unexpected;
    std::printf("%s criterion %2d  %s: %s [%s]%s\n", v.pass ? "PASS" : "FAIL", c.id, c.title, v.detail.c_str(),
                timing.c_str(), red_expected ? (v.pass ? " (was expected to fail)" : " (known failure)") : "");
    std::fflush(stdout);
  }
  return unexpected == 0 ? 0 : 1;
}
