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

#include "braggsim/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <numbers>
#include <set>
#include <sstream>

#include "braggsim/error.hpp"

namespace braggsim {

namespace detail {
const std::vector<std::pair<std::string, std::string>>& embedded_presets();
}

namespace {

using json = nlohmann::ordered_json;

[[noreturn]] void invalid(const std::string& path, const std::string& why) {
  throw Error(ErrorCode::ValidationError, path + ": " + why);
}

void reject_unknown(const json& obj, const std::string& path, const std::set<std::string>& allowed) {
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) invalid(path.empty() ? key : path + "." + key, "unknown key");
  }
}

const json& require_object(const json& j, const std::string& path) {
  if (!j.is_object()) invalid(path, "must be an object");
  return j;
}

double number_at(const json& obj, const std::string& key, const std::string& path, double fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  const std::string where = path.empty() ? key : path + "." + key;
  if (v.is_number()) return v.get<double>();
  // Multiples of pi may be written as "2pi", "0.5pi" or "pi".
  if (v.is_string()) {
    std::string s = v.get<std::string>();
    if (s.size() >= 2 && s.substr(s.size() - 2) == "pi") {
      const std::string head = s.substr(0, s.size() - 2);
      if (head.empty()) return std::numbers::pi;
      try {
        std::size_t used = 0;
        const double k = std::stod(head, &used);
        if (used == head.size()) return k * std::numbers::pi;
      } catch (const std::exception&) {
      }
    }
  }
  invalid(where, "must be a number (or a multiple of pi such as \"2pi\")");
}

long long integer_at(const json& obj, const std::string& key, const std::string& path, long long fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number_integer()) invalid(path.empty() ? key : path + "." + key, "must be an integer");
  return v.get<long long>();
}

cplx complex_at(const json& obj, const std::string& key, const std::string& path, cplx fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  const std::string where = path + "." + key;
  if (v.is_number()) return {v.get<double>(), 0.0};
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
    return {v[0].get<double>(), v[1].get<double>()};
  invalid(where, "must be a number or a [re, im] pair");
}

std::string string_at(const json& obj, const std::string& key, const std::string& path, const std::string& fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_string()) invalid(path.empty() ? key : path + "." + key, "must be a string");
  return v.get<std::string>();
}

template <class E>
E enum_at(const json& obj, const std::string& key, const std::vector<std::pair<std::string, E>>& table, E fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  std::string choices;
  for (const auto& [name, value] : table) choices += (choices.empty() ? "" : ", ") + name;
  if (!v.is_string()) invalid(key, "must be one of " + choices);
  const auto s = v.get<std::string>();
  for (const auto& [name, value] : table)
    if (name == s) return value;
  invalid(key, "unknown value \"" + s + "\" (expected " + choices + ")");
}

SimParams parse_params(const json& j) {
  require_object(j, "params");
  reject_unknown(j, "params", {"g", "eta", "gamma", "separation", "alpha0", "cutoff", "dt", "t_max"});
  SimParams p;
  p.g = number_at(j, "g", "params", p.g);
  p.eta = number_at(j, "eta", "params", p.eta);
  p.gamma = number_at(j, "gamma", "params", p.gamma);
  if (j.contains("separation")) {
    const json& s = j.at("separation");
    if (s.is_string() && s.get<std::string>() == "quarter_wave") {
      p.separation_phase = separation_phase(WellSeparation::QuarterWave);
    } else if (s.is_string() && s.get<std::string>() == "half_wave") {
      p.separation_phase = separation_phase(WellSeparation::HalfWave);
    } else {
      p.separation_phase = number_at(j, "separation", "params", 0.0);
    }
  }
  p.alpha0 = complex_at(j, "alpha0", "params", p.alpha0);
  const long long cutoff = integer_at(j, "cutoff", "params", p.cutoff);
  if (cutoff < 1 || cutoff > 60) invalid("params.cutoff", "must be in [1, 60]");
  p.cutoff = static_cast<int>(cutoff);
  p.dt = number_at(j, "dt", "params", p.dt);
  p.t_max = number_at(j, "t_max", "params", p.t_max);
  p.validate();
  return p;
}

AtomicState parse_atomic_state(const json& j) {
  require_object(j, "atomic_state");
  const std::string type = string_at(j, "type", "atomic_state", "");
  if (type == "mott") {
    reject_unknown(j, "atomic_state", {"type", "n0", "n1"});
    const long long n0 = integer_at(j, "n0", "atomic_state", -1);
    const long long n1 = integer_at(j, "n1", "atomic_state", -1);
    if (n0 < 0 || n0 > 1000) invalid("atomic_state.n0", "must be an integer in [0, 1000]");
    if (n1 < 0 || n1 > 1000) invalid("atomic_state.n1", "must be an integer in [0, 1000]");
    return Mott{static_cast<int>(n0), static_cast<int>(n1)};
  }
  if (type == "coherent_product") {
    reject_unknown(j, "atomic_state", {"type", "a0", "a1", "nmax"});
    if (!j.contains("a0") || !j.contains("a1")) invalid("atomic_state", "coherent_product needs a0 and a1");
    CoherentProduct cp{complex_at(j, "a0", "atomic_state", 0.0), complex_at(j, "a1", "atomic_state", 0.0), {}};
    if (j.contains("nmax")) {
      const long long nmax = integer_at(j, "nmax", "atomic_state", 0);
      if (nmax < 0 || nmax > 200) invalid("atomic_state.nmax", "must be in [0, 200]");
      cp.nmax = static_cast<int>(nmax);
    }
    return cp;
  }
  if (type == "number_conserving") {
    reject_unknown(j, "atomic_state", {"type", "N"});
    const long long N = integer_at(j, "N", "atomic_state", -1);
    if (N < 0 || N > 1000) invalid("atomic_state.N", "must be an integer in [0, 1000]");
    return NumberConserving{static_cast<int>(N)};
  }
  invalid("atomic_state.type", "must be one of mott, coherent_product, number_conserving");
}

}  // namespace

const char* to_string(Experiment e) {
  switch (e) {
    case Experiment::Intensity: return "intensity";
    case Experiment::Correlate: return "correlate";
    case Experiment::Spectrum: return "spectrum";
    case Experiment::FwhmScan: return "fwhm-scan";
    case Experiment::Negativity: return "negativity";
    case Experiment::OracleCheck: return "oracle-check";
  }
  return "unknown";
}

CorrelationSource RunConfig::resolved_correlation_source() const {
  if (correlation_source) return *correlation_source;
  return experiment == Experiment::Correlate || experiment == Experiment::OracleCheck
             ? CorrelationSource::Trajectories
             : CorrelationSource::Ensemble;
}

RunConfig parse_config(const std::string& text, const std::string& name) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ParseError, name + ": " + e.what());
  }
  if (!doc.is_object()) throw Error(ErrorCode::ParseError, name + ": top level must be a JSON object");
  reject_unknown(doc, "",
                 {"experiment", "engine", "params", "atomic_state", "n_traj", "n_traj_tau", "seed", "omega_max",
                  "omega_points", "Gamma", "output_dir", "sample_dt", "corr_dt", "correlation_source",
                  "spectrum_time", "envelope", "fwhm_N", "negativity_mode", "negativity_dt", "negativity_cutoff",
                  "oracle_stride", "oracle_min_weight", "description"});

  RunConfig cfg;
  cfg.name = name;
  if (!doc.contains("experiment")) invalid("experiment", "is required");
  cfg.experiment = enum_at<Experiment>(doc, "experiment",
                                       {{"intensity", Experiment::Intensity},
                                        {"correlate", Experiment::Correlate},
                                        {"spectrum", Experiment::Spectrum},
                                        {"fwhm-scan", Experiment::FwhmScan},
                                        {"negativity", Experiment::Negativity},
                                        {"oracle-check", Experiment::OracleCheck}},
                                       Experiment::Intensity);
  cfg.engine = enum_at<EngineChoice>(
      doc, "engine", {{"dense", EngineChoice::Dense}, {"branch", EngineChoice::Branch}, {"both", EngineChoice::Both}},
      EngineChoice::Branch);
  if (!doc.contains("params")) invalid("params", "is required");
  cfg.params = parse_params(doc.at("params"));
  if (!doc.contains("atomic_state")) invalid("atomic_state", "is required");
  cfg.atomic_state = parse_atomic_state(doc.at("atomic_state"));

  if (!doc.contains("seed")) invalid("seed", "is required (there is no clock-based default)");
  if (!doc.at("seed").is_number_unsigned() && !(doc.at("seed").is_number_integer() && doc.at("seed").get<long long>() >= 0))
    invalid("seed", "must be a non-negative 64-bit integer");
  cfg.seed = doc.at("seed").get<std::uint64_t>();

  const long long n_traj = integer_at(doc, "n_traj", "", 1);
  if (n_traj < 1 || n_traj > 10000000) invalid("n_traj", "must be >= 1");
  cfg.n_traj = static_cast<std::size_t>(n_traj);
  const long long n_tau = integer_at(doc, "n_traj_tau", "", 1);
  if (n_tau < 1 || n_tau > 100000) invalid("n_traj_tau", "must be >= 1");
  cfg.n_traj_tau = static_cast<std::size_t>(n_tau);

  cfg.omega_max = number_at(doc, "omega_max", "", 0.0);
  if (cfg.omega_max < 0.0 || !std::isfinite(cfg.omega_max)) invalid("omega_max", "must be >= 0");
  const long long points = integer_at(doc, "omega_points", "", 600);
  if (points < 2 || points > 1000000) invalid("omega_points", "must be >= 2");
  cfg.omega_points = static_cast<std::size_t>(points);
  cfg.Gamma = number_at(doc, "Gamma", "", 0.1);
  if (!(cfg.Gamma > 0.0) || !std::isfinite(cfg.Gamma)) invalid("Gamma", "must be > 0");
  cfg.output_dir = string_at(doc, "output_dir", "", "out/" + name);
  if (cfg.output_dir.empty()) invalid("output_dir", "must not be empty");

  cfg.sample_dt = number_at(doc, "sample_dt", "", 0.01);
  if (!(cfg.sample_dt > 0.0)) invalid("sample_dt", "must be > 0");
  cfg.corr_dt = number_at(doc, "corr_dt", "", 0.05);
  if (!(cfg.corr_dt > 0.0)) invalid("corr_dt", "must be > 0");
  for (const auto& [key, value] : std::vector<std::pair<const char*, double>>{{"sample_dt", cfg.sample_dt},
                                                                               {"corr_dt", cfg.corr_dt}}) {
    const double ratio = value / cfg.params.dt;
    if (std::abs(ratio - std::round(ratio)) > 1e-9 * ratio || std::round(ratio) < 1.0)
      invalid(key, "must be a whole multiple of params.dt");
  }
  if (doc.contains("correlation_source")) {
    cfg.correlation_source = enum_at<CorrelationSource>(doc, "correlation_source",
                                                        {{"ensemble", CorrelationSource::Ensemble},
                                                         {"trajectories", CorrelationSource::Trajectories},
                                                         {"oracle", CorrelationSource::Oracle}},
                                                        CorrelationSource::Ensemble);
  }
  cfg.spectrum_time = number_at(doc, "spectrum_time", "", 0.0);
  if (cfg.spectrum_time < 0.0) invalid("spectrum_time", "must be >= 0");
  if (doc.contains("envelope")) {
    if (!doc.at("envelope").is_boolean()) invalid("envelope", "must be true or false");
    cfg.envelope = doc.at("envelope").get<bool>();
  }
  if (doc.contains("fwhm_N")) {
    const json& list = doc.at("fwhm_N");
    if (!list.is_array() || list.empty()) invalid("fwhm_N", "must be a non-empty array of integers");
    for (std::size_t k = 0; k < list.size(); ++k) {
      if (!list[k].is_number_integer() || list[k].get<long long>() < 1 || list[k].get<long long>() > 200)
        invalid("fwhm_N[" + std::to_string(k) + "]", "must be an integer in [1, 200]");
      cfg.fwhm_N.push_back(list[k].get<int>());
    }
  }
  if (cfg.experiment == Experiment::FwhmScan && cfg.fwhm_N.empty()) invalid("fwhm_N", "is required for fwhm-scan");
  cfg.negativity_mode = enum_at<NegativityMode>(
      doc, "negativity_mode", {{"pure", NegativityMode::Pure}, {"mixed", NegativityMode::Mixed}}, NegativityMode::Pure);
  cfg.negativity_dt = number_at(doc, "negativity_dt", "", 0.05);
  if (!(cfg.negativity_dt > 0.0)) invalid("negativity_dt", "must be > 0");
  {
    const double ratio = cfg.negativity_dt / cfg.params.dt;
    if (std::abs(ratio - std::round(ratio)) > 1e-9 * ratio || std::round(ratio) < 1.0)
      invalid("negativity_dt", "must be a whole multiple of params.dt");
  }
  const long long ncut = integer_at(doc, "negativity_cutoff", "", 0);
  if (ncut < 0 || ncut > 40) invalid("negativity_cutoff", "must be in [0, 40]");
  cfg.negativity_cutoff = static_cast<int>(ncut);
  const long long stride = integer_at(doc, "oracle_stride", "", 1);
  if (stride < 1 || stride > 100000) invalid("oracle_stride", "must be >= 1");
  cfg.oracle_stride = static_cast<std::size_t>(stride);
  cfg.oracle_min_weight = number_at(doc, "oracle_min_weight", "", 0.0);
  if (!(cfg.oracle_min_weight >= 0.0) || cfg.oracle_min_weight >= 1.0) invalid("oracle_min_weight", "must be in [0, 1)");
  if (doc.contains("description") && !doc.at("description").is_string()) invalid("description", "must be a string");

  // Resolving the sectors surfaces truncation problems at load time.
  (void)sector_list(cfg.atomic_state, cfg.params);
  cfg.canonical_json = doc.dump(2);
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open config file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  std::string stem = path;
  if (const auto slash = stem.find_last_of('/'); slash != std::string::npos) stem = stem.substr(slash + 1);
  if (const auto dot = stem.find_last_of('.'); dot != std::string::npos) stem = stem.substr(0, dot);
  return parse_config(buf.str(), stem);
}

std::vector<std::string> preset_names() {
  std::vector<std::string> names;
  for (const auto& [name, text] : detail::embedded_presets()) names.push_back(name);
  // Natural order: fig2a, fig2b, fig3, ..., fig15.
  auto key = [](const std::string& n) {
    const auto digits = n.find_first_of("0123456789");
    if (digits == std::string::npos) return std::make_pair(0L, n);
    std::size_t used = 0;
    const long number = std::stol(n.substr(digits), &used);
    return std::make_pair(number, n.substr(digits + used));
  };
  std::sort(names.begin(), names.end(), [&](const std::string& a, const std::string& b) { return key(a) < key(b); });
  return names;
}

const std::string& preset_text(const std::string& name) {
  for (const auto& [key, text] : detail::embedded_presets())
    if (key == name) return text;
  invalid("preset", "unknown preset \"" + name + "\"");
}

RunConfig preset_config(const std::string& name) { return parse_config(preset_text(name), name); }

}  // namespace braggsim
