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

// Run configuration: one JSON document per experiment. Unknown keys are
// rejected and every validation message names the offending field path.

#ifndef BRAGGSIM_CONFIG_HPP
#define BRAGGSIM_CONFIG_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "braggsim/core_model.hpp"

namespace braggsim {

enum class Experiment { Intensity, Correlate, Spectrum, FwhmScan, Negativity, OracleCheck };
enum class EngineChoice { Dense, Branch, Both };
enum class CorrelationSource { Ensemble, Trajectories, Oracle };
enum class NegativityMode { Pure, Mixed };

struct RunConfig {
  std::string name;
  Experiment experiment = Experiment::Intensity;
  EngineChoice engine = EngineChoice::Branch;
  SimParams params;
  AtomicState atomic_state = Mott{0, 0};
  std::size_t n_traj = 1;
  std::size_t n_traj_tau = 1;
  std::uint64_t seed = 0;
  /// Frequencies in units of g; 0 selects 1.5 times the mean atom number.
  double omega_max = 0.0;
  std::size_t omega_points = 600;
  double Gamma = 0.1;
  std::string output_dir = "out";

  double sample_dt = 0.01;
  double corr_dt = 0.05;
  /// Unset: trajectories for correlate, ensemble for spectrum experiments.
  std::optional<CorrelationSource> correlation_source;
  /// Spectrum evaluation time in units of 1/g; 0 selects the end of the grid.
  double spectrum_time = 0.0;
  bool envelope = false;
  std::vector<int> fwhm_N;
  NegativityMode negativity_mode = NegativityMode::Pure;
  double negativity_dt = 0.05;
  /// Field cutoff for mixed-state negativity; 0 selects the smallest
  /// cutoff meeting the tail rule for alpha0.
  int negativity_cutoff = 0;
  /// Oracle cost controls: evaluate every k-th base time and skip sectors
  /// of weight below the threshold.
  std::size_t oracle_stride = 1;
  double oracle_min_weight = 0.0;

  /// Canonical JSON echo of the accepted document.
  std::string canonical_json;

  CorrelationSource resolved_correlation_source() const;
};

RunConfig parse_config(const std::string& text, const std::string& name = "config");
RunConfig load_config(const std::string& path);

std::vector<std::string> preset_names();
/// Throws ValidationError for unknown names.
const std::string& preset_text(const std::string& name);
RunConfig preset_config(const std::string& name);

const char* to_string(Experiment e);

}  // namespace braggsim

#endif  // BRAGGSIM_CONFIG_HPP
