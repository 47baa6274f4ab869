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

// Experiment orchestration: turns a RunConfig into CSV files plus a JSON
// manifest. Numbers are printed with 17 significant digits so every file
// reads back to the exact doubles that were written.

#ifndef BRAGGSIM_RUNNER_HPP
#define BRAGGSIM_RUNNER_HPP

#include <string>
#include <vector>

#include "braggsim/config.hpp"
#include "braggsim/observables.hpp"

namespace braggsim {

struct RunResult {
  std::string output_dir;
  /// File names relative to output_dir, in the order they were written.
  std::vector<std::string> files;
  /// Compact JSON with the headline numbers of the run.
  std::string summary_json;
  double wall_seconds = 0.0;
};

/// Runs the configured experiment with `workers` threads. The CSV output
/// does not depend on `workers`.
RunResult run_experiment(const RunConfig& config, unsigned workers = 1);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  std::size_t column(const std::string& name) const;
};

CsvTable read_csv(const std::string& path);

/// Rebuilds a correlation grid from correlation.csv.
CorrelationGrid correlation_grid_from_csv(const CsvTable& table);

/// Lower-case hex SHA-256 of a file's bytes.
std::string sha256_file(const std::string& path);

/// Line features of Re S0: local maxima standing at least this fraction of
/// the global maximum above their surroundings.
inline constexpr double kFeatureProminence = 0.05;

/// Prominence used to pick the comb teeth for the envelope.
inline constexpr double kCombProminence = 0.02;

/// Oracle comparison: a point agrees when |estimate - oracle| <= k se +
/// kOracleFloor; the run passes when at least kOracleFraction3 of the
/// points agree at k = 3 and all of them at k = 5.
inline constexpr double kOracleFloor = 1e-6;
inline constexpr double kOracleFraction3 = 0.99;

}  // namespace braggsim

#endif  // BRAGGSIM_RUNNER_HPP
