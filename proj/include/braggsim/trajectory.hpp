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

#ifndef BRAGGSIM_TRAJECTORY_HPP
#define BRAGGSIM_TRAJECTORY_HPP

#include <cstdint>
#include <vector>

#include "braggsim/branch_engine.hpp"

namespace braggsim {

/// Times are stored as g t; jump times too.
struct TrajectoryRecord {
  std::uint64_t seed = 0;
  std::uint32_t index = 0;
  std::vector<double> t_g;
  std::vector<double> n_mk;
  std::vector<double> n_k;
  std::vector<JumpEvent> jumps;
  std::vector<BranchState> branch_snapshots;
  std::vector<DenseState> dense_snapshots;
};

/// Step indices for samples every `sample_dt_g` (units of 1/g) up to
/// t_max, inclusive. Throws ValidationError if the spacing is not a whole
/// number of integrator steps.
std::vector<long> sample_steps(const SimParams& params, double sample_dt_g, double t_max_g);

/// Full trajectory from the initial state with intensities recorded at
/// `sample_steps` and optional snapshots.
TrajectoryRecord run_branch_trajectory(const BranchTables& tables, const std::vector<long>& sample_steps,
                                       UniformStream& stream, bool keep_snapshots = false);

/// Dense counterpart of run_branch_trajectory, driven by the same stream
/// convention (one variate per step).
TrajectoryRecord run_dense_trajectory(const std::vector<Sector>& sectors, const SimParams& params,
                                      const std::vector<long>& sample_steps, UniformStream& stream,
                                      bool keep_snapshots = false);

}  // namespace braggsim

#endif  // BRAGGSIM_TRAJECTORY_HPP
