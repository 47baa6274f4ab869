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

#include <doctest.h>

#include <cmath>

#include "braggsim/branch_engine.hpp"
#include "braggsim/trajectory.hpp"

using namespace braggsim;

namespace {

SimParams driven() {
  SimParams p;
  p.eta = 1.5;
  p.gamma = 0.9;
  p.cutoff = 16;
  p.t_max = 1.0;
  return p;
}

}  // namespace

TEST_CASE("branch amplitudes follow the closed-system solution") {
  SimParams p;
  p.t_max = 1.0;
  const auto sectors = sector_list(Mott{4, 1}, p);
  const BranchTables tables(sectors, p, 1000);
  for (const long n : {0L, 250L, 700L, 1000L}) {
    const double t = n * p.step();
    // a_k(t) = alpha cos(c t), a_-k(t) = -i alpha sin(c t) with c = 3 g.
    CHECK(std::abs(tables.ak(0, n) - std::sqrt(2.0) * std::cos(3.0 * t)) < 1e-10);
    CHECK(std::abs(tables.amk(0, n) - cplx{0.0, -std::sqrt(2.0) * std::sin(3.0 * t)}) < 1e-10);
  }
}

TEST_CASE("initial branch state expands to the initial dense state") {
  const SimParams p = driven();
  const auto sectors = sector_list(NumberConserving{3}, p);
  const auto dense = branch_to_dense(initial_branch_state(sectors, p), p.cutoff);
  const auto ref = initial_dense_state(sectors, p);
  for (std::size_t s = 0; s < sectors.size(); ++s)
    CHECK((dense.amplitudes[s] - ref.amplitudes[s]).norm() < 1e-12);
}

TEST_CASE("branch and dense trajectories agree on a shared stream") {
  const SimParams p = driven();
  const auto sectors = sector_list(NumberConserving{2}, p);
  const auto steps = sample_steps(p, 0.05, p.t_max);
  const BranchTables tables(sectors, p, steps.back());
  for (std::uint32_t i = 0; i < 3; ++i) {
    UniformStream a(77, i, 0), b(77, i, 0);
    const auto br = run_branch_trajectory(tables, steps, a);
    const auto de = run_dense_trajectory(sectors, p, steps, b);
    REQUIRE(br.n_mk.size() == de.n_mk.size());
    CHECK(br.jumps.size() == de.jumps.size());
    for (std::size_t k = 0; k < br.n_mk.size(); ++k) CHECK(std::abs(br.n_mk[k] - de.n_mk[k]) < 1e-6);
  }
}

TEST_CASE("Mott trajectories are insensitive to the jump record") {
  const SimParams p = driven();
  const auto sectors = sector_list(Mott{3, 3}, p);
  const auto steps = sample_steps(p, 0.01, p.t_max);
  const BranchTables tables(sectors, p, steps.back());
  UniformStream s0(5, 0, 0);
  const auto ref = run_branch_trajectory(tables, steps, s0);
  for (std::uint32_t i = 1; i < 10; ++i) {
    UniformStream s(5, i, 0);
    const auto rec = run_branch_trajectory(tables, steps, s);
    for (std::size_t k = 0; k < ref.n_mk.size(); ++k) CHECK(std::abs(rec.n_mk[k] - ref.n_mk[k]) < 1e-10);
  }
}

TEST_CASE("lab frame rotates each sector field at its drive frequency") {
  SimParams p;
  const auto sectors = sector_list(NumberConserving{2}, p);
  const auto state = initial_branch_state(sectors, p);
  const auto lab = to_lab_frame(state, 0.3);
  for (std::size_t s = 0; s < sectors.size(); ++s) {
    CHECK(std::abs(lab.ak[s] - state.ak[s] * std::polar(1.0, -sectors[s].drive_freq * 0.3)) < 1e-15);
    CHECK(lab.mu[s] == state.mu[s]);
  }
  CHECK(lab.mean_n_mk() == doctest::Approx(state.mean_n_mk()));
}

TEST_CASE("sample steps must be whole multiples of the integrator step") {
  SimParams p;
  CHECK(sample_steps(p, 0.01, 0.05) == std::vector<long>{0, 10, 20, 30, 40, 50});
  CHECK_THROWS(sample_steps(p, 0.0105, 0.05));
}
