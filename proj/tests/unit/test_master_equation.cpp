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

#include "braggsim/master_equation.hpp"
#include "braggsim/observables.hpp"

using namespace braggsim;

TEST_CASE("Lindblad evolution keeps the trace and hermiticity") {
  SimParams p;
  p.eta = 0.5;
  p.gamma = 0.5;
  p.alpha0 = 0.5;
  p.cutoff = 10;
  const auto sectors = sector_list(NumberConserving{2}, p);
  const auto rho0 = BlockDensity::initial(sectors, p, true);
  const auto out = master_equation_evolve(rho0, p, {0.5, 1.0, 2.0}, {0.01});
  for (const auto& rho : out) {
    CHECK(rho.trace() == doctest::Approx(1.0).epsilon(1e-9));
    const Matrix full = rho.to_dense().rho;
    CHECK((full - full.adjoint()).norm() < 1e-12);
    const Eigen::SelfAdjointEigenSolver<Matrix> eig(full);
    CHECK(eig.eigenvalues().minCoeff() > -1e-8);
  }
}

TEST_CASE("closed master equation reproduces the sine law") {
  SimParams p;
  p.cutoff = 16;
  std::vector<double> t;
  for (int k = 0; k <= 20; ++k) t.push_back(0.1 * k);
  const auto n = master_equation_intensity(Mott{3, 1}, p, t, 1e-3);
  for (std::size_t k = 0; k < t.size(); ++k)
    CHECK(std::abs(n[k] - 2.0 * std::pow(std::sin(2.0 * t[k]), 2)) < 1e-8);
}

TEST_CASE("damped driven intensity agrees with the branch ensemble") {
  SimParams p;
  p.eta = 0.4;
  p.gamma = 0.6;
  p.alpha0 = 0.5;
  p.cutoff = 10;
  p.t_max = 2.0;
  std::vector<double> t{0.25, 0.5, 1.0, 1.5, 2.0};
  const AtomicState state = NumberConserving{3};
  const auto me = master_equation_intensity(state, p, t, 1e-3);
  const auto ens = ensemble_intensity(state, p, t);
  for (std::size_t k = 0; k < t.size(); ++k) CHECK(me[k] == doctest::Approx(ens[k]).epsilon(1e-7));
}

TEST_CASE("block and dense density matrices convert both ways") {
  SimParams p;
  p.alpha0 = 0.5;
  p.cutoff = 8;
  const auto sectors = sector_list(NumberConserving{1}, p);
  const auto rho = BlockDensity::initial(sectors, p, true);
  const auto dense = rho.to_dense();
  const auto back = BlockDensity::from_dense(dense, sectors, p.cutoff, true);
  CHECK((back.block(0, 1) - rho.block(0, 1)).norm() == 0.0);
  CHECK(dense.trace() == doctest::Approx(1.0).epsilon(1e-9));
}
