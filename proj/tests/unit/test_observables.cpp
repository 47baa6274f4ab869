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

#include "braggsim/observables.hpp"

using namespace braggsim;

namespace {

SimParams small_field() {
  SimParams p;
  p.eta = 0.2;
  p.gamma = 0.5;
  p.alpha0 = 0.5;
  p.cutoff = 10;
  p.t_max = 1.0;
  return p;
}

bool same_grid(const CorrelationGrid& a, const CorrelationGrid& b) {
  if (a.n != b.n) return false;
  for (std::size_t i = 0; i < a.n; ++i)
    for (std::size_t j = 0; a.contains(i, j); ++j)
      if (a.at(i, j) != b.at(i, j) || a.error_at(i, j) != b.error_at(i, j)) return false;
  return true;
}

}  // namespace

TEST_CASE("correlation grid covers the triangle t + tau <= t_max") {
  const auto g = CorrelationGrid::make(0.1, 1.0);
  CHECK(g.n == 11);
  CHECK(g.contains(3, 7));
  CHECK_FALSE(g.contains(4, 7));
  CHECK(std::isnan(g.at(0, 0).real()));
}

TEST_CASE("regression oracle matches the closed ensemble expression") {
  const SimParams p = small_field();
  for (const AtomicState& state : {AtomicState{Mott{2, 1}}, AtomicState{NumberConserving{2}}}) {
    const auto ens = ensemble_correlation(state, p, 0.1, 1.0);
    for (const QrtBackend backend : {QrtBackend::NormalMode, QrtBackend::TwoMode}) {
      QrtOptions opt;
      opt.backend = backend;
      const std::vector<double> tau{0.0, 0.3, 0.6};
      const auto g = qrt_oracle(state, p, 0.4, tau, opt);
      for (std::size_t j = 0; j < tau.size(); ++j) CHECK(std::abs(g[j] - ens.at(4, 3 * j)) < 1e-7);
    }
  }
}

TEST_CASE("trajectory correlation estimator is unbiased within its errors") {
  const SimParams p = small_field();
  CorrelationOptions opt;
  opt.n_traj_t = 40;
  opt.n_traj_tau = 2;
  opt.seed = 3;
  opt.step_g = 0.1;
  const auto est = two_time_correlation(NumberConserving{2}, p, opt);
  const auto ref = ensemble_correlation(NumberConserving{2}, p, 0.1);
  std::size_t points = 0, inside = 0;
  for (std::size_t i = 0; i < est.n; ++i)
    for (std::size_t j = 0; est.contains(i, j); ++j, ++points)
      if (std::abs(est.at(i, j) - ref.at(i, j)) <= 4.0 * est.error_at(i, j) + 1e-9) ++inside;
  CHECK(inside == points);
}

TEST_CASE("ensemble estimators do not depend on the worker count") {
  const SimParams p = small_field();
  CorrelationOptions opt;
  opt.n_traj_t = 6;
  opt.n_traj_tau = 2;
  opt.seed = 11;
  opt.step_g = 0.1;
  opt.workers = 1;
  const auto one = two_time_correlation(NumberConserving{2}, p, opt);
  opt.workers = 3;
  CHECK(same_grid(one, two_time_correlation(NumberConserving{2}, p, opt)));

  EnsembleOptions e;
  e.n_traj = 8;
  e.seed = 4;
  e.sample_dt_g = 0.05;
  const auto a = reflected_intensity(Engine::Branch, NumberConserving{2}, p, e);
  e.workers = 4;
  const auto b = reflected_intensity(Engine::Branch, NumberConserving{2}, p, e);
  CHECK(a.mean_n_mk == b.mean_n_mk);
  CHECK(a.stderr_n_mk == b.stderr_n_mk);
}

TEST_CASE("intensity ensemble agrees with the Lindblad reference") {
  SimParams p = small_field();
  p.eta = 0.8;
  EnsembleOptions e;
  e.n_traj = 200;
  e.seed = 8;
  e.sample_dt_g = 0.25;
  const auto series = reflected_intensity(Engine::Branch, NumberConserving{3}, p, e);
  const auto me = master_equation_intensity(NumberConserving{3}, p, series.t_g);
  for (std::size_t k = 1; k < me.size(); ++k)
    CHECK(std::abs(series.mean_n_mk[k] - me[k]) <= 4.0 * series.stderr_n_mk[k] + 1e-9);
}
