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
#include "braggsim/entanglement.hpp"

using namespace braggsim;

namespace {

DensityMatrix werner(double p) {
  Vector phi = Vector::Zero(4);
  phi[0] = phi[3] = 1.0 / std::sqrt(2.0);
  DensityMatrix rho;
  rho.d_atoms = 2;
  rho.d_field = 2;
  rho.rho = p * phi * phi.adjoint() + (1.0 - p) / 4.0 * Matrix::Identity(4, 4);
  return rho;
}

}  // namespace

TEST_CASE("werner states") {
  CHECK(log_negativity(werner(1.0), {2, 2}) == doctest::Approx(1.0).epsilon(1e-12));
  for (const double p : {0.5, 0.8}) CHECK(log_negativity(werner(p), {2, 2}) == doctest::Approx(std::log2((1.0 + 3.0 * p) / 2.0)));
  CHECK(log_negativity(werner(0.2), {2, 2}) == 0.0);
}

TEST_CASE("partial transpose is an involution that swaps atom indices") {
  DensityMatrix rho;
  rho.d_atoms = 2;
  rho.d_field = 3;
  rho.rho = Matrix::Zero(6, 6);
  rho.rho(0 * 3 + 1, 1 * 3 + 2) = 1.0;
  const Matrix pt = partial_transpose(rho, Bipartition::of(rho));
  CHECK(pt(1 * 3 + 1, 0 * 3 + 2) == cplx{1.0, 0.0});
  DensityMatrix again = rho;
  again.rho = pt;
  CHECK((partial_transpose(again, Bipartition::of(again)) - rho.rho).norm() == 0.0);
}

TEST_CASE("product states carry no negativity") {
  Vector atoms(3), field(5);
  atoms << 0.6, cplx{0.0, 0.8}, 0.0;
  field << 0.5, 0.5, 0.5, cplx{0.0, 0.5}, 0.0;
  Vector psi(15);
  for (int a = 0; a < 3; ++a)
    for (int f = 0; f < 5; ++f) psi[a * 5 + f] = atoms[a] * field[f];
  const auto rho = average_density_matrix({psi}, 3, 5);
  CHECK(log_negativity(rho, Bipartition::of(rho)) < 1e-12);
}

TEST_CASE("pure-state shortcut agrees with the dense definition") {
  SimParams p;
  p.alpha0 = 1.0;
  p.cutoff = 14;
  const auto sectors = sector_list(NumberConserving{3}, p);
  BranchState state = initial_branch_state(sectors, p);
  const cplx amps[] = {{0.3, -0.2}, {-0.5, 0.1}, {0.2, 0.6}, {0.0, -0.4}};
  for (std::size_t s = 0; s < state.size(); ++s) {
    state.ak[s] = amps[s] * 0.8;
    state.amk[s] = std::conj(amps[(s + 1) % 4]);
  }
  state.normalize();
  auto dense = branch_to_dense(state, p.cutoff);
  dense.normalize();
  const auto rho = average_density_matrix({dense.flatten()}, static_cast<int>(sectors.size()), dense.basis.dim());
  CHECK(std::abs(pure_log_negativity(state) - log_negativity(rho, Bipartition::of(rho))) < 1e-8);
  CHECK(pure_log_negativity(state) > 0.1);
}

TEST_CASE("averaged snapshots form a unit-trace density matrix") {
  Vector a = Vector::Zero(4), b = Vector::Zero(4);
  a[0] = 2.0;
  b[3] = cplx{0.0, 1.0};
  const auto rho = average_density_matrix({a, b}, 2, 2);
  CHECK(rho.trace() == doctest::Approx(1.0));
  CHECK(std::abs(rho.rho(0, 3)) == 0.0);
  CHECK(log_negativity(rho, Bipartition::of(rho)) == 0.0);
}
