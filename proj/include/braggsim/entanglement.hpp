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

// Light-atom logarithmic negativity E_N = log2 || rho^{T_A} ||_1, from dense
// density matrices and, for pure coherent-branch states, from the Gram
// matrix of the sector field states.

#ifndef BRAGGSIM_ENTANGLEMENT_HPP
#define BRAGGSIM_ENTANGLEMENT_HPP

#include <array>
#include <vector>

#include "braggsim/branch_engine.hpp"

namespace braggsim {

/// Atoms (x) field, atom index major.
struct Bipartition {
  int d_atoms = 1;
  int d_field = 1;

  static Bipartition of(const DensityMatrix& rho) { return {rho.d_atoms, rho.d_field}; }
};

/// (1/M) sum_m |psi_m><psi_m| over normalized snapshots.
DensityMatrix average_density_matrix(const std::vector<DenseState>& snapshots);
DensityMatrix average_density_matrix(const std::vector<Vector>& states, int d_atoms, int d_field);

/// rho[(a, f), (a', f')] -> rho[(a', f), (a, f')].
Matrix partial_transpose(const DensityMatrix& rho, const Bipartition& parts);

/// Values in [-1e-10, 0) are reported as 0.
double log_negativity(const DensityMatrix& rho, const Bipartition& parts);

/// 2 log2(sum_i s_i) with s_i^2 the eigenvalues of the atomic reduced state
/// rho_A[s][s'] = <f_s'|f_s>, built from coherent-state overlaps.
double pure_log_negativity(const BranchState& state);

/// The four parts of the system: the two wells and the two field modes.
enum class Part { Well0 = 0, Well1 = 1, ModeK = 2, ModeMinusK = 3 };

/// E_N across (a | b) of the reduced state of parts a and b, the other two
/// traced out. Well dimensions are taken from the largest occupation.
double pair_log_negativity(const BranchState& state, int cutoff, Part a, Part b);

}  // namespace braggsim

#endif  // BRAGGSIM_ENTANGLEMENT_HPP
