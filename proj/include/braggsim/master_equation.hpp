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

// Lindblad master equation
//   d rho/dt = -i [H, rho] + sum_j C_j rho C_j^+ - 1/2 {C_j^+ C_j, rho}
// with C_1 = sqrt(2 gamma) a_k, C_2 = sqrt(2 gamma) a_-k. The atom numbers are
// conserved, so rho splits into (sector, sector') blocks that evolve
// independently; field observables only need the diagonal blocks.

#ifndef BRAGGSIM_MASTER_EQUATION_HPP
#define BRAGGSIM_MASTER_EQUATION_HPP

#include <functional>
#include <vector>

#include "braggsim/dense_engine.hpp"

namespace braggsim {

struct BlockDensity {
  std::vector<Sector> sectors;
  FieldBasis basis;
  bool coherences = true;
  /// coherences: S*S blocks, index s * S + s'. Otherwise the S diagonal blocks.
  std::vector<Matrix> blocks;

  size_t size() const { return sectors.size(); }
  bool has_block(size_t s, size_t sp) const { return coherences || s == sp; }
  Matrix& block(size_t s, size_t sp);
  const Matrix& block(size_t s, size_t sp) const;

  double trace() const;
  /// Population of the top two Fock levels of either mode.
  double top_level_mass() const;
  /// Field-operator expectation Tr[op rho] summed over the diagonal blocks.
  cplx field_expectation(const SparseMatrix& field_op) const;
  /// Full matrix over atoms (x) field; missing coherence blocks are zero.
  DensityMatrix to_dense() const;

  /// |psi0><psi0| with psi0 = sum_s w_s |s> |alpha0, 0>.
  static BlockDensity initial(const std::vector<Sector>& sectors, const SimParams& params, bool coherences);
  static BlockDensity from_dense(const DensityMatrix& rho, const std::vector<Sector>& sectors, int cutoff,
                                 bool coherences);
};

struct MasterEquationOptions {
  /// Integrator step in absolute time units; 0 selects params.step().
  double dt = 0.0;
};

/// A step comfortably inside the RK4 stability region for these sectors.
double stable_master_step(const std::vector<Sector>& sectors, const SimParams& params);

using DensityObserver = std::function<void(double t, const BlockDensity& rho)>;

/// Integrates from t = 0 and calls `observe` at every time in `t_grid`
/// (non-decreasing, absolute units). Throws TruncationTooSmall when the
/// top two Fock levels gain population >= 1e-8.
void master_equation_run(BlockDensity rho, const SimParams& params, const std::vector<double>& t_grid,
                         const MasterEquationOptions& options, const DensityObserver& observe);

std::vector<BlockDensity> master_equation_evolve(const BlockDensity& rho0, const SimParams& params,
                                                 const std::vector<double>& t_grid,
                                                 const MasterEquationOptions& options = {});

std::vector<DensityMatrix> master_equation_evolve(const DensityMatrix& rho0, const std::vector<Sector>& sectors,
                                                  const SimParams& params, const std::vector<double>& t_grid,
                                                  const MasterEquationOptions& options = {});

/// Propagates one operator block X (row sector `row`, column sector `col`)
/// from t0 to t1 under the Lindblad generator. X need not be hermitian, which
/// is what the regression oracle needs for rho a^+.
void lindblad_block_propagate(Matrix& x, const Sector& row, const Sector& col, const SimParams& params, double t0,
                              double t1, double dt);

}  // namespace braggsim

#endif  // BRAGGSIM_MASTER_EQUATION_HPP
