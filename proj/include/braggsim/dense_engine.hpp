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

// Reference evolution in the truncated two-mode Fock space |m_k, m_-k>, one
// amplitude vector per atomic sector. Slow but assumption-free; the branch
// engine is checked against it.

#ifndef BRAGGSIM_DENSE_ENGINE_HPP
#define BRAGGSIM_DENSE_ENGINE_HPP

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <optional>
#include <vector>

#include "braggsim/core_model.hpp"
#include "braggsim/rng.hpp"

namespace braggsim {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using SparseMatrix = Eigen::SparseMatrix<cplx>;

/// Two-mode basis; index = m_k * levels + m_-k.
struct FieldBasis {
  int cutoff = 1;

  int levels() const { return cutoff + 1; }
  int dim() const { return levels() * levels(); }
  int index(int m_k, int m_mk) const { return m_k * levels() + m_mk; }
};

/// Single-mode annihilation matrix, a|m> = sqrt(m)|m-1>.
Matrix ladder(int cutoff);

struct ModeOperators {
  int cutoff = 1;
  SparseMatrix a_k;   // incident mode +k
  SparseMatrix a_mk;  // reflected mode -k
};

ModeOperators build_mode_operators(int cutoff);

/// H_eff / hbar for one sector at time t (interaction picture), including the
/// anti-hermitian decay part -i gamma (n_k + n_-k).
SparseMatrix sector_heff(const Sector& sector, const SimParams& params, double t);

/// Truncated (not renormalized) Fock expansion of |ak, amk>.
Vector coherent_field(cplx ak, cplx amk, int cutoff);

/// Matrix-free application of -i H_eff(t) for one sector.
class SectorGenerator {
 public:
  SectorGenerator(const Sector& sector, const SimParams& params);

  /// out = -i H_eff(t) in, both of length FieldBasis::dim().
  void apply(double t, const cplx* in, cplx* out) const;

  const FieldBasis& basis() const { return basis_; }

 private:
  FieldBasis basis_;
  cplx coupling_;
  double drive_freq_;
  double pump_;
  double decay_;
  std::vector<double> sqrt_;
};

struct JumpEvent {
  double time = 0.0;
  int channel = 0;  // 1: C1 = sqrt(2 gamma) a_k, 2: C2 = sqrt(2 gamma) a_-k
};

struct DenseState {
  std::vector<Sector> sectors;
  FieldBasis basis;
  std::vector<Vector> amplitudes;  // one field vector per sector

  double norm_squared() const;
  void normalize();
  /// atoms (x) field vector, index = sector * dim + field.
  Vector flatten() const;
  /// Probability in the top two Fock levels of either mode.
  double top_level_mass() const;
};

/// Atomic weights times |alpha0, 0> in every sector.
DenseState initial_dense_state(const std::vector<Sector>& sectors, const SimParams& params);

/// Mean photon numbers (n_k, n_-k) of the normalized state.
std::pair<double, double> photon_numbers(const DenseState& state);

/// Throws TruncationTooSmall when the top two Fock levels carry >= 1e-8.
void check_truncation(const DenseState& state);

/// One Monte Carlo wave-function step of length params.step() from time t.
/// Draws exactly one variate. On a jump the collapse operator is applied first
/// and the state is then propagated with H_eff for the full step.
std::optional<JumpEvent> mcwf_step(DenseState& state, const SimParams& params, double t,
                                   UniformStream& stream);

/// Same as mcwf_step with precomputed per-sector generators.
std::optional<JumpEvent> mcwf_step(DenseState& state, const std::vector<SectorGenerator>& gens,
                                   const SimParams& params, double t, UniformStream& stream);

/// Density matrix over atoms (x) field.
struct DensityMatrix {
  Matrix rho;
  int d_atoms = 1;
  int d_field = 1;

  double trace() const { return rho.trace().real(); }
};

/// <psi|op|psi> / <psi|psi>.
cplx expectation(const Matrix& op, const Vector& psi);
/// Tr[op rho].
cplx expectation(const Matrix& op, const DensityMatrix& rho);
/// Field operator (dim x dim) summed over sectors of the normalized state.
cplx expectation(const SparseMatrix& field_op, const DenseState& state);

}  // namespace braggsim

#endif  // BRAGGSIM_DENSE_ENGINE_HPP
