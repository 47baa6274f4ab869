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

// Coherent-branch engine. Inside a sector the field is
//   |psi_s> = mu_s exp(ak_s a_k^+ + amk_s a_-k^+) |0, 0>,
// a representation that is closed under no-jump evolution and under both
// jumps. The amplitudes (ak, amk) never depend on mu or on the jump record,
// so they are integrated once per sector and shared by every trajectory;
// a trajectory only carries the prefactors mu_s.

#ifndef BRAGGSIM_BRANCH_ENGINE_HPP
#define BRAGGSIM_BRANCH_ENGINE_HPP

#include <cstdint>
#include <functional>
#include <vector>

#include "braggsim/dense_engine.hpp"

namespace braggsim {

struct BranchState {
  std::vector<Sector> sectors;
  std::vector<cplx> mu;
  std::vector<cplx> ak;
  std::vector<cplx> amk;
  /// Pruned branches keep their slot with active = 0 and mu = 0.
  std::vector<std::uint8_t> active;

  size_t size() const { return sectors.size(); }
  double branch_norm_squared(size_t s) const;
  double norm_squared() const;
  void normalize();
  /// Normalized sector probabilities p_s.
  std::vector<double> probabilities() const;
  double mean_n_k() const;
  double mean_n_mk() const;
  /// <a_-k> for the normalized state.
  cplx mean_a_mk() const;
};

/// psi0 = sum_s w_s |s> |alpha0, 0>, i.e. mu_s = w_s e^{-|alpha0|^2 / 2}.
BranchState initial_branch_state(const std::vector<Sector>& sectors, const SimParams& params);

struct BranchDerivative {
  cplx mu;
  cplx ak;
  cplx amk;
};

BranchDerivative branch_ode_rhs(const Sector& sector, cplx mu, cplx ak, cplx amk, const SimParams& params,
                                double t);

/// One classical RK4 step of length h for a single branch.
void branch_rk4_step(const Sector& sector, cplx& mu, cplx& ak, cplx& amk, const SimParams& params, double t,
                     double h);

/// Per-sector amplitude tables on the integrator lattice t_n = n * step.
/// log_factor(s, n) accumulates log of the RK4 prefactor multiplier, so
/// mu_s(m) = mu_s(n) exp(log_factor(s, m) - log_factor(s, n)) between jumps.
class BranchTables {
 public:
  BranchTables(std::vector<Sector> sectors, const SimParams& params, long n_steps);

  const std::vector<Sector>& sectors() const { return sectors_; }
  const SimParams& params() const { return params_; }
  long steps() const { return n_steps_; }
  double step() const { return params_.step(); }

  cplx ak(size_t s, long n) const { return entry(s, n).ak; }
  cplx amk(size_t s, long n) const { return entry(s, n).amk; }
  cplx log_factor(size_t s, long n) const { return entry(s, n).log_mu; }
  /// max over sectors of |ak|^2 + |amk|^2 at step n; bounds both jump rates.
  double photon_bound(long n) const { return bound_[static_cast<size_t>(n)]; }

  /// Fills amplitudes (and mu from the anchor) of `state` at step n.
  void amplitudes_at(long n, BranchState& state) const;

 private:
  struct Entry {
    cplx ak;
    cplx amk;
    cplx log_mu;
  };
  const Entry& entry(size_t s, long n) const {
    return table_[static_cast<size_t>(n) * sectors_.size() + s];
  }

  std::vector<Sector> sectors_;
  SimParams params_;
  long n_steps_;
  std::vector<Entry> table_;  // step-major
  std::vector<double> bound_;
};

using BranchObserver = std::function<void(long step, const BranchState& state)>;

struct BranchRunOptions {
  /// Sorted step indices at which `observe` is called (before the step's draw).
  std::vector<long> sample_steps;
  /// Drop a branch once its probability stays below this for a full period 2 pi / g.
  double prune_threshold = 1e-14;
};

/// Runs one MCWF trajectory from `state` (valid at `start_step`) to
/// `end_step`, drawing one variate per step from `stream`. Returns the jumps.
std::vector<JumpEvent> run_branch_segment(const BranchTables& tables, BranchState state, long start_step,
                                          long end_step, UniformStream& stream, const BranchRunOptions& options,
                                          const BranchObserver& observe);

/// Expands every branch into the truncated Fock basis. Throws
/// TruncationTooSmall when an amplitude violates the tail-mass rule.
DenseState branch_to_dense(const BranchState& state, int cutoff);

/// Rotates the field amplitudes of sector s by e^{-i Omega_s t}, leaving the
/// frame that co-rotates with the drive. Atom-field entanglement depends on
/// the relative field phases between sectors, so it is evaluated here.
BranchState to_lab_frame(const BranchState& state, double t);

}  // namespace braggsim

#endif  // BRAGGSIM_BRANCH_ENGINE_HPP
