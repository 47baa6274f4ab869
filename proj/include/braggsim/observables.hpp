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

// Ensemble estimators for the reflected intensity <n_-k(t)> and the two-time
// correlation G(t, t + tau) = <a_-k^+(t) a_-k(t + tau)>, plus two
// deterministic references: a quantum-regression oracle on the Lindblad
// equation and the closed coherent-branch expression for G.

#ifndef BRAGGSIM_OBSERVABLES_HPP
#define BRAGGSIM_OBSERVABLES_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "braggsim/trajectory.hpp"

namespace braggsim {

enum class Engine { Dense, Branch };

struct EnsembleOptions {
  std::size_t n_traj = 1;
  std::uint64_t seed = 0;
  unsigned workers = 1;
  /// Sample spacing in units of 1/g; must be a multiple of params.dt.
  double sample_dt_g = 0.01;
  /// 0 selects params.t_max.
  double t_max_g = 0.0;
  bool keep_records = false;
  bool keep_snapshots = false;
};

struct IntensitySeries {
  std::vector<double> t_g;
  std::vector<double> mean_n_mk;
  std::vector<double> stderr_n_mk;
  std::vector<double> mean_n_k;
  std::vector<TrajectoryRecord> records;
};

/// Trajectory i uses the stream (seed, i, 0), whatever the engine.
IntensitySeries reflected_intensity(Engine engine, const AtomicState& state, const SimParams& params,
                                    const EnsembleOptions& options);

/// Pointwise mean and standard error over trajectory records.
IntensitySeries summarize_records(std::vector<TrajectoryRecord> records, bool keep_records);

/// Lindblad reference for <n_-k> at the given times (units of 1/g). Only
/// the diagonal sector blocks are evolved. dt_g = 0 picks a stable step.
std::vector<double> master_equation_intensity(const AtomicState& state, const SimParams& params,
                                              const std::vector<double>& t_g, double dt_g = 0.0);

/// sum_s |w_s|^2 |amk_s(t)|^2 from the branch amplitude tables.
std::vector<double> ensemble_intensity(const AtomicState& state, const SimParams& params,
                                       const std::vector<double>& t_g);

/// Square lattice t_i = i h, tau_j = j h with entries only where i + j < n,
/// which covers 0 <= t + tau <= (n - 1) h.
struct CorrelationGrid {
  double step_g = 0.0;
  std::size_t n = 0;
  std::size_t n_traj_t = 0;
  std::size_t n_traj_tau = 0;
  std::vector<cplx> values;       // n * n, NaN outside the triangle
  std::vector<double> std_error;  // n * n
  std::vector<std::string> warnings;

  bool contains(std::size_t i, std::size_t j) const { return i < n && j < n && i + j < n; }
  cplx at(std::size_t i, std::size_t j) const { return values[i * n + j]; }
  double error_at(std::size_t i, std::size_t j) const { return std_error[i * n + j]; }
  double t_g(std::size_t i) const { return static_cast<double>(i) * step_g; }
  double tau_g(std::size_t j) const { return static_cast<double>(j) * step_g; }

  static CorrelationGrid make(double step_g, double t_max_g);
};

struct CorrelationOptions {
  std::size_t n_traj_t = 50;
  std::size_t n_traj_tau = 3;
  std::uint64_t seed = 0;
  unsigned workers = 1;
  double step_g = 0.05;
  /// 0 selects params.t_max.
  double t_max_g = 0.0;
};

/// Quantum-regression estimator on coherent-branch trajectories. From each
/// state psi(t) of t-trajectory i, the four states chi_k = (1 + i^k a_-k) psi
/// (k = 0..3) are evolved with the shared stream (seed, i, 1 + j n_tau + b)
/// for tau-trajectory b at base index j, and
///   G = 1/4 sum_k i^k |chi_k|^2 <a_-k>_{chi_k}(t + tau).
CorrelationGrid two_time_correlation(const AtomicState& state, const SimParams& params,
                                     const CorrelationOptions& options);

/// Closed expression G = sum_s |w_s|^2 conj(amk_s(t)) amk_s(t + tau), exact for
/// the ensemble because every sector block of the density matrix stays a
/// pure coherent projector under the master equation.
CorrelationGrid ensemble_correlation(const AtomicState& state, const SimParams& params, double step_g,
                                     double t_max_g = 0.0);

enum class QrtBackend {
  /// Full two-mode Fock-space Lindblad blocks, one per sector.
  TwoMode,
  /// Each sector split into the two normal modes of its photon-hopping
  /// matrix; equal decay rates keep the dissipator diagonal in that basis.
  NormalMode,
};

struct QrtOptions {
  QrtBackend backend = QrtBackend::NormalMode;
  unsigned workers = 1;
  /// Integrator step in units of 1/g; 0 selects params.dt.
  double dt_g = 0.0;
  /// Only every base_stride-th base time is evaluated; others stay NaN.
  std::size_t base_stride = 1;
  /// Sectors with |w_s|^2 below this are skipped.
  double min_weight = 0.0;
};

/// G(t, t + tau) = Tr[a_-k V(tau){rho(t) a_-k^+}] at one base time.
std::vector<cplx> qrt_oracle(const AtomicState& state, const SimParams& params, double t_g,
                             const std::vector<double>& tau_g, const QrtOptions& options = {});

/// Oracle on the same lattice as two_time_correlation.
CorrelationGrid qrt_oracle_grid(const AtomicState& state, const SimParams& params, double step_g, double t_max_g,
                                const QrtOptions& options = {});

}  // namespace braggsim

#endif  // BRAGGSIM_OBSERVABLES_HPP
