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

#include "braggsim/branch_engine.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "braggsim/error.hpp"
#include "braggsim/trajectory.hpp"

namespace braggsim {

namespace {

constexpr double kJumpProbabilityLimit = 0.1;

[[noreturn]] void step_too_large(double dp, double t) {
  std::ostringstream msg;
  msg << "jump probability per step " << dp << " at t=" << t;
  throw Error(ErrorCode::StepTooLarge, msg.str());
}

}  // namespace

double BranchState::branch_norm_squared(size_t s) const {
  if (!active[s]) return 0.0;
  return std::norm(mu[s]) * std::exp(std::norm(ak[s]) + std::norm(amk[s]));
}

double BranchState::norm_squared() const {
  double total = 0.0;
  for (size_t s = 0; s < size(); ++s) total += branch_norm_squared(s);
  return total;
}

void BranchState::normalize() {
  const double scale = 1.0 / std::sqrt(norm_squared());
  for (auto& m : mu) m *= scale;
}

std::vector<double> BranchState::probabilities() const {
  std::vector<double> p(size());
  double total = 0.0;
  for (size_t s = 0; s < size(); ++s) total += (p[s] = branch_norm_squared(s));
  for (auto& v : p) v /= total;
  return p;
}

double BranchState::mean_n_k() const {
  double acc = 0.0, total = 0.0;
  for (size_t s = 0; s < size(); ++s) {
    const double p = branch_norm_squared(s);
    acc += p * std::norm(ak[s]);
    total += p;
  }
  return acc / total;
}

double BranchState::mean_n_mk() const {
  double acc = 0.0, total = 0.0;
  for (size_t s = 0; s < size(); ++s) {
    const double p = branch_norm_squared(s);
    acc += p * std::norm(amk[s]);
    total += p;
  }
  return acc / total;
}

cplx BranchState::mean_a_mk() const {
  cplx acc{0.0, 0.0};
  double total = 0.0;
  for (size_t s = 0; s < size(); ++s) {
    const double p = branch_norm_squared(s);
    acc += p * amk[s];
    total += p;
  }
  return acc / total;
}

BranchState initial_branch_state(const std::vector<Sector>& sectors, const SimParams& params) {
  BranchState state;
  state.sectors = sectors;
  const double vacuum_overlap = std::exp(-0.5 * std::norm(params.alpha0));
  for (const auto& s : sectors) {
    state.mu.push_back(s.weight * vacuum_overlap);
    state.ak.push_back(params.alpha0);
    state.amk.push_back(0.0);
    state.active.push_back(1);
  }
  return state;
}

BranchDerivative branch_ode_rhs(const Sector& sector, cplx mu, cplx ak, cplx amk, const SimParams& params,
                                double t) {
  const cplx i{0.0, 1.0};
  const cplx phase = std::polar(1.0, sector.drive_freq * t);
  const double eta = params.pump();
  const double gamma = params.decay();
  BranchDerivative d;
  d.ak = -i * std::conj(sector.coupling) * amk - i * eta * phase - gamma * ak;
  d.amk = -i * sector.coupling * ak - gamma * amk;
  d.mu = -i * eta * std::conj(phase) * ak * mu;
  return d;
}

void branch_rk4_step(const Sector& sector, cplx& mu, cplx& ak, cplx& amk, const SimParams& params, double t,
                     double h) {
  const auto k1 = branch_ode_rhs(sector, mu, ak, amk, params, t);
  const auto k2 = branch_ode_rhs(sector, mu + 0.5 * h * k1.mu, ak + 0.5 * h * k1.ak, amk + 0.5 * h * k1.amk,
                                 params, t + 0.5 * h);
  const auto k3 = branch_ode_rhs(sector, mu + 0.5 * h * k2.mu, ak + 0.5 * h * k2.ak, amk + 0.5 * h * k2.amk,
                                 params, t + 0.5 * h);
  const auto k4 = branch_ode_rhs(sector, mu + h * k3.mu, ak + h * k3.ak, amk + h * k3.amk, params, t + h);
  mu += (h / 6.0) * (k1.mu + 2.0 * k2.mu + 2.0 * k3.mu + k4.mu);
  ak += (h / 6.0) * (k1.ak + 2.0 * k2.ak + 2.0 * k3.ak + k4.ak);
  amk += (h / 6.0) * (k1.amk + 2.0 * k2.amk + 2.0 * k3.amk + k4.amk);
}

BranchTables::BranchTables(std::vector<Sector> sectors, const SimParams& params, long n_steps)
    : sectors_(std::move(sectors)), params_(params), n_steps_(n_steps) {
  if (n_steps < 0) throw Error(ErrorCode::InvalidArgument, "BranchTables: negative step count");
  const size_t S = sectors_.size();
  const size_t rows = static_cast<size_t>(n_steps) + 1;
  table_.resize(rows * S);
  bound_.assign(rows, 0.0);
  const double h = params_.step();
  for (size_t s = 0; s < S; ++s) {
    cplx ak = params_.alpha0;
    cplx amk{0.0, 0.0};
    cplx log_mu{0.0, 0.0};
    table_[s] = {ak, amk, log_mu};
    for (long n = 0; n < n_steps; ++n) {
      // The prefactor equation is linear in mu, so one RK4 step multiplies
      // mu by the value it produces from mu = 1.
      cplx factor{1.0, 0.0};
      branch_rk4_step(sectors_[s], factor, ak, amk, params_, static_cast<double>(n) * h, h);
      log_mu += std::log(factor);
      table_[static_cast<size_t>(n + 1) * S + s] = {ak, amk, log_mu};
    }
  }
  for (size_t n = 0; n < rows; ++n) {
    double b = 0.0;
    for (size_t s = 0; s < S; ++s) {
      const Entry& e = table_[n * S + s];
      b = std::max(b, std::norm(e.ak) + std::norm(e.amk));
    }
    bound_[n] = b;
  }
}

void BranchTables::amplitudes_at(long n, BranchState& state) const {
  for (size_t s = 0; s < sectors_.size(); ++s) {
    state.ak[s] = ak(s, n);
    state.amk[s] = amk(s, n);
  }
}

std::vector<JumpEvent> run_branch_segment(const BranchTables& tables, BranchState state, long start_step,
                                          long end_step, UniformStream& stream, const BranchRunOptions& options,
                                          const BranchObserver& observe) {
  if (end_step > tables.steps() || start_step < 0 || end_step < start_step)
    throw Error(ErrorCode::InvalidArgument, "branch segment outside the tabulated steps");
  const SimParams& params = tables.params();
  const size_t S = state.size();
  const double h = tables.step();
  const double gamma = params.decay();
  const double jump_scale = 2.0 * gamma * h;
  const cplx jump_amp{std::sqrt(2.0 * gamma), 0.0};
  const long period = std::max(1L, std::lround(2.0 * std::numbers::pi / params.g / h));

  std::vector<cplx> anchor_mu = state.mu;
  long anchor = start_step;
  std::vector<long> below_since(S, -1);
  std::vector<JumpEvent> jumps;

  auto materialize = [&](long n) {
    for (size_t s = 0; s < S; ++s) {
      state.ak[s] = tables.ak(s, n);
      state.amk[s] = tables.amk(s, n);
      state.mu[s] = state.active[s]
                        ? anchor_mu[s] * std::exp(tables.log_factor(s, n) - tables.log_factor(s, anchor))
                        : cplx{0.0, 0.0};
    }
  };
  auto reanchor = [&](long n) {
    state.normalize();
    anchor_mu = state.mu;
    anchor = n;
  };
  auto prune = [&](long n) {
    bool dropped = false;
    for (size_t s = 0; s < S; ++s) {
      if (!state.active[s]) continue;
      if (state.branch_norm_squared(s) >= options.prune_threshold) {
        below_since[s] = -1;
      } else if (below_since[s] < 0) {
        below_since[s] = n;
      } else if (n - below_since[s] >= period) {
        state.active[s] = 0;
        state.mu[s] = 0.0;
        dropped = true;
      }
    }
    if (dropped) reanchor(n);
  };

  materialize(start_step);
  size_t next_sample = 0;
  while (next_sample < options.sample_steps.size() && options.sample_steps[next_sample] < start_step) ++next_sample;

  for (long n = start_step;; ++n) {
    if (next_sample < options.sample_steps.size() && options.sample_steps[next_sample] == n) {
      materialize(n);
      reanchor(n);
      prune(n);
      while (next_sample < options.sample_steps.size() && options.sample_steps[next_sample] == n) ++next_sample;
      observe(n, state);
    }
    if (n == end_step) break;
    const double r = stream.next();
    if (gamma <= 0.0) continue;
    const double bound = jump_scale * tables.photon_bound(n);
    if (r >= bound && bound < kJumpProbabilityLimit) continue;

    materialize(n);
    double total = 0.0, nk = 0.0, nmk = 0.0;
    for (size_t s = 0; s < S; ++s) {
      const double p = state.branch_norm_squared(s);
      total += p;
      nk += p * std::norm(state.ak[s]);
      nmk += p * std::norm(state.amk[s]);
    }
    const double dp1 = jump_scale * nk / total;
    const double dp2 = jump_scale * nmk / total;
    const double t = static_cast<double>(n) * h;
    if (dp1 >= kJumpProbabilityLimit || dp2 >= kJumpProbabilityLimit) step_too_large(std::max(dp1, dp2), t);
    int channel = 0;
    if (r < dp1) {
      channel = 1;
    } else if (r < dp1 + dp2) {
      channel = 2;
    }
    if (channel == 0) continue;
    for (size_t s = 0; s < S; ++s) state.mu[s] *= jump_amp * (channel == 1 ? state.ak[s] : state.amk[s]);
    reanchor(n);
    jumps.push_back(JumpEvent{t * params.g, channel});
  }
  return jumps;
}

DenseState branch_to_dense(const BranchState& state, int cutoff) {
  DenseState dense;
  dense.sectors = state.sectors;
  dense.basis = FieldBasis{cutoff};
  for (size_t s = 0; s < state.size(); ++s) {
    if (!state.active[s]) {
      dense.amplitudes.push_back(Vector::Zero(dense.basis.dim()));
      continue;
    }
    for (const cplx a : {state.ak[s], state.amk[s]}) {
      const double tail = poisson_tail(std::norm(a), cutoff);
      if (tail >= kTailMassLimit) {
        std::ostringstream msg;
        msg << "branch amplitude |a|^2 = " << std::norm(a) << " leaves tail mass " << tail << " beyond cutoff "
            << cutoff;
        throw Error(ErrorCode::TruncationTooSmall, msg.str());
      }
    }
    const double scale = std::exp(0.5 * (std::norm(state.ak[s]) + std::norm(state.amk[s])));
    dense.amplitudes.push_back((state.mu[s] * scale) * coherent_field(state.ak[s], state.amk[s], cutoff));
  }
  return dense;
}

BranchState to_lab_frame(const BranchState& state, double t) {
  BranchState out = state;
  for (size_t s = 0; s < out.size(); ++s) {
    const cplx rot = std::polar(1.0, -out.sectors[s].drive_freq * t);
    out.ak[s] *= rot;
    out.amk[s] *= rot;
  }
  return out;
}

std::vector<long> sample_steps(const SimParams& params, double sample_dt_g, double t_max_g) {
  if (!(sample_dt_g > 0.0)) throw Error(ErrorCode::ValidationError, "sample_dt: must be > 0");
  const double ratio = sample_dt_g / params.dt;
  const long stride = std::lround(ratio);
  if (stride < 1 || std::abs(ratio - static_cast<double>(stride)) > 1e-9 * ratio)
    throw Error(ErrorCode::ValidationError, "sample_dt: must be a whole multiple of params.dt");
  const long last = std::lround(std::floor(t_max_g / params.dt + 1e-9));
  std::vector<long> steps;
  for (long n = 0; n <= last; n += stride) steps.push_back(n);
  return steps;
}

TrajectoryRecord run_branch_trajectory(const BranchTables& tables, const std::vector<long>& steps,
                                       UniformStream& stream, bool keep_snapshots) {
  if (steps.empty()) throw Error(ErrorCode::InvalidArgument, "no sample steps");
  TrajectoryRecord rec;
  const double dt = tables.params().dt;
  BranchRunOptions options;
  options.sample_steps = steps;
  auto observe = [&](long n, const BranchState& state) {
    rec.t_g.push_back(static_cast<double>(n) * dt);
    rec.n_mk.push_back(state.mean_n_mk());
    rec.n_k.push_back(state.mean_n_k());
    if (keep_snapshots) rec.branch_snapshots.push_back(state);
  };
  rec.jumps = run_branch_segment(tables, initial_branch_state(tables.sectors(), tables.params()), 0, steps.back(),
                                 stream, options, observe);
  return rec;
}

TrajectoryRecord run_dense_trajectory(const std::vector<Sector>& sectors, const SimParams& params,
                                      const std::vector<long>& steps, UniformStream& stream, bool keep_snapshots) {
  if (steps.empty()) throw Error(ErrorCode::InvalidArgument, "no sample steps");
  TrajectoryRecord rec;
  DenseState state = initial_dense_state(sectors, params);
  std::vector<SectorGenerator> gens;
  gens.reserve(sectors.size());
  for (const auto& s : sectors) gens.emplace_back(s, params);
  const double h = params.step();
  size_t next_sample = 0;
  for (long n = 0;; ++n) {
    if (next_sample < steps.size() && steps[next_sample] == n) {
      check_truncation(state);
      const auto [nk, nmk] = photon_numbers(state);
      rec.t_g.push_back(static_cast<double>(n) * params.dt);
      rec.n_mk.push_back(nmk);
      rec.n_k.push_back(nk);
      if (keep_snapshots) rec.dense_snapshots.push_back(state);
      while (next_sample < steps.size() && steps[next_sample] == n) ++next_sample;
    }
    if (n == steps.back()) break;
    auto jump = mcwf_step(state, gens, params, static_cast<double>(n) * h, stream);
    if (jump) {
      jump->time *= params.g;
      rec.jumps.push_back(*jump);
    }
  }
  return rec;
}

}  // namespace braggsim
