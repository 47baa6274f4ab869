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

#include "braggsim/observables.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>
#include <sstream>

#include "braggsim/error.hpp"
#include "braggsim/master_equation.hpp"
#include "braggsim/parallel.hpp"

namespace braggsim {

namespace {

constexpr double kTopLevelLimit = 1e-8;
const cplx kNaN{std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN()};

double resolve_t_max(double t_max_g, const SimParams& params) { return t_max_g > 0.0 ? t_max_g : params.t_max; }

long whole_steps(double time_g, const SimParams& params, const char* field) {
  const double ratio = time_g / params.dt;
  const long steps = std::lround(ratio);
  if (std::abs(ratio - static_cast<double>(steps)) > 1e-9 * std::max(1.0, ratio)) {
    throw Error(ErrorCode::ValidationError, std::string(field) + ": must be a whole multiple of params.dt");
  }
  return steps;
}

// amk_s at the lattice points k * stride, k < n, for one sector.
std::vector<cplx> sector_amk_series(const Sector& sector, const SimParams& params, long stride, std::size_t n) {
  std::vector<cplx> out(n);
  cplx mu{1.0, 0.0};
  cplx ak = params.alpha0;
  cplx amk{0.0, 0.0};
  const double h = params.step();
  long step = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const long target = static_cast<long>(k) * stride;
    for (; step < target; ++step) {
      mu = 1.0;
      branch_rk4_step(sector, mu, ak, amk, params, static_cast<double>(step) * h, h);
    }
    out[k] = amk;
  }
  return out;
}

// ---- single-mode Lindblad used by the normal-mode oracle ----

// d X/dt = -i [H, X] + 2 gamma (b X b^+ - 1/2 {b^+ b, X}),
// H = w b^+ b + f(t) b^+ + conj(f(t)) b, f(t) = drive e^{i Omega t}.
class SingleModeLindblad {
 public:
  SingleModeLindblad(int cutoff, double w, cplx drive, double omega, double gamma)
      : L_(cutoff + 1), w_(w), drive_(drive), omega_(omega), gamma_(gamma) {
    sq_.resize(static_cast<std::size_t>(L_ + 1));
    for (std::size_t m = 0; m < sq_.size(); ++m) sq_[m] = std::sqrt(static_cast<double>(m));
  }

  int levels() const { return L_; }

  void apply(double t, const Matrix& x, Matrix& y) const {
    const cplx f = drive_ * std::polar(1.0, omega_ * t);
    const cplx fc = std::conj(f);
    const cplx mi{0.0, -1.0};
    y.resize(L_, L_);
    for (int n = 0; n < L_; ++n) {
      for (int m = 0; m < L_; ++m) {
        cplx hx = w_ * static_cast<double>(m) * x(m, n);
        if (m > 0) hx += f * sq_[m] * x(m - 1, n);
        if (m + 1 < L_) hx += fc * sq_[m + 1] * x(m + 1, n);
        cplx xh = w_ * static_cast<double>(n) * x(m, n);
        if (n > 0) xh += fc * sq_[n] * x(m, n - 1);
        if (n + 1 < L_) xh += f * sq_[n + 1] * x(m, n + 1);
        cplx v = mi * (hx - xh) - gamma_ * static_cast<double>(m + n) * x(m, n);
        if (m + 1 < L_ && n + 1 < L_) v += 2.0 * gamma_ * sq_[m + 1] * sq_[n + 1] * x(m + 1, n + 1);
        y(m, n) = v;
      }
    }
  }

  void step(Matrix& x, double t, double h) {
    apply(t, x, k1_);
    stage_ = x + (0.5 * h) * k1_;
    apply(t + 0.5 * h, stage_, k2_);
    stage_ = x + (0.5 * h) * k2_;
    apply(t + 0.5 * h, stage_, k3_);
    stage_ = x + h * k3_;
    apply(t + h, stage_, k4_);
    x += (h / 6.0) * (k1_ + 2.0 * k2_ + 2.0 * k3_ + k4_);
  }

  /// Tr[b X]
  cplx trace_lower(const Matrix& x) const {
    cplx acc{0.0, 0.0};
    for (int m = 0; m + 1 < L_; ++m) acc += sq_[m + 1] * x(m + 1, m);
    return acc;
  }

  /// X b^+
  Matrix times_raise(const Matrix& x) const {
    Matrix out = Matrix::Zero(L_, L_);
    // (X b^+)(m, n) = X(m, n + 1) sqrt(n + 1)
    for (int n = 0; n + 1 < L_; ++n) out.col(n) = sq_[n + 1] * x.col(n + 1);
    return out;
  }

  double top_mass(const Matrix& x) const {
    double top = 0.0;
    for (int m = std::max(1, L_ - 2); m < L_; ++m) top += x(m, m).real();
    return top;
  }

 private:
  int L_;
  double w_;
  cplx drive_;
  double omega_;
  double gamma_;
  std::vector<double> sq_;
  Matrix k1_, k2_, k3_, k4_, stage_;
};

Matrix coherent_projector(cplx beta, int cutoff) {
  const auto amps = coherent_amplitudes(beta, cutoff);
  Vector v(cutoff + 1);
  for (int m = 0; m <= cutoff; ++m) v[m] = amps[static_cast<std::size_t>(m)];
  return v * v.adjoint();
}

void truncation_guard(double top, double t) {
  if (top >= kTopLevelLimit) {
    std::ostringstream msg;
    msg << "regression oracle: top Fock levels hold " << top << " at t=" << t;
    throw Error(ErrorCode::TruncationTooSmall, msg.str());
  }
}

// Per-sector regression on the lattice k * stride (k < n). Calls
// emit(i, j, G_s) for each evaluated base index i and every lag j < n - i.
using Emit = std::function<void(std::size_t, std::size_t, cplx)>;

void normal_mode_sector(const Sector& sector, const SimParams& params, double h, long stride, std::size_t n,
                        const std::vector<std::size_t>& bases, const Emit& emit) {
  Eigen::Matrix2cd M;
  M << 0.0, std::conj(sector.coupling), sector.coupling, 0.0;
  Eigen::Matrix2cd U = Eigen::Matrix2cd::Identity();
  Eigen::Vector2d w = Eigen::Vector2d::Zero();
  if (std::abs(sector.coupling) > 0.0) {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> eig(M);
    U = eig.eigenvectors();
    w = eig.eigenvalues();
  }
  const int cutoff = params.cutoff;
  const double gamma = params.decay();
  std::vector<SingleModeLindblad> modes;
  std::vector<Matrix> rho;
  for (int j = 0; j < 2; ++j) {
    modes.emplace_back(cutoff, w[j], params.pump() * std::conj(U(0, j)), sector.drive_freq, gamma);
    rho.push_back(coherent_projector(std::conj(U(0, j)) * params.alpha0, cutoff));
  }
  // Forward pass: <b_j> on the lattice and rho_j at the base points.
  std::vector<std::array<cplx, 2>> mean_b(n);
  std::vector<std::array<Matrix, 2>> base_rho(n);
  std::vector<char> is_base(n, 0);
  for (const auto b : bases) is_base[b] = 1;
  for (std::size_t k = 0; k < n; ++k) {
    if (k > 0) {
      const double t0 = static_cast<double>((static_cast<long>(k) - 1) * stride) * h;
      for (long q = 0; q < stride; ++q) {
        for (int j = 0; j < 2; ++j) modes[j].step(rho[j], t0 + static_cast<double>(q) * h, h);
      }
    }
    const double t = static_cast<double>(static_cast<long>(k) * stride) * h;
    for (int j = 0; j < 2; ++j) {
      truncation_guard(modes[j].top_mass(rho[j]), t);
      mean_b[k][j] = modes[j].trace_lower(rho[j]);
      if (is_base[k]) base_rho[k][j] = rho[j];
    }
  }
  // Regression pass from every base point.
  for (const auto i : bases) {
    std::array<Matrix, 2> y{modes[0].times_raise(base_rho[i][0]), modes[1].times_raise(base_rho[i][1])};
    for (std::size_t j = 0; i + j < n; ++j) {
      if (j > 0) {
        const double t0 = static_cast<double>(static_cast<long>(i + j - 1) * stride) * h;
        for (long q = 0; q < stride; ++q) {
          for (int m = 0; m < 2; ++m) modes[m].step(y[m], t0 + static_cast<double>(q) * h, h);
        }
      }
      cplx g{0.0, 0.0};
      for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
          const cplx coeff = std::conj(U(1, a)) * U(1, b);
          if (a == b) {
            g += coeff * modes[a].trace_lower(y[a]);
          } else {
            g += coeff * std::conj(mean_b[i][a]) * mean_b[i + j][b];
          }
        }
      }
      emit(i, j, g);
    }
  }
}

void two_mode_sector(const Sector& sector, const SimParams& params, double h, long stride, std::size_t n,
                     const std::vector<std::size_t>& bases, const Emit& emit) {
  const auto ops = build_mode_operators(params.cutoff);
  const SparseMatrix raise = ops.a_mk.adjoint();
  Sector unit = sector;
  unit.weight = 1.0;
  BlockDensity rho = BlockDensity::initial({unit}, params, false);
  std::vector<Matrix> base_rho(n);
  std::vector<char> is_base(n, 0);
  for (const auto b : bases) is_base[b] = 1;
  Matrix& x = rho.block(0, 0);
  for (std::size_t k = 0; k < n; ++k) {
    const double t1 = static_cast<double>(static_cast<long>(k) * stride) * h;
    if (k > 0) lindblad_block_propagate(x, sector, sector, params, t1 - static_cast<double>(stride) * h, t1, h);
    truncation_guard(rho.top_level_mass(), t1);
    if (is_base[k]) base_rho[k] = x;
  }
  for (const auto i : bases) {
    Matrix y = base_rho[i] * raise;
    for (std::size_t j = 0; i + j < n; ++j) {
      const double t1 = static_cast<double>(static_cast<long>(i + j) * stride) * h;
      if (j > 0) lindblad_block_propagate(y, sector, sector, params, t1 - static_cast<double>(stride) * h, t1, h);
      emit(i, j, (ops.a_mk * y).trace());
    }
  }
}

// Shared driver: sum_s |w_s|^2 G_s over the lattice.
std::vector<cplx> regression_sum(const AtomicState& state, const SimParams& params, double h, long stride,
                                 std::size_t n, const std::vector<std::size_t>& bases, const QrtOptions& options) {
  const auto all = sector_list(state, params);
  std::vector<Sector> sectors;
  for (const auto& s : all)
    if (std::norm(s.weight) >= options.min_weight && std::norm(s.weight) > 0.0) sectors.push_back(s);
  std::vector<cplx> total(n * n, cplx{0.0, 0.0});
  // Batches bound memory; the reduction stays in sector order.
  const std::size_t batch = std::max<std::size_t>(1, options.workers) * 4;
  for (std::size_t first = 0; first < sectors.size(); first += batch) {
    const std::size_t count = std::min(batch, sectors.size() - first);
    std::vector<std::vector<cplx>> partial(count, std::vector<cplx>(n * n, cplx{0.0, 0.0}));
    parallel_for(count, options.workers, [&](std::size_t b) {
      const Sector& sector = sectors[first + b];
      auto& out = partial[b];
      const Emit emit = [&](std::size_t i, std::size_t j, cplx g) { out[i * n + j] = g; };
      if (options.backend == QrtBackend::NormalMode) {
        normal_mode_sector(sector, params, h, stride, n, bases, emit);
      } else {
        two_mode_sector(sector, params, h, stride, n, bases, emit);
      }
    });
    for (std::size_t b = 0; b < count; ++b) {
      const double weight = std::norm(sectors[first + b].weight);
      for (std::size_t k = 0; k < n * n; ++k) total[k] += weight * partial[b][k];
    }
  }
  return total;
}

}  // namespace

IntensitySeries summarize_records(std::vector<TrajectoryRecord> records, bool keep_records) {
  IntensitySeries out;
  if (records.empty()) return out;
  const std::size_t T = records.front().t_g.size();
  const double M = static_cast<double>(records.size());
  out.t_g = records.front().t_g;
  out.mean_n_mk.assign(T, 0.0);
  out.stderr_n_mk.assign(T, 0.0);
  out.mean_n_k.assign(T, 0.0);
  for (const auto& r : records) {
    for (std::size_t k = 0; k < T; ++k) {
      out.mean_n_mk[k] += r.n_mk[k];
      out.mean_n_k[k] += r.n_k[k];
    }
  }
  for (std::size_t k = 0; k < T; ++k) {
    out.mean_n_mk[k] /= M;
    out.mean_n_k[k] /= M;
  }
  if (records.size() > 1) {
    for (std::size_t k = 0; k < T; ++k) {
      double var = 0.0;
      for (const auto& r : records) var += (r.n_mk[k] - out.mean_n_mk[k]) * (r.n_mk[k] - out.mean_n_mk[k]);
      out.stderr_n_mk[k] = std::sqrt(var / (M - 1.0) / M);
    }
  }
  if (keep_records) out.records = std::move(records);
  return out;
}

IntensitySeries reflected_intensity(Engine engine, const AtomicState& state, const SimParams& params,
                                    const EnsembleOptions& options) {
  params.validate();
  if (options.n_traj < 1) throw Error(ErrorCode::ValidationError, "n_traj: must be >= 1");
  const auto sectors = sector_list(state, params);
  const auto steps = sample_steps(params, options.sample_dt_g, resolve_t_max(options.t_max_g, params));
  std::vector<TrajectoryRecord> records(options.n_traj);
  if (engine == Engine::Branch) {
    const BranchTables tables(sectors, params, steps.back());
    parallel_for(options.n_traj, options.workers, [&](std::size_t i) {
      UniformStream stream(options.seed, static_cast<std::uint32_t>(i), 0);
      records[i] = run_branch_trajectory(tables, steps, stream, options.keep_snapshots);
      records[i].seed = options.seed;
      records[i].index = static_cast<std::uint32_t>(i);
    });
  } else {
    parallel_for(options.n_traj, options.workers, [&](std::size_t i) {
      UniformStream stream(options.seed, static_cast<std::uint32_t>(i), 0);
      records[i] = run_dense_trajectory(sectors, params, steps, stream, options.keep_snapshots);
      records[i].seed = options.seed;
      records[i].index = static_cast<std::uint32_t>(i);
    });
  }
  return summarize_records(std::move(records), options.keep_records || options.keep_snapshots);
}

std::vector<double> master_equation_intensity(const AtomicState& state, const SimParams& params,
                                              const std::vector<double>& t_g, double dt_g) {
  params.validate();
  const auto sectors = sector_list(state, params);
  MasterEquationOptions options;
  options.dt = dt_g > 0.0 ? dt_g / params.g : stable_master_step(sectors, params);
  const auto ops = build_mode_operators(params.cutoff);
  const SparseMatrix number = ops.a_mk.adjoint() * ops.a_mk;
  std::vector<double> grid;
  grid.reserve(t_g.size());
  for (const double t : t_g) grid.push_back(t / params.g);
  std::vector<double> out;
  out.reserve(t_g.size());
  master_equation_run(BlockDensity::initial(sectors, params, false), params, grid, options,
                      [&](double, const BlockDensity& rho) {
                        out.push_back(rho.field_expectation(number).real() / rho.trace());
                      });
  return out;
}

std::vector<double> ensemble_intensity(const AtomicState& state, const SimParams& params,
                                       const std::vector<double>& t_g) {
  const auto sectors = sector_list(state, params);
  std::vector<double> out(t_g.size(), 0.0);
  for (const auto& s : sectors) {
    cplx mu{1.0, 0.0}, ak = params.alpha0, amk{0.0, 0.0};
    long step = 0;
    const double h = params.step();
    for (std::size_t k = 0; k < t_g.size(); ++k) {
      const long target = whole_steps(t_g[k], params, "t_g");
      if (target < step) throw Error(ErrorCode::InvalidArgument, "ensemble_intensity: times must be sorted");
      for (; step < target; ++step) {
        mu = 1.0;
        branch_rk4_step(s, mu, ak, amk, params, static_cast<double>(step) * h, h);
      }
      out[k] += std::norm(s.weight) * std::norm(amk);
    }
  }
  return out;
}

CorrelationGrid CorrelationGrid::make(double step_g, double t_max_g) {
  if (!(step_g > 0.0)) throw Error(ErrorCode::ValidationError, "corr_dt: must be > 0");
  CorrelationGrid grid;
  grid.step_g = step_g;
  grid.n = static_cast<std::size_t>(std::floor(t_max_g / step_g + 1e-9)) + 1;
  grid.values.assign(grid.n * grid.n, kNaN);
  grid.std_error.assign(grid.n * grid.n, std::numeric_limits<double>::quiet_NaN());
  return grid;
}

CorrelationGrid two_time_correlation(const AtomicState& state, const SimParams& params,
                                     const CorrelationOptions& options) {
  params.validate();
  if (options.n_traj_t < 1 || options.n_traj_tau < 1)
    throw Error(ErrorCode::ValidationError, "n_traj / n_traj_tau: must be >= 1");
  CorrelationGrid grid = CorrelationGrid::make(options.step_g, resolve_t_max(options.t_max_g, params));
  grid.n_traj_t = options.n_traj_t;
  grid.n_traj_tau = options.n_traj_tau;
  const std::size_t n = grid.n;
  const long stride = whole_steps(options.step_g, params, "corr_dt");
  const long end_step = static_cast<long>(n - 1) * stride;
  const BranchTables tables(sector_list(state, params), params, end_step);
  std::vector<long> lattice(n);
  for (std::size_t k = 0; k < n; ++k) lattice[k] = static_cast<long>(k) * stride;

  const std::size_t n_tau = options.n_traj_tau;
  const cplx iu{0.0, 1.0};
  const std::array<cplx, 4> phase{cplx{1.0, 0.0}, iu, cplx{-1.0, 0.0}, -iu};
  std::vector<std::vector<cplx>> per_traj(options.n_traj_t);

  parallel_for(options.n_traj_t, options.workers, [&](std::size_t i) {
    std::vector<cplx> acc(n * n, cplx{0.0, 0.0});
    UniformStream stream(options.seed, static_cast<std::uint32_t>(i), 0);
    BranchRunOptions outer;
    outer.sample_steps = lattice;
    run_branch_segment(tables, initial_branch_state(tables.sectors(), params), 0, end_step, stream, outer,
                       [&](long step, const BranchState& psi) {
                         const std::size_t base = static_cast<std::size_t>(step / stride);
                         BranchRunOptions inner;
                         inner.sample_steps.assign(lattice.begin() + static_cast<long>(base), lattice.end());
                         for (std::size_t b = 0; b < n_tau; ++b) {
                           const auto aux = static_cast<std::uint32_t>(1 + base * n_tau + b);
                           for (int k = 0; k < 4; ++k) {
                             BranchState chi = psi;
                             for (std::size_t s = 0; s < chi.size(); ++s) chi.mu[s] *= 1.0 + phase[k] * chi.amk[s];
                             const double weight = chi.norm_squared();
                             if (!(weight > 0.0)) continue;
                             const cplx coeff = 0.25 * phase[k] * weight / static_cast<double>(n_tau);
                             UniformStream aux_stream(options.seed, static_cast<std::uint32_t>(i), aux);
                             run_branch_segment(tables, std::move(chi), step, end_step, aux_stream, inner,
                                                [&](long lag_step, const BranchState& phi) {
                                                  const auto lag = static_cast<std::size_t>((lag_step - step) / stride);
                                                  acc[base * n + lag] += coeff * phi.mean_a_mk();
                                                });
                           }
                         }
                       });
    per_traj[i] = std::move(acc);
  });

  const double M = static_cast<double>(options.n_traj_t);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; i + j < n; ++j) {
      const std::size_t k = i * n + j;
      cplx mean{0.0, 0.0};
      for (const auto& x : per_traj) mean += x[k];
      mean /= M;
      double var = 0.0;
      if (options.n_traj_t > 1) {
        for (const auto& x : per_traj) var += std::norm(x[k] - mean);
        var /= (M - 1.0);
      }
      grid.values[k] = mean;
      grid.std_error[k] = std::sqrt(var / M);
    }
    const cplx diag = grid.values[i * n];
    if (diag.real() < -3.0 * grid.std_error[i * n] && diag.real() < -1e-12) {
      std::ostringstream msg;
      msg << "NonPositiveDiagonal: Re G(t,t) = " << diag.real() << " at t_g = " << grid.t_g(i);
      grid.warnings.push_back(msg.str());
    }
  }
  return grid;
}

CorrelationGrid ensemble_correlation(const AtomicState& state, const SimParams& params, double step_g,
                                     double t_max_g) {
  params.validate();
  CorrelationGrid grid = CorrelationGrid::make(step_g, resolve_t_max(t_max_g, params));
  const std::size_t n = grid.n;
  const long stride = whole_steps(step_g, params, "corr_dt");
  std::vector<cplx> acc(n * n, cplx{0.0, 0.0});
  for (const auto& s : sector_list(state, params)) {
    const double w = std::norm(s.weight);
    if (w == 0.0) continue;
    const auto amk = sector_amk_series(s, params, stride, n);
    for (std::size_t i = 0; i < n; ++i) {
      const cplx left = w * std::conj(amk[i]);
      for (std::size_t j = 0; i + j < n; ++j) acc[i * n + j] += left * amk[i + j];
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; i + j < n; ++j) {
      grid.values[i * n + j] = acc[i * n + j];
      grid.std_error[i * n + j] = 0.0;
    }
  }
  return grid;
}

std::vector<cplx> qrt_oracle(const AtomicState& state, const SimParams& params, double t_g,
                             const std::vector<double>& tau_g, const QrtOptions& options) {
  params.validate();
  SimParams p = params;
  if (options.dt_g > 0.0) p.dt = options.dt_g;
  const long base = whole_steps(t_g, p, "t");
  long last = base;
  std::vector<long> lags;
  for (const double tau : tau_g) {
    if (tau < 0.0) throw Error(ErrorCode::InvalidArgument, "qrt_oracle: tau must be >= 0");
    lags.push_back(whole_steps(tau, p, "tau"));
    last = std::max(last, base + lags.back());
  }
  const std::size_t n = static_cast<std::size_t>(last) + 1;
  std::vector<cplx> out(tau_g.size(), cplx{0.0, 0.0});
  const auto sectors = sector_list(state, p);
  for (const auto& s : sectors) {
    const double w = std::norm(s.weight);
    if (w == 0.0 || w < options.min_weight) continue;
    std::vector<cplx> series(n, cplx{0.0, 0.0});
    const Emit emit = [&](std::size_t, std::size_t j, cplx g) { series[j] = g; };
    const std::vector<std::size_t> bases{static_cast<std::size_t>(base)};
    if (options.backend == QrtBackend::NormalMode) {
      normal_mode_sector(s, p, p.step(), 1, n, bases, emit);
    } else {
      two_mode_sector(s, p, p.step(), 1, n, bases, emit);
    }
    for (std::size_t q = 0; q < lags.size(); ++q) out[q] += w * series[static_cast<std::size_t>(lags[q])];
  }
  return out;
}

CorrelationGrid qrt_oracle_grid(const AtomicState& state, const SimParams& params, double step_g, double t_max_g,
                                const QrtOptions& options) {
  params.validate();
  SimParams p = params;
  if (options.dt_g > 0.0) p.dt = options.dt_g;
  CorrelationGrid grid = CorrelationGrid::make(step_g, resolve_t_max(t_max_g, params));
  const std::size_t n = grid.n;
  const long stride = whole_steps(step_g, p, "corr_dt");
  std::vector<std::size_t> bases;
  for (std::size_t i = 0; i < n; i += std::max<std::size_t>(1, options.base_stride)) bases.push_back(i);
  const auto total = regression_sum(state, p, p.step(), stride, n, bases, options);
  for (const auto i : bases) {
    for (std::size_t j = 0; i + j < n; ++j) {
      grid.values[i * n + j] = total[i * n + j];
      grid.std_error[i * n + j] = 0.0;
    }
  }
  return grid;
}

}  // namespace braggsim
