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

#include "braggsim/master_equation.hpp"

#include <cmath>
#include <sstream>

#include "braggsim/error.hpp"

namespace braggsim {

namespace {

constexpr double kTopLevelLimit = 1e-8;

// y = K_row x + (K_col x^+)^+ + 2 gamma (a x a^+ + b x b^+), K = -i H_eff.
class BlockLiouvillian {
 public:
  BlockLiouvillian(const Sector& row, const Sector& col, const SimParams& params)
      : row_(row, params), col_(col, params), basis_{params.cutoff}, jump_rate_(2.0 * params.decay()) {
    sqrt_.resize(static_cast<size_t>(basis_.levels() + 1));
    for (size_t m = 0; m < sqrt_.size(); ++m) sqrt_[m] = std::sqrt(static_cast<double>(m));
  }

  void apply(double t, const Matrix& x, Matrix& y) {
    const Eigen::Index d = x.rows();
    y.resize(d, d);
    for (Eigen::Index j = 0; j < d; ++j) row_.apply(t, x.col(j).data(), y.col(j).data());
    adj_ = x.adjoint();
    tmp_.resize(d, d);
    for (Eigen::Index j = 0; j < d; ++j) col_.apply(t, adj_.col(j).data(), tmp_.col(j).data());
    y += tmp_.adjoint();
    if (jump_rate_ > 0.0) add_jumps(x, y);
  }

 private:
  void add_jumps(const Matrix& x, Matrix& y) const {
    const int L = basis_.levels();
    const double* sq = sqrt_.data();
    for (int mp = 0; mp < L; ++mp) {
      for (int np = 0; np < L; ++np) {
        const int col = basis_.index(mp, np);
        if (mp + 1 < L) {
          const int src_col = basis_.index(mp + 1, np);
          const double fc = jump_rate_ * sq[mp + 1];
          for (int m = 0; m + 1 < L; ++m)
            for (int n = 0; n < L; ++n)
              y(basis_.index(m, n), col) += (fc * sq[m + 1]) * x(basis_.index(m + 1, n), src_col);
        }
        if (np + 1 < L) {
          const int src_col = basis_.index(mp, np + 1);
          const double fc = jump_rate_ * sq[np + 1];
          for (int m = 0; m < L; ++m)
            for (int n = 0; n + 1 < L; ++n)
              y(basis_.index(m, n), col) += (fc * sq[n + 1]) * x(basis_.index(m, n + 1), src_col);
        }
      }
    }
  }

  SectorGenerator row_;
  SectorGenerator col_;
  FieldBasis basis_;
  double jump_rate_;
  std::vector<double> sqrt_;
  Matrix adj_;
  Matrix tmp_;
};

struct Rk4Scratch {
  Matrix k1, k2, k3, k4, stage;
};

void rk4_step(BlockLiouvillian& gen, Matrix& x, double t, double h, Rk4Scratch& s) {
  gen.apply(t, x, s.k1);
  s.stage = x + (0.5 * h) * s.k1;
  gen.apply(t + 0.5 * h, s.stage, s.k2);
  s.stage = x + (0.5 * h) * s.k2;
  gen.apply(t + 0.5 * h, s.stage, s.k3);
  s.stage = x + h * s.k3;
  gen.apply(t + h, s.stage, s.k4);
  x += (h / 6.0) * (s.k1 + 2.0 * s.k2 + 2.0 * s.k3 + s.k4);
}

double diagonal_top_mass(const Matrix& block, const FieldBasis& basis) {
  const int L = basis.levels();
  const int first = std::max(1, basis.cutoff - 1);
  double top = 0.0;
  for (int m = 0; m < L; ++m)
    for (int n = 0; n < L; ++n)
      if (m >= first || n >= first) top += block(basis.index(m, n), basis.index(m, n)).real();
  return top;
}

}  // namespace

Matrix& BlockDensity::block(size_t s, size_t sp) {
  if (!has_block(s, sp)) throw Error(ErrorCode::InvalidArgument, "coherence block not tracked");
  return coherences ? blocks[s * size() + sp] : blocks[s];
}

const Matrix& BlockDensity::block(size_t s, size_t sp) const {
  if (!has_block(s, sp)) throw Error(ErrorCode::InvalidArgument, "coherence block not tracked");
  return coherences ? blocks[s * size() + sp] : blocks[s];
}

double BlockDensity::trace() const {
  double tr = 0.0;
  for (size_t s = 0; s < size(); ++s) tr += block(s, s).trace().real();
  return tr;
}

double BlockDensity::top_level_mass() const {
  double top = 0.0;
  for (size_t s = 0; s < size(); ++s) top += diagonal_top_mass(block(s, s), basis);
  return top / trace();
}

cplx BlockDensity::field_expectation(const SparseMatrix& field_op) const {
  cplx acc{0.0, 0.0};
  for (size_t s = 0; s < size(); ++s) acc += (field_op * block(s, s)).trace();
  return acc;
}

DensityMatrix BlockDensity::to_dense() const {
  const int d = basis.dim();
  const auto S = static_cast<Eigen::Index>(size());
  DensityMatrix out;
  out.d_atoms = static_cast<int>(S);
  out.d_field = d;
  out.rho = Matrix::Zero(S * d, S * d);
  for (size_t s = 0; s < size(); ++s)
    for (size_t sp = 0; sp < size(); ++sp)
      if (has_block(s, sp))
        out.rho.block(static_cast<Eigen::Index>(s) * d, static_cast<Eigen::Index>(sp) * d, d, d) = block(s, sp);
  return out;
}

BlockDensity BlockDensity::initial(const std::vector<Sector>& sectors, const SimParams& params, bool coherences) {
  const Vector field = coherent_field(params.alpha0, 0.0, params.cutoff);
  const Matrix proj = field * field.adjoint();
  BlockDensity rho;
  rho.sectors = sectors;
  rho.basis = FieldBasis{params.cutoff};
  rho.coherences = coherences;
  const size_t S = sectors.size();
  if (coherences) {
    rho.blocks.reserve(S * S);
    for (size_t s = 0; s < S; ++s)
      for (size_t sp = 0; sp < S; ++sp) rho.blocks.push_back(sectors[s].weight * std::conj(sectors[sp].weight) * proj);
  } else {
    rho.blocks.reserve(S);
    for (size_t s = 0; s < S; ++s) rho.blocks.push_back(std::norm(sectors[s].weight) * proj);
  }
  return rho;
}

BlockDensity BlockDensity::from_dense(const DensityMatrix& rho, const std::vector<Sector>& sectors, int cutoff,
                                      bool coherences) {
  const FieldBasis basis{cutoff};
  const int d = basis.dim();
  if (rho.d_field != d || rho.d_atoms != static_cast<int>(sectors.size()) ||
      rho.rho.rows() != static_cast<Eigen::Index>(d) * rho.d_atoms)
    throw Error(ErrorCode::DimensionMismatch, "density matrix does not match sectors x field basis");
  BlockDensity out;
  out.sectors = sectors;
  out.basis = basis;
  out.coherences = coherences;
  const size_t S = sectors.size();
  for (size_t s = 0; s < S; ++s)
    for (size_t sp = 0; sp < S; ++sp)
      if (coherences || s == sp)
        out.blocks.push_back(
            rho.rho.block(static_cast<Eigen::Index>(s) * d, static_cast<Eigen::Index>(sp) * d, d, d));
  return out;
}

double stable_master_step(const std::vector<Sector>& sectors, const SimParams& params) {
  double max_coupling = 0.0;
  for (const auto& s : sectors) max_coupling = std::max(max_coupling, std::abs(s.coupling));
  const double n = params.cutoff;
  // Commutator spread of -i H over the truncated box plus the damping rate,
  // against the RK4 stability radius (about 2.8 on the imaginary axis).
  const double oscillation = 2.0 * (2.0 * max_coupling * n + 2.0 * params.pump() * std::sqrt(n));
  const double damping = 4.0 * params.decay() * n;
  return std::min(params.step() * 10.0, 2.5 / std::max(oscillation + damping, 1e-12));
}

void master_equation_run(BlockDensity rho, const SimParams& params, const std::vector<double>& t_grid,
                         const MasterEquationOptions& options, const DensityObserver& observe) {
  const double dt = options.dt > 0.0 ? options.dt : params.step();
  const size_t S = rho.size();
  std::vector<BlockLiouvillian> gens;
  std::vector<std::pair<size_t, size_t>> index;
  for (size_t s = 0; s < S; ++s) {
    for (size_t sp = 0; sp < S; ++sp) {
      if (!rho.has_block(s, sp)) continue;
      gens.emplace_back(rho.sectors[s], rho.sectors[sp], params);
      index.emplace_back(s, sp);
    }
  }
  Rk4Scratch scratch;
  double t = 0.0;
  for (const double target : t_grid) {
    if (target < t - 1e-12) throw Error(ErrorCode::InvalidArgument, "time grid must be non-decreasing from 0");
    const long steps = static_cast<long>(std::ceil((target - t) / dt - 1e-9));
    if (steps > 0) {
      const double h = (target - t) / static_cast<double>(steps);
      for (long k = 0; k < steps; ++k) {
        const double tk = t + static_cast<double>(k) * h;
        for (size_t b = 0; b < gens.size(); ++b) rk4_step(gens[b], rho.block(index[b].first, index[b].second), tk, h, scratch);
      }
      t = target;
    }
    const double top = rho.top_level_mass();
    if (top >= kTopLevelLimit) {
      std::ostringstream msg;
      msg << "master equation: top Fock levels hold " << top << " at t=" << t;
      throw Error(ErrorCode::TruncationTooSmall, msg.str());
    }
    observe(t, rho);
  }
}

std::vector<BlockDensity> master_equation_evolve(const BlockDensity& rho0, const SimParams& params,
                                                 const std::vector<double>& t_grid,
                                                 const MasterEquationOptions& options) {
  std::vector<BlockDensity> out;
  out.reserve(t_grid.size());
  master_equation_run(rho0, params, t_grid, options, [&](double, const BlockDensity& rho) { out.push_back(rho); });
  return out;
}

std::vector<DensityMatrix> master_equation_evolve(const DensityMatrix& rho0, const std::vector<Sector>& sectors,
                                                  const SimParams& params, const std::vector<double>& t_grid,
                                                  const MasterEquationOptions& options) {
  const auto blocks = BlockDensity::from_dense(rho0, sectors, params.cutoff, true);
  std::vector<DensityMatrix> out;
  out.reserve(t_grid.size());
  master_equation_run(blocks, params, t_grid, options,
                      [&](double, const BlockDensity& rho) { out.push_back(rho.to_dense()); });
  return out;
}

void lindblad_block_propagate(Matrix& x, const Sector& row, const Sector& col, const SimParams& params, double t0,
                              double t1, double dt) {
  if (t1 <= t0) return;
  BlockLiouvillian gen(row, col, params);
  Rk4Scratch scratch;
  const long steps = static_cast<long>(std::ceil((t1 - t0) / dt - 1e-9));
  const double h = (t1 - t0) / static_cast<double>(steps);
  for (long k = 0; k < steps; ++k) rk4_step(gen, x, t0 + static_cast<double>(k) * h, h, scratch);
}

}  // namespace braggsim
