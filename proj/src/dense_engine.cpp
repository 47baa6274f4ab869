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

#include "braggsim/dense_engine.hpp"

#include <cmath>
#include <sstream>

#include "braggsim/error.hpp"

namespace braggsim {

namespace {

constexpr double kJumpProbabilityLimit = 0.1;
constexpr double kTopLevelLimit = 1e-8;

using Triplet = Eigen::Triplet<cplx>;

void apply_lowering(const FieldBasis& basis, bool mode_k, const Vector& in, Vector& out) {
  const int L = basis.levels();
  out.setZero(in.size());
  for (int m = 0; m < L; ++m) {
    for (int n = 0; n < L; ++n) {
      if (mode_k && m + 1 < L)
        out[basis.index(m, n)] = std::sqrt(m + 1.0) * in[basis.index(m + 1, n)];
      else if (!mode_k && n + 1 < L)
        out[basis.index(m, n)] = std::sqrt(n + 1.0) * in[basis.index(m, n + 1)];
    }
  }
}

}  // namespace

Matrix ladder(int cutoff) {
  Matrix a = Matrix::Zero(cutoff + 1, cutoff + 1);
  for (int m = 1; m <= cutoff; ++m) a(m - 1, m) = std::sqrt(static_cast<double>(m));
  return a;
}

ModeOperators build_mode_operators(int cutoff) {
  if (cutoff < 1) throw Error(ErrorCode::InvalidArgument, "cutoff must be >= 1");
  const FieldBasis basis{cutoff};
  const int L = basis.levels();
  std::vector<Triplet> tk, tmk;
  for (int m = 0; m < L; ++m) {
    for (int n = 0; n < L; ++n) {
      if (m > 0) tk.emplace_back(basis.index(m - 1, n), basis.index(m, n), std::sqrt(static_cast<double>(m)));
      if (n > 0) tmk.emplace_back(basis.index(m, n - 1), basis.index(m, n), std::sqrt(static_cast<double>(n)));
    }
  }
  ModeOperators ops;
  ops.cutoff = cutoff;
  ops.a_k.resize(basis.dim(), basis.dim());
  ops.a_mk.resize(basis.dim(), basis.dim());
  ops.a_k.setFromTriplets(tk.begin(), tk.end());
  ops.a_mk.setFromTriplets(tmk.begin(), tmk.end());
  return ops;
}

SparseMatrix sector_heff(const Sector& sector, const SimParams& params, double t) {
  const auto ops = build_mode_operators(params.cutoff);
  const SparseMatrix ak_dag = ops.a_k.adjoint();
  const SparseMatrix amk_dag = ops.a_mk.adjoint();
  const cplx c = sector.coupling;
  const cplx phase = std::polar(1.0, sector.drive_freq * t);
  const cplx i{0.0, 1.0};
  SparseMatrix h = c * (amk_dag * ops.a_k);
  h += std::conj(c) * (ak_dag * ops.a_mk);
  h += (params.pump() * phase) * ak_dag;
  h += (params.pump() * std::conj(phase)) * SparseMatrix(ops.a_k);
  h -= (i * params.decay()) * SparseMatrix(ak_dag * ops.a_k + amk_dag * ops.a_mk);
  h.prune(cplx{0.0, 0.0});
  return h;
}

Vector coherent_field(cplx ak, cplx amk, int cutoff) {
  const FieldBasis basis{cutoff};
  const auto fk = coherent_amplitudes(ak, cutoff);
  const auto fmk = coherent_amplitudes(amk, cutoff);
  Vector v(basis.dim());
  for (int m = 0; m <= cutoff; ++m)
    for (int n = 0; n <= cutoff; ++n) v[basis.index(m, n)] = fk[static_cast<size_t>(m)] * fmk[static_cast<size_t>(n)];
  return v;
}

SectorGenerator::SectorGenerator(const Sector& sector, const SimParams& params)
    : basis_{params.cutoff},
      coupling_(sector.coupling),
      drive_freq_(sector.drive_freq),
      pump_(params.pump()),
      decay_(params.decay()) {
  sqrt_.resize(static_cast<size_t>(basis_.levels() + 1));
  for (size_t m = 0; m < sqrt_.size(); ++m) sqrt_[m] = std::sqrt(static_cast<double>(m));
}

void SectorGenerator::apply(double t, const cplx* in, cplx* out) const {
  // -i H_eff = -i [c b+ a + c* a+ b + eta (e^{iWt} a+ + e^{-iWt} a)] - gamma (a+ a + b+ b)
  const int L = basis_.levels();
  const cplx minus_i{0.0, -1.0};
  const cplx cf = minus_i * coupling_;
  const cplx cb = minus_i * std::conj(coupling_);
  const cplx phase = std::polar(1.0, drive_freq_ * t);
  const cplx pr = minus_i * pump_ * phase;
  const cplx pl = minus_i * pump_ * std::conj(phase);
  const double* sq = sqrt_.data();
  for (int m = 0; m < L; ++m) {
    const cplx* row = in + m * L;
    const cplx* up = (m + 1 < L) ? in + (m + 1) * L : nullptr;
    const cplx* down = (m > 0) ? in + (m - 1) * L : nullptr;
    cplx* o = out + m * L;
    for (int n = 0; n < L; ++n) o[n] = -decay_ * (m + n) * row[n];
    // a_k lowers m: (a psi)(m,n) = sqrt(m+1) psi(m+1,n)
    if (up) {
      for (int n = 0; n < L; ++n) o[n] += pl * sq[m + 1] * up[n];
      // c b+ a: (m,n) <- sqrt(m+1) sqrt(n) psi(m+1, n-1)
      for (int n = 1; n < L; ++n) o[n] += cf * (sq[m + 1] * sq[n]) * up[n - 1];
    }
    if (down) {
      for (int n = 0; n < L; ++n) o[n] += pr * sq[m] * down[n];
      // c* a+ b: (m,n) <- sqrt(m) sqrt(n+1) psi(m-1, n+1)
      for (int n = 0; n + 1 < L; ++n) o[n] += cb * (sq[m] * sq[n + 1]) * down[n + 1];
    }
  }
}

double DenseState::norm_squared() const {
  double total = 0.0;
  for (const auto& v : amplitudes) total += v.squaredNorm();
  return total;
}

void DenseState::normalize() {
  const double scale = 1.0 / std::sqrt(norm_squared());
  for (auto& v : amplitudes) v *= scale;
}

Vector DenseState::flatten() const {
  const int d = basis.dim();
  Vector out(static_cast<Eigen::Index>(d) * static_cast<Eigen::Index>(amplitudes.size()));
  for (size_t s = 0; s < amplitudes.size(); ++s) out.segment(static_cast<Eigen::Index>(s) * d, d) = amplitudes[s];
  return out;
}

double DenseState::top_level_mass() const {
  const int L = basis.levels();
  const int first = std::max(1, basis.cutoff - 1);
  double top = 0.0;
  for (const auto& v : amplitudes) {
    for (int m = 0; m < L; ++m)
      for (int n = 0; n < L; ++n)
        if (m >= first || n >= first) top += std::norm(v[basis.index(m, n)]);
  }
  return top / norm_squared();
}

DenseState initial_dense_state(const std::vector<Sector>& sectors, const SimParams& params) {
  DenseState state;
  state.sectors = sectors;
  state.basis = FieldBasis{params.cutoff};
  const Vector field = coherent_field(params.alpha0, 0.0, params.cutoff);
  state.amplitudes.reserve(sectors.size());
  for (const auto& s : sectors) state.amplitudes.push_back(s.weight * field);
  return state;
}

std::pair<double, double> photon_numbers(const DenseState& state) {
  const int L = state.basis.levels();
  double nk = 0.0, nmk = 0.0, total = 0.0;
  for (const auto& v : state.amplitudes) {
    for (int m = 0; m < L; ++m) {
      for (int n = 0; n < L; ++n) {
        const double p = std::norm(v[state.basis.index(m, n)]);
        nk += m * p;
        nmk += n * p;
        total += p;
      }
    }
  }
  return {nk / total, nmk / total};
}

void check_truncation(const DenseState& state) {
  const double top = state.top_level_mass();
  if (top >= kTopLevelLimit) {
    std::ostringstream msg;
    msg << "mass " << top << " in the top two Fock levels at cutoff " << state.basis.cutoff;
    throw Error(ErrorCode::TruncationTooSmall, msg.str());
  }
}

std::optional<JumpEvent> mcwf_step(DenseState& state, const SimParams& params, double t,
                                   UniformStream& stream) {
  std::vector<SectorGenerator> gens;
  gens.reserve(state.sectors.size());
  for (const auto& s : state.sectors) gens.emplace_back(s, params);
  return mcwf_step(state, gens, params, t, stream);
}

std::optional<JumpEvent> mcwf_step(DenseState& state, const std::vector<SectorGenerator>& gens,
                                   const SimParams& params, double t, UniformStream& stream) {
  const double h = params.step();
  const auto [nk, nmk] = photon_numbers(state);
  const double dp1 = 2.0 * params.decay() * h * nk;
  const double dp2 = 2.0 * params.decay() * h * nmk;
  if (dp1 >= kJumpProbabilityLimit || dp2 >= kJumpProbabilityLimit) {
    std::ostringstream msg;
    msg << "jump probability per step " << std::max(dp1, dp2) << " at t=" << t;
    throw Error(ErrorCode::StepTooLarge, msg.str());
  }
  const double r = stream.next();
  std::optional<JumpEvent> jump;
  if (r < dp1) {
    jump = JumpEvent{t, 1};
  } else if (r < dp1 + dp2) {
    jump = JumpEvent{t, 2};
  }

  const Eigen::Index d = state.basis.dim();
  Vector tmp, k1(d), k2(d), k3(d), k4(d), stage(d);
  for (size_t s = 0; s < state.amplitudes.size(); ++s) {
    Vector& psi = state.amplitudes[s];
    if (jump) {
      apply_lowering(state.basis, jump->channel == 1, psi, tmp);
      psi = tmp;
    }
    // Classical RK4 with the drive phase evaluated at each stage time.
    const auto& gen = gens[s];
    gen.apply(t, psi.data(), k1.data());
    stage = psi + (0.5 * h) * k1;
    gen.apply(t + 0.5 * h, stage.data(), k2.data());
    stage = psi + (0.5 * h) * k2;
    gen.apply(t + 0.5 * h, stage.data(), k3.data());
    stage = psi + h * k3;
    gen.apply(t + h, stage.data(), k4.data());
    psi += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  state.normalize();
  return jump;
}

cplx expectation(const Matrix& op, const Vector& psi) {
  if (op.cols() != psi.size() || op.rows() != psi.size())
    throw Error(ErrorCode::DimensionMismatch, "operator and state dimensions differ");
  return psi.dot(op * psi) / psi.squaredNorm();
}

cplx expectation(const Matrix& op, const DensityMatrix& rho) {
  if (op.cols() != rho.rho.rows() || op.rows() != rho.rho.cols())
    throw Error(ErrorCode::DimensionMismatch, "operator and density matrix dimensions differ");
  return (op * rho.rho).trace();
}

cplx expectation(const SparseMatrix& field_op, const DenseState& state) {
  if (field_op.rows() != state.basis.dim() || field_op.cols() != state.basis.dim())
    throw Error(ErrorCode::DimensionMismatch, "field operator does not match the field basis");
  cplx acc{0.0, 0.0};
  for (const auto& v : state.amplitudes) acc += v.dot(field_op * v);
  return acc / state.norm_squared();
}

}  // namespace braggsim
