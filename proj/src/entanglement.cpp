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

#include "braggsim/entanglement.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "braggsim/error.hpp"

namespace braggsim {

namespace {

constexpr double kClamp = 1e-10;
// Largest Fock cutoff for the singular-value route of pure_log_negativity.
constexpr int kSchmidtCutoffLimit = 40;

void check_parts(const Eigen::Index dim, const Bipartition& parts) {
  if (parts.d_atoms < 1 || parts.d_field < 1 ||
      static_cast<Eigen::Index>(parts.d_atoms) * parts.d_field != dim)
    throw Error(ErrorCode::DimensionMismatch, "bipartition does not factor the matrix dimension");
}

double negativity_from_pt(const Matrix& pt) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(pt, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) throw Error(ErrorCode::EigensolveFailure, "partial-transpose eigensolve failed");
  const double norm1 = eig.eigenvalues().cwiseAbs().sum();
  const double e = std::log2(norm1);
  return (e < 0.0 && e >= -kClamp) ? 0.0 : e;
}

// <alpha|beta> for normalized coherent states.
cplx coherent_overlap(cplx alpha, cplx beta) {
  return std::exp(-0.5 * std::norm(alpha) - 0.5 * std::norm(beta) + std::conj(alpha) * beta);
}

}  // namespace

DensityMatrix average_density_matrix(const std::vector<Vector>& states, int d_atoms, int d_field) {
  if (states.empty()) throw Error(ErrorCode::InvalidArgument, "average_density_matrix: no snapshots");
  const Eigen::Index dim = static_cast<Eigen::Index>(d_atoms) * d_field;
  Matrix columns(dim, static_cast<Eigen::Index>(states.size()));
  for (std::size_t m = 0; m < states.size(); ++m) {
    if (states[m].size() != dim) throw Error(ErrorCode::DimensionMismatch, "snapshot dimension differs");
    columns.col(static_cast<Eigen::Index>(m)) = states[m] / states[m].norm();
  }
  DensityMatrix rho;
  rho.d_atoms = d_atoms;
  rho.d_field = d_field;
  rho.rho = columns * columns.adjoint() / static_cast<double>(states.size());
  return rho;
}

DensityMatrix average_density_matrix(const std::vector<DenseState>& snapshots) {
  if (snapshots.empty()) throw Error(ErrorCode::InvalidArgument, "average_density_matrix: no snapshots");
  std::vector<Vector> flat;
  flat.reserve(snapshots.size());
  const auto d_atoms = static_cast<int>(snapshots.front().amplitudes.size());
  const int d_field = snapshots.front().basis.dim();
  for (const auto& s : snapshots) {
    if (static_cast<int>(s.amplitudes.size()) != d_atoms || s.basis.dim() != d_field)
      throw Error(ErrorCode::DimensionMismatch, "snapshots disagree on sectors or field basis");
    flat.push_back(s.flatten());
  }
  return average_density_matrix(flat, d_atoms, d_field);
}

Matrix partial_transpose(const DensityMatrix& rho, const Bipartition& parts) {
  if (rho.rho.rows() != rho.rho.cols()) throw Error(ErrorCode::DimensionMismatch, "density matrix is not square");
  check_parts(rho.rho.rows(), parts);
  const Eigen::Index A = parts.d_atoms;
  const Eigen::Index F = parts.d_field;
  Matrix out(rho.rho.rows(), rho.rho.cols());
  for (Eigen::Index a = 0; a < A; ++a)
    for (Eigen::Index ap = 0; ap < A; ++ap) out.block(a * F, ap * F, F, F) = rho.rho.block(ap * F, a * F, F, F);
  return out;
}

double log_negativity(const DensityMatrix& rho, const Bipartition& parts) {
  check_parts(rho.rho.rows(), parts);
  const double tr = rho.trace();
  if (std::abs(tr - 1.0) > 1e-8) {
    std::ostringstream msg;
    msg << "log_negativity: trace " << tr << " differs from 1";
    throw Error(ErrorCode::InvalidArgument, msg.str());
  }
  return negativity_from_pt(partial_transpose(rho, parts));
}

double pure_log_negativity(const BranchState& state) {
  std::vector<std::size_t> live;
  for (std::size_t s = 0; s < state.size(); ++s)
    if (state.active[s] && state.branch_norm_squared(s) > 0.0) live.push_back(s);
  const auto S = static_cast<Eigen::Index>(live.size());
  if (S == 0) throw Error(ErrorCode::InvalidArgument, "pure_log_negativity: empty state");
  // c_s = mu_s e^{(|ak|^2 + |amk|^2)/2} multiplies the normalized coherent pair.
  std::vector<cplx> c(live.size());
  for (std::size_t k = 0; k < live.size(); ++k) {
    const std::size_t s = live[k];
    c[k] = state.mu[s] * std::exp(0.5 * (std::norm(state.ak[s]) + std::norm(state.amk[s])));
  }
  Matrix gram(S, S);
  for (Eigen::Index p = 0; p < S; ++p) {
    for (Eigen::Index q = 0; q < S; ++q) {
      const std::size_t s = live[static_cast<std::size_t>(p)];
      const std::size_t sp = live[static_cast<std::size_t>(q)];
      gram(p, q) = c[static_cast<std::size_t>(p)] * std::conj(c[static_cast<std::size_t>(q)]) *
                   coherent_overlap(state.ak[sp], state.ak[s]) * coherent_overlap(state.amk[sp], state.amk[s]);
    }
  }
  const double tr = gram.trace().real();
  gram /= tr;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(gram, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) throw Error(ErrorCode::EigensolveFailure, "Gram eigensolve failed");
  if (eig.eigenvalues().minCoeff() < -kClamp) {
    std::ostringstream msg;
    msg << "Gram matrix eigenvalue " << eig.eigenvalues().minCoeff();
    throw Error(ErrorCode::NonPhysicalGram, msg.str());
  }

  // The Schmidt sum needs sqrt of the Gram eigenvalues, which turns rounding
  // noise of 1e-16 near a product state into 1e-8. Singular values of the
  // field columns written out in a Fock basis deep enough to hold them carry
  // only absolute rounding errors, so they are used whenever that basis is
  // affordable.
  double mean = 0.0;
  for (const std::size_t s : live) mean = std::max({mean, std::norm(state.ak[s]), std::norm(state.amk[s])});
  int cutoff = static_cast<int>(std::ceil(mean));
  while (poisson_tail(mean, cutoff) > 1e-20) ++cutoff;
  double sum = 0.0;
  if (cutoff <= kSchmidtCutoffLimit) {
    const int dim = FieldBasis{cutoff}.dim();
    Matrix columns(dim, S);
    for (Eigen::Index k = 0; k < S; ++k) {
      const std::size_t s = live[static_cast<std::size_t>(k)];
      columns.col(k) = c[static_cast<std::size_t>(k)] * coherent_field(state.ak[s], state.amk[s], cutoff);
    }
    columns /= columns.norm();
    const Eigen::JacobiSVD<Matrix> svd(columns);
    sum = svd.singularValues().sum();
  } else {
    for (Eigen::Index k = 0; k < S; ++k) sum += std::sqrt(std::max(eig.eigenvalues()[k], 0.0));
  }
  const double e = 2.0 * std::log2(sum);
  return (e < 0.0 && e >= -kClamp) ? 0.0 : e;
}

double pair_log_negativity(const BranchState& state, int cutoff, Part a, Part b) {
  if (a == b) throw Error(ErrorCode::InvalidArgument, "pair_log_negativity: parts must differ");
  int wells = 0;
  for (const auto& s : state.sectors) wells = std::max({wells, s.n0 + 1, s.n1 + 1});
  const int L = cutoff + 1;
  const std::array<int, 4> dims{wells, wells, L, L};
  const DenseState dense = branch_to_dense(state, cutoff);
  const double norm = std::sqrt(dense.norm_squared());

  // psi as a matrix with the kept pair (a, b) on rows and the rest on columns.
  std::array<int, 2> traced{};
  int t = 0;
  for (int p = 0; p < 4; ++p)
    if (p != static_cast<int>(a) && p != static_cast<int>(b)) traced[t++] = p;
  const int ka = static_cast<int>(a), kb = static_cast<int>(b);
  Matrix psi = Matrix::Zero(dims[ka] * dims[kb], dims[traced[0]] * dims[traced[1]]);
  for (std::size_t s = 0; s < state.size(); ++s) {
    for (int mk = 0; mk < L; ++mk) {
      for (int mmk = 0; mmk < L; ++mmk) {
        const cplx v = dense.amplitudes[s][dense.basis.index(mk, mmk)] / norm;
        if (v == cplx{0.0, 0.0}) continue;
        const std::array<int, 4> idx{state.sectors[s].n0, state.sectors[s].n1, mk, mmk};
        psi(idx[ka] * dims[kb] + idx[kb], idx[traced[0]] * dims[traced[1]] + idx[traced[1]]) += v;
      }
    }
  }
  DensityMatrix rho;
  rho.rho = psi * psi.adjoint();
  rho.d_atoms = dims[ka];
  rho.d_field = dims[kb];
  return negativity_from_pt(partial_transpose(rho, Bipartition{dims[ka], dims[kb]}));
}

}  // namespace braggsim
