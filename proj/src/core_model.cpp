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

#include "braggsim/core_model.hpp"

#include <cmath>
#include <sstream>

#include "braggsim/error.hpp"

namespace braggsim {

namespace {

// e^{i phi}, exact at multiples of pi/2 so the presets give real couplings.
cplx unit_phase(double phi) {
  const double quarter = phi / (std::numbers::pi / 2.0);
  const double nearest = std::round(quarter);
  if (std::abs(quarter - nearest) < 1e-12) {
    switch (((static_cast<long long>(nearest) % 4) + 4) % 4) {
      case 0: return {1.0, 0.0};
      case 1: return {0.0, 1.0};
      case 2: return {-1.0, 0.0};
      default: return {0.0, -1.0};
    }
  }
  return std::polar(1.0, phi);
}

double joint_tail(double mean0, double mean1, int nmax) {
  const double t0 = poisson_tail(mean0, nmax);
  const double t1 = poisson_tail(mean1, nmax);
  return t0 + t1 - t0 * t1;
}

[[noreturn]] void invalid(const std::string& field, const std::string& why) {
  throw Error(ErrorCode::ValidationError, field + ": " + why);
}

}  // namespace

std::vector<cplx> coherent_amplitudes(cplx a, int nmax) {
  std::vector<cplx> out(static_cast<size_t>(nmax + 1), cplx{});
  const double r = std::abs(a);
  if (r == 0.0) {
    out[0] = 1.0;
    return out;
  }
  const double log_r = std::log(r);
  const double arg = std::arg(a);
  for (int n = 0; n <= nmax; ++n) {
    const double log_mag = -0.5 * r * r + n * log_r - 0.5 * std::lgamma(n + 1.0);
    out[static_cast<size_t>(n)] = std::polar(std::exp(log_mag), n * arg);
  }
  return out;
}

double separation_phase(WellSeparation preset) {
  return preset == WellSeparation::QuarterWave ? std::numbers::pi : 2.0 * std::numbers::pi;
}

long SimParams::steps_for(double time) const {
  return std::lround(time / step());
}

void SimParams::validate() const {
  if (!(g > 0.0) || !std::isfinite(g)) invalid("params.g", "must be > 0");
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) invalid("params.gamma", "must be >= 0");
  if (!(eta >= 0.0) || !std::isfinite(eta)) invalid("params.eta", "must be >= 0");
  if (cutoff < 1) invalid("params.cutoff", "must be >= 1");
  if (!(dt > 0.0) || !std::isfinite(dt)) invalid("params.dt", "must be > 0");
  if (!(t_max > 0.0) || !std::isfinite(t_max)) invalid("params.t_max", "must be > 0");
  if (!std::isfinite(separation_phase)) invalid("params.separation", "must be finite");
  const double tail = poisson_tail(std::norm(alpha0), cutoff);
  if (tail >= kTailMassLimit) {
    std::ostringstream msg;
    msg << "cutoff " << cutoff << " leaves Fock-tail mass " << tail << " for |alpha0|^2 = "
        << std::norm(alpha0) << " (need cutoff >= " << min_cutoff_for(std::norm(alpha0)) << ")";
    throw Error(ErrorCode::TruncationTooSmall, msg.str());
  }
}

double poisson_tail(double mean, int cutoff) {
  if (mean <= 0.0) return 0.0;
  // Sum from the tail upward so tiny tails keep full relative precision.
  double sum = 0.0;
  const double log_mean = std::log(mean);
  for (int n = cutoff + 1;; ++n) {
    const double term = std::exp(-mean + n * log_mean - std::lgamma(n + 1.0));
    sum += term;
    if (n > mean && term < 1e-18 * sum) break;
    if (n > cutoff + 100000) break;
  }
  return sum;
}

int min_cutoff_for(double mean) {
  int n = 0;
  while (poisson_tail(mean, n) >= kTailMassLimit) ++n;
  return n;
}

int default_nmax(const CoherentProduct& state) {
  const double m0 = std::norm(state.a0);
  const double m1 = std::norm(state.a1);
  const double mean = std::max(m0, m1);
  int nmax = static_cast<int>(std::ceil(mean + 8.0 * std::sqrt(mean)));
  while (joint_tail(m0, m1, nmax) >= kTailMassLimit) ++nmax;
  return nmax;
}

cplx sector_coupling(int n0, int n1, const SimParams& params) {
  return params.g * (static_cast<double>(n0) + static_cast<double>(n1) * unit_phase(params.separation_phase));
}

std::vector<double> sf2_coefficients(int N) {
  if (N < 0) throw Error(ErrorCode::InvalidArgument, "sf2_coefficients: N must be >= 0");
  std::vector<double> b(static_cast<size_t>(N + 1));
  const double log_norm = std::lgamma(N + 1.0) - N * std::log(2.0);
  for (int n0 = 0; n0 <= N; ++n0) {
    const double log_b2 = log_norm - std::lgamma(n0 + 1.0) - std::lgamma(N - n0 + 1.0);
    b[static_cast<size_t>(n0)] = std::exp(0.5 * log_b2);
  }
  return b;
}

CoefficientGrid sf1_coefficients(cplx a0, cplx a1, int nmax) {
  if (nmax < 0) throw Error(ErrorCode::InvalidArgument, "sf1_coefficients: nmax must be >= 0");
  CoefficientGrid grid;
  grid.nmax = nmax;
  grid.discarded_mass = joint_tail(std::norm(a0), std::norm(a1), nmax);
  if (grid.discarded_mass >= kTailMassLimit) {
    std::ostringstream msg;
    msg << "nmax " << nmax << " discards mass " << grid.discarded_mass;
    throw Error(ErrorCode::TruncationTooSmall, msg.str());
  }
  const auto amp0 = coherent_amplitudes(a0, nmax);
  const auto amp1 = coherent_amplitudes(a1, nmax);
  grid.values.resize(static_cast<size_t>((nmax + 1) * (nmax + 1)));
  double total = 0.0;
  for (int n0 = 0; n0 <= nmax; ++n0) {
    for (int n1 = 0; n1 <= nmax; ++n1) {
      const cplx c = amp0[static_cast<size_t>(n0)] * amp1[static_cast<size_t>(n1)];
      grid.values[static_cast<size_t>(n0 * (nmax + 1) + n1)] = c;
      total += std::norm(c);
    }
  }
  const double scale = 1.0 / std::sqrt(total);
  for (auto& c : grid.values) c *= scale;
  return grid;
}

std::vector<Sector> sector_list(const AtomicState& state, const SimParams& params) {
  std::vector<Sector> sectors;
  auto push = [&](int n0, int n1, cplx weight) {
    Sector s;
    s.n0 = n0;
    s.n1 = n1;
    s.weight = weight;
    s.coupling = sector_coupling(n0, n1, params);
    s.drive_freq = params.g * (n0 + n1);
    sectors.push_back(s);
  };

  if (const auto* mott = std::get_if<Mott>(&state)) {
    if (mott->n0 < 0 || mott->n1 < 0) invalid("atomic_state", "Mott occupations must be >= 0");
    push(mott->n0, mott->n1, 1.0);
  } else if (const auto* nc = std::get_if<NumberConserving>(&state)) {
    if (nc->N < 0) invalid("atomic_state.N", "must be >= 0");
    const auto b = sf2_coefficients(nc->N);
    for (int n0 = 0; n0 <= nc->N; ++n0) push(n0, nc->N - n0, b[static_cast<size_t>(n0)]);
  } else {
    const auto& cp = std::get<CoherentProduct>(state);
    const int nmax = cp.nmax.value_or(default_nmax(cp));
    const auto grid = sf1_coefficients(cp.a0, cp.a1, nmax);
    for (int n0 = 0; n0 <= nmax; ++n0)
      for (int n1 = 0; n1 <= nmax; ++n1) push(n0, n1, grid.at(n0, n1));
  }
  return sectors;
}

int mean_total_atoms(const AtomicState& state) {
  if (const auto* mott = std::get_if<Mott>(&state)) return mott->n0 + mott->n1;
  if (const auto* nc = std::get_if<NumberConserving>(&state)) return nc->N;
  const auto& cp = std::get<CoherentProduct>(state);
  return static_cast<int>(std::lround(std::norm(cp.a0) + std::norm(cp.a1)));
}

}  // namespace braggsim
