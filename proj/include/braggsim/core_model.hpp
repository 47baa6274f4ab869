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

// Physical parameters, atomic many-body states and their decomposition into
// sectors of fixed well occupation (n0, n1). The atom numbers commute with the
// light-atom Hamiltonian, so every sector evolves its own two-mode field.

#ifndef BRAGGSIM_CORE_MODEL_HPP
#define BRAGGSIM_CORE_MODEL_HPP

#include <complex>
#include <numbers>
#include <optional>
#include <variant>
#include <vector>

namespace braggsim {

using cplx = std::complex<double>;

/// Largest Fock-tail probability a truncation may discard.
inline constexpr double kTailMassLimit = 1e-10;

enum class WellSeparation {
  QuarterWave,  // d = lambda/4, phase 2kd = pi
  HalfWave,     // d = lambda/2, phase 2kd = 2 pi
};

double separation_phase(WellSeparation preset);

/// Rates are in units of g and times in units of 1/g. The accessors return the
/// absolute values used by the integrators.
struct SimParams {
  double g = 1.0;
  double eta = 0.0;
  double gamma = 0.0;
  double separation_phase = std::numbers::pi;
  cplx alpha0{std::numbers::sqrt2, 0.0};
  int cutoff = 16;
  double dt = 1e-3;
  double t_max = 2.0 * std::numbers::pi;

  double pump() const { return eta * g; }
  double decay() const { return gamma * g; }
  double step() const { return dt / g; }
  double final_time() const { return t_max / g; }
  /// Number of integrator steps needed to cover `time` (absolute units).
  long steps_for(double time) const;

  /// Throws ValidationError for out-of-range values and TruncationTooSmall
  /// when the initial coherent field violates the tail-mass rule.
  void validate() const;
};

/// P(n > cutoff) for a Poisson distribution of the given mean.
double poisson_tail(double mean, int cutoff);

/// Smallest cutoff whose Poisson tail is below kTailMassLimit.
int min_cutoff_for(double mean);

/// e^{-|a|^2/2} a^n / sqrt(n!) for n = 0..nmax (Fock amplitudes of |a>).
std::vector<cplx> coherent_amplitudes(cplx a, int nmax);

struct Mott {
  int n0 = 0;
  int n1 = 0;
};

struct CoherentProduct {
  cplx a0;
  cplx a1;
  /// Per-well truncation. Unset selects default_nmax().
  std::optional<int> nmax;
};

struct NumberConserving {
  int N = 0;
};

using AtomicState = std::variant<Mott, CoherentProduct, NumberConserving>;

/// max(ceil(mean + 8 sqrt(mean)), smallest nmax meeting the joint tail rule).
int default_nmax(const CoherentProduct& state);

struct Sector {
  int n0 = 0;
  int n1 = 0;
  cplx weight{1.0, 0.0};
  cplx coupling{0.0, 0.0};  // g (n0 + n1 e^{i phi})
  double drive_freq = 0.0;  // g (n0 + n1)
};

cplx sector_coupling(int n0, int n1, const SimParams& params);

/// Binomial amplitudes b_{n0} of the number-conserving superfluid.
std::vector<double> sf2_coefficients(int N);

/// Row-major (nmax+1)^2 grid, index n0 * (nmax + 1) + n1.
struct CoefficientGrid {
  int nmax = 0;
  std::vector<cplx> values;
  double discarded_mass = 0.0;

  cplx at(int n0, int n1) const { return values[static_cast<size_t>(n0 * (nmax + 1) + n1)]; }
};

/// Product of two truncated Poissonian amplitude sets, renormalized.
CoefficientGrid sf1_coefficients(cplx a0, cplx a1, int nmax);

std::vector<Sector> sector_list(const AtomicState& state, const SimParams& params);

/// Mean total atom number (rounded), used to size default frequency grids.
int mean_total_atoms(const AtomicState& state);

}  // namespace braggsim

#endif  // BRAGGSIM_CORE_MODEL_HPP
