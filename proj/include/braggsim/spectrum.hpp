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

// Time-dependent physical spectrum of the reflected mode seen through a
// lorentzian filter, plus the envelope width analysis used to relate the
// spectral spread to the atom-number uncertainty. Times are in units of
// 1/g and frequencies in units of g throughout.

#ifndef BRAGGSIM_SPECTRUM_HPP
#define BRAGGSIM_SPECTRUM_HPP

#include <utility>
#include <vector>

#include "braggsim/observables.hpp"

namespace braggsim {

/// Theta(t) Gamma e^{-(Gamma + i omega) t}; the step is taken as 1 at t = 0.
cplx filter_response(double t, double omega, double Gamma);

/// omega_points samples spanning [0, omega_max].
std::vector<double> omega_grid(double omega_max, std::size_t omega_points);

struct SpectrumResult {
  std::vector<double> omega;
  /// S0 with Re G inside the double integral.
  std::vector<cplx> s0;
  /// Filtered intensity from the full double integral over [0, t]^2 with the
  /// hermitian extension of G. Real by construction.
  std::vector<double> physical;
  /// Largest |Im| met while assembling `physical`; a quadrature check.
  double physical_imag_residue = 0.0;
  double Gamma = 0.0;
  double t = 0.0;

  /// S = prefactor() * S0 for a real G.
  double prefactor() const;
};

/// Trapezoidal quadrature on the lattice of `G`. Throws GridMismatch when t
/// is not a lattice point inside the grid or a required entry is missing.
SpectrumResult physical_spectrum(const CorrelationGrid& G, const std::vector<double>& omega, double Gamma,
                                 double t);

struct WellPopulations {
  double n0 = 0.0;
  double n1 = 0.0;
  /// Set when either value is more than 0.25 away from an integer.
  bool non_integer = false;
};

WellPopulations well_populations_from_peaks(double omega_plus, double omega_minus, double g);

/// Indices of interior local maxima (plateaus report their first sample).
std::vector<std::size_t> local_maxima(const std::vector<double>& y);
std::vector<std::size_t> local_minima(const std::vector<double>& y);

/// Topographic prominence of each listed peak: its height above the higher
/// of the two lowest points met before a taller sample on either side.
std::vector<double> prominence(const std::vector<double>& y, const std::vector<std::size_t>& peaks);

/// Local maxima whose prominence is at least `min_fraction` of max(y). This
/// separates spectral lines from the ripple left by the finite time window.
std::vector<std::size_t> prominent_maxima(const std::vector<double>& y, double min_fraction);

struct EnvelopeFit {
  /// Knots of the envelope: comb maxima plus the outer tails.
  std::vector<double> knot_omega;
  std::vector<double> knot_value;
  std::size_t peak_count = 0;
  std::vector<double> omega;
  std::vector<double> envelope;
  double maximum = 0.0;
  double peak_omega = 0.0;
  double left = 0.0;
  double right = 0.0;
  double fwhm = 0.0;
};

/// Monotone cubic (PCHIP) envelope through the local maxima of `y`, continued
/// past the outermost maxima by the samples themselves, and its full width at
/// half maximum from bisection on the interpolant. With mirror_even the
/// samples (which must start at omega = 0) are reflected to negative omega
/// first, as suits the even function Re S0. Throws TooFewPeaks when there is
/// no local maximum or the envelope never drops to half height on one side.
/// A positive `min_prominence` keeps only maxima at least that fraction of
/// the global maximum above their surroundings, which drops window ripple.
EnvelopeFit envelope_fwhm(const std::vector<double>& omega, const std::vector<double>& y, bool mirror_even = false,
                          double min_prominence = 0.0);

/// Standard deviation of the binomial well population for N atoms.
double number_uncertainty(int N);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

/// Ordinary least squares. Throws DegenerateInput with < 2 distinct abscissae.
LineFit fit_line(const std::vector<std::pair<double, double>>& points);

}  // namespace braggsim

#endif  // BRAGGSIM_SPECTRUM_HPP
