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

#include <doctest.h>

#include <cmath>

#include "braggsim/error.hpp"
#include "braggsim/spectrum.hpp"

using namespace braggsim;

namespace {

// G(t1, t2) = exp(-i w0 (t2 - t1)) on the lattice.
CorrelationGrid monochromatic(double w0, double h, double t_max) {
  auto g = CorrelationGrid::make(h, t_max);
  for (std::size_t i = 0; i < g.n; ++i)
    for (std::size_t j = 0; g.contains(i, j); ++j) {
      g.values[i * g.n + j] = std::exp(cplx{0.0, -w0 * g.tau_g(j)});
      g.std_error[i * g.n + j] = 0.0;
    }
  return g;
}

cplx ramp(cplx a, double t) { return (std::exp(a * t) - 1.0) / a; }

}  // namespace

TEST_CASE("filter response and frequency grid") {
  CHECK(filter_response(-0.1, 1.0, 0.5) == cplx{0.0, 0.0});
  CHECK(std::abs(filter_response(2.0, 1.5, 0.5) - 0.5 * std::exp(cplx{-1.0, -3.0})) < 1e-15);
  const auto w = omega_grid(12.0, 121);
  CHECK(w.size() == 121);
  CHECK(w[40] == doctest::Approx(4.0));
  CHECK(w.back() == 12.0);
  CHECK_THROWS_AS(omega_grid(0.0, 10), Error);
}

TEST_CASE("spectrum of a monochromatic correlation matches closed integrals") {
  const double w0 = 3.0, Gamma = 0.4, t = 6.0;
  const auto G = monochromatic(w0, 0.005, t);
  const std::vector<double> omega{0.0, 2.5, 3.0, 3.5};
  const auto S = physical_spectrum(G, omega, Gamma, t);
  for (std::size_t k = 0; k < omega.size(); ++k) {
    // S0 = int_0^t dtau e^{(Gamma - i w) tau} cos(w0 tau) (e^{2 Gamma (t - tau)} - 1) / (2 Gamma)
    cplx s0{0.0, 0.0};
    for (const double sign : {1.0, -1.0}) {
      const cplx a{Gamma, -omega[k] + sign * w0};
      s0 += std::exp(2.0 * Gamma * t) * ramp(a - 2.0 * Gamma, t) - ramp(a, t);
    }
    s0 /= 4.0 * Gamma;
    CHECK(std::abs(S.s0[k] - s0) < 2e-4 * std::abs(s0) + 1e-9);
    const double phys = Gamma * Gamma * std::exp(-2.0 * Gamma * t) * std::norm(ramp({Gamma, omega[k] - w0}, t));
    CHECK(S.physical[k] == doctest::Approx(phys).epsilon(2e-4));
  }
  CHECK(S.physical_imag_residue < 1e-9);
}

TEST_CASE("spectrum time must be a lattice point with a full triangle") {
  const auto G = monochromatic(1.0, 0.1, 2.0);
  CHECK_THROWS_AS(physical_spectrum(G, {1.0}, 0.1, 1.05), Error);
  CHECK_THROWS_AS(physical_spectrum(G, {1.0}, 0.1, 2.5), Error);
  auto holes = G;
  holes.values[3 * holes.n + 2] = cplx{NAN, NAN};
  CHECK_THROWS_AS(physical_spectrum(holes, {1.0}, 0.1, 2.0), Error);
  CHECK_NOTHROW(physical_spectrum(holes, {1.0}, 0.1, 0.4));
}

TEST_CASE("well populations from the two spectral lines") {
  const auto pops = well_populations_from_peaks(8.0, 4.0, 1.0);
  CHECK(pops.n0 == 6.0);
  CHECK(pops.n1 == 2.0);
  CHECK_FALSE(pops.non_integer);
  CHECK(well_populations_from_peaks(7.4, 4.0, 1.0).non_integer);
  CHECK_THROWS_AS(well_populations_from_peaks(3.0, 4.0, 1.0), Error);
}

TEST_CASE("local extrema and prominence") {
  const std::vector<double> y{0, 3, 1, 2, 1.5, 5, 0, 0.2, 0.1};
  CHECK(local_maxima(y) == std::vector<std::size_t>{1, 3, 5, 7});
  CHECK(local_minima(y) == std::vector<std::size_t>{2, 4, 6});
  const auto p = prominence(y, local_maxima(y));
  // A side without higher ground does not count; the key saddle is on the
  // side that leads to a taller sample.
  CHECK(p[0] == doctest::Approx(2.0));
  CHECK(p[1] == doctest::Approx(0.5));
  CHECK(p[2] == doctest::Approx(5.0));
  CHECK(p[3] == doctest::Approx(0.2));
  CHECK(prominent_maxima(y, 0.05) == std::vector<std::size_t>{1, 3, 5});
  CHECK(prominent_maxima(y, 0.3) == std::vector<std::size_t>{1, 5});
  CHECK(prominent_maxima(y, 0.5) == std::vector<std::size_t>{5});
}

TEST_CASE("envelope width of a gaussian comb") {
  // Narrow lorentzian teeth at the integers under a gaussian of width s.
  const double s = 2.0;
  std::vector<double> omega, y;
  for (int k = 0; k <= 2000; ++k) {
    const double w = 0.01 * k;
    double v = 0.0;
    for (int n = -25; n <= 25; ++n)
      v += std::exp(-0.5 * n * n / (s * s)) * 0.01 / ((w - n) * (w - n) + 0.01);
    omega.push_back(w);
    y.push_back(v);
  }
  const auto fit = envelope_fwhm(omega, y, true, 0.02);
  CHECK(fit.peak_omega == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(fit.fwhm == doctest::Approx(2.0 * std::sqrt(2.0 * std::log(2.0)) * s).epsilon(0.03));
  CHECK(fit.left == doctest::Approx(-fit.right));
  CHECK_THROWS_AS(envelope_fwhm(omega, std::vector<double>(omega.size(), 1.0)), Error);
}

TEST_CASE("number spread and straight-line fits") {
  for (const int N : {1, 4, 9, 12}) CHECK(number_uncertainty(N) == doctest::Approx(std::sqrt(N) / 2.0).epsilon(1e-12));
  const auto line = fit_line({{0.0, 1.0}, {1.0, 3.0}, {2.0, 5.0}});
  CHECK(line.slope == doctest::Approx(2.0));
  CHECK(line.intercept == doctest::Approx(1.0));
  CHECK(line.r_squared == doctest::Approx(1.0));
  const auto noisy = fit_line({{0.0, 0.0}, {1.0, 1.0}, {2.0, 1.0}, {3.0, 3.0}});
  // By hand: Sxy = 4.5, Sxx = 5, residual sum 0.70 against a total of 4.75.
  CHECK(noisy.slope == doctest::Approx(0.9));
  CHECK(noisy.intercept == doctest::Approx(-0.1));
  CHECK(noisy.r_squared == doctest::Approx(1.0 - 0.70 / 4.75));
  CHECK_THROWS_AS(fit_line({{1.0, 0.0}, {1.0, 2.0}}), Error);
}
