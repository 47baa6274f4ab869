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

#include "braggsim/spectrum.hpp"

#include <math.h>  // the pchip header calls unqualified isnan

#include <algorithm>
#include <boost/math/interpolators/pchip.hpp>
#include <cmath>
#include <memory>
#include <functional>
#include <sstream>

#include "braggsim/error.hpp"

namespace braggsim {

namespace {

double trapezoid_weight(std::size_t k, std::size_t last, double h) {
  if (last == 0) return 0.0;
  return (k == 0 || k == last) ? 0.5 * h : h;
}

// Maxima of the sampled curve including the two ends when they stand above
// their neighbour, so the stretches outside the first and last maxima are
// monotone.
std::vector<std::size_t> comb_maxima(const std::vector<double>& y) {
  std::vector<std::size_t> out;
  const std::size_t n = y.size();
  if (n >= 2 && y[0] > y[1]) out.push_back(0);
  for (const auto k : local_maxima(y)) out.push_back(k);
  if (n >= 2 && y[n - 1] > y[n - 2]) out.push_back(n - 1);
  return out;
}

double bisect(const std::function<double(double)>& f, double lo, double hi) {
  double flo = f(lo);
  for (int it = 0; it < 200 && hi - lo > 1e-14 * std::max(1.0, std::abs(hi)); ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fmid = f(mid);
    if ((fmid < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fmid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

cplx filter_response(double t, double omega, double Gamma) {
  if (t < 0.0) return {0.0, 0.0};
  return Gamma * std::exp(cplx{-Gamma * t, -omega * t});
}

std::vector<double> omega_grid(double omega_max, std::size_t omega_points) {
  if (omega_points < 2 || !(omega_max > 0.0))
    throw Error(ErrorCode::ValidationError, "omega grid: need omega_max > 0 and omega_points >= 2");
  std::vector<double> out(omega_points);
  for (std::size_t k = 0; k < omega_points; ++k)
    out[k] = omega_max * static_cast<double>(k) / static_cast<double>(omega_points - 1);
  return out;
}

double SpectrumResult::prefactor() const { return 2.0 * Gamma * Gamma * std::exp(-2.0 * Gamma * t); }

SpectrumResult physical_spectrum(const CorrelationGrid& G, const std::vector<double>& omega, double Gamma,
                                 double t) {
  const double h = G.step_g;
  const double ratio = t / h;
  const auto last = static_cast<std::size_t>(std::llround(ratio));
  if (!(h > 0.0) || std::abs(ratio - static_cast<double>(last)) > 1e-9 * std::max(1.0, ratio) || last >= G.n) {
    std::ostringstream msg;
    msg << "spectrum time " << t << " is not a lattice point of the correlation grid (step " << h << ", "
        << G.n << " points)";
    throw Error(ErrorCode::GridMismatch, msg.str());
  }
  for (std::size_t i = 0; i <= last; ++i) {
    for (std::size_t j = 0; i + j <= last; ++j) {
      const cplx g = G.at(i, j);
      if (!std::isfinite(g.real()) || !std::isfinite(g.imag()))
        throw Error(ErrorCode::GridMismatch, "correlation grid lacks entries needed for the spectrum");
    }
  }

  SpectrumResult out;
  out.omega = omega;
  out.Gamma = Gamma;
  out.t = t;

  // F(tau_j) = int_0^{t - tau_j} dt2 e^{2 Gamma t2} Re G(t2, t2 + tau_j)
  std::vector<double> F(last + 1, 0.0);
  for (std::size_t j = 0; j <= last; ++j) {
    const std::size_t m = last - j;
    double acc = 0.0;
    for (std::size_t i = 0; i <= m; ++i)
      acc += trapezoid_weight(i, m, h) * std::exp(2.0 * Gamma * static_cast<double>(i) * h) * G.at(i, j).real();
    F[j] = acc;
  }
  out.s0.resize(omega.size());
  for (std::size_t k = 0; k < omega.size(); ++k) {
    cplx acc{0.0, 0.0};
    for (std::size_t j = 0; j <= last; ++j) {
      const double tau = static_cast<double>(j) * h;
      acc += trapezoid_weight(j, last, h) * std::exp(cplx{Gamma * tau, -omega[k] * tau}) * F[j];
    }
    out.s0[k] = acc;
  }

  // Full double integral: S = Gamma^2 e^{-2 Gamma t} v^+ G v with
  // v_b = w_b e^{Gamma t_b} e^{i omega t_b} and G hermitian.
  const std::size_t n = last + 1;
  Matrix full(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a; b < n; ++b) {
      const cplx g = G.at(a, b - a);
      full(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = g;
      full(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(a)) = std::conj(g);
    }
  }
  out.physical.resize(omega.size());
  const double scale = Gamma * Gamma * std::exp(-2.0 * Gamma * t);
  Vector v(static_cast<Eigen::Index>(n));
  for (std::size_t k = 0; k < omega.size(); ++k) {
    for (std::size_t b = 0; b < n; ++b) {
      const double tb = static_cast<double>(b) * h;
      v[static_cast<Eigen::Index>(b)] =
          trapezoid_weight(b, last, h) * std::exp(cplx{Gamma * tb, omega[k] * tb});
    }
    const cplx s = scale * v.dot(full * v);
    out.physical[k] = s.real();
    out.physical_imag_residue = std::max(out.physical_imag_residue, std::abs(s.imag()));
  }
  return out;
}

WellPopulations well_populations_from_peaks(double omega_plus, double omega_minus, double g) {
  if (!(g > 0.0) || omega_minus < 0.0 || omega_plus < omega_minus)
    throw Error(ErrorCode::InvalidArgument, "well_populations_from_peaks: need omega_plus >= omega_minus >= 0, g > 0");
  WellPopulations out;
  out.n0 = (omega_plus + omega_minus) / (2.0 * g);
  out.n1 = (omega_plus - omega_minus) / (2.0 * g);
  out.non_integer = std::abs(out.n0 - std::round(out.n0)) > 0.25 || std::abs(out.n1 - std::round(out.n1)) > 0.25;
  return out;
}

std::vector<std::size_t> local_maxima(const std::vector<double>& y) {
  std::vector<std::size_t> out;
  for (std::size_t k = 1; k + 1 < y.size(); ++k) {
    if (!(y[k] > y[k - 1])) continue;
    std::size_t e = k;
    while (e + 1 < y.size() && y[e + 1] == y[k]) ++e;
    if (e + 1 < y.size() && y[e + 1] < y[k]) out.push_back(k);
  }
  return out;
}

std::vector<std::size_t> local_minima(const std::vector<double>& y) {
  std::vector<double> neg(y.size());
  std::transform(y.begin(), y.end(), neg.begin(), [](double v) { return -v; });
  return local_maxima(neg);
}

std::vector<double> prominence(const std::vector<double>& y, const std::vector<std::size_t>& peaks) {
  std::vector<double> out;
  out.reserve(peaks.size());
  for (const auto k : peaks) {
    // Walk outward until a higher sample; the deeper of the two saddles
    // sets the base, an open side counts as its running minimum.
    double left_min = y[k], right_min = y[k];
    bool left_closed = false, right_closed = false;
    for (std::size_t i = k; i-- > 0;) {
      left_min = std::min(left_min, y[i]);
      if (y[i] > y[k]) {
        left_closed = true;
        break;
      }
    }
    for (std::size_t i = k + 1; i < y.size(); ++i) {
      right_min = std::min(right_min, y[i]);
      if (y[i] > y[k]) {
        right_closed = true;
        break;
      }
    }
    double base;
    if (left_closed && right_closed)
      base = std::max(left_min, right_min);
    else if (left_closed)
      base = left_min;
    else if (right_closed)
      base = right_min;
    else
      base = std::min(left_min, right_min);
    out.push_back(y[k] - base);
  }
  return out;
}

std::vector<std::size_t> prominent_maxima(const std::vector<double>& y, double min_fraction) {
  const auto peaks = local_maxima(y);
  if (peaks.empty()) return peaks;
  const double top = *std::max_element(y.begin(), y.end());
  const auto prom = prominence(y, peaks);
  std::vector<std::size_t> out;
  for (std::size_t p = 0; p < peaks.size(); ++p)
    if (prom[p] >= min_fraction * std::abs(top)) out.push_back(peaks[p]);
  return out;
}

EnvelopeFit envelope_fwhm(const std::vector<double>& omega, const std::vector<double>& y, bool mirror_even,
                          double min_prominence) {
  if (omega.size() != y.size()) throw Error(ErrorCode::DimensionMismatch, "envelope_fwhm: size mismatch");
  std::vector<double> x = omega;
  std::vector<double> v = y;
  if (mirror_even) {
    if (omega.empty() || omega.front() != 0.0)
      throw Error(ErrorCode::InvalidArgument, "envelope_fwhm: mirroring needs samples starting at omega = 0");
    x.clear();
    v.clear();
    for (std::size_t k = omega.size(); k-- > 1;) {
      x.push_back(-omega[k]);
      v.push_back(y[k]);
    }
    x.insert(x.end(), omega.begin(), omega.end());
    v.insert(v.end(), y.begin(), y.end());
  }
  if (x.size() < 3) throw Error(ErrorCode::TooFewPeaks, "envelope_fwhm: fewer than 3 samples");
  std::vector<std::size_t> peaks;
  if (min_prominence > 0.0) {
    const double top = *std::max_element(v.begin(), v.end());
    std::vector<std::size_t> candidates = comb_maxima(v);
    const auto prom = prominence(v, candidates);
    for (std::size_t p = 0; p < candidates.size(); ++p) {
      // An edge maximum has no saddle on its open side; keep it on height.
      const bool edge = candidates[p] == 0 || candidates[p] + 1 == v.size();
      if (edge ? v[candidates[p]] >= min_prominence * top : prom[p] >= min_prominence * top)
        peaks.push_back(candidates[p]);
    }
  } else {
    peaks = comb_maxima(v);
  }
  if (peaks.empty()) throw Error(ErrorCode::TooFewPeaks, "envelope_fwhm: no local maximum in the samples");

  EnvelopeFit fit;
  fit.peak_count = peaks.size();
  for (std::size_t k = 0; k <= peaks.front(); ++k) {
    fit.knot_omega.push_back(x[k]);
    fit.knot_value.push_back(v[k]);
  }
  for (std::size_t p = 1; p < peaks.size(); ++p) {
    fit.knot_omega.push_back(x[peaks[p]]);
    fit.knot_value.push_back(v[peaks[p]]);
  }
  for (std::size_t k = peaks.back() + 1; k < x.size(); ++k) {
    fit.knot_omega.push_back(x[k]);
    fit.knot_value.push_back(v[k]);
  }

  std::function<double(double)> envelope;
  if (fit.knot_omega.size() >= 4) {
    auto spline = std::make_shared<boost::math::interpolators::pchip<std::vector<double>>>(
        std::vector<double>(fit.knot_omega), std::vector<double>(fit.knot_value));
    envelope = [spline](double w) { return (*spline)(w); };
  } else {
    // Too few knots for a cubic; piecewise linear keeps the same guarantees.
    const auto kx = fit.knot_omega;
    const auto ky = fit.knot_value;
    envelope = [kx, ky](double w) {
      if (kx.size() == 1) return ky[0];
      std::size_t k = 0;
      while (k + 2 < kx.size() && w > kx[k + 1]) ++k;
      const double s = (w - kx[k]) / (kx[k + 1] - kx[k]);
      return ky[k] + s * (ky[k + 1] - ky[k]);
    };
  }

  const auto top = static_cast<std::size_t>(
      std::max_element(fit.knot_value.begin(), fit.knot_value.end()) - fit.knot_value.begin());
  fit.maximum = fit.knot_value[top];
  fit.peak_omega = fit.knot_omega[top];
  if (!(fit.maximum > 0.0)) throw Error(ErrorCode::TooFewPeaks, "envelope_fwhm: envelope maximum is not positive");
  const double half = 0.5 * fit.maximum;
  const auto f = [&](double w) { return envelope(w) - half; };

  std::size_t l = top;
  while (l > 0 && fit.knot_value[l] >= half) --l;
  std::size_t r = top;
  while (r + 1 < fit.knot_value.size() && fit.knot_value[r] >= half) ++r;
  if (fit.knot_value[l] >= half || fit.knot_value[r] >= half)
    throw Error(ErrorCode::TooFewPeaks, "envelope_fwhm: envelope does not fall to half maximum inside the range");
  fit.left = bisect(f, fit.knot_omega[l], fit.knot_omega[l + 1]);
  fit.right = bisect(f, fit.knot_omega[r - 1], fit.knot_omega[r]);
  fit.fwhm = fit.right - fit.left;

  fit.omega = x;
  fit.envelope.resize(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) fit.envelope[k] = envelope(x[k]);
  return fit;
}

double number_uncertainty(int N) {
  if (N < 1) throw Error(ErrorCode::InvalidArgument, "number_uncertainty: N must be >= 1");
  const auto b = sf2_coefficients(N);
  double mean = 0.0;
  for (int m = 0; m <= N; ++m) mean += m * b[static_cast<std::size_t>(m)] * b[static_cast<std::size_t>(m)];
  double var = 0.0;
  for (int m = 0; m <= N; ++m)
    var += (m - mean) * (m - mean) * b[static_cast<std::size_t>(m)] * b[static_cast<std::size_t>(m)];
  return std::sqrt(var);
}

LineFit fit_line(const std::vector<std::pair<double, double>>& points) {
  const double n = static_cast<double>(points.size());
  double mx = 0.0, my = 0.0;
  for (const auto& [x, y] : points) {
    mx += x;
    my += y;
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (const auto& [x, y] : points) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
    syy += (y - my) * (y - my);
  }
  if (points.size() < 2 || !(sxx > 0.0))
    throw Error(ErrorCode::DegenerateInput, "fit_line: need at least two distinct abscissae");
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0.0;
  for (const auto& [x, y] : points) {
    const double e = y - (fit.slope * x + fit.intercept);
    ss_res += e * e;
  }
  fit.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  return fit;
}

}  // namespace braggsim
