// Copyright 2026 The sagnac-parity Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Figures of merit derived from parity fringes: error-propagation
// sensitivity, its minimum, visibility, FWHM and super-resolution factor.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

#include "sagnac/analytic.hpp"
#include "sagnac/interferometer.hpp"

namespace sagnac {

inline constexpr double kDivergent = std::numeric_limits<double>::infinity();

inline std::vector<double> linspace(double start, double stop, std::size_t points,
                                    bool endpoint = true) {
  if (points == 0) return {};
  if (points == 1) return {start};
  const double step = (stop - start) / static_cast<double>(endpoint ? points - 1 : points);
  std::vector<double> grid(points);
  for (std::size_t i = 0; i < points; ++i) grid[i] = start + step * static_cast<double>(i);
  if (endpoint) grid.back() = stop;
  return grid;
}

/// One full fringe period centred on `center`, endpoints included.
inline std::vector<double> period_grid(const InterferometerSpec& spec, std::size_t points,
                                       double center = 0.0) {
  const double half = 0.5 * fringe_period(spec);
  return linspace(center - half, center + half, points);
}

struct ParityCurve {
  std::vector<double> phi_grid;
  std::vector<double> values;
  InterferometerSpec spec;
  ImperfectionProfile profile;
  // phi-independent additive part of the fringe; half maximum is measured
  // from here.
  double floor = 0.0;
};

/// Additive floor of the composed model: unconverted light after the loop.
inline double fringe_floor(const InterferometerSpec& spec, const ImperfectionProfile& p) {
  const double root_gap = std::sqrt(p.t_a) - std::sqrt(p.t_b);
  return std::exp(-2.0 * p.effective_dark_rate()) * (1.0 - p.eta) *
         std::exp(-0.5 * p.kappa * spec.mean_photons * root_gap * root_gap);
}

inline void validate(const ParityCurve& curve) {
  if (curve.phi_grid.size() != curve.values.size())
    throw std::invalid_argument("curve grid and values differ in length");
  for (std::size_t i = 1; i < curve.phi_grid.size(); ++i)
    if (!(curve.phi_grid[i] > curve.phi_grid[i - 1]))
      throw std::invalid_argument("curve grid must be strictly increasing");
}

inline ParityCurve sample_curve(const InterferometerSpec& spec,
                                const ImperfectionProfile& profile,
                                std::vector<double> grid) {
  validate(spec);
  validate(profile);
  ParityCurve curve{std::move(grid), {}, spec, profile, fringe_floor(spec, profile)};
  curve.values.reserve(curve.phi_grid.size());
  for (double phi : curve.phi_grid)
    curve.values.push_back(parity_expectation(spec, phi, profile));
  validate(curve);
  return curve;
}

namespace detail {

/// sqrt(1 - v^2) / |dv/dphi| in log space, with v = 1 - deficit and
/// dv/dphi = exp(log_signal) * log_rate. Never overflows short of a result
/// beyond double range.
inline double propagated_error(double deficit, double value, double log_signal,
                               double log_rate) {
  const double log_num = 0.5 * std::log(deficit * (1.0 + value));
  const double result = std::exp(log_num - log_signal - std::log(std::abs(log_rate)));
  if (std::isinf(result))
    throw std::overflow_error("sensitivity exceeds double range away from a stationary point");
  return result;
}

}  // namespace detail

/// Error-propagation sensitivity sqrt(1 - <Pi>^2) / |d<Pi>/dphi| (Pi^2 = 1).
/// Returns kDivergent at stationary points of the fringe.
inline double sensitivity(const InterferometerSpec& spec, const ImperfectionProfile& profile,
                          double phi) {
  const auto p = parity_point(spec, phi, profile);
  if (p.stationary) return kDivergent;
  return detail::propagated_error(p.deficit, p.value, p.log_signal, p.log_rate);
}

struct SensitivityMinimum {
  double phi = 0.0;
  double value = kDivergent;
};

struct SensitivityCurve {
  std::vector<double> phi_grid;
  std::vector<double> values;
  SensitivityMinimum minimum;
};

inline SensitivityCurve sensitivity_curve(const InterferometerSpec& spec,
                                          const ImperfectionProfile& profile,
                                          std::vector<double> grid) {
  SensitivityCurve out{std::move(grid), {}, {}};
  out.values.reserve(out.phi_grid.size());
  for (double phi : out.phi_grid) {
    const double v = sensitivity(spec, profile, phi);
    out.values.push_back(v);
    if (v < out.minimum.value) out.minimum = {phi, v};
  }
  return out;
}

/// Minimum of a sensitivity function that is symmetric about `center` with
/// fringe period `period`: dense scan of (0, period/2) offsets, log-spaced
/// towards the centre, then golden-section refinement. When the scan bottoms
/// out at the smallest offset the infimum is the centre limit and that offset
/// is returned.
template <class SensitivityFn>
SensitivityMinimum minimize_sensitivity(SensitivityFn&& fn, double center, double period) {
  constexpr int kLinear = 2000;
  constexpr int kLogDecades = 6;
  constexpr int kLogPerDecade = 10;
  std::vector<double> offsets;
  offsets.reserve(kLinear + kLogDecades * kLogPerDecade);
  for (int i = 0; i < kLogDecades * kLogPerDecade; ++i)
    offsets.push_back(period * std::pow(10.0, -9.0 + i / double(kLogPerDecade)));
  for (int i = 1; i < kLinear; ++i) {
    const double t = 0.5 * period * i / kLinear;
    if (t > offsets.back()) offsets.push_back(t);
  }

  std::size_t best = 0;
  double best_value = kDivergent;
  for (std::size_t i = 0; i < offsets.size(); ++i) {
    const double v = fn(center + offsets[i]);
    if (v < best_value) {
      best_value = v;
      best = i;
    }
  }
  if (best == 0 || best_value == kDivergent) return {center + offsets[best], best_value};

  double lo = offsets[best - 1];
  double hi = best + 1 < offsets.size() ? offsets[best + 1] : 0.5 * period;
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = fn(center + x1);
  double f2 = fn(center + x2);
  while (hi - lo > 1e-13 * period) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = fn(center + x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = fn(center + x2);
    }
  }
  const double t = f1 < f2 ? x1 : x2;
  const double v = std::min(f1, f2);
  if (v < best_value) return {center + t, v};
  return {center + offsets[best], best_value};
}

/// Minimum error-propagation sensitivity over one fringe period.
inline SensitivityMinimum min_sensitivity(const InterferometerSpec& spec,
                                          const ImperfectionProfile& profile) {
  validate(spec);
  validate(profile);
  return minimize_sensitivity(
      [&](double phi) { return sensitivity(spec, profile, phi); }, 0.0, fringe_period(spec));
}

/// (max - min) / (max + min) over a curve covering at least one period.
inline double visibility(const ParityCurve& curve) {
  validate(curve);
  const auto& g = curve.phi_grid;
  if (g.size() < 2) throw std::invalid_argument("visibility needs a sampled period");
  const double span = g.back() - g.front();
  const double step = span / static_cast<double>(g.size() - 1);
  if (span + step < fringe_period(curve.spec) * (1.0 - 1e-9))
    throw std::invalid_argument("visibility needs a curve spanning a full period");
  const auto [lo, hi] = std::minmax_element(curve.values.begin(), curve.values.end());
  return (*hi - *lo) / (*hi + *lo);
}

/// Full width at half maximum of the highest peak. The half level sits midway
/// between the peak and the curve's additive floor; crossings are linearly
/// interpolated.
inline double fwhm(const ParityCurve& curve) {
  validate(curve);
  const auto& g = curve.phi_grid;
  const auto& v = curve.values;
  if (v.size() < 3) throw std::invalid_argument("fwhm needs at least three samples");
  const std::size_t peak =
      static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
  const double level = curve.floor + 0.5 * (v[peak] - curve.floor);

  auto crossing = [&](std::size_t inside, std::size_t outside) {
    const double t = (v[inside] - level) / (v[inside] - v[outside]);
    return g[inside] + t * (g[outside] - g[inside]);
  };
  std::size_t i = peak;
  while (i > 0 && v[i - 1] >= level) --i;
  if (i == 0) throw std::domain_error("fwhm: no half-maximum crossing left of the peak");
  const double left = crossing(i, i - 1);
  std::size_t j = peak;
  while (j + 1 < v.size() && v[j + 1] >= level) ++j;
  if (j + 1 == v.size()) throw std::domain_error("fwhm: no half-maximum crossing right of the peak");
  const double right = crossing(j, j + 1);
  return right - left;
}

/// pi / FWHM: width of the classical cos^2 single-photon fringe (period 2 pi)
/// over the measured width.
inline double super_resolution_factor(const ParityCurve& curve) {
  return std::numbers::pi / fwhm(curve);
}

/// Strict local maxima; `periodic` wraps the ends (grid covering [a, a + T)).
inline std::size_t count_peaks(const std::vector<double>& values, bool periodic = true) {
  const std::size_t n = values.size();
  std::size_t peaks = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!periodic && (i == 0 || i + 1 == n)) continue;
    const double prev = values[(i + n - 1) % n];
    const double next = values[(i + 1) % n];
    if (values[i] > prev && values[i] >= next) ++peaks;
  }
  return peaks;
}

}  // namespace sagnac
