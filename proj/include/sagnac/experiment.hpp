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

// Synthetic experiment: detector scan over an angle grid, fringe fit with
// binomial error bars, and sensitivity of the fitted fringe against the
// shot-noise limit.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "sagnac/detector.hpp"
#include "sagnac/fit.hpp"
#include "sagnac/interferometer.hpp"
#include "sagnac/metrics.hpp"

namespace sagnac {

struct ExperimentConfig {
  InterferometerSpec spec{Protocol::Sagnac, 1, 2.297};
  DetectorModel detector{kDefaultApdUnits, 1.0, 0.0253, 1.0, kDefaultSeed};
  std::vector<double> phi_grid;  // empty: 60 points over one period centred on 0
  std::size_t trials_per_point = 100000;
  bool fit_floor = false;
};

struct ExperimentResult {
  std::vector<ScanPoint> points;
  std::vector<FitDatum> data;  // sigma holds the error bar used in the final fit
  FitResult fit;
  SensitivityMinimum min_sensitivity;  // NaN fields if the fitted fringe exceeds 1
  double shot_noise_limit = 0.0;       // 1 / (2 * rate * sqrt(N))
};

inline constexpr std::size_t kDefaultExperimentPoints = 60;

/// Grid of `points` angles over one period centred on zero, right end open.
inline std::vector<double> experiment_grid(const InterferometerSpec& spec,
                                           std::size_t points = kDefaultExperimentPoints) {
  const double half = 0.5 * fringe_period(spec);
  return linspace(-half, half, points, false);
}

inline double shot_noise_limit(const InterferometerSpec& spec) {
  return 1.0 / (2.0 * angular_rate(spec) * std::sqrt(spec.mean_photons));
}

/// Fits twice: unweighted to locate the fringe, then weighted by the binomial
/// error bar of the fitted expectation at each point. A bar is never taken
/// below 1/trials, the resolution of a parity mean.
inline ExperimentResult run_experiment(const ExperimentConfig& config) {
  validate(config.spec);
  validate(config.detector);
  if (config.trials_per_point == 0) throw std::invalid_argument("experiment needs trials >= 1");
  const auto grid = config.phi_grid.empty() ? experiment_grid(config.spec) : config.phi_grid;

  ExperimentResult out;
  out.points = scan(config.spec, config.detector, grid, config.trials_per_point);
  for (const auto& p : out.points) out.data.push_back({p.phi, p.parity_mean, 1.0, p.trials});

  FitOptions opts;
  opts.fit_floor = config.fit_floor;
  opts.absolute_sigma = false;
  const auto first = fit_fringe(out.data, config.spec.ell, opts, config.spec.protocol);
  const auto bars = error_bars(out.data, first.model);
  const double resolution = 1.0 / static_cast<double>(config.trials_per_point);
  for (std::size_t i = 0; i < out.data.size(); ++i)
    out.data[i].sigma = std::max(bars[i], resolution);
  opts.absolute_sigma = true;
  out.fit = fit_fringe(out.data, config.spec.ell, opts, config.spec.protocol);

  out.min_sensitivity = {std::nan(""), std::nan("")};
  try {
    out.min_sensitivity = min_sensitivity_from_fit(out.fit.model);
  } catch (const std::domain_error&) {
  }
  out.shot_noise_limit = shot_noise_limit(config.spec);
  return out;
}

}  // namespace sagnac
