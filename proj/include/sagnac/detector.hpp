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

// Monte Carlo model of a Geiger-mode APD array used as a photon-number
// resolving detector on port B. Each pixel only reports click / no click, so
// the recorded count is the number of distinct pixels that fired.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "sagnac/fock_oracle.hpp"
#include "sagnac/interferometer.hpp"
#include "sagnac/rng.hpp"

namespace sagnac {

inline constexpr int kDefaultApdUnits = 64;
inline constexpr std::uint64_t kDefaultSeed = 20180101ULL;

struct DetectorModel {
  int units = kDefaultApdUnits;  // M pixels
  double kappa = 1.0;            // per-photon detection efficiency
  double dark_rate = 0.0;        // mean dark triggers per gate over the array
  double jitter_factor = 1.0;    // gate widening from response-time jitter
  std::uint64_t seed = kDefaultSeed;

  double effective_dark_rate() const { return jitter_factor * dark_rate; }
};

inline void validate(const DetectorModel& m) {
  if (m.units < 1) throw std::invalid_argument("detector needs at least one unit");
  if (!(m.kappa >= 0.0 && m.kappa <= 1.0))
    throw std::invalid_argument("detector kappa must lie in [0, 1]");
  if (!(m.dark_rate >= 0.0)) throw std::invalid_argument("dark_rate must be >= 0");
  if (!(m.jitter_factor >= 1.0)) throw std::invalid_argument("jitter_factor must be >= 1");
  if (m.effective_dark_rate() / m.units > 1.0)
    throw std::invalid_argument("per-unit dark probability r_eff / M exceeds 1");
}

struct DetectorRun {
  std::size_t trials = 0;
  std::vector<std::uint32_t> counts;    // triggered units per trial
  std::vector<std::uint32_t> incident;  // photons reaching the array (after kappa)
  double parity_mean = 0.0;
  double parity_stderr = 0.0;
  std::vector<double> empirical_dist;  // histogram of counts, sums to 1
};

namespace detail {

inline void summarize(DetectorRun& run) {
  std::uint32_t top = 0;
  long long even = 0;
  for (auto c : run.counts) {
    top = std::max(top, c);
    if (c % 2 == 0) ++even;
  }
  const double n = static_cast<double>(run.trials);
  run.parity_mean = (2.0 * static_cast<double>(even) - n) / n;
  // Sample standard deviation of the +-1 outcomes over sqrt(trials).
  const double var = run.trials > 1
                         ? std::max(0.0, (1.0 - run.parity_mean * run.parity_mean) * n / (n - 1.0))
                         : 0.0;
  run.parity_stderr = std::sqrt(var / n);
  run.empirical_dist.assign(static_cast<std::size_t>(top) + 1, 0.0);
  for (auto c : run.counts) run.empirical_dist[c] += 1.0;
  for (auto& p : run.empirical_dist) p /= n;
}

}  // namespace detail

/// Simulates `trials` gates at angle phi. Per trial: port-B photons
/// k ~ Poisson(N sin^2(2 ell phi)), thinned by kappa, scattered uniformly over
/// the M units; dark triggers fire independently per unit with probability
/// r_eff / M. The count is the number of units that fired. Trial i draws from
/// its own counter stream keyed by (seed, i).
inline DetectorRun simulate(const InterferometerSpec& spec, double phi,
                            const DetectorModel& model, std::size_t trials) {
  validate(spec);
  validate(model);
  if (trials == 0) throw std::invalid_argument("simulate needs at least one trial");

  const double s = std::sin(angular_rate(spec) * phi);
  const double port_mean = spec.mean_photons * s * s;
  const auto units = static_cast<std::uint32_t>(model.units);
  const double unit_dark = model.effective_dark_rate() / model.units;

  std::poisson_distribution<std::uint32_t> photons(port_mean > 0.0 ? port_mean : 1.0);
  std::binomial_distribution<std::uint32_t> dark_units(units, unit_dark);
  std::uniform_int_distribution<std::uint32_t> pick_unit(0, units - 1);

  DetectorRun run;
  run.trials = trials;
  run.counts.resize(trials);
  run.incident.resize(trials);
  std::vector<char> fired(units, 0);
  std::vector<char> dark_mark(units, 0);
  std::vector<std::uint32_t> touched;

  for (std::size_t t = 0; t < trials; ++t) {
    CounterRng rng(derive_key(model.seed, t));
    photons.reset();
    dark_units.reset();

    std::uint32_t k = port_mean > 0.0 ? photons(rng) : 0;
    if (model.kappa < 1.0 && k > 0) k = std::binomial_distribution<std::uint32_t>(k, model.kappa)(rng);

    std::uint32_t count = 0;
    touched.clear();
    for (std::uint32_t p = 0; p < k; ++p) {
      const auto u = pick_unit(rng);
      if (!fired[u]) {
        fired[u] = 1;
        touched.push_back(u);
        ++count;
      }
    }
    // Independent per-unit Bernoulli dark clicks, drawn as a Binomial number
    // of units followed by a uniform subset of that size (Floyd's sampling).
    const std::uint32_t d = unit_dark > 0.0 ? dark_units(rng) : 0;
    for (std::uint32_t j = units - d; j < units; ++j) {
      const auto r = std::uniform_int_distribution<std::uint32_t>(0, j)(rng);
      const std::uint32_t u = dark_mark[r] ? j : r;
      dark_mark[u] = 1;
      touched.push_back(u);
      if (!fired[u]) ++count;
    }
    for (auto u : touched) fired[u] = dark_mark[u] = 0;
    run.counts[t] = count;
    run.incident[t] = k;
  }
  detail::summarize(run);
  return run;
}

struct ScanPoint {
  double phi = 0.0;
  double parity_mean = 0.0;
  double parity_stderr = 0.0;
  std::size_t trials = 0;
};

/// Independent runs over a grid; point i uses seed derive_key(seed, i), so
/// the output depends only on the grid and the model.
inline std::vector<ScanPoint> scan(const InterferometerSpec& spec, const DetectorModel& model,
                                   std::span<const double> phi_grid,
                                   std::size_t trials_per_point) {
  if (phi_grid.empty()) throw std::invalid_argument("scan needs a non-empty grid");
  std::vector<ScanPoint> out;
  out.reserve(phi_grid.size());
  for (std::size_t i = 0; i < phi_grid.size(); ++i) {
    DetectorModel point_model = model;
    point_model.seed = derive_key(model.seed, i);
    const auto run = simulate(spec, phi_grid[i], point_model, trials_per_point);
    out.push_back({phi_grid[i], run.parity_mean, run.parity_stderr, run.trials});
  }
  return out;
}

/// Poisson(mean) restricted to {0, ..., size - 1} and renormalised there.
inline std::vector<double> poisson_histogram(double mean, std::size_t size) {
  std::vector<double> h(size);
  double total = 0.0;
  for (std::size_t n = 0; n < size; ++n) total += h[n] = poisson_pmf(static_cast<int>(n), mean);
  for (auto& p : h) p /= total;
  return h;
}

/// Bhattacharyya overlap H = sum_i sqrt(x_i y_i) of two normalised histograms
/// on a shared support.
inline double credibility(std::span<const double> empirical,
                          std::span<const double> theoretical) {
  if (empirical.empty() || empirical.size() != theoretical.size())
    throw std::invalid_argument("credibility needs two histograms on the same non-empty support");
  double sx = 0.0, sy = 0.0, h = 0.0;
  for (std::size_t i = 0; i < empirical.size(); ++i) {
    if (empirical[i] < 0.0 || theoretical[i] < 0.0)
      throw std::invalid_argument("credibility: negative probability");
    sx += empirical[i];
    sy += theoretical[i];
    h += std::sqrt(empirical[i] * theoretical[i]);
  }
  if (std::abs(sx - 1.0) > 1e-9 || std::abs(sy - 1.0) > 1e-9)
    throw std::invalid_argument("credibility: histograms must be normalised");
  return std::min(h, 1.0);
}

}  // namespace sagnac
