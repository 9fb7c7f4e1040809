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

// Truncated Fock-basis numerics for the two output modes. Every closed form in
// analytic.hpp has a brute-force counterpart here: the output of the loop is a
// product of two coherent states, so P(n, m) is a product of Poisson laws and
// parity is read off port B.

#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "sagnac/interferometer.hpp"

namespace sagnac {

inline constexpr double kDefaultTailBound = 1e-12;
inline constexpr int kMaxFockCutoff = 400;

/// No cutoff up to the hard cap meets the requested tail bound.
class TruncationError : public std::runtime_error {
 public:
  TruncationError(double mean, double tail_bound, double achievable_tail)
      : std::runtime_error("Fock truncation infeasible for mean " +
                           std::to_string(mean) + ": tail bound " +
                           std::to_string(tail_bound) + " not reachable, best " +
                           std::to_string(achievable_tail)),
        achievable_tail_(achievable_tail) {}

  double achievable_tail() const noexcept { return achievable_tail_; }

 private:
  double achievable_tail_;
};

struct FockTruncation {
  int n_max = 1;
  double tail_bound = kDefaultTailBound;
};

inline double poisson_log_pmf(int n, double mean) {
  if (mean == 0.0) return n == 0 ? 0.0 : -std::numeric_limits<double>::infinity();
  return n * std::log(mean) - mean - std::lgamma(n + 1.0);
}

inline double poisson_pmf(int n, double mean) {
  return std::exp(poisson_log_pmf(n, mean));
}

/// Sum_{n > n_max} Poisson(mean)(n), summed term by term (no 1 - cdf cancellation).
inline double poisson_tail_above(int n_max, double mean) {
  if (mean == 0.0) return 0.0;
  double tail = 0.0;
  for (int n = n_max + 1;; ++n) {
    const double term = poisson_pmf(n, mean);
    tail += term;
    if (n > mean && term <= tail * 1e-17) break;
    if (n > n_max + 100000) break;
  }
  return tail;
}

/// Smallest cutoff (>= 1) whose Poisson(mean) tail is within tail_bound.
inline FockTruncation choose_truncation(double mean,
                                        double tail_bound = kDefaultTailBound,
                                        int hard_cap = kMaxFockCutoff) {
  if (!(mean >= 0.0)) throw std::invalid_argument("mean photon number must be >= 0");
  if (!(tail_bound > 0.0)) throw std::invalid_argument("tail_bound must be > 0");
  // Tail above n is decreasing in n, so walk up from the bottom.
  for (int n = 1; n <= hard_cap; ++n) {
    if (poisson_tail_above(n, mean) <= tail_bound) return {n, tail_bound};
  }
  throw TruncationError(mean, tail_bound, poisson_tail_above(hard_cap, mean));
}

inline void validate(const FockTruncation& trunc, double mean) {
  if (trunc.n_max < 1) throw std::invalid_argument("n_max must be >= 1");
  const double tail = poisson_tail_above(trunc.n_max, mean);
  if (tail > trunc.tail_bound) throw TruncationError(mean, trunc.tail_bound, tail);
}

/// Coherent amplitudes of the two output ports.
struct OutputModes {
  std::complex<double> port_a;
  std::complex<double> port_b;
};

/// Output amplitudes with transmissivities t_a, t_b in the two loop directions
/// and detection efficiency kappa in front of both ports. With t_a = t_b = 1
/// this is (i alpha cos(theta), -i alpha sin(theta)), theta = k phi.
inline OutputModes output_modes(const InterferometerSpec& spec, double phi,
                                double t_a = 1.0, double t_b = 1.0,
                                double kappa = 1.0) {
  using namespace std::complex_literals;
  const double alpha = std::sqrt(kappa * spec.mean_photons);
  const double theta = angular_rate(spec) * phi;
  const auto fwd = std::sqrt(t_a) * std::exp(1i * theta);
  const auto back = std::sqrt(t_b) * std::exp(-1i * theta);
  return {1i * alpha * (fwd + back) / 2.0, alpha * (back - fwd) / 2.0};
}

struct JointPhotonDistribution {
  int n_max = 0;
  double tail_bound = kDefaultTailBound;
  double phi = 0.0;
  InterferometerSpec spec;
  std::vector<double> probs;  // row-major, index n * (n_max + 1) + m

  std::size_t dim() const { return static_cast<std::size_t>(n_max) + 1; }
  double at(int n, int m) const { return probs[n * dim() + m]; }

  double total() const {
    double s = 0.0;
    for (double p : probs) s += p;
    return s;
  }

  double mass_deficit() const { return 1.0 - total(); }
};

/// P(n, m) for independent Poisson photon numbers with the given port means.
inline JointPhotonDistribution joint_distribution(double mean_a, double mean_b,
                                                  const FockTruncation& trunc) {
  if (trunc.n_max < 1) throw std::invalid_argument("n_max must be >= 1");
  JointPhotonDistribution d;
  d.n_max = trunc.n_max;
  d.tail_bound = trunc.tail_bound;
  const std::size_t dim = d.dim();
  std::vector<double> log_a(dim), log_b(dim);
  for (std::size_t n = 0; n < dim; ++n) {
    log_a[n] = poisson_log_pmf(static_cast<int>(n), mean_a);
    log_b[n] = poisson_log_pmf(static_cast<int>(n), mean_b);
  }
  d.probs.resize(dim * dim);
  for (std::size_t n = 0; n < dim; ++n)
    for (std::size_t m = 0; m < dim; ++m)
      d.probs[n * dim + m] = std::exp(log_a[n] + log_b[m]);
  return d;
}

inline JointPhotonDistribution joint_distribution(const OutputModes& modes,
                                                  const FockTruncation& trunc) {
  return joint_distribution(std::norm(modes.port_a), std::norm(modes.port_b), trunc);
}

/// Ideal loop output, P(n,m) = e^{-N} [N cos^2]^n [N sin^2]^m / (n! m!).
inline JointPhotonDistribution joint_distribution(const InterferometerSpec& spec,
                                                  double phi,
                                                  const FockTruncation& trunc) {
  validate(spec);
  validate(trunc, spec.mean_photons);
  const double s = std::sin(angular_rate(spec) * phi);
  const double c = std::cos(angular_rate(spec) * phi);
  auto d = joint_distribution(spec.mean_photons * c * c, spec.mean_photons * s * s, trunc);
  d.phi = phi;
  d.spec = spec;
  return d;
}

/// Convex mixture w * first + (1 - w) * second over a common cutoff.
inline JointPhotonDistribution mix(const JointPhotonDistribution& first,
                                   const JointPhotonDistribution& second, double w) {
  if (first.n_max != second.n_max)
    throw std::invalid_argument("mixture needs a shared Fock cutoff");
  JointPhotonDistribution out = first;
  for (std::size_t i = 0; i < out.probs.size(); ++i)
    out.probs[i] = w * first.probs[i] + (1.0 - w) * second.probs[i];
  return out;
}

struct EvenOdd {
  double even = 0.0;
  double odd = 0.0;
};

/// Port-B parity classes, P_even = sum_{m even} sum_n P(n, m).
inline EvenOdd even_odd_probabilities(const JointPhotonDistribution& dist) {
  const std::size_t dim = dist.dim();
  EvenOdd eo;
  for (std::size_t m = 0; m < dim; ++m) {
    double column = 0.0;
    for (std::size_t n = 0; n < dim; ++n) column += dist.probs[n * dim + m];
    (m % 2 == 0 ? eo.even : eo.odd) += column;
  }
  return eo;
}

inline double parity_sum(const JointPhotonDistribution& dist) {
  const auto eo = even_odd_probabilities(dist);
  return eo.even - eo.odd;
}

/// Brute-force parity of the imperfect output: the preparation mixture of an
/// OAM-carrying part (weight eta) and an unmodulated part, each propagated
/// through the lossy loop and a kappa detector, followed by the dark-count
/// attenuation of the parity signal.
inline double oracle_parity(const InterferometerSpec& spec, double phi,
                            const ImperfectionProfile& profile,
                            const FockTruncation& trunc) {
  validate(spec);
  validate(profile);
  validate(trunc, spec.mean_photons);
  const auto modulated = joint_distribution(
      output_modes(spec, phi, profile.t_a, profile.t_b, profile.kappa), trunc);
  double parity = parity_sum(modulated);
  if (profile.eta < 1.0) {
    // Unmodulated light carries no OAM and sees no angular phase.
    const auto plain = joint_distribution(
        output_modes(spec, 0.0, profile.t_a, profile.t_b, profile.kappa), trunc);
    parity = parity_sum(mix(modulated, plain, profile.eta));
  }
  return std::exp(-2.0 * profile.effective_dark_rate()) * parity;
}

}  // namespace sagnac
