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

// Closed-form parity expectation <Pi> = <exp(i pi b^dag b)> at port B.

#include <cmath>

#include "sagnac/interferometer.hpp"

namespace sagnac {

namespace detail {
inline double sin_sq(const InterferometerSpec& spec, double phi) {
  const double s = std::sin(angular_rate(spec) * phi);
  return s * s;
}
}  // namespace detail

/// exp[-2 N sin^2(2 ell phi)]
inline double parity_expectation_ideal(const InterferometerSpec& spec, double phi) {
  return std::exp(-2.0 * spec.mean_photons * detail::sin_sq(spec, phi));
}

/// eta exp[-2 N sin^2] + 1 - eta: unconverted photons leave port B dark.
inline double parity_expectation_prep(const InterferometerSpec& spec, double phi,
                                      double eta) {
  return eta * parity_expectation_ideal(spec, phi) + (1.0 - eta);
}

/// exp[N sqrt(T_A T_B) cos(4 ell phi) - (N/2)(T_A + T_B)]
inline double parity_expectation_loss(const InterferometerSpec& spec, double phi,
                                      double t_a, double t_b) {
  const double n = spec.mean_photons;
  return std::exp(n * std::sqrt(t_a * t_b) * std::cos(2.0 * angular_rate(spec) * phi) -
                  0.5 * n * (t_a + t_b));
}

/// exp[-2 kappa N sin^2(2 ell phi)]
inline double parity_expectation_efficiency(const InterferometerSpec& spec, double phi,
                                            double kappa) {
  return std::exp(-2.0 * kappa * spec.mean_photons * detail::sin_sq(spec, phi));
}

/// e^{-2 r_eff} <Pi>_ideal with r_eff = jitter_factor * dark_rate.
inline double parity_expectation_dark(const InterferometerSpec& spec, double phi,
                                      double dark_rate, double jitter_factor = 1.0) {
  return std::exp(-2.0 * jitter_factor * dark_rate) * parity_expectation_ideal(spec, phi);
}

/// Value of the composed model at one angle together with the pieces needed
/// for error propagation. `deficit` is 1 - value computed without
/// cancellation, so sqrt(1 - value^2) stays accurate as phi -> 0.
struct ParityPoint {
  double value = 1.0;
  double deficit = 0.0;
  double slope = 0.0;       // d value / d phi
  double log_signal = 0.0;  // log of the phi-dependent term's weight: log(D eta E)
  double log_rate = 0.0;    // d log E / d phi
  bool stationary = false;  // slope vanishes identically here
};

/// All imperfections at once. Loss and detection efficiency act on the
/// coherent amplitudes (N -> kappa N with per-direction T_A, T_B), the
/// preparation mixture weighs the OAM-carrying part against the unconverted
/// part (which sees loss but no angular phase), and dark counts scale the
/// result by e^{-2 r_eff}. Each single-imperfection limit reduces to its own
/// closed form; the ideal profile reproduces the ideal curve bit for bit.
inline ParityPoint parity_point(const InterferometerSpec& spec, double phi,
                                const ImperfectionProfile& profile) {
  const double k = angular_rate(spec);
  const double s = std::sin(k * phi);
  const double s2 = s * s;
  const double n_eff = profile.kappa * spec.mean_photons;
  const double g = profile.t_a == profile.t_b ? profile.t_a
                                              : std::sqrt(profile.t_a * profile.t_b);
  const double root_gap = std::sqrt(profile.t_a) - std::sqrt(profile.t_b);
  // Imbalance between the two directions leaves a phi-independent floor in the
  // port-B intensity: |sqrt(T_B) e^{-i th} - sqrt(T_A) e^{i th}|^2 / 4.
  const double log_plain = -0.5 * n_eff * root_gap * root_gap;
  const double log_mod = log_plain - 2.0 * n_eff * g * s2;
  const double dark = std::exp(-2.0 * profile.effective_dark_rate());

  const double modulated = std::exp(log_mod);
  const double plain = std::exp(log_plain);
  const double inner = profile.eta * modulated + (1.0 - profile.eta) * plain;

  ParityPoint p;
  p.value = dark * inner;
  const double inner_deficit = profile.eta * -std::expm1(log_mod) +
                               (1.0 - profile.eta) * -std::expm1(log_plain);
  p.deficit = -std::expm1(-2.0 * profile.effective_dark_rate()) + dark * inner_deficit;
  p.log_rate = -2.0 * n_eff * g * k * std::sin(2.0 * k * phi);
  p.log_signal = -2.0 * profile.effective_dark_rate() + std::log(profile.eta) + log_mod;
  p.slope = dark * profile.eta * modulated * p.log_rate;
  p.stationary = profile.eta == 0.0 || n_eff * g == 0.0 ||
                 std::abs(std::sin(2.0 * k * phi)) <= 1e-15;
  return p;
}

inline double parity_expectation(const InterferometerSpec& spec, double phi,
                                 const ImperfectionProfile& profile) {
  return parity_point(spec, phi, profile).value;
}

/// d<Pi>/dphi of the composed model; single-imperfection families are the
/// corresponding special profiles.
inline double parity_derivative(const InterferometerSpec& spec, double phi,
                                const ImperfectionProfile& profile) {
  return parity_point(spec, phi, profile).slope;
}

}  // namespace sagnac
