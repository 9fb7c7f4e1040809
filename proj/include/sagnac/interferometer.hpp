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

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>

namespace sagnac {

/// Interferometer topology. Sagnac: both loop directions pass the Dove prism,
/// so the port-B amplitude goes as sin(2*ell*phi). MachZehnder: a single
/// prism in one arm, amplitude sin(ell*phi).
enum class Protocol { Sagnac, MachZehnder };

inline std::string_view to_string(Protocol p) {
  return p == Protocol::Sagnac ? "sagnac" : "mzi";
}

inline Protocol protocol_from_string(std::string_view s) {
  if (s == "sagnac" || s == "si") return Protocol::Sagnac;
  if (s == "mzi" || s == "mach-zehnder") return Protocol::MachZehnder;
  throw std::invalid_argument("unknown protocol '" + std::string(s) + "'");
}

struct InterferometerSpec {
  Protocol protocol = Protocol::Sagnac;
  int ell = 1;               // OAM quantum number
  double mean_photons = 1.0; // N = |alpha_ell|^2
};

inline void validate(const InterferometerSpec& spec) {
  if (spec.ell < 1) throw std::invalid_argument("ell must be >= 1");
  if (!(spec.mean_photons >= 0.0) || !std::isfinite(spec.mean_photons))
    throw std::invalid_argument("mean_photons must be finite and >= 0");
}

/// Multiplier k such that the port-B amplitude is proportional to sin(k*phi).
inline double angular_rate(const InterferometerSpec& spec) {
  return spec.protocol == Protocol::Sagnac ? 2.0 * spec.ell : 1.0 * spec.ell;
}

/// Period of every parity fringe in phi (pi/(2 ell) for the Sagnac loop).
inline double fringe_period(const InterferometerSpec& spec) {
  return std::numbers::pi / angular_rate(spec);
}

/// Jitter factor used when a response-time delay is requested without an
/// explicit multiplier: the upper end of the usual range.
inline constexpr double kDefaultDelayJitter = 10.0;

struct ImperfectionProfile {
  double eta = 1.0;           // state-preparation (SLM) efficiency
  double t_a = 1.0;           // path-A transmissivity
  double t_b = 1.0;           // path-B transmissivity
  double kappa = 1.0;         // detection efficiency
  double dark_rate = 0.0;     // dark counts per gate, r
  double jitter_factor = 1.0; // gate widening multiplier on r

  static ImperfectionProfile ideal() { return {}; }

  double effective_dark_rate() const { return jitter_factor * dark_rate; }

  bool is_ideal() const {
    return eta == 1.0 && t_a == 1.0 && t_b == 1.0 && kappa == 1.0 &&
           dark_rate == 0.0;
  }
};

namespace detail {
inline void require_unit_interval(double v, const char* name) {
  if (!(v >= 0.0 && v <= 1.0))
    throw std::invalid_argument(std::string(name) + " must lie in [0, 1]");
}
}  // namespace detail

inline void validate(const ImperfectionProfile& p) {
  detail::require_unit_interval(p.eta, "eta");
  detail::require_unit_interval(p.t_a, "t_a");
  detail::require_unit_interval(p.t_b, "t_b");
  detail::require_unit_interval(p.kappa, "kappa");
  if (!(p.dark_rate >= 0.0) || !std::isfinite(p.dark_rate))
    throw std::invalid_argument("dark_rate must be finite and >= 0");
  if (!(p.jitter_factor >= 1.0) || !std::isfinite(p.jitter_factor))
    throw std::invalid_argument("jitter_factor must be finite and >= 1");
}

}  // namespace sagnac
