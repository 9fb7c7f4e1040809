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

// Quantum Fisher information for angular displacement and the matching
// Cramer-Rao bounds. The Schwinger-operator variances reduce to closed forms:
// 16 ell^2 N for the Sagnac loop (generator 4 ell J_z), 8 ell^2 N for a
// single-prism Mach-Zehnder (generator 2 ell n_a), and 4 ell^2 n per Fock
// component once the input phase is averaged away.

#include <cmath>
#include <stdexcept>
#include <string_view>

#include "sagnac/fock_oracle.hpp"
#include "sagnac/metrics.hpp"

namespace sagnac {

enum class QfiProtocol { SI, MZI, MZIPhaseAveraged };

inline std::string_view to_string(QfiProtocol p) {
  switch (p) {
    case QfiProtocol::SI: return "si";
    case QfiProtocol::MZI: return "mzi";
    case QfiProtocol::MZIPhaseAveraged: return "mzi_phase_averaged";
  }
  return "?";
}

namespace detail {
inline void check_qfi_args(int ell, double mean_photons) {
  if (ell < 1) throw std::invalid_argument("ell must be >= 1");
  if (!(mean_photons >= 0.0)) throw std::invalid_argument("mean_photons must be >= 0");
}
}  // namespace detail

inline double qfi_si(int ell, double mean_photons) {
  detail::check_qfi_args(ell, mean_photons);
  return 16.0 * ell * ell * mean_photons;
}

inline double qfi_mzi(int ell, double mean_photons) {
  detail::check_qfi_args(ell, mean_photons);
  return 8.0 * ell * ell * mean_photons;
}

/// Closed form of the phase-averaged MZI information, 4 ell^2 N.
inline double qfi_mzi_phase_averaged_exact(int ell, double mean_photons) {
  detail::check_qfi_args(ell, mean_photons);
  return 4.0 * ell * ell * mean_photons;
}

/// Smallest cutoff whose omitted first moment, sum_{n > n_max} n p_n =
/// N P(X >= n_max), is at most tail_bound. Every omitted term has n >= 1, so
/// the omitted probability mass is smaller still and the truncation is valid
/// at tail_bound; the phase-averaged sum then lies within 4 ell^2 tail_bound
/// of its closed form.
inline FockTruncation choose_qfi_truncation(double mean, double tail_bound = kDefaultTailBound,
                                            int hard_cap = kMaxFockCutoff) {
  if (!(mean >= 0.0)) throw std::invalid_argument("mean photon number must be >= 0");
  if (!(tail_bound > 0.0)) throw std::invalid_argument("tail_bound must be > 0");
  auto omitted_moment = [mean](int n) {
    return mean * (poisson_pmf(n, mean) + poisson_tail_above(n, mean));
  };
  for (int n = 1; n <= hard_cap; ++n)
    if (omitted_moment(n) <= tail_bound) return {n, tail_bound};
  throw TruncationError(mean, tail_bound, omitted_moment(hard_cap));
}

/// sum_{n <= n_max} p_n 4 ell^2 n with p_n ~ Poisson(N): the QFI of the
/// phase-randomised input is the p_n-weighted sum over its Fock components.
inline double qfi_mzi_phase_averaged(int ell, double mean_photons,
                                     const FockTruncation& trunc) {
  detail::check_qfi_args(ell, mean_photons);
  validate(trunc, mean_photons);
  const double per_photon = 4.0 * ell * ell;
  double sum = 0.0;
  for (int n = 1; n <= trunc.n_max; ++n)
    sum += poisson_pmf(n, mean_photons) * per_photon * n;
  return sum;
}

inline double qfi_mzi_phase_averaged(int ell, double mean_photons) {
  return qfi_mzi_phase_averaged(ell, mean_photons, choose_qfi_truncation(mean_photons));
}

/// 1 / sqrt(nu F); kDivergent when F = 0.
inline double crb_sensitivity(double fisher, int trials = 1) {
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  if (!(fisher >= 0.0)) throw std::invalid_argument("Fisher information must be >= 0");
  if (fisher == 0.0) return kDivergent;
  return 1.0 / std::sqrt(trials * fisher);
}

struct QfiReport {
  QfiProtocol protocol = QfiProtocol::SI;
  double value = 0.0;
  double bound = kDivergent;
  int trials = 1;
};

inline QfiReport qfi_report(QfiProtocol protocol, int ell, double mean_photons,
                            int trials = 1) {
  double f = 0.0;
  switch (protocol) {
    case QfiProtocol::SI: f = qfi_si(ell, mean_photons); break;
    case QfiProtocol::MZI: f = qfi_mzi(ell, mean_photons); break;
    case QfiProtocol::MZIPhaseAveraged: f = qfi_mzi_phase_averaged(ell, mean_photons); break;
  }
  return {protocol, f, crb_sensitivity(f, trials), trials};
}

}  // namespace sagnac
