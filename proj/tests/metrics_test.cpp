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

#include "sagnac/metrics.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <utility>

#include "oracles.hpp"
#include "sagnac/qfi.hpp"

namespace sagnac {
namespace {

constexpr double kPi = std::numbers::pi;
const InterferometerSpec kN10L3{Protocol::Sagnac, 3, 10.0};
const ImperfectionProfile kIdeal = ImperfectionProfile::ideal();

ImperfectionProfile prep(double eta) { return {eta, 1, 1, 1, 0, 1}; }

// Error propagation written out directly for the ideal fringe.
double ideal_sensitivity_formula(double n, int ell, double phi) {
  const double s = std::sin(2.0 * ell * phi);
  return std::sqrt(std::exp(4.0 * n * s * s) - 1.0) / std::abs(4.0 * ell * n * std::sin(4.0 * ell * phi));
}

TEST(Sensitivity, ConvergesToShotNoiseLimitAtZero) {
  const double limit = 0.02635231383473649;
  double previous_error = 1.0;
  for (double phi : {1e-3, 1e-4, 1e-5, 1e-6}) {
    const double err = std::abs(sensitivity(kN10L3, kIdeal, phi) - limit);
    EXPECT_LT(err, previous_error);
    previous_error = err;
  }
  // The approach is quadratic in phi.
  const double e5 = std::abs(sensitivity(kN10L3, kIdeal, 1e-5) - limit);
  const double e6 = std::abs(sensitivity(kN10L3, kIdeal, 1e-6) - limit);
  EXPECT_NEAR(e5 / e6, 100.0, 1.0);
  EXPECT_NEAR(sensitivity(kN10L3, kIdeal, 1e-6), limit, 1e-10);
}

TEST(Sensitivity, PreparationLimitScalesWithInverseRootEta) {
  EXPECT_NEAR(sensitivity(kN10L3, prep(0.5), 1e-7), 0.0372677996249965, 1e-10);
  for (double eta : {0.2, 0.9}) {
    EXPECT_NEAR(sensitivity(kN10L3, prep(eta), 1e-7),
                1.0 / std::sqrt(eta) * 1.0 / (12.0 * std::sqrt(10.0)), 1e-9);
  }
}

TEST(Sensitivity, HalfFringePoint) {
  const double phi = kPi / 24.0;
  EXPECT_NEAR(sensitivity(kN10L3, kIdeal, phi), 183.55388143422293, 1e-9);
  // Same point through a finite-difference slope.
  const double p = parity_expectation_ideal(kN10L3, phi);
  const double fd = testing::central_difference(
      [](double x) { return parity_expectation_ideal(kN10L3, x); }, phi, 1e-4);
  EXPECT_NEAR(sensitivity(kN10L3, kIdeal, phi), std::sqrt(1.0 - p * p) / std::abs(fd), 1e-6);
}

TEST(Sensitivity, MatchesIdealFormulaAwayFromStationaryPoints) {
  for (int ell = 1; ell <= 4; ++ell)
    for (double n : {0.5, 3.0, 10.0})
      for (int i = 1; i < 40; ++i) {
        const double phi = kPi / (4.0 * ell) * i / 40.0;
        const double ref = ideal_sensitivity_formula(n, ell, phi);
        EXPECT_NEAR(sensitivity({Protocol::Sagnac, ell, n}, kIdeal, phi), ref, 1e-9 * ref);
      }
}

/// Error propagation through exp[N g cos(4 ell phi) - N (Ta + Tb) / 2] with
/// transmission factor g in the slope.
double loss_sensitivity_formula(double n, int ell, double ta, double tb, double phi, double g) {
  const double c = std::cos(4.0 * ell * phi);
  return std::sqrt(std::expm1(n * (ta + tb - 2.0 * std::sqrt(ta * tb) * c))) /
         std::abs(4.0 * ell * n * g * std::sin(4.0 * ell * phi));
}

TEST(Sensitivity, UnbalancedLossUsesGeometricMeanTransmission) {
  for (auto [ta, tb] : {std::pair{0.9, 0.3}, std::pair{0.7, 0.7}, std::pair{0.5, 0.95}}) {
    const ImperfectionProfile p{1, ta, tb, 1, 0, 1};
    for (double phi : {0.02, 0.07, 0.11}) {
      const double got = sensitivity(kN10L3, p, phi);
      const double geometric = loss_sensitivity_formula(10.0, 3, ta, tb, phi, std::sqrt(ta * tb));
      const double arithmetic = loss_sensitivity_formula(10.0, 3, ta, tb, phi, 0.5 * (ta + tb));
      EXPECT_NEAR(got, geometric, 1e-12 * geometric);
      if (ta == tb) {
        EXPECT_NEAR(got, arithmetic, 1e-12 * arithmetic);
      } else {
        EXPECT_GT(std::abs(got / arithmetic - 1.0), 0.01);
      }
    }
  }
}

TEST(Sensitivity, DivergesAtStationaryPoints) {
  EXPECT_EQ(sensitivity(kN10L3, kIdeal, 0.0), kDivergent);
  EXPECT_EQ(sensitivity(kN10L3, kIdeal, kPi / 12.0), kDivergent);
  EXPECT_EQ(sensitivity(kN10L3, prep(0.0), 0.1), kDivergent);
}

TEST(Sensitivity, NeverBeatsTheQuantumCramerRaoBound) {
  for (int ell = 1; ell <= 5; ++ell)
    for (double n : {1.0, 5.0, 10.0, 20.0}) {
      const InterferometerSpec spec{Protocol::Sagnac, ell, n};
      const double bound = crb_sensitivity(qfi_si(ell, n));
      for (int i = 1; i < 64; ++i) {
        const double phi = fringe_period(spec) * i / 64.0;
        EXPECT_GE(sensitivity(spec, kIdeal, phi), bound * (1.0 - 1e-12));
      }
      EXPECT_NEAR(sensitivity(spec, kIdeal, 1e-8), bound, 1e-8 * bound);
    }
}

TEST(MinSensitivity, IdealValues) {
  EXPECT_NEAR(min_sensitivity({Protocol::Sagnac, 1, 1.0}, kIdeal).value, 0.25, 0.25e-6);
  const auto m = min_sensitivity(kN10L3, kIdeal);
  EXPECT_NEAR(m.value, 0.02635231383473649, 0.0263e-6);
  EXPECT_LT(m.phi, 1e-6);
}

TEST(MinSensitivity, BalancedLossActsAsFewerPhotons) {
  const auto m = min_sensitivity(kN10L3, {1, 0.5, 0.5, 1, 0, 1});
  EXPECT_NEAR(m.value, 0.0372677996249965, 0.0373e-6);
}

TEST(MinSensitivity, InteriorMinimumMatchesDenseScan) {
  for (const ImperfectionProfile& p :
       {ImperfectionProfile{1, 1, 1, 1, 0.01, 1}, ImperfectionProfile{1, 0.9, 0.4, 1, 0, 1},
        ImperfectionProfile{0.8, 0.9, 0.7, 0.9, 1e-3, 10}}) {
    const auto m = min_sensitivity(kN10L3, p);
    double brute = kDivergent;
    const double half = 0.5 * fringe_period(kN10L3);
    for (int i = 1; i < 400000; ++i) brute = std::min(brute, sensitivity(kN10L3, p, half * i / 400000.0));
    EXPECT_LE(m.value, brute * (1.0 + 1e-9));
    EXPECT_GE(m.value, brute * (1.0 - 1e-6));
    EXPECT_GT(m.phi, 0.0);
  }
}

TEST(SensitivityCurve, MinimumBoundsGrid) {
  const auto c = sensitivity_curve(kN10L3, kIdeal, linspace(0.0, fringe_period(kN10L3), 257));
  EXPECT_EQ(c.values.front(), kDivergent);
  for (double v : c.values) EXPECT_LE(c.minimum.value, v);
  EXPECT_TRUE(std::isfinite(c.minimum.value));
}

TEST(Visibility, IdealAndPreparationFloor) {
  EXPECT_NEAR(visibility(sample_curve(kN10L3, kIdeal, period_grid(kN10L3, 1001))), 1.0, 1e-8);
  const InterferometerSpec bright{Protocol::Sagnac, 1, 50.0};
  EXPECT_NEAR(visibility(sample_curve(bright, prep(0.5), period_grid(bright, 1001))), 1.0 / 3.0,
              1e-12);
  EXPECT_NEAR(visibility(sample_curve(bright, prep(0.7), period_grid(bright, 1001))),
              0.7 / (2.0 - 0.7), 1e-12);
}

TEST(Visibility, ReferenceExperimentProfile) {
  const InterferometerSpec spec{Protocol::Sagnac, 1, 2.297};
  const double v =
      visibility(sample_curve(spec, {1, 1, 1, 1, 0.0253, 1}, period_grid(spec, 1001)));
  const double e = 0.010112328054554324;
  EXPECT_NEAR(v, (1.0 - e) / (1.0 + e), 1e-12);
  EXPECT_NEAR(v, 0.98, 5e-4);
}

TEST(Visibility, RejectsSubPeriodCurve) {
  const auto c = sample_curve(kN10L3, kIdeal, linspace(0.0, 0.3 * fringe_period(kN10L3), 100));
  EXPECT_THROW(visibility(c), std::invalid_argument);
}

TEST(Fwhm, MatchesClosedFormInversion) {
  const double ref = 0.0624191086686455;
  EXPECT_NEAR(testing::ideal_fwhm_closed_form(10.0, 3), ref, 1e-15);
  EXPECT_NEAR(fwhm(sample_curve(kN10L3, kIdeal, period_grid(kN10L3, 20001))), ref, 1e-8);
  const InterferometerSpec reference{Protocol::Sagnac, 1, 2.297};
  EXPECT_NEAR(fwhm(sample_curve(reference, kIdeal, period_grid(reference, 20001))), 0.398931534367296,
              1e-8);
}

TEST(Fwhm, HalvesWhenEllDoubles) {
  for (double n : {1.0, 2.297, 10.0}) {
    const InterferometerSpec a{Protocol::Sagnac, 2, n}, b{Protocol::Sagnac, 4, n};
    EXPECT_NEAR(fwhm(sample_curve(a, kIdeal, period_grid(a, 40001))),
                2.0 * fwhm(sample_curve(b, kIdeal, period_grid(b, 40001))), 1e-8);
  }
}

TEST(Fwhm, PreparationFloorDoesNotChangeWidth) {
  const auto ideal = fwhm(sample_curve(kN10L3, kIdeal, period_grid(kN10L3, 20001)));
  EXPECT_NEAR(fwhm(sample_curve(kN10L3, prep(0.5), period_grid(kN10L3, 20001))), ideal, 1e-9);
}

TEST(Fwhm, DecreasesWithPhotonNumberAndEll) {
  double last = kDivergent;
  for (int i = 1; i <= 20; ++i) {
    const InterferometerSpec spec{Protocol::Sagnac, 1, double(i)};
    const double w = fwhm(sample_curve(spec, kIdeal, period_grid(spec, 20001)));
    EXPECT_LT(w, last);
    last = w;
  }
  last = kDivergent;
  for (int ell = 1; ell <= 5; ++ell) {
    const InterferometerSpec spec{Protocol::Sagnac, ell, 5.0};
    const double w = fwhm(sample_curve(spec, kIdeal, period_grid(spec, 20001)));
    EXPECT_LT(w, last);
    last = w;
  }
}

TEST(Fwhm, NoHalfMaximumCrossing) {
  // exp(-0.02 sin^2) never falls to one half.
  const InterferometerSpec dim{Protocol::Sagnac, 1, 0.01};
  EXPECT_THROW(fwhm(sample_curve(dim, kIdeal, period_grid(dim, 1001))), std::domain_error);
  // Peak at the edge of the sampled range.
  EXPECT_THROW(fwhm(sample_curve(kN10L3, kIdeal, linspace(0.0, 0.2, 100))), std::domain_error);
}

TEST(SuperResolution, ReferenceFactor) {
  const InterferometerSpec reference{Protocol::Sagnac, 1, 2.297};
  const double f = super_resolution_factor(sample_curve(reference, kIdeal, period_grid(reference, 20001)));
  EXPECT_NEAR(f, 7.88, 0.01);
  EXPECT_NEAR(f, 7.875017096786658, 1e-6);
}

TEST(SuperResolution, ScalesWithEll) {
  for (double n : {0.5, 2.297, 8.0}) {
    const InterferometerSpec a{Protocol::Sagnac, 1, n}, b{Protocol::Sagnac, 2, n};
    EXPECT_NEAR(2.0 * super_resolution_factor(sample_curve(a, kIdeal, period_grid(a, 40001))),
                super_resolution_factor(sample_curve(b, kIdeal, period_grid(b, 40001))), 1e-6);
  }
}

TEST(CountPeaks, PeriodicAndOpen) {
  EXPECT_EQ(count_peaks({0, 1, 0, 1, 0, 1}), 3u);
  EXPECT_EQ(count_peaks({1, 0, 0, 1, 0, 0}), 2u);
  EXPECT_EQ(count_peaks({1, 0, 0, 1, 0, 0}, false), 1u);
}

}  // namespace
}  // namespace sagnac
