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

// Weighted least-squares recovery of the fringe
//   m(phi) = a exp[-b sin^2(2 ell (phi - phi0))] + c
// with a Levenberg-Marquardt iteration, plus the figures of merit that follow
// from the fitted curve.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "sagnac/interferometer.hpp"
#include "sagnac/metrics.hpp"

namespace sagnac {

struct FringeModel {
  double amplitude = 1.0;  // a
  double decay = 0.0;      // b = 2 N_bar
  double offset = 0.0;     // phi0
  int ell = 1;
  double floor = 0.0;      // c
  Protocol protocol = Protocol::Sagnac;

  double rate() const { return angular_rate({protocol, ell, 0.0}); }
  double period() const { return std::numbers::pi / rate(); }

  double log_envelope(double phi) const {
    const double s = std::sin(rate() * (phi - offset));
    return -decay * s * s;
  }

  double operator()(double phi) const { return amplitude * std::exp(log_envelope(phi)) + floor; }

  /// Partial derivatives with respect to (a, b, phi0, c).
  std::array<double, 4> gradient(double phi) const {
    const double u = rate() * (phi - offset);
    const double s = std::sin(u);
    const double e = std::exp(-decay * s * s);
    return {e, -amplitude * s * s * e, amplitude * decay * rate() * std::sin(2.0 * u) * e, 1.0};
  }

  double slope(double phi) const {
    const double u = rate() * (phi - offset);
    return -amplitude * decay * rate() * std::sin(2.0 * u) * std::exp(log_envelope(phi));
  }
};

struct FitDatum {
  double phi = 0.0;
  double value = 0.0;
  double sigma = 1.0;
  std::size_t trials = 0;  // 0 when unknown
};

struct FitOptions {
  bool fit_floor = false;
  int max_iterations = 500;
  double relative_tolerance = 1e-10;
  // sigma are absolute one-sigma errors; otherwise covariances are rescaled by
  // the reduced chi^2.
  bool absolute_sigma = true;
};

struct FitDerived {
  double n_bar = 0.0;  // b / 2
  double r = 0.0;      // -ln(a) / 2
  double visibility = 0.0;
  double fwhm = 0.0;
  double super_resolution_factor = 0.0;
};

struct FitResult {
  FringeModel model;
  double residual_rms = 0.0;  // unweighted
  double chi2 = 0.0;
  std::array<double, 4> stderrs{};  // (a, b, phi0, c); c entry zero unless fitted
  int iterations = 0;
  FitDerived derived;
};

/// The iteration did not meet the convergence contract; carries the best
/// iterate reached.
class FitError : public std::runtime_error {
 public:
  FitError(const std::string& what, FitResult best)
      : std::runtime_error(what), best_(std::move(best)) {}
  const FitResult& best() const noexcept { return best_; }

 private:
  FitResult best_;
};

/// Dense curve of a fringe model over the period centred on its peak.
inline ParityCurve model_curve(const FringeModel& m, std::size_t points = 20001) {
  ParityCurve curve;
  curve.spec = {m.protocol, m.ell, 0.5 * m.decay};
  curve.profile.dark_rate = m.amplitude > 0.0 ? std::max(0.0, -0.5 * std::log(m.amplitude)) : 0.0;
  curve.floor = m.floor;
  curve.phi_grid = linspace(m.offset - 0.5 * m.period(), m.offset + 0.5 * m.period(), points);
  curve.values.reserve(points);
  for (double phi : curve.phi_grid) curve.values.push_back(m(phi));
  return curve;
}

inline FitDerived derive_metrics(const FringeModel& m) {
  FitDerived d;
  d.n_bar = 0.5 * m.decay;
  d.r = -0.5 * std::log(m.amplitude);
  const auto curve = model_curve(m);
  d.visibility = visibility(curve);
  d.fwhm = fwhm(curve);
  d.super_resolution_factor = super_resolution_factor(curve);
  return d;
}

namespace detail {

struct FitInit {
  double amplitude, decay, offset, floor;
};

inline FitInit initial_guess(std::span<const FitDatum> data, const FringeModel& shape,
                             bool fit_floor) {
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](auto i, auto j) { return data[i].phi < data[j].phi; });
  std::size_t top = 0;
  double lo = data[order[0]].value;
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (data[order[i]].value > data[order[top]].value) top = i;
    lo = std::min(lo, data[order[i]].value);
  }
  const double hi = data[order[top]].value;
  const double floor = fit_floor ? std::max(0.0, lo) : 0.0;
  const double amplitude = hi - floor;
  const double level = floor + 0.5 * amplitude;

  // Half-width from the first half-level crossing on each side of the peak.
  auto value_at = [&](std::size_t i) { return data[order[i]].value; };
  auto phi_at = [&](std::size_t i) { return data[order[i]].phi; };
  double width_sum = 0.0;
  int sides = 0;
  for (std::size_t i = top; i > 0; --i) {
    if (value_at(i - 1) < level) {
      const double t = (value_at(i) - level) / (value_at(i) - value_at(i - 1));
      width_sum += phi_at(top) - (phi_at(i) + t * (phi_at(i - 1) - phi_at(i)));
      ++sides;
      break;
    }
  }
  for (std::size_t i = top; i + 1 < order.size(); ++i) {
    if (value_at(i + 1) < level) {
      const double t = (value_at(i) - level) / (value_at(i) - value_at(i + 1));
      width_sum += phi_at(i) + t * (phi_at(i + 1) - phi_at(i)) - phi_at(top);
      ++sides;
      break;
    }
  }
  double decay = 1.0;
  if (sides > 0) {
    const double s = std::sin(shape.rate() * width_sum / sides);
    if (s * s > 1e-12) decay = std::log(2.0) / (s * s);
  } else if (lo - floor > 0.0) {
    decay = std::max(0.1, std::log(amplitude / (lo - floor)));
  }
  return {amplitude, decay, phi_at(top), floor};
}

}  // namespace detail

/// Levenberg-Marquardt fit of (a, b, phi0) and optionally c, ell held fixed.
/// Converges when an accepted step lowers the weighted residual norm by less
/// than relative_tolerance, or when no step can lower it further.
inline FitResult fit_fringe(std::span<const FitDatum> data, int ell,
                            const FitOptions& options = {},
                            Protocol protocol = Protocol::Sagnac) {
  if (ell < 1) throw std::invalid_argument("ell must be >= 1");
  if (data.size() < 8) throw std::invalid_argument("fit needs at least 8 data points");
  FringeModel model;
  model.ell = ell;
  model.protocol = protocol;
  double phi_lo = data[0].phi, phi_hi = data[0].phi;
  double v_lo = data[0].value, v_hi = data[0].value;
  for (const auto& d : data) {
    if (!(d.sigma > 0.0)) throw std::invalid_argument("fit: sigma must be > 0");
    if (!std::isfinite(d.phi) || !std::isfinite(d.value))
      throw std::invalid_argument("fit: non-finite datum");
    phi_lo = std::min(phi_lo, d.phi);
    phi_hi = std::max(phi_hi, d.phi);
    v_lo = std::min(v_lo, d.value);
    v_hi = std::max(v_hi, d.value);
  }
  if (phi_hi - phi_lo < 0.5 * model.period() * (1.0 - 1e-9))
    throw std::invalid_argument("fit: data must span at least half a fringe period");
  if (v_hi - v_lo <= 1e-14 * std::max(1.0, std::abs(v_hi)))
    throw std::invalid_argument("fit: degenerate data (constant values)");

  const auto init = detail::initial_guess(data, model, options.fit_floor);
  model.amplitude = init.amplitude;
  model.decay = init.decay;
  model.offset = init.offset;
  model.floor = init.floor;

  const int np = options.fit_floor ? 4 : 3;
  const auto n = static_cast<Eigen::Index>(data.size());
  Eigen::MatrixXd jac(n, np);
  Eigen::VectorXd res(n);

  auto cost_of = [&](const FringeModel& m) {
    double c = 0.0;
    for (const auto& d : data) {
      const double r = (d.value - m(d.phi)) / d.sigma;
      c += r * r;
    }
    return c;
  };
  auto linearize = [&](const FringeModel& m) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto& d = data[static_cast<std::size_t>(i)];
      res(i) = (d.value - m(d.phi)) / d.sigma;
      const auto g = m.gradient(d.phi);
      for (int j = 0; j < np; ++j) jac(i, j) = g[j] / d.sigma;
    }
  };
  auto apply = [&](const FringeModel& m, const Eigen::VectorXd& step) {
    FringeModel next = m;
    next.amplitude += step(0);
    next.decay += step(1);
    next.offset += step(2);
    if (np == 4) next.floor += step(3);
    return next;
  };

  auto finish = [&](const FringeModel& m, int iterations) {
    FitResult out;
    out.model = m;
    const double period = m.period();
    out.model.offset = std::fmod(m.offset, period);
    if (out.model.offset < 0.0) out.model.offset += period;
    if (out.model.offset >= period) out.model.offset -= period;
    out.chi2 = cost_of(m);
    double sq = 0.0;
    for (const auto& d : data) sq += (d.value - m(d.phi)) * (d.value - m(d.phi));
    out.residual_rms = std::sqrt(sq / static_cast<double>(data.size()));
    out.iterations = iterations;
    linearize(m);
    const Eigen::MatrixXd normal = jac.transpose() * jac;
    Eigen::MatrixXd cov = normal.completeOrthogonalDecomposition().pseudoInverse();
    if (!options.absolute_sigma && n > np) cov *= out.chi2 / static_cast<double>(n - np);
    for (int j = 0; j < np; ++j) out.stderrs[static_cast<std::size_t>(j)] = std::sqrt(std::max(0.0, cov(j, j)));
    return out;
  };

  double cost = cost_of(model);
  double lambda = 1e-3;
  int iterations = 0;
  bool converged = cost == 0.0;
  while (!converged && iterations < options.max_iterations) {
    ++iterations;
    linearize(model);
    const Eigen::MatrixXd normal = jac.transpose() * jac;
    const Eigen::VectorXd grad = jac.transpose() * res;
    Eigen::MatrixXd damped = normal;
    for (int j = 0; j < np; ++j) damped(j, j) += lambda * std::max(normal(j, j), 1e-300);
    const Eigen::VectorXd step = damped.ldlt().solve(grad);
    const FringeModel trial = apply(model, step);
    const double trial_cost =
        (trial.amplitude > 0.0 && trial.decay >= 0.0 && step.allFinite()) ? cost_of(trial)
                                                                          : cost * 2.0 + 1.0;
    if (trial_cost < cost) {
      const double decrease = (cost - trial_cost) / cost;
      model = trial;
      cost = trial_cost;
      lambda = std::max(lambda / 10.0, 1e-12);
      if (decrease < options.relative_tolerance || cost == 0.0) converged = true;
    } else {
      lambda *= 10.0;
      // No damping yields descent: the iterate is a minimum to working precision.
      if (lambda > 1e16) converged = true;
    }
  }
  FitResult result = finish(model, iterations);
  if (!converged)
    throw FitError("fit did not converge within " + std::to_string(options.max_iterations) +
                       " iterations",
                   result);
  result.derived = derive_metrics(result.model);
  return result;
}

/// One standard deviation of a parity mean over `trials` +-1 outcomes whose
/// expectation is `expectation`.
inline double error_bar(double expectation, std::size_t trials) {
  if (trials == 0) throw std::invalid_argument("error bar needs a trial count");
  return std::sqrt(std::max(0.0, 1.0 - expectation * expectation) / static_cast<double>(trials));
}

inline std::vector<double> error_bars(std::span<const FitDatum> data, const FringeModel& model) {
  std::vector<double> out;
  out.reserve(data.size());
  for (const auto& d : data) out.push_back(error_bar(model(d.phi), d.trials));
  return out;
}

/// Error propagation through the fitted fringe; kDivergent at its
/// stationary points.
inline double sensitivity_from_fit(const FringeModel& m, double phi) {
  const double u = m.rate() * (phi - m.offset);
  const double rate_term = -m.decay * m.rate() * std::sin(2.0 * u);
  if (m.amplitude <= 0.0 || std::abs(std::sin(2.0 * u)) <= 1e-15 || rate_term == 0.0)
    return kDivergent;
  const double log_env = m.log_envelope(phi);
  const double value = m(phi);
  const double deficit = (1.0 - m.amplitude - m.floor) + m.amplitude * -std::expm1(log_env);
  if (deficit < 0.0) throw std::domain_error("fitted fringe exceeds 1; sensitivity undefined");
  return detail::propagated_error(deficit, value, std::log(m.amplitude) + log_env, rate_term);
}

inline double sensitivity_from_fit(const FitResult& result, double phi) {
  return sensitivity_from_fit(result.model, phi);
}

inline SensitivityMinimum min_sensitivity_from_fit(const FringeModel& m) {
  return minimize_sensitivity([&](double phi) { return sensitivity_from_fit(m, phi); },
                              m.offset, m.period());
}

}  // namespace sagnac
