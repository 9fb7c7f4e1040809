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

// sagnac: command-line front end. Every command writes tables as CSV blocks
// or a versioned JSON document; see the README for the schemas.

#ifdef SAGNAC_CLI11_SINGLE_HEADER
#include <CLI11.hpp>
#else
#include <CLI/CLI.hpp>
#endif

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <iterator>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "sagnac/io.hpp"
#include "sagnac/sagnac.hpp"

namespace {

using nlohmann::json;
using sagnac::io::Table;

constexpr double kDegree = std::numbers::pi / 180.0;
constexpr const char* kSeedEnv = "SAGNAC_SEED";

struct OutputArgs {
  std::string format = "csv";
  std::string path;
};

struct SpecArgs {
  int ell = 1;
  double n = 1.0;
  std::string protocol = "sagnac";

  sagnac::InterferometerSpec spec() const {
    sagnac::InterferometerSpec s{sagnac::protocol_from_string(protocol), ell, n};
    sagnac::validate(s);
    return s;
  }
  json to_json() const { return {{"ell", ell}, {"n", n}, {"protocol", protocol}}; }
};

struct ProfileArgs {
  double eta = 1.0, ta = 1.0, tb = 1.0, kappa = 1.0, dark = 0.0, jitter = 1.0;

  sagnac::ImperfectionProfile profile() const {
    sagnac::ImperfectionProfile p{eta, ta, tb, kappa, dark, jitter};
    sagnac::validate(p);
    return p;
  }
  json to_json() const {
    return {{"eta", eta}, {"ta", ta}, {"tb", tb}, {"kappa", kappa}, {"dark", dark},
            {"jitter", jitter}};
  }
};

struct GridArgs {
  std::optional<double> start, stop;
  std::size_t points = 201;
  bool degrees = false;
  bool endpoint = true;

  /// Explicit [start, stop] if given, else one period centred on zero.
  std::vector<double> grid(const sagnac::InterferometerSpec& spec) const {
    if (start.has_value() != stop.has_value())
      throw std::invalid_argument("--start and --stop must be given together");
    if (points < 2) throw std::invalid_argument("--points must be >= 2");
    const double scale = degrees ? kDegree : 1.0;
    if (start) {
      if (!(*stop > *start)) throw std::invalid_argument("--stop must exceed --start");
      return sagnac::linspace(*start * scale, *stop * scale, points, endpoint);
    }
    const double half = 0.5 * sagnac::fringe_period(spec);
    return sagnac::linspace(-half, half, points, endpoint);
  }
  json to_json() const {
    return {{"start", start ? json(*start) : json(nullptr)},
            {"stop", stop ? json(*stop) : json(nullptr)},
            {"points", points},
            {"degrees", degrees}};
  }
};

std::uint64_t default_seed() {
  const char* env = std::getenv(kSeedEnv);
  if (env == nullptr || *env == '\0') return sagnac::kDefaultSeed;
  std::uint64_t seed = 0;
  const std::string_view s(env);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), seed);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw std::invalid_argument(std::string(kSeedEnv) + " is not an unsigned integer");
  return seed;
}

void add_spec_options(CLI::App* cmd, SpecArgs& a) {
  cmd->add_option("--ell", a.ell, "OAM quantum number")->capture_default_str();
  cmd->add_option("--n", a.n, "mean photon number")->capture_default_str();
  cmd->add_option("--protocol", a.protocol, "sagnac | mzi")->capture_default_str();
}

void add_profile_options(CLI::App* cmd, ProfileArgs& a) {
  cmd->add_option("--eta", a.eta, "OAM preparation efficiency")->capture_default_str();
  cmd->add_option("--ta", a.ta, "transmissivity, path A")->capture_default_str();
  cmd->add_option("--tb", a.tb, "transmissivity, path B")->capture_default_str();
  cmd->add_option("--kappa", a.kappa, "detection efficiency")->capture_default_str();
  cmd->add_option("--dark", a.dark, "dark triggers per gate")->capture_default_str();
  cmd->add_option("--jitter", a.jitter, "gate widening factor from response jitter")
      ->capture_default_str();
}

void add_grid_options(CLI::App* cmd, GridArgs& a) {
  cmd->add_option("--start", a.start, "first angle (radians unless --degrees)");
  cmd->add_option("--stop", a.stop, "last angle (radians unless --degrees)");
  cmd->add_option("--points", a.points, "grid points")->capture_default_str();
  cmd->add_flag("--degrees", a.degrees, "read --start/--stop in degrees");
}

void write_output(const OutputArgs& out, std::string_view command, json params,
                  const std::vector<Table>& tables, json extra = json::object()) {
  std::string text;
  if (out.format == "json") {
    auto doc = sagnac::io::document(command, std::move(params));
    for (const auto& t : tables) doc["tables"].push_back(sagnac::io::to_json(t));
    for (auto& [key, value] : extra.items()) doc[key] = value;
    text = doc.dump(2) + '\n';
  } else if (out.format == "csv") {
    text = sagnac::io::to_csv(tables);
  } else {
    throw std::invalid_argument("--format must be csv or json");
  }
  if (out.path.empty()) {
    std::cout << text;
    std::cout.flush();
    if (!std::cout) throw std::runtime_error("failed writing to stdout");
    return;
  }
  std::ofstream file(out.path, std::ios::binary);
  file << text;
  if (!file) throw std::runtime_error("cannot write " + out.path);
}

// ---- curve ----

struct CurveArgs {
  SpecArgs spec;
  ProfileArgs profile;
  GridArgs grid;
  bool variants = false;
};

void run_curve(const CurveArgs& a, const OutputArgs& out) {
  const auto spec = a.spec.spec();
  const auto profile = a.profile.profile();
  const auto grid = a.grid.grid(spec);

  Table t{"curve", {"phi_rad"}, {}};
  if (a.grid.degrees) t.columns.push_back("phi_deg");
  t.columns.push_back("parity");
  if (a.variants)
    for (const char* c : {"parity_ideal", "parity_prep", "parity_loss", "parity_efficiency",
                          "parity_dark"})
      t.columns.push_back(c);
  for (double phi : grid) {
    std::vector<double> row{phi};
    if (a.grid.degrees) row.push_back(phi / kDegree);
    row.push_back(sagnac::parity_expectation(spec, phi, profile));
    if (a.variants) {
      row.push_back(sagnac::parity_expectation_ideal(spec, phi));
      row.push_back(sagnac::parity_expectation_prep(spec, phi, profile.eta));
      row.push_back(sagnac::parity_expectation_loss(spec, phi, profile.t_a, profile.t_b));
      row.push_back(sagnac::parity_expectation_efficiency(spec, phi, profile.kappa));
      row.push_back(sagnac::parity_expectation_dark(spec, phi, profile.dark_rate,
                                                    profile.jitter_factor));
    }
    t.add_row(std::move(row));
  }
  json params{{"spec", a.spec.to_json()}, {"profile", a.profile.to_json()},
              {"grid", a.grid.to_json()}, {"variants", a.variants}};
  write_output(out, "curve", std::move(params), {t});
}

// ---- metrics ----

struct MetricsArgs {
  SpecArgs spec;
  ProfileArgs profile;
  GridArgs grid;
  std::optional<double> sweep_from, sweep_to;
  std::size_t sweep_points = 20;
};

constexpr std::size_t kDenseCurvePoints = 20001;

double quantum_bound(const sagnac::InterferometerSpec& spec) {
  const double f = spec.protocol == sagnac::Protocol::Sagnac
                       ? sagnac::qfi_si(spec.ell, spec.mean_photons)
                       : sagnac::qfi_mzi(spec.ell, spec.mean_photons);
  return sagnac::crb_sensitivity(f);
}

/// fwhm, visibility, factor, min sensitivity and its angle. FWHM and factor
/// are NaN when the fringe never drops to half its height.
std::vector<double> fringe_summary(const sagnac::InterferometerSpec& spec,
                                   const sagnac::ImperfectionProfile& profile) {
  const auto curve =
      sagnac::sample_curve(spec, profile, sagnac::period_grid(spec, kDenseCurvePoints));
  double width = std::nan(""), factor = std::nan("");
  try {
    width = sagnac::fwhm(curve);
    factor = sagnac::super_resolution_factor(curve);
  } catch (const std::domain_error&) {
  }
  const auto best = sagnac::min_sensitivity(spec, profile);
  return {width, sagnac::visibility(curve), factor, best.value, best.phi};
}

void run_metrics(const MetricsArgs& a, const OutputArgs& out) {
  const auto base = a.spec.spec();
  const auto profile = a.profile.profile();
  json params{{"spec", a.spec.to_json()}, {"profile", a.profile.to_json()},
              {"grid", a.grid.to_json()}};

  if (a.sweep_from || a.sweep_to) {
    if (!a.sweep_from || !a.sweep_to)
      throw std::invalid_argument("--sweep-from and --sweep-to must be given together");
    if (a.sweep_points < 2) throw std::invalid_argument("--sweep-points must be >= 2");
    if (!(*a.sweep_from > 0.0 && *a.sweep_to > *a.sweep_from))
      throw std::invalid_argument("sweep needs 0 < --sweep-from < --sweep-to");
    Table t{"sweep",
            {"n", "fwhm_rad", "visibility", "super_resolution_factor", "min_delta_phi_rad",
             "min_phi_rad", "qcrb_rad"},
            {}};
    for (double n : sagnac::linspace(*a.sweep_from, *a.sweep_to, a.sweep_points)) {
      auto spec = base;
      spec.mean_photons = n;
      std::vector<double> row{n};
      for (double v : fringe_summary(spec, profile)) row.push_back(v);
      row.push_back(quantum_bound(spec));
      t.add_row(std::move(row));
    }
    params["sweep"] = {{"from", *a.sweep_from}, {"to", *a.sweep_to}, {"points", a.sweep_points}};
    write_output(out, "metrics", std::move(params), {t});
    return;
  }

  Table summary{"summary",
                {"fwhm_rad", "visibility", "super_resolution_factor", "min_delta_phi_rad",
                 "min_phi_rad", "qcrb_rad"},
                {}};
  auto row = fringe_summary(base, profile);
  row.push_back(quantum_bound(base));
  summary.add_row(std::move(row));

  Table sens{"sensitivity", {"phi_rad", "delta_phi_rad"}, {}};
  for (double phi : a.grid.grid(base))
    sens.add_row({phi, sagnac::sensitivity(base, profile, phi)});
  write_output(out, "metrics", std::move(params), {summary, sens});
}

// ---- qfi ----

struct QfiArgs {
  int ell = 1;
  double n = 1.0;
  int trials = 1;
  double tail_bound = sagnac::kDefaultTailBound;
};

void run_qfi(const QfiArgs& a, const OutputArgs& out) {
  const double f_si = sagnac::qfi_si(a.ell, a.n);
  const double f_mzi = sagnac::qfi_mzi(a.ell, a.n);
  const double f_avg = sagnac::qfi_mzi_phase_averaged(
      a.ell, a.n, sagnac::choose_qfi_truncation(a.n, a.tail_bound));
  Table t{"qfi",
          {"f_si", "f_mzi", "f_mzi_phase_avg", "bound_si_rad", "bound_mzi_rad",
           "bound_mzi_phase_avg_rad"},
          {}};
  t.add_row({f_si, f_mzi, f_avg, sagnac::crb_sensitivity(f_si, a.trials),
             sagnac::crb_sensitivity(f_mzi, a.trials), sagnac::crb_sensitivity(f_avg, a.trials)});
  json params{{"ell", a.ell}, {"n", a.n}, {"trials", a.trials}, {"tail_bound", a.tail_bound}};
  write_output(out, "qfi", std::move(params), {t});
}

// ---- fit summaries shared by experiment and fit ----

struct FitReport {
  sagnac::FitResult result;
  sagnac::SensitivityMinimum minimum{std::nan(""), std::nan("")};
  double shot_noise = std::nan("");
};

/// Sensitivity of the fitted fringe; NaN where the fitted curve exceeds 1.
double fitted_sensitivity(const sagnac::FringeModel& m, double phi) {
  try {
    return sagnac::sensitivity_from_fit(m, phi);
  } catch (const std::domain_error&) {
    return std::nan("");
  }
}

FitReport make_report(const sagnac::FitResult& result, double n_bar_reference) {
  FitReport r{result};
  try {
    r.minimum = sagnac::min_sensitivity_from_fit(result.model);
  } catch (const std::domain_error&) {
  }
  if (n_bar_reference > 0.0)
    r.shot_noise = sagnac::shot_noise_limit({result.model.protocol, result.model.ell, n_bar_reference});
  return r;
}

Table fit_table(const FitReport& r) {
  const auto& res = r.result;
  const auto& m = res.model;
  Table t{"fit",
          {"amplitude", "amplitude_stderr", "decay", "decay_stderr", "offset_rad",
           "offset_stderr_rad", "floor", "floor_stderr", "n_bar", "r", "visibility", "fwhm_rad",
           "super_resolution_factor", "min_delta_phi_rad", "min_phi_rad", "shot_noise_limit_rad",
           "min_over_shot_noise", "chi2", "residual_rms", "iterations"},
          {}};
  t.add_row({m.amplitude, res.stderrs[0], m.decay, res.stderrs[1], m.offset, res.stderrs[2],
             m.floor, res.stderrs[3], res.derived.n_bar, res.derived.r, res.derived.visibility,
             res.derived.fwhm, res.derived.super_resolution_factor, r.minimum.value,
             r.minimum.phi, r.shot_noise, r.minimum.value / r.shot_noise, res.chi2,
             res.residual_rms, static_cast<double>(res.iterations)});
  return t;
}

json fit_json(const FitReport& r) {
  auto j = sagnac::io::to_json(r.result);
  j["min_sensitivity"] = {{"delta_phi_rad", sagnac::io::number_to_json(r.minimum.value)},
                          {"phi_rad", sagnac::io::number_to_json(r.minimum.phi)}};
  j["shot_noise_limit_rad"] = sagnac::io::number_to_json(r.shot_noise);
  return j;
}

// ---- experiment ----

struct ExperimentArgs {
  SpecArgs spec{1, 2.297, "sagnac"};
  GridArgs grid{std::nullopt, std::nullopt, 60, false, false};
  int units = sagnac::kDefaultApdUnits;
  double kappa = 1.0;
  double dark = 0.0253;
  double jitter = 1.0;
  std::size_t trials = 100000;
  std::uint64_t seed = sagnac::kDefaultSeed;
  bool fit_floor = false;
};

void run_experiment(const ExperimentArgs& a, const OutputArgs& out) {
  sagnac::ExperimentConfig config;
  config.spec = a.spec.spec();
  config.detector = {a.units, a.kappa, a.dark, a.jitter, a.seed};
  if (a.grid.points < 8) throw std::invalid_argument("--points must be >= 8 for the fit");
  config.phi_grid = a.grid.grid(config.spec);
  config.trials_per_point = a.trials;
  config.fit_floor = a.fit_floor;
  const auto exp = sagnac::run_experiment(config);
  const auto& points = exp.points;
  const auto& data = exp.data;
  const auto& result = exp.fit;
  const FitReport report{result, exp.min_sensitivity, exp.shot_noise_limit};

  Table fringe{"fringe",
               {"phi_rad", "parity_mean", "parity_stderr", "trials", "error_bar", "fit_parity"},
               {}};
  Table sens{"sensitivity",
             {"phi_rad", "delta_phi_rad", "empirical_delta_phi_rad", "shot_noise_limit_rad"},
             {}};
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& p = points[i];
    fringe.add_row({p.phi, p.parity_mean, p.parity_stderr, static_cast<double>(p.trials),
                    data[i].sigma, result.model(p.phi)});
    const double slope = std::abs(result.model.slope(p.phi));
    const double spread = std::sqrt(std::max(0.0, 1.0 - p.parity_mean * p.parity_mean));
    const double empirical = slope > 0.0 ? spread / slope : sagnac::kDivergent;
    sens.add_row({p.phi, fitted_sensitivity(result.model, p.phi), empirical, report.shot_noise});
  }

  json params{{"spec", a.spec.to_json()},
              {"grid", a.grid.to_json()},
              {"detector",
               {{"units", a.units}, {"kappa", a.kappa}, {"dark", a.dark}, {"jitter", a.jitter}}},
              {"trials", a.trials},
              {"seed", a.seed},
              {"fit_floor", a.fit_floor}};
  write_output(out, "experiment", std::move(params), {fringe, sens, fit_table(report)},
               {{"fit", fit_json(report)}});
}

// ---- fit ----

struct FitArgs {
  std::string input;
  std::string table;
  int ell = 1;
  std::string protocol = "sagnac";
  bool fit_floor = false;
  std::optional<double> n_bar;
};

void run_fit(const FitArgs& a, const OutputArgs& out) {
  std::ifstream file(a.input, std::ios::binary);
  if (!file) throw std::invalid_argument("cannot read " + a.input);
  const std::string text((std::istreambuf_iterator<char>(file)), std::istreambuf_iterator<char>());
  const auto first = text.find_first_not_of(" \t\r\n");
  sagnac::io::FitInput in;
  if (first != std::string::npos && text[first] == '{') {
    in = sagnac::io::parse_fit_json(json::parse(text), a.table);
  } else {
    std::istringstream ss(text);
    in = sagnac::io::parse_fit_csv(ss, a.table);
  }
  sagnac::FitOptions opts;
  opts.fit_floor = a.fit_floor;
  opts.absolute_sigma = in.has_sigma;
  const auto protocol = sagnac::protocol_from_string(a.protocol);
  const auto result = sagnac::fit_fringe(in.data, a.ell, opts, protocol);
  // Shot-noise reference from the given mean photon number, else the fit's.
  const auto report = make_report(result, a.n_bar.value_or(result.derived.n_bar));

  Table model{"model", {"phi_rad", "value", "fit_value", "residual"}, {}};
  for (const auto& d : in.data) {
    const double v = result.model(d.phi);
    model.add_row({d.phi, d.value, v, d.value - v});
  }
  json params{{"input", a.input},     {"table", a.table},         {"ell", a.ell},
              {"protocol", a.protocol}, {"fit_floor", a.fit_floor}, {"has_sigma", in.has_sigma}};
  write_output(out, "fit", std::move(params), {fit_table(report), model},
               {{"fit", fit_json(report)}});
}

void diagnose(std::string_view type, std::string_view message, json extra = json::object()) {
  json j{{"error", {{"type", type}, {"message", message}}}};
  for (auto& [key, value] : extra.items()) j["error"][key] = value;
  std::cerr << j.dump() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Parity-detection model of an OAM Sagnac interferometer", "sagnac"};
  app.set_config("--config", "", "TOML/INI file mirroring the flags; flags override it");
  app.require_subcommand(1);
  app.fallthrough();

  OutputArgs out;
  app.add_option("--format", out.format, "csv | json")->capture_default_str();
  app.add_option("--output,-o", out.path, "output file (default stdout)");

  CurveArgs curve;
  auto* cmd_curve = app.add_subcommand("curve", "parity expectation over an angle grid");
  add_spec_options(cmd_curve, curve.spec);
  add_profile_options(cmd_curve, curve.profile);
  add_grid_options(cmd_curve, curve.grid);
  cmd_curve->add_flag("--variants", curve.variants, "add one column per single imperfection");

  MetricsArgs metrics;
  auto* cmd_metrics =
      app.add_subcommand("metrics", "FWHM, visibility, super-resolution and sensitivity");
  add_spec_options(cmd_metrics, metrics.spec);
  add_profile_options(cmd_metrics, metrics.profile);
  add_grid_options(cmd_metrics, metrics.grid);
  cmd_metrics->add_option("--sweep-from", metrics.sweep_from, "first N of a photon-number sweep");
  cmd_metrics->add_option("--sweep-to", metrics.sweep_to, "last N of a photon-number sweep");
  cmd_metrics->add_option("--sweep-points", metrics.sweep_points, "sweep points")
      ->capture_default_str();

  QfiArgs qfi;
  auto* cmd_qfi = app.add_subcommand("qfi", "quantum Fisher information and Cramer-Rao bounds");
  cmd_qfi->add_option("--ell", qfi.ell, "OAM quantum number")->capture_default_str();
  cmd_qfi->add_option("--n", qfi.n, "mean photon number")->capture_default_str();
  cmd_qfi->add_option("--trials", qfi.trials, "repetitions nu")->capture_default_str();
  cmd_qfi->add_option("--tail-bound", qfi.tail_bound, "Fock truncation tail bound")
      ->capture_default_str();

  ExperimentArgs exp;
  auto* cmd_exp = app.add_subcommand("experiment", "simulated detector scan and fringe fit");
  add_spec_options(cmd_exp, exp.spec);
  add_grid_options(cmd_exp, exp.grid);
  cmd_exp->add_option("--units", exp.units, "APD array units M")->capture_default_str();
  cmd_exp->add_option("--kappa", exp.kappa, "detection efficiency")->capture_default_str();
  cmd_exp->add_option("--dark", exp.dark, "dark triggers per gate")->capture_default_str();
  cmd_exp->add_option("--jitter", exp.jitter, "gate widening factor")->capture_default_str();
  cmd_exp->add_option("--trials", exp.trials, "gates per angle")->capture_default_str();
  cmd_exp->add_option("--seed", exp.seed,
                      std::string("RNG seed (default: $") + kSeedEnv + " or built-in)");
  cmd_exp->add_flag("--fit-floor", exp.fit_floor, "fit an additive offset c");

  FitArgs fit;
  auto* cmd_fit = app.add_subcommand("fit", "fit a fringe to CSV or JSON data");
  cmd_fit->add_option("--input,-i", fit.input, "data file (CSV or JSON document)")->required();
  cmd_fit->add_option("--table", fit.table, "table name inside the input");
  cmd_fit->add_option("--ell", fit.ell, "OAM quantum number")->capture_default_str();
  cmd_fit->add_option("--protocol", fit.protocol, "sagnac | mzi")->capture_default_str();
  cmd_fit->add_option("--n", fit.n_bar, "mean photon number for the shot-noise reference");
  cmd_fit->add_flag("--fit-floor", fit.fit_floor, "fit an additive offset c");

  try {
    exp.seed = default_seed();
    app.parse(argc, argv);
    if (*cmd_curve) run_curve(curve, out);
    if (*cmd_metrics) run_metrics(metrics, out);
    if (*cmd_qfi) run_qfi(qfi, out);
    if (*cmd_exp) run_experiment(exp, out);
    if (*cmd_fit) run_fit(fit, out);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    diagnose("usage", e.what());
    return 2;
  } catch (const sagnac::FitError& e) {
    diagnose("fit_not_converged", e.what(), {{"best", sagnac::io::to_json(e.best())}});
    return 3;
  } catch (const std::invalid_argument& e) {
    diagnose("invalid_argument", e.what());
    return 2;
  } catch (const std::domain_error& e) {
    diagnose("domain_error", e.what());
    return 2;
  } catch (const std::exception& e) {
    diagnose("error", e.what());
    return 1;
  }
  return 0;
}
