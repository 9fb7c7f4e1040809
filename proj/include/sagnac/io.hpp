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

// Tabular CSV / JSON output and the data reader used by the fitter.
//
// CSV: one header row of unit-annotated column names, then one row per
// sample. Numbers use the shortest round-trip decimal form; divergent values
// are written as `inf`. Commands emitting several tables write blocks headed
// by a `# table: NAME` line and separated by blank lines.
//
// JSON: {"schema_version": 1, "command": ..., "parameters": {...},
//        "tables": [{"name", "columns", "rows"}], ...}; divergent values are
// written as null.

#include <nlohmann/json.hpp>

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <istream>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "sagnac/fit.hpp"

namespace sagnac::io {

inline constexpr int kSchemaVersion = 1;

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  void add_row(std::vector<double> row) {
    if (row.size() != columns.size())
      throw std::logic_error("table '" + name + "': row width differs from header");
    rows.push_back(std::move(row));
  }
};

inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::array<char, 64> buf{};
  const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), end);
}

inline std::string to_csv(const Table& t) {
  std::string out;
  for (std::size_t i = 0; i < t.columns.size(); ++i) {
    if (i) out += ',';
    out += t.columns[i];
  }
  out += '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += format_number(row[i]);
    }
    out += '\n';
  }
  return out;
}

inline nlohmann::json number_to_json(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

inline nlohmann::json to_json(const Table& t) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : t.rows) {
    nlohmann::json r = nlohmann::json::array();
    for (double v : row) r.push_back(number_to_json(v));
    rows.push_back(std::move(r));
  }
  return {{"name", t.name}, {"columns", t.columns}, {"rows", std::move(rows)}};
}

inline nlohmann::json document(std::string_view command, nlohmann::json parameters) {
  return {{"schema_version", kSchemaVersion},
          {"command", command},
          {"parameters", std::move(parameters)},
          {"tables", nlohmann::json::array()}};
}

inline nlohmann::json to_json(const FitResult& r) {
  const auto& m = r.model;
  return {
      {"model",
       {{"amplitude", m.amplitude},
        {"decay", m.decay},
        {"offset_rad", m.offset},
        {"ell", m.ell},
        {"floor", m.floor}}},
      {"stderr",
       {{"amplitude", r.stderrs[0]},
        {"decay", r.stderrs[1]},
        {"offset_rad", r.stderrs[2]},
        {"floor", r.stderrs[3]}}},
      {"residual_rms", r.residual_rms},
      {"chi2", r.chi2},
      {"iterations", r.iterations},
      {"derived",
       {{"n_bar", r.derived.n_bar},
        {"r", number_to_json(r.derived.r)},
        {"visibility", r.derived.visibility},
        {"fwhm_rad", r.derived.fwhm},
        {"super_resolution_factor", r.derived.super_resolution_factor}}},
  };
}

/// Parsed fitter input; `has_sigma` is false when no error column was found
/// and unit weights were substituted.
struct FitInput {
  std::vector<FitDatum> data;
  bool has_sigma = false;
};

namespace detail {

inline double parse_number(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw std::invalid_argument("not a number: '" + std::string(s) + "'");
  return v;
}

inline std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
    while (!cell.empty() && cell.front() == ' ') cell.erase(cell.begin());
    out.push_back(cell);
  }
  return out;
}

inline std::optional<std::size_t> find_column(const std::vector<std::string>& columns,
                                              std::initializer_list<std::string_view> names) {
  for (auto name : names) {
    const auto it = std::find(columns.begin(), columns.end(), name);
    if (it != columns.end()) return static_cast<std::size_t>(it - columns.begin());
  }
  return std::nullopt;
}

inline FitInput rows_to_fit_input(const std::vector<std::string>& columns,
                                  const std::vector<std::vector<double>>& rows) {
  const auto phi_rad = find_column(columns, {"phi_rad"});
  const auto phi_deg = find_column(columns, {"phi_deg"});
  const auto value = find_column(columns, {"value", "parity_mean", "parity", "expectation"});
  const auto sigma = find_column(columns, {"sigma", "parity_stderr", "error_bar"});
  const auto trials = find_column(columns, {"trials"});
  if (!phi_rad && !phi_deg) throw std::invalid_argument("fit input lacks a phi_rad/phi_deg column");
  if (!value) throw std::invalid_argument("fit input lacks a value column");
  FitInput in;
  in.has_sigma = sigma.has_value();
  for (const auto& row : rows) {
    if (row.size() != columns.size()) throw std::invalid_argument("fit input: ragged row");
    FitDatum d;
    d.phi = phi_rad ? row[*phi_rad] : row[*phi_deg] * std::numbers::pi / 180.0;
    d.value = row[*value];
    d.sigma = sigma ? row[*sigma] : 1.0;
    if (trials) d.trials = static_cast<std::size_t>(row[*trials]);
    in.data.push_back(d);
  }
  return in;
}

}  // namespace detail

/// Several tables in one stream: each block is "# table: NAME", a header row
/// and data rows, blocks separated by a blank line.
inline std::string to_csv(std::span<const Table> tables) {
  std::string out;
  for (std::size_t i = 0; i < tables.size(); ++i) {
    if (i) out += '\n';
    out += "# table: " + tables[i].name + '\n';
    out += to_csv(tables[i]);
  }
  return out;
}

/// Inverse of the multi-table writer; a plain header-plus-rows file yields a
/// single table named "data".
inline std::vector<Table> parse_csv_tables(std::istream& in) {
  constexpr std::string_view kTag = "# table:";
  std::vector<Table> tables;
  std::string line, pending_name = "data";
  bool in_block = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      in_block = false;
      continue;
    }
    if (line.front() == '#') {
      if (line.compare(0, kTag.size(), kTag) == 0) {
        auto name = line.substr(kTag.size());
        name.erase(0, name.find_first_not_of(' '));
        pending_name = name;
      }
      in_block = false;
      continue;
    }
    if (!in_block) {
      tables.push_back({pending_name, detail::split(line), {}});
      pending_name = "data";
      in_block = true;
      continue;
    }
    std::vector<double> row;
    for (const auto& cell : detail::split(line)) row.push_back(detail::parse_number(cell));
    tables.back().rows.push_back(std::move(row));
  }
  if (tables.empty()) throw std::invalid_argument("empty CSV input");
  return tables;
}

inline Table parse_csv(std::istream& in) { return parse_csv_tables(in).front(); }

/// Uses the table named `table`, or else the first one carrying a phi column
/// and a value column.
inline FitInput parse_fit_csv(std::istream& in, std::string_view table = {}) {
  const auto tables = parse_csv_tables(in);
  for (const auto& t : tables) {
    if (!table.empty() && t.name != table) continue;
    try {
      return detail::rows_to_fit_input(t.columns, t.rows);
    } catch (const std::invalid_argument&) {
      if (!table.empty()) throw;
    }
  }
  throw std::invalid_argument(table.empty() ? "no table in the input carries fit data"
                                            : "no table named '" + std::string(table) + "'");
}

/// Accepts a bare table object or a document; for documents the first table
/// with a phi column and a value column is used (or the one named `table`).
inline FitInput parse_fit_json(const nlohmann::json& j, std::string_view table = {}) {
  auto from_table = [](const nlohmann::json& t) {
    const auto columns = t.at("columns").get<std::vector<std::string>>();
    std::vector<std::vector<double>> rows;
    for (const auto& r : t.at("rows")) {
      std::vector<double> row;
      for (const auto& v : r)
        row.push_back(v.is_null() ? std::numeric_limits<double>::infinity() : v.get<double>());
      rows.push_back(std::move(row));
    }
    return detail::rows_to_fit_input(columns, rows);
  };
  if (j.contains("columns")) return from_table(j);
  if (j.contains("schema_version") && j.at("schema_version").get<int>() != kSchemaVersion)
    throw std::invalid_argument("unsupported schema_version");
  for (const auto& t : j.at("tables")) {
    if (!table.empty() && t.at("name").get<std::string>() != table) continue;
    try {
      return from_table(t);
    } catch (const std::invalid_argument&) {
      if (!table.empty()) throw;
    }
  }
  throw std::invalid_argument(table.empty() ? "no table in the document carries fit data"
                                            : "no table named '" + std::string(table) + "'");
}

}  // namespace sagnac::io
