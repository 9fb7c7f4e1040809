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

#include "sagnac/io.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace sagnac::io {
namespace {

Table fringe_table() {
  Table t{"fringe", {"phi_rad", "parity_mean", "parity_stderr", "trials"}, {}};
  t.add_row({-0.5, 0.25, 0.01, 1000});
  t.add_row({0.0, 1.0, 0.0, 1000});
  t.add_row({0.125, 0.5, 0.02, 1000});
  return t;
}

TEST(Io, FormatNumberIsShortestRoundTrip) {
  EXPECT_EQ(format_number(0.1), "0.1");
  EXPECT_EQ(format_number(2.297), "2.297");
  EXPECT_EQ(format_number(std::numeric_limits<double>::infinity()), "inf");
  EXPECT_EQ(format_number(std::nan("")), "nan");
  const double x = std::numbers::pi / 7.0;
  EXPECT_EQ(std::stod(format_number(x)), x);
}

TEST(Io, CsvRoundTripThroughFitParser) {
  const auto t = fringe_table();
  const auto csv = to_csv(t);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "phi_rad,parity_mean,parity_stderr,trials");
  std::istringstream in(csv);
  const auto parsed = parse_fit_csv(in);
  ASSERT_EQ(parsed.data.size(), 3u);
  EXPECT_TRUE(parsed.has_sigma);
  EXPECT_EQ(parsed.data[0].phi, -0.5);
  EXPECT_EQ(parsed.data[2].value, 0.5);
  EXPECT_EQ(parsed.data[2].sigma, 0.02);
  EXPECT_EQ(parsed.data[1].trials, 1000u);
}

TEST(Io, MultiTableCsv) {
  Table summary{"summary", {"fwhm_rad"}, {}};
  summary.add_row({0.4});
  const std::vector<Table> tables{summary, fringe_table()};
  const auto csv = to_csv(tables);
  std::istringstream in(csv);
  const auto parsed = parse_csv_tables(in);
  ASSERT_EQ(parsed.size(), 2u);
  EXPECT_EQ(parsed[0].name, "summary");
  EXPECT_EQ(parsed[1].name, "fringe");
  EXPECT_EQ(parsed[1].rows, fringe_table().rows);
  std::istringstream again(csv);
  EXPECT_EQ(parse_fit_csv(again).data.size(), 3u);
  std::istringstream named(csv);
  EXPECT_THROW(parse_fit_csv(named, "summary"), std::invalid_argument);
}

TEST(Io, DegreeColumnsAndMissingSigma) {
  std::istringstream in("phi_deg,value\n90,0.5\n-45,0.25\n");
  const auto parsed = parse_fit_csv(in);
  EXPECT_FALSE(parsed.has_sigma);
  EXPECT_DOUBLE_EQ(parsed.data[0].phi, std::numbers::pi / 2.0);
  EXPECT_DOUBLE_EQ(parsed.data[1].phi, -std::numbers::pi / 4.0);
  EXPECT_EQ(parsed.data[0].sigma, 1.0);
}

TEST(Io, MalformedCsvIsRejected) {
  std::istringstream empty("");
  EXPECT_THROW(parse_fit_csv(empty), std::invalid_argument);
  std::istringstream no_phi("x,value\n1,2\n");
  EXPECT_THROW(parse_fit_csv(no_phi), std::invalid_argument);
  std::istringstream junk("phi_rad,value\n1,abc\n");
  EXPECT_THROW(parse_fit_csv(junk), std::invalid_argument);
  std::istringstream ragged("phi_rad,value\n1\n");
  EXPECT_THROW(parse_fit_csv(ragged), std::invalid_argument);
}

TEST(Io, JsonDocumentRoundTrip) {
  auto doc = document("experiment", {{"n", 2.297}});
  EXPECT_EQ(doc.at("schema_version"), kSchemaVersion);
  Table other{"summary", {"quantity"}, {}};
  other.add_row({1.0});
  doc["tables"].push_back(to_json(other));
  doc["tables"].push_back(to_json(fringe_table()));
  const auto reparsed = nlohmann::json::parse(doc.dump());
  const auto parsed = parse_fit_json(reparsed);
  ASSERT_EQ(parsed.data.size(), 3u);
  EXPECT_EQ(parsed.data[2].phi, 0.125);
  EXPECT_EQ(parse_fit_json(reparsed, "fringe").data.size(), 3u);
  EXPECT_THROW(parse_fit_json(reparsed, "summary"), std::invalid_argument);
  EXPECT_EQ(parse_fit_json(to_json(fringe_table())).data.size(), 3u);
  auto future = reparsed;
  future["schema_version"] = kSchemaVersion + 1;
  EXPECT_THROW(parse_fit_json(future), std::invalid_argument);
}

TEST(Io, NonFiniteBecomesNull) {
  Table t{"sens", {"phi_rad", "delta_phi"}, {}};
  t.add_row({0.0, std::numeric_limits<double>::infinity()});
  const auto j = to_json(t);
  EXPECT_TRUE(j["rows"][0][1].is_null());
  EXPECT_EQ(j["rows"][0][0], 0.0);
  EXPECT_THROW(t.add_row({1.0}), std::logic_error);
}

TEST(Io, FitResultSerialisation) {
  FitResult r;
  r.model.amplitude = 0.95;
  r.model.decay = 4.6;
  r.stderrs = {0.001, 0.01, 0.0001, 0.0};
  r.derived.n_bar = 2.3;
  r.derived.r = 0.0256;
  const auto j = to_json(r);
  EXPECT_EQ(j["model"]["amplitude"], 0.95);
  EXPECT_EQ(j["stderr"]["decay"], 0.01);
  EXPECT_EQ(j["derived"]["n_bar"], 2.3);
  r.derived.r = std::numeric_limits<double>::infinity();
  EXPECT_TRUE(to_json(r)["derived"]["r"].is_null());
}

}  // namespace
}  // namespace sagnac::io
