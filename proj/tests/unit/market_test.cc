// Copyright 2026 The enumdesk Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "enumdesk/market.h"
#include "test_support.h"

namespace enumdesk {
namespace {

using testing::code_of;

const std::vector<MarketTable>& fixtures() {
  static const std::vector<MarketTable> tables = builtin_market_fixtures();
  return tables;
}

const MarketTable& table(const std::string& name) {
  for (const auto& t : fixtures()) {
    if (t.name == name) return t;
  }
  throw std::runtime_error("no table " + name);
}

// Half-up rounding of 10^d * 100 * num / den over exact integers.
std::int64_t scaled_percent(std::int64_t num, std::int64_t den, int decimals) {
  std::int64_t scale = 100;
  for (int i = 0; i < decimals; ++i) scale *= 10;
  std::int64_t n = 2 * num * scale + den;
  std::int64_t d = 2 * den;
  return n >= 0 ? n / d : -((-n + d - 1) / d);
}

double oracle_growth(std::int64_t prev, std::int64_t cur) {
  return static_cast<double>(scaled_percent(cur - prev, prev, 1)) / 10.0;
}

double oracle_share(std::int64_t part, std::int64_t whole) {
  return static_cast<double>(scaled_percent(part, whole, 2)) / 100.0;
}

std::int64_t raw(const MarketTable& t, const std::string& metric, int year) {
  return static_cast<std::int64_t>(std::llround(t.value(metric, year)));
}

TEST(Rounding, HalfUp) {
  EXPECT_DOUBLE_EQ(round_half_up(2.25, 1), 2.3);
  EXPECT_DOUBLE_EQ(round_half_up(2.35, 1), 2.4);
  EXPECT_DOUBLE_EQ(round_half_up(1.005, 2), 1.01);
  EXPECT_DOUBLE_EQ(round_half_up(2.24, 1), 2.2);
  EXPECT_DOUBLE_EQ(round_half_up(130.75, 2), 130.75);
}

TEST(GrowthTable, PrintedGrowth) {
  const MarketTable& t = table("fig3_1");
  const double world[] = {35.2, 29.7, 25.8, 26.6};
  const double usa[] = {24.7, 24.4, 16.2, 12.9};
  for (int y = 2001; y <= 2004; ++y) {
    EXPECT_NEAR(growth_rate(t, "internet_users.world", y), world[y - 2001], 0.05) << y;
    EXPECT_NEAR(growth_rate(t, "internet_users.usa", y), usa[y - 2001], 0.05) << y;
  }
}

TEST(GrowthTable, PrintedShareOfInternetUsers) {
  const MarketTable& t = table("fig3_1");
  const double world[] = {2.89, 4.72, 7.2, 10.31, 13.99};
  const double usa[] = {3.74, 5.98, 8.95, 12.64, 16.99};
  for (int y = 2000; y <= 2004; ++y) {
    EXPECT_NEAR(share_of(t, "pc_to_phone_users.world", "internet_users.world", y), world[y - 2000], 0.005) << y;
    EXPECT_NEAR(share_of(t, "pc_to_phone_users.usa", "internet_users.usa", y), usa[y - 2000], 0.005) << y;
  }
}

TEST(GrowthTable, GrowthMatchesIntegerOracleOnEveryRow) {
  for (const auto& t : fixtures()) {
    if (t.name == "fig3_2") continue;
    for (const auto& metric : t.metrics()) {
      if (metric.rfind("printed.", 0) == 0) continue;
      auto years = t.years(metric);
      for (std::size_t i = 1; i < years.size(); ++i) {
        int y = years[i];
        EXPECT_DOUBLE_EQ(growth_rate(t, metric, y), oracle_growth(raw(t, metric, y - 1), raw(t, metric, y)))
            << t.name << " " << metric << " " << y;
      }
    }
  }
}

TEST(GrowthTable, ShareMatchesIntegerOracle) {
  const MarketTable& t = table("fig3_1");
  for (const char* region : {"world", "usa"}) {
    std::string part = std::string("pc_to_phone_users.") + region;
    std::string whole = std::string("internet_users.") + region;
    for (int y : t.years(part)) {
      EXPECT_DOUBLE_EQ(share_of(t, part, whole, y), oracle_share(raw(t, part, y), raw(t, whole, y)));
    }
  }
}

TEST(Growth, Errors) {
  MarketTable t = parse_market_csv("t", "metric,unit,year,value\na,u,2000,0\na,u,2001,5\n");
  EXPECT_EQ(code_of([&] { growth_rate(t, "a", 2001); }), Errc::ZeroBase);
  EXPECT_EQ(code_of([&] { growth_rate(t, "a", 2000); }), Errc::MissingYear);
  EXPECT_EQ(code_of([&] { growth_rate(t, "b", 2001); }), Errc::MissingYear);
  EXPECT_EQ(code_of([&] { share_of(t, "a", "a", 2000); }), Errc::ZeroBase);
}

struct Cell {
  const char* region;
  int year;
  double revenue;
  double subscribers;
};

// Printed potential-market cells.
constexpr Cell kPrinted[] = {
    {"world", 2000, 30.5, 96.55},
    {"world", 2002, 36, 130.75},
    {"usa", 2000, 10.05, 17.75},
    {"usa", 2002, 11.15, 24.9},
};

TEST(PotentialMarket, RevenueCellsReproducePrintedValues) {
  const MarketTable& t = table("fig3_2");
  for (const auto& c : kPrinted) {
    EXPECT_NEAR(potential_market(potential_inputs(t, c.region, c.year)).revenue, c.revenue, 0.01)
        << c.region << " " << c.year;
  }
}

TEST(PotentialMarket, SubscriberCellsReproducePrintedValuesExceptUsa2000) {
  const MarketTable& t = table("fig3_2");
  for (const auto& c : kPrinted) {
    double got = potential_market(potential_inputs(t, c.region, c.year)).subscribers;
    if (std::string(c.region) == "usa" && c.year == 2000) {
      // The printed components sum to 365 M; 5% of that is 18.25, not 17.75.
      EXPECT_NEAR(got, 18.25, 1e-9);
      EXPECT_NEAR(got - c.subscribers, 0.5, 1e-9);
      continue;
    }
    EXPECT_NEAR(got, c.subscribers, 0.01) << c.region << " " << c.year;
  }
}

TEST(PotentialMarket, EstimateIsPenetrationTimesComponentSums) {
  const MarketTable& t = table("fig3_2");
  for (const auto& c : kPrinted) {
    std::string r = c.region;
    double revenue = t.value("total_toll." + r, c.year) + t.value("mobile_revenue." + r, c.year) +
                     t.value("other_revenue." + r, c.year);
    double subs = t.value("main_lines." + r, c.year) + t.value("mobile_subscribers." + r, c.year) +
                  t.value("internet_users." + r, c.year);
    for (double p : {0.01, 0.05, 0.2, 1.0}) {
      PotentialMarketEstimate e = potential_market(potential_inputs(t, r, c.year, p));
      EXPECT_NEAR(e.revenue, p * revenue, 1e-9);
      EXPECT_NEAR(e.subscribers, p * subs, 1e-9);
    }
  }
}

TEST(PotentialMarket, LinearInInputs) {
  PotentialMarketInputs a{10, 20, 30, 1, 2, 3, 0.05};
  PotentialMarketInputs b{1, 2, 3, 10, 20, 30, 0.05};
  PotentialMarketInputs sum{11, 22, 33, 11, 22, 33, 0.05};
  auto ea = potential_market(a), eb = potential_market(b), es = potential_market(sum);
  EXPECT_NEAR(es.revenue, ea.revenue + eb.revenue, 1e-9);
  EXPECT_NEAR(es.subscribers, ea.subscribers + eb.subscribers, 1e-9);
  PotentialMarketInputs doubled = a;
  doubled.penetration = 0.1;
  EXPECT_NEAR(potential_market(doubled).revenue, 2 * ea.revenue, 1e-9);
}

TEST(PotentialMarket, BadPenetration) {
  for (double p : {0.0, -0.1, 1.5, std::nan("")}) {
    PotentialMarketInputs in{1, 1, 1, 1, 1, 1, p};
    EXPECT_EQ(code_of([&] { potential_market(in); }), Errc::BadPenetration) << p;
  }
  PotentialMarketInputs negative{-1, 1, 1, 1, 1, 1, 0.05};
  EXPECT_EQ(code_of([&] { potential_market(negative); }), Errc::BadPenetration);
  EXPECT_NO_THROW(potential_market(PotentialMarketInputs{0, 0, 0, 0, 0, 0, 1.0}));
}

TEST(Fixtures, ParseErrorsCarryLineNumbers) {
  auto detail_of = [](std::string_view text, bool contiguous = true) {
    try {
      parse_market_csv("t", text, contiguous);
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), Errc::FixtureError);
      return e.detail();
    }
    ADD_FAILURE() << "accepted: " << text;
    return std::string();
  };
  EXPECT_NE(detail_of("metric,unit,year,value\na,u,2000\n").find("line 2"), std::string::npos);
  EXPECT_NE(detail_of("metric,unit,year,value\na,u,2000,1\na,u,20x1,2\n").find("line 3"), std::string::npos);
  EXPECT_NE(detail_of("metric,unit,year,value\na,u,2000,1\na,u,2000,2\n").find("line 3"), std::string::npos);
  EXPECT_NE(detail_of("metric,unit,year,value\na,u,2000,-1\n").find("line 2"), std::string::npos);
  detail_of("metric,year\n");
  detail_of("metric,unit,year,value\na,u,2000,1\na,u,2002,1\n");
  EXPECT_NO_THROW(parse_market_csv("t", "metric,unit,year,value\na,u,2000,1\na,u,2002,1\n", false));
}

TEST(Fixtures, MissingDirectory) {
  EXPECT_EQ(code_of([] { load_market_fixtures("/nonexistent/enumdesk-fixtures"); }), Errc::FixtureError);
}

TEST(Fixtures, DirectoryMatchesBuiltin) {
  auto dir = std::filesystem::temp_directory_path() / "enumdesk_market_test";
  std::filesystem::create_directories(dir);
  for (const auto& name : {"fig3_1", "fig3_2", "fig3_3"}) {
    const MarketTable& t = table(name);
    std::ostringstream csv;
    csv << "metric,unit,year,value\n";
    for (const auto& [metric, years] : t.rows) {
      for (const auto& [year, v] : years) csv << metric << "," << t.units.at(metric) << "," << year << "," << v << "\n";
    }
    std::ofstream(dir / (std::string(name) + ".csv")) << csv.str();
  }
  EXPECT_EQ(market_report(load_market_fixtures(dir.string()), ReportFormat::Csv),
            market_report(builtin_market_fixtures(), ReportFormat::Csv));
  std::filesystem::remove_all(dir);
}

TEST(Report, TextCarriesWorldPotentialCells) {
  std::string text = market_report(builtin_market_fixtures(), ReportFormat::Text);
  EXPECT_NE(text.find("130.75"), std::string::npos);
  EXPECT_NE(text.find("36"), std::string::npos);
  EXPECT_NE(text.find("17.75"), std::string::npos);
  EXPECT_EQ(text, market_report(builtin_market_fixtures(), ReportFormat::Text));
}

TEST(Report, CsvIsParsableAndFlagsKnownDiscrepancies) {
  std::string csv = market_report(builtin_market_fixtures(), ReportFormat::Csv);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "table,kind,metric,unit,year,value,reference");
  int mismatches = 0, claims = 0, derived = 0;
  bool world_2002 = false;
  while (std::getline(in, line)) {
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 6) << line;
    if (line.find(",mismatch,") != std::string::npos) {
      ++mismatches;
      EXPECT_NE(line.find("potential_subscribers.usa"), std::string::npos) << line;
    }
    if (line.find(",text_claim,") != std::string::npos) ++claims;
    if (line.find(",derived,") != std::string::npos) ++derived;
    if (line.rfind("fig3_2,derived,potential_subscribers.world,", 0) == 0 && line.find(",2002,130.75,") != std::string::npos)
      world_2002 = true;
  }
  EXPECT_EQ(mismatches, 1);
  EXPECT_EQ(claims, 2);
  EXPECT_GT(derived, 0);
  EXPECT_TRUE(world_2002);
}

TEST(Report, EmptyInputGivesEmptyReport) {
  EXPECT_EQ(market_report({}, ReportFormat::Text), "");
  EXPECT_EQ(market_report({}, ReportFormat::Csv), "");
}

TEST(Report, PenetrationFlowsThrough) {
  std::string csv = market_report(builtin_market_fixtures(), ReportFormat::Csv, 0.1);
  EXPECT_NE(csv.find("potential_subscribers.world,millions,2002,261.5"), std::string::npos) << csv;
  EXPECT_EQ(code_of([] { market_report(builtin_market_fixtures(), ReportFormat::Text, 0); }), Errc::BadPenetration);
}

}  // namespace
}  // namespace enumdesk
