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

#ifndef ENUMDESK_MARKET_H_
#define ENUMDESK_MARKET_H_

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace enumdesk {

// One figure's worth of series: metric -> (year -> value). Metric names carry
// the region as a dotted suffix ("internet_users.world"); metrics under
// "printed." hold cells the source prints as already derived.
struct MarketTable {
  std::string name;
  std::map<std::string, std::map<int, double>> rows;
  std::map<std::string, std::string> units;

  bool has(const std::string& metric, int year) const;
  // MissingYear when the metric or year is absent.
  double value(const std::string& metric, int year) const;
  std::vector<int> years(const std::string& metric) const;
  std::vector<std::string> metrics() const;
};

// Half-up at `decimals` places, tolerant of binary representation error.
double round_half_up(double value, int decimals);

// Percent change from year-1 to year, one decimal.
double growth_rate(const MarketTable& table, const std::string& metric, int year);

// 100 * numerator / denominator, two decimals.
double share_of(const MarketTable& table, const std::string& numerator, const std::string& denominator, int year);

struct PotentialMarketInputs {
  double total_toll = 0;  // currency billions
  double mobile_revenue = 0;
  double other_revenue = 0;
  double main_lines = 0;  // millions
  double mobile_subscribers = 0;
  double internet_users = 0;
  double penetration = 0.05;
};

struct PotentialMarketEstimate {
  double revenue = 0;      // currency billions
  double subscribers = 0;  // millions
};

// BadPenetration outside (0, 1] or on a negative magnitude.
PotentialMarketEstimate potential_market(const PotentialMarketInputs& in);

// Component rows of a potential-market table for one region and year.
PotentialMarketInputs potential_inputs(const MarketTable& table, const std::string& region, int year,
                                       double penetration = 0.05);

// `metric,unit,year,value` with a header row. FixtureError (with the line
// number) on malformed rows, duplicates, negative values, or, when
// `contiguous` is set, gaps in a metric's years.
MarketTable parse_market_csv(std::string name, std::string_view text, bool contiguous = true);

// fig3_1.csv, fig3_2.csv, fig3_3.csv from `dir`; FixtureError when the
// directory or a file is missing.
std::vector<MarketTable> load_market_fixtures(const std::string& dir);
std::vector<MarketTable> builtin_market_fixtures();

enum class ReportFormat { Text, Csv };

// Tables keyed by name (fig3_1, fig3_2, fig3_3) get their derived rows;
// anything else is echoed raw. Derived cells that disagree with a printed
// cell are annotated. BadPenetration as for potential_market.
std::string market_report(const std::vector<MarketTable>& tables, ReportFormat format,
                          double penetration = 0.05);

}  // namespace enumdesk

#endif  // ENUMDESK_MARKET_H_
