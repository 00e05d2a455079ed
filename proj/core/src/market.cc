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

#include "enumdesk/market.h"

#include <fmt/format.h>

#include <algorithm>
#include <boost/tokenizer.hpp>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "embedded.h"
#include "enumdesk/error.h"

namespace enumdesk {
namespace {

constexpr std::string_view kPrinted = "printed.";
constexpr const char* kFixtureNames[] = {"fig3_1", "fig3_2", "fig3_3"};

std::string region_of(const std::string& metric) {
  auto dot = metric.rfind('.');
  return dot == std::string::npos ? std::string() : metric.substr(dot + 1);
}

std::string base_of(const std::string& metric) {
  auto dot = metric.rfind('.');
  return dot == std::string::npos ? metric : metric.substr(0, dot);
}

bool is_printed(const std::string& metric) { return metric.rfind(kPrinted, 0) == 0; }

// Up to two decimals, trailing zeros dropped.
std::string trimmed(double v) {
  std::string s = fmt::format("{:.2f}", round_half_up(v, 2));
  while (s.back() == '0') s.pop_back();
  if (s.back() == '.') s.pop_back();
  return s;
}

struct Cell {
  std::string text;
  double value = 0;
  bool present = false;
};

struct Row {
  std::string metric;
  std::string unit;
  std::string kind;  // raw or derived
  std::map<int, Cell> cells;
};

struct Mismatch {
  std::string metric;
  std::string unit;
  int year;
  double computed;
  double printed;
};

struct Section {
  std::string table;
  std::vector<int> years;
  std::vector<Row> rows;
  std::vector<Mismatch> mismatches;
  std::vector<Mismatch> claims;  // prose figures that disagree with the table
};

std::vector<int> all_years(const MarketTable& t) {
  std::set<int> years;
  for (const auto& [metric, series] : t.rows) {
    if (is_printed(metric)) continue;
    for (const auto& [y, v] : series) years.insert(y);
  }
  return {years.begin(), years.end()};
}

Row raw_row(const MarketTable& t, const std::string& metric) {
  Row row{metric, t.units.at(metric), "raw", {}};
  for (const auto& [y, v] : t.rows.at(metric)) row.cells[y] = Cell{trimmed(v), v, true};
  return row;
}

Row growth_row(const MarketTable& t, const std::string& metric) {
  Row row{"growth." + metric, "percent", "derived", {}};
  for (const auto& [y, v] : t.rows.at(metric)) {
    if (!t.has(metric, y - 1)) continue;
    try {
      double g = growth_rate(t, metric, y);
      row.cells[y] = Cell{fmt::format("{:.1f}", g), g, true};
    } catch (const Error&) {
    }
  }
  return row;
}

Row share_row(const MarketTable& t, const std::string& num, const std::string& den) {
  Row row{"share." + num, "percent", "derived", {}};
  for (const auto& [y, v] : t.rows.at(num)) {
    try {
      double s = share_of(t, num, den, y);
      row.cells[y] = Cell{fmt::format("{:.2f}", s), s, true};
    } catch (const Error&) {
    }
  }
  return row;
}

void compare_printed(const MarketTable& t, Section& sec, double tolerance_growth, double tolerance_share,
                     double tolerance_other) {
  for (const Row& row : sec.rows) {
    if (row.kind != "derived") continue;
    std::string printed = std::string(kPrinted) + row.metric;
    auto it = t.rows.find(printed);
    if (it == t.rows.end()) continue;
    double tol = row.metric.rfind("growth.", 0) == 0  ? tolerance_growth
                 : row.metric.rfind("share.", 0) == 0 ? tolerance_share
                                                      : tolerance_other;
    for (const auto& [y, p] : it->second) {
      auto c = row.cells.find(y);
      if (c == row.cells.end()) continue;
      if (std::fabs(c->second.value - p) > tol + 1e-9)
        sec.mismatches.push_back(Mismatch{row.metric, row.unit, y, c->second.value, p});
    }
  }
}

Section growth_section(const MarketTable& t) {
  Section sec{t.name, all_years(t), {}, {}, {}};
  std::vector<std::string> raw;
  for (const auto& m : t.metrics()) {
    if (!is_printed(m)) raw.push_back(m);
  }
  for (const auto& m : raw) sec.rows.push_back(raw_row(t, m));
  for (const auto& m : raw) sec.rows.push_back(growth_row(t, m));
  for (const auto& m : raw) {
    if (base_of(m) != "pc_to_phone_users") continue;
    std::string den = "internet_users." + region_of(m);
    if (t.rows.count(den)) sec.rows.push_back(share_row(t, m, den));
  }
  compare_printed(t, sec, 0.05, 0.005, 0.01);
  return sec;
}

Section potential_section(const MarketTable& t, double penetration) {
  Section sec{t.name, all_years(t), {}, {}, {}};
  std::set<std::string> regions;
  for (const auto& m : t.metrics()) {
    if (is_printed(m)) continue;
    sec.rows.push_back(raw_row(t, m));
    regions.insert(region_of(m));
  }
  for (const auto& region : regions) {
    std::string rev_unit = t.units.count("total_toll." + region) ? t.units.at("total_toll." + region) : "";
    std::string sub_unit = t.units.count("main_lines." + region) ? t.units.at("main_lines." + region) : "";
    Row revenue{"potential_revenue." + region, rev_unit, "derived", {}};
    Row subscribers{"potential_subscribers." + region, sub_unit, "derived", {}};
    for (int y : sec.years) {
      try {
        PotentialMarketEstimate e = potential_market(potential_inputs(t, region, y, penetration));
        revenue.cells[y] = Cell{trimmed(e.revenue), e.revenue, true};
        subscribers.cells[y] = Cell{trimmed(e.subscribers), e.subscribers, true};
      } catch (const Error&) {
      }
    }
    if (!revenue.cells.empty()) {
      sec.rows.push_back(std::move(revenue));
      sec.rows.push_back(std::move(subscribers));
    }
  }
  compare_printed(t, sec, 0.01, 0.01, 0.01);

  // The prose puts "about 25M subscribers and $11B" on the worldwide 2002
  // market; set those against the world cells.
  for (const Row& row : sec.rows) {
    if (row.metric != "potential_revenue.world" && row.metric != "potential_subscribers.world") continue;
    auto c = row.cells.find(2002);
    if (c == row.cells.end()) continue;
    double claimed = row.metric == "potential_revenue.world" ? 11 : 25;
    if (std::fabs(c->second.value - claimed) > 0.5)
      sec.claims.push_back(Mismatch{row.metric, row.unit, 2002, c->second.value, claimed});
  }
  return sec;
}

Section echo_section(const MarketTable& t) {
  Section sec{t.name, all_years(t), {}, {}, {}};
  for (const auto& m : t.metrics()) {
    if (!is_printed(m)) sec.rows.push_back(raw_row(t, m));
  }
  return sec;
}

std::string closest_row(const Section& sec, const Mismatch& claim) {
  std::string best;
  double gap = 0;
  for (const Row& row : sec.rows) {
    if (row.kind != "derived" || row.unit != claim.unit || base_of(row.metric) != base_of(claim.metric)) continue;
    auto c = row.cells.find(claim.year);
    if (c == row.cells.end()) continue;
    double d = std::fabs(c->second.value - claim.printed);
    if (best.empty() || d < gap) {
      best = row.metric;
      gap = d;
    }
  }
  return best;
}

std::string render_text(const std::vector<Section>& sections) {
  std::string out;
  for (const Section& sec : sections) {
    std::size_t name_w = 6, unit_w = 4, cell_w = 6;
    for (const Row& r : sec.rows) {
      name_w = std::max(name_w, r.metric.size());
      unit_w = std::max(unit_w, r.unit.size());
      for (const auto& [y, c] : r.cells) cell_w = std::max(cell_w, c.text.size());
    }
    if (!out.empty()) out += '\n';
    out += "[" + sec.table + "]\n";
    out += fmt::format("{:<{}}  {:<{}}", "metric", name_w, "unit", unit_w);
    for (int y : sec.years) out += fmt::format("  {:>{}}", y, cell_w);
    out += '\n';
    for (const Row& r : sec.rows) {
      std::string line = fmt::format("{:<{}}  {:<{}}", r.metric, name_w, r.unit, unit_w);
      for (int y : sec.years) {
        auto c = r.cells.find(y);
        line += fmt::format("  {:>{}}", c == r.cells.end() ? "-" : c->second.text, cell_w);
      }
      out += line + '\n';
    }
    for (const Mismatch& m : sec.mismatches) {
      out += fmt::format("note: {} {} computes to {} from the component rows; the figure prints {}\n", m.metric, m.year,
                         trimmed(m.computed), trimmed(m.printed));
    }
    for (const Mismatch& m : sec.claims) {
      std::string match = closest_row(sec, m);
      out += fmt::format("note: the text gives about {} for {} {}; the table has {}", trimmed(m.printed), m.metric,
                         m.year, trimmed(m.computed));
      if (!match.empty() && match != m.metric) {
        const Row* row = nullptr;
        for (const Row& r : sec.rows) {
          if (r.metric == match) row = &r;
        }
        out += fmt::format(", and {} is {}", match, row->cells.at(m.year).text);
      }
      out += '\n';
    }
  }
  return out;
}

std::string render_csv(const std::vector<Section>& sections) {
  std::string out = "table,kind,metric,unit,year,value,reference\n";
  for (const Section& sec : sections) {
    for (const Row& r : sec.rows) {
      for (const auto& [y, c] : r.cells) out += fmt::format("{},{},{},{},{},{},\n", sec.table, r.kind, r.metric, r.unit, y, c.text);
    }
    for (const Mismatch& m : sec.mismatches) {
      out += fmt::format("{},mismatch,{},{},{},{},{}\n", sec.table, m.metric, m.unit, m.year, trimmed(m.computed),
                         trimmed(m.printed));
    }
    for (const Mismatch& m : sec.claims) {
      out += fmt::format("{},text_claim,{},{},{},{},{}\n", sec.table, m.metric, m.unit, m.year, trimmed(m.computed),
                         trimmed(m.printed));
    }
  }
  return out;
}

std::vector<std::string> split_csv(const std::string& line) {
  using Tok = boost::tokenizer<boost::escaped_list_separator<char>>;
  Tok tok(line);
  return {tok.begin(), tok.end()};
}

}  // namespace

bool MarketTable::has(const std::string& metric, int year) const {
  auto it = rows.find(metric);
  return it != rows.end() && it->second.count(year);
}

double MarketTable::value(const std::string& metric, int year) const {
  auto it = rows.find(metric);
  if (it == rows.end()) fail(Errc::MissingYear, name + ": no metric " + metric);
  auto v = it->second.find(year);
  if (v == it->second.end()) fail(Errc::MissingYear, name + ": " + metric + " has no " + std::to_string(year));
  return v->second;
}

std::vector<int> MarketTable::years(const std::string& metric) const {
  std::vector<int> out;
  auto it = rows.find(metric);
  if (it == rows.end()) return out;
  for (const auto& [y, v] : it->second) out.push_back(y);
  return out;
}

std::vector<std::string> MarketTable::metrics() const {
  std::vector<std::string> out;
  for (const auto& [m, series] : rows) out.push_back(m);
  return out;
}

double round_half_up(double value, int decimals) {
  double scale = std::pow(10.0, decimals);
  return std::floor(value * scale + 0.5 + 1e-9) / scale;
}

double growth_rate(const MarketTable& table, const std::string& metric, int year) {
  double base = table.value(metric, year - 1);
  double now = table.value(metric, year);
  if (base <= 0) fail(Errc::ZeroBase, metric + " " + std::to_string(year - 1));
  return round_half_up(100.0 * (now - base) / base, 1);
}

double share_of(const MarketTable& table, const std::string& numerator, const std::string& denominator, int year) {
  double num = table.value(numerator, year);
  double den = table.value(denominator, year);
  if (den <= 0) fail(Errc::ZeroBase, denominator + " " + std::to_string(year));
  return round_half_up(100.0 * num / den, 2);
}

PotentialMarketEstimate potential_market(const PotentialMarketInputs& in) {
  if (!(in.penetration > 0 && in.penetration <= 1))
    fail(Errc::BadPenetration, "penetration " + fmt::format("{}", in.penetration) + " is outside (0, 1]");
  for (double v : {in.total_toll, in.mobile_revenue, in.other_revenue, in.main_lines, in.mobile_subscribers,
                   in.internet_users}) {
    if (v < 0) fail(Errc::BadPenetration, "negative input " + fmt::format("{}", v));
  }
  return PotentialMarketEstimate{in.penetration * (in.total_toll + in.mobile_revenue + in.other_revenue),
                                 in.penetration * (in.main_lines + in.mobile_subscribers + in.internet_users)};
}

PotentialMarketInputs potential_inputs(const MarketTable& table, const std::string& region, int year,
                                       double penetration) {
  auto v = [&](const char* base) { return table.value(std::string(base) + "." + region, year); };
  return PotentialMarketInputs{v("total_toll"),         v("mobile_revenue"), v("other_revenue"), v("main_lines"),
                               v("mobile_subscribers"), v("internet_users"), penetration};
}

MarketTable parse_market_csv(std::string name, std::string_view text, bool contiguous) {
  MarketTable table;
  table.name = std::move(name);
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  bool header = false;
  auto bad = [&](const std::string& what) {
    fail(Errc::FixtureError, table.name + " line " + std::to_string(line_no) + ": " + what);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cols;
    try {
      cols = split_csv(line);
    } catch (const boost::escaped_list_error& e) {
      bad(e.what());
    }
    if (!header) {
      if (cols != std::vector<std::string>{"metric", "unit", "year", "value"})
        bad("expected header metric,unit,year,value");
      header = true;
      continue;
    }
    if (cols.size() != 4) bad("expected 4 columns, got " + std::to_string(cols.size()));
    const std::string& metric = cols[0];
    if (metric.empty() || cols[1].empty()) bad("empty metric or unit");
    int year = 0;
    auto [yp, yec] = std::from_chars(cols[2].data(), cols[2].data() + cols[2].size(), year);
    if (cols[2].empty() || yec != std::errc() || yp != cols[2].data() + cols[2].size()) bad("bad year '" + cols[2] + "'");
    double value = 0;
    try {
      std::size_t used = 0;
      value = std::stod(cols[3], &used);
      if (used != cols[3].size()) throw std::invalid_argument(cols[3]);
    } catch (const std::exception&) {
      bad("bad value '" + cols[3] + "'");
    }
    if (!(value >= 0)) bad("negative value for " + metric);
    auto [unit, fresh] = table.units.emplace(metric, cols[1]);
    if (!fresh && unit->second != cols[1]) bad(metric + " changes unit");
    if (!table.rows[metric].emplace(year, value).second) bad("duplicate " + metric + " " + cols[2]);
  }
  if (!header) fail(Errc::FixtureError, table.name + ": missing header");
  if (contiguous) {
    for (const auto& [metric, series] : table.rows) {
      if (!series.empty() && series.rbegin()->first - series.begin()->first + 1 != static_cast<int>(series.size()))
        fail(Errc::FixtureError, table.name + ": " + metric + " has a gap in its years");
    }
  }
  return table;
}

std::vector<MarketTable> load_market_fixtures(const std::string& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) fail(Errc::FixtureError, "no fixture directory " + dir);
  std::vector<MarketTable> tables;
  for (const char* name : kFixtureNames) {
    fs::path path = fs::path(dir) / (std::string(name) + ".csv");
    std::ifstream in(path);
    if (!in) fail(Errc::FixtureError, "missing " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    tables.push_back(parse_market_csv(name, buf.str(), std::string_view(name) != "fig3_2"));
  }
  return tables;
}

std::vector<MarketTable> builtin_market_fixtures() {
  std::vector<MarketTable> tables;
  for (const char* name : kFixtureNames) {
    tables.push_back(parse_market_csv(name, embedded::market_csv(name), std::string_view(name) != "fig3_2"));
  }
  return tables;
}

std::string market_report(const std::vector<MarketTable>& tables, ReportFormat format, double penetration) {
  if (!(penetration > 0 && penetration <= 1))
    fail(Errc::BadPenetration, "penetration " + fmt::format("{}", penetration) + " is outside (0, 1]");
  if (tables.empty()) return {};
  std::vector<Section> sections;
  for (const auto& t : tables) {
    if (t.name == "fig3_1" || t.name == "fig3_3") {
      sections.push_back(growth_section(t));
    } else if (t.name == "fig3_2") {
      sections.push_back(potential_section(t, penetration));
    } else {
      sections.push_back(echo_section(t));
    }
  }
  return format == ReportFormat::Text ? render_text(sections) : render_csv(sections);
}

}  // namespace enumdesk
