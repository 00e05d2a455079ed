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

// Acceptance runner. Prints one line per criterion:
//   criterion <n> PASS|FAIL <name>: <detail>
// and exits non-zero when any selected criterion fails.

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "enumdesk/e164.h"
#include "enumdesk/error.h"
#include "enumdesk/market.h"
#include "enumdesk/naptr.h"
#include "enumdesk/scenario.h"

namespace {

using namespace enumdesk;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fixed(double v, int decimals) {
  std::ostringstream out;
  out.setf(std::ios::fixed);
  out.precision(decimals);
  out << v;
  return out.str();
}

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

ScenarioConfig model_config(int m) { return parse_scenario_config(builtin_scenario(m)); }

std::unique_ptr<Topology> run_script(const ScenarioConfig& cfg, const std::string& script) {
  auto topo = build_topology(cfg);
  run_events(*topo, parse_script(script, cfg.aliases));
  return topo;
}

const LogRecord* last_event(const Topology& topo) {
  const auto& records = topo.log().records();
  for (auto it = records.rbegin(); it != records.rend(); ++it) {
    if (it->kind == "event") return &*it;
  }
  return nullptr;
}

Fields step(Topology& topo, const std::string& line) {
  for (const auto& ev : parse_script(line, topo.config().aliases)) run_event(topo, ev);
  const LogRecord* r = last_event(topo);
  return r ? r->fields : Fields{};
}

const MarketTable& market_table(const std::string& name) {
  static const std::vector<MarketTable> tables = builtin_market_fixtures();
  for (const auto& t : tables) {
    if (t.name == name) return t;
  }
  fail(Errc::FixtureError, "no table " + name);
}

// 1 ------------------------------------------------------------------------

Outcome worked_example() {
  auto start = Clock::now();
  std::string got = to_domain(parse_number("+1-315-443-4473")).render();
  double ms = elapsed_ms(start);
  const std::string want = "3.7.4.4.3.4.4.5.1.3.1.e164.arpa";
  return {got == want && ms < 1.0, got + " in " + fixed(ms, 3) + " ms"};
}

// 2 ------------------------------------------------------------------------

Outcome potential_market_cells() {
  struct Cell {
    const char* region;
    int year;
    double revenue;
    double subscribers;
  };
  const Cell printed[] = {
      {"world", 2000, 30.5, 96.55},
      {"world", 2002, 36, 130.75},
      {"usa", 2000, 10.05, 17.75},
      {"usa", 2002, 11.15, 24.9},
  };
  const MarketTable& t = market_table("fig3_2");
  int matched = 0;
  std::string misses;
  for (const auto& c : printed) {
    PotentialMarketEstimate e = potential_market(potential_inputs(t, c.region, c.year));
    auto check = [&](const char* what, double got, double want) {
      if (std::fabs(got - want) <= 0.01 + 1e-9) {
        ++matched;
        return;
      }
      misses += std::string(misses.empty() ? "" : "; ") + c.region + " " + std::to_string(c.year) + " " + what +
                " " + fixed(got, 2) + " vs printed " + fixed(want, 2);
    };
    check("revenue", e.revenue, c.revenue);
    check("subscribers", e.subscribers, c.subscribers);
  }
  return {matched == 8, std::to_string(matched) + "/8 cells within 0.01" + (misses.empty() ? "" : " (" + misses + ")")};
}

// 3 ------------------------------------------------------------------------

Outcome growth_table_cells() {
  const MarketTable& t = market_table("fig3_1");
  const std::map<std::string, std::vector<double>> growth{
      {"world", {35.2, 29.7, 25.8, 26.6}},
      {"usa", {24.7, 24.4, 16.2, 12.9}},
  };
  const std::map<std::string, std::vector<double>> share{
      {"world", {2.89, 4.72, 7.2, 10.31, 13.99}},
      {"usa", {3.74, 5.98, 8.95, 12.64, 16.99}},
  };
  int checked = 0, ok = 0;
  std::string misses;
  for (const auto& [region, values] : growth) {
    for (std::size_t i = 0; i < values.size(); ++i) {
      int year = 2001 + static_cast<int>(i);
      double got = growth_rate(t, "internet_users." + region, year);
      ++checked;
      if (std::fabs(got - values[i]) <= 0.05 + 1e-9) {
        ++ok;
      } else {
        misses += " growth " + region + " " + std::to_string(year) + "=" + fixed(got, 1);
      }
    }
  }
  for (const auto& [region, values] : share) {
    for (std::size_t i = 0; i < values.size(); ++i) {
      int year = 2000 + static_cast<int>(i);
      double got = share_of(t, "pc_to_phone_users." + region, "internet_users." + region, year);
      ++checked;
      if (std::fabs(got - values[i]) <= 0.005 + 1e-9) {
        ++ok;
      } else {
        misses += " share " + region + " " + std::to_string(year) + "=" + fixed(got, 2);
      }
    }
  }
  return {ok == checked, std::to_string(ok) + "/" + std::to_string(checked) + " cells" + misses};
}

// 4 ------------------------------------------------------------------------

std::string random_label(std::mt19937_64& rng) {
  static const std::string alphabet = "abcdefghijklmnopqrstuvwxyz0123456789";
  std::uniform_int_distribution<std::size_t> len(1, 10), pick(0, alphabet.size() - 1);
  std::string s;
  for (std::size_t i = len(rng); i > 0; --i) s += alphabet[pick(rng)];
  return s;
}

Outcome roundtrip_property() {
  std::mt19937_64 rng(20260401);
  std::uniform_int_distribution<std::size_t> length(kMinE164Digits, kMaxE164Digits), labels(1, 3);
  std::uniform_int_distribution<int> digit(0, 9), lead(1, 9);
  std::vector<ApexConfig> apexes{ApexConfig::standard(), ApexConfig::make("e164.org"), ApexConfig::make("nrenum.net")};
  for (int i = 0; i < 20; ++i) {
    std::string apex;
    for (std::size_t n = labels(rng); n > 0; --n) apex += (apex.empty() ? "" : ".") + random_label(rng);
    apexes.push_back(ApexConfig::make(apex));
  }
  std::uniform_int_distribution<std::size_t> which(0, apexes.size() - 1);

  int failures = 0;
  std::string first_failure;
  auto start = Clock::now();
  for (int i = 0; i < 10000; ++i) {
    std::string digits(1, static_cast<char>('0' + lead(rng)));
    for (std::size_t n = length(rng); digits.size() < n;) digits += static_cast<char>('0' + digit(rng));
    const ApexConfig& apex = apexes[which(rng)];
    std::string expected_domain;
    for (auto it = digits.rbegin(); it != digits.rend(); ++it) expected_domain += std::string(1, *it) + ".";
    expected_domain += apex.apex;
    try {
      E164Number number = parse_number("+" + digits);
      EnumDomain domain = to_domain(number, apex);
      E164Number back = from_domain(domain.render(), apex);
      if (domain.render() != expected_domain || !(back == number)) {
        ++failures;
        if (first_failure.empty()) first_failure = digits + " @" + apex.apex;
      }
    } catch (const Error& e) {
      ++failures;
      if (first_failure.empty()) first_failure = digits + " @" + apex.apex + " " + e.what();
    }
  }
  double ms = elapsed_ms(start);
  return {failures == 0 && ms < 5000, "10000 numbers over " + std::to_string(apexes.size()) + " apexes, " +
                                          std::to_string(failures) + " failures, " + fixed(ms, 1) + " ms" +
                                          (first_failure.empty() ? "" : " first: " + first_failure)};
}

// 5 ------------------------------------------------------------------------

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

Outcome naptr_selection() {
  std::mt19937_64 rng(5150);
  const std::vector<std::string> services{"E2U+sip", "e2u+SIP", "E2U+mailto", "E2U+tel", "E2U+web:http"};
  const std::vector<std::string> selectors{"*", "E2U+sip", "E2U+MAILTO", "E2U+tel", "E2U+fax"};
  std::uniform_int_distribution<int> size(0, 6), order(1, 3), pref(1, 3), coin(0, 1);
  std::uniform_int_distribution<std::size_t> svc(0, services.size() - 1), sel(0, selectors.size() - 1);
  E164Number number = parse_number("+13154434473");

  int mismatches = 0;
  std::size_t records_seen = 0;
  for (int round = 0; round < 1000; ++round) {
    NaptrRecordSet set{number, {}};
    for (int i = size(rng); i > 0; --i) {
      NaptrRecord r;
      r.order = static_cast<std::uint16_t>(order(rng) * 10);
      r.preference = static_cast<std::uint16_t>(pref(rng) * 10);
      r.flags = "u";
      r.service = services[svc(rng)];
      r.regexp = "!^.*$!sip:r" + std::to_string(set.records.size()) + "@example.com!";
      r.visibility = coin(rng) ? Visibility::Restricted : Visibility::Public;
      set.records.push_back(r);
    }
    ServiceSelector selector = ServiceSelector::parse(selectors[sel(rng)]);
    Visibility requester = coin(rng) ? Visibility::Restricted : Visibility::Public;

    std::vector<NaptrRecord> expected;
    for (const auto& r : set.records) {
      if (requester == Visibility::Public && r.visibility == Visibility::Restricted) continue;
      if (!selector.wildcard() && lower(r.service) != lower(selector.to_string())) continue;
      expected.push_back(r);
    }
    std::stable_sort(expected.begin(), expected.end(), [](const NaptrRecord& a, const NaptrRecord& b) {
      return std::tie(a.order, a.preference) < std::tie(b.order, b.preference);
    });
    records_seen += set.records.size();
    if (select(set, selector, requester) != expected) ++mismatches;
  }
  return {mismatches == 0, "1000 sets (" + std::to_string(records_seen) + " records), " +
                               std::to_string(mismatches) + " mismatches against stable-sort-and-filter"};
}

// 6 ------------------------------------------------------------------------

Outcome model_transparency() {
  std::string script(builtin_canonical_script());
  std::vector<std::string> reference;
  std::string differing;
  for (int m = 1; m <= 6; ++m) {
    auto topo = run_script(model_config(m), script);
    auto outputs = resolve_outputs(topo->log());
    if (m == 1) {
      reference = outputs;
    } else if (outputs != reference) {
      differing += " " + std::to_string(m);
    }
  }
  std::size_t uris = 0;
  for (const auto& line : reference) uris += static_cast<std::size_t>(std::count(line.begin(), line.end(), '|')) - 2;
  bool ok = differing.empty() && !reference.empty() && uris > 0;
  return {ok, std::to_string(reference.size()) + " resolve outputs, " + std::to_string(uris) + " URIs" +
                  (differing.empty() ? ", identical across models 1-6" : ", differ in model" + differing)};
}

// 7 ------------------------------------------------------------------------

Outcome value_flow_fidelity() {
  using Pairs = std::set<std::pair<std::string, std::string>>;
  const std::map<int, Pairs> stated{
      {1, {{"User", "TSP"}, {"ASP", "TSP"}, {"TSP", "Registry"}}},
      {2, {{"User", "ASP"}, {"ASP", "Registry"}}},
      {3, {{"User", "IndependentRegistrar"}, {"IndependentRegistrar", "Registry"}}},
      {6, {{"User", "IndependentRegistrar"}, {"IndependentRegistrar", "Registry"}}},
  };
  std::string detail;
  bool ok = true;
  for (const auto& [m, pairs] : stated) {
    auto topo = run_script(model_config(m), std::string(builtin_canonical_script()));
    Pairs got = value_flow(*topo).role_pairs();
    bool match = got == pairs;
    ok = ok && match;
    detail += " m" + std::to_string(m) + (match ? "=ok" : "=differs{");
    if (!match) {
      for (const auto& [a, b] : got) detail += a + ">" + b + ",";
      detail += "}";
    }
  }
  return {ok, "role pairs" + detail};
}

// 8 ------------------------------------------------------------------------

std::string multiset_of(std::vector<std::string> lines) {
  std::sort(lines.begin(), lines.end());
  std::string out;
  for (const auto& l : lines) out += l + "\n";
  return out;
}

std::string record_multiset(const std::vector<NaptrRecord>& records) {
  std::vector<std::string> lines;
  for (const auto& r : records) lines.push_back(r.to_zone_line());
  return multiset_of(lines);
}

const std::string kNumber = "+13154434473";

std::string subscribe_script() {
  return "step assign $T1 alice " + kNumber + "\nstep subscribe $R1 alice " + kNumber + " tsp=$T1\n";
}

Outcome transfer_conservation() {
  std::mt19937_64 rng(88);
  const std::vector<std::string> services{"E2U+sip", "E2U+mailto", "E2U+tel", "E2U+web:http"};
  std::uniform_int_distribution<int> model(1, 6), count(0, 5), key(1, 4), coin(0, 3);
  std::uniform_int_distribution<std::size_t> svc(0, services.size() - 1);
  E164Number number = parse_number(kNumber);

  int conserved = 0;
  std::string failure;
  for (int i = 0; i < 500; ++i) {
    int m = model(rng);
    ScenarioConfig cfg = model_config(m);
    auto topo = build_topology(cfg);
    step(*topo, subscribe_script());
    // Later writes to the same key replace earlier ones.
    std::map<std::tuple<std::string, int, int>, std::string> expected;
    for (int n = count(rng); n > 0; --n) {
      std::string service = services[svc(rng)];
      int order = key(rng) * 10, pref = key(rng) * 10;
      std::string zone = std::to_string(order) + " " + std::to_string(pref) + " \"u\" \"" + service +
                         "\" \"!^.*$!x" + std::to_string(i) + "-" + std::to_string(n) + "@example.com!\" .";
      if (coin(rng) == 0) zone += " restricted";
      Fields out = step(*topo, "step provision $R1 alice " + kNumber + " " + zone);
      if (out.get_or("status", "") == "ok") expected[{service, order, pref}] = parse_record(zone).to_zone_line();
    }
    std::vector<std::string> lines;
    for (const auto& [k, line] : expected) lines.push_back(line);

    Fields out = step(*topo, "step transfer $R2 alice " + kNumber + " tsp=$T1");
    topo->sim().settle();
    const std::string& from = cfg.aliases.at("R1");
    const std::string& to = cfg.aliases.at("R2");
    const auto* entry = topo->registrar(to)->state().find(number);
    bool ok = out.get_or("status", "") == "ok" && out.get_or("state", "") == "Complete" && out.all("warning").empty() &&
              entry && record_multiset(entry->records) == multiset_of(lines) &&
              topo->registrar(from)->state().find(number) == nullptr &&
              topo->registry(topo->registrar(to)->context().home_registry)->state().lookup_delegation(number).registrar ==
                  to &&
              assert_invariants(*topo).find("transfer_conservation")->passed;
    if (ok) {
      ++conserved;
    } else if (failure.empty()) {
      failure = " first failure: script " + std::to_string(i) + " model " + std::to_string(m) + " " +
                out.get_or("status", "") + " " + out.get_or("detail", "");
    }
  }

  // Old registrar unreachable for the whole transfer.
  int outage_ok = 0;
  for (int m = 1; m <= 6; ++m) {
    ScenarioConfig cfg = model_config(m);
    auto topo = build_topology(cfg);
    step(*topo, subscribe_script());
    step(*topo, "step provision $R1 alice " + kNumber + R"( 10 10 "u" "E2U+sip" "!^.*$!sip:a@example.com!" .)");
    std::uint64_t now = topo->sim().tick();
    topo->sim().set_faults({FaultWindow{FaultWindow::Kind::Offline, "registrar:" + cfg.aliases.at("R1"), now, now + 5}});
    Fields out = step(*topo, "step transfer $R2 alice " + kNumber + " tsp=$T1 as=t1");
    topo->sim().settle();
    const auto* entry = topo->registrar(cfg.aliases.at("R2"))->state().find(number);
    if (out.get_or("state", "") == "Complete" && !out.all("warning").empty() && entry && entry->records.empty())
      ++outage_ok;
  }

  // Dispute at each state before Complete.
  int disputes_ok = 0, disputes = 0;
  for (int m = 1; m <= 6; ++m) {
    for (const char* until : {"Requested", "OldNotified", "RecordsMigrated", "RegistryUpdated"}) {
      ++disputes;
      ScenarioConfig cfg = model_config(m);
      auto topo = build_topology(cfg);
      step(*topo, subscribe_script());
      step(*topo, "step provision $R1 alice " + kNumber + R"( 10 10 "u" "E2U+sip" "!^.*$!sip:a@example.com!" .)");
      Fields started = step(*topo, "step transfer $R2 alice " + kNumber + " tsp=$T1 as=t1 until=" + until);
      Fields disputed = step(*topo, "step dispute $R1 t1 not requested by the user");
      topo->sim().settle();
      const std::string& old_registrar = cfg.aliases.at("R1");
      const auto& home = topo->registrar(old_registrar)->context().home_registry;
      const auto* entry = topo->registrar(old_registrar)->state().find(number);
      bool rolled_back = started.get_or("state", "") == until && disputed.get_or("state", "") == "Disputed" &&
                         topo->registry(home)->state().lookup_delegation(number).registrar == old_registrar &&
                         entry && entry->records.size() == 1 &&
                         topo->resolver().resolve(kNumber).uris == std::vector<std::string>{"sip:a@example.com"};
      if (rolled_back) ++disputes_ok;
    }
  }
  bool ok = conserved == 500 && outage_ok == 6 && disputes_ok == disputes;
  return {ok, std::to_string(conserved) + "/500 transfers conserved, " + std::to_string(outage_ok) +
                  "/6 outage transfers complete empty with warning, " + std::to_string(disputes_ok) + "/" +
                  std::to_string(disputes) + " disputes rolled back" + failure};
}

// 9 ------------------------------------------------------------------------

// Every registry's copy of every delegation equals the owner's.
std::size_t replica_differences(Topology& topo) {
  std::size_t differences = 0;
  for (const auto& [id, registry] : topo.registries()) {
    for (const auto& [number, d] : registry->state().delegations()) {
      if (d.owner != id) continue;
      for (const auto& [other_id, other] : topo.registries()) {
        if (other_id == id) continue;
        auto it = other->state().delegations().find(number);
        if (it == other->state().delegations().end() || !(it->second == d)) ++differences;
      }
    }
  }
  return differences;
}

std::string random_multi_registry_script(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> count(3, 8), coin(0, 1);
  std::string script;
  for (int i = 0; i < count(rng); ++i) {
    std::string number = "+1315443" + std::to_string(5000 + i);
    std::string user = "u" + std::to_string(i);
    std::string reg = coin(rng) ? "$R1" : "$R2";
    std::string other = reg == "$R1" ? "$R2" : "$R1";
    script += "step assign $T1 " + user + " " + number + "\n";
    script += "step subscribe " + reg + " " + user + " " + number + " tsp=$T1\n";
    script += "step provision " + reg + " " + user + " " + number + R"( 10 10 "u" "E2U+sip" "!^.*$!sip:)" + user +
              "@example.com!\" .\n";
    bool transferred = coin(rng);
    if (transferred) script += "step transfer " + other + " " + user + " " + number + " tsp=$T1\n";
    if (coin(rng)) script += "step disconnect " + (transferred ? other : reg) + " " + user + " " + number + " enum_only\n";
  }
  return script;
}

Outcome multi_registry_convergence() {
  std::mt19937_64 rng(4242);
  int runs = 0, converged = 0;
  for (int m = 4; m <= 6; ++m) {
    std::vector<std::string> scripts{std::string(builtin_canonical_script())};
    for (int i = 0; i < 30; ++i) scripts.push_back(random_multi_registry_script(rng));
    for (const auto& script : scripts) {
      ++runs;
      auto topo = run_script(model_config(m), script);
      std::size_t owned = 0;
      for (const auto& [id, registry] : topo->registries()) {
        for (const auto& [number, d] : registry->state().delegations()) owned += d.owner == id;
      }
      if (owned > 0 && replica_differences(*topo) == 0 && peering_lag(topo->log()).pending == 0) ++converged;
    }
  }
  int detected = 0;
  for (int m = 4; m <= 6; ++m) {
    ScenarioConfig cfg = model_config(m);
    for (const auto& r : cfg.registries)
      cfg.faults.push_back(FaultSpec{FaultWindow::Kind::DropPeering, r.id, 0, 100000});
    auto topo = run_script(cfg, std::string(builtin_canonical_script()));
    InvariantReport report = assert_invariants(*topo);
    if (replica_differences(*topo) > 0 && !report.all_passed() && !report.find("replica_consistency")->passed)
      ++detected;
  }
  return {converged == runs && detected == 3, std::to_string(converged) + "/" + std::to_string(runs) +
                                                  " runs converged in models 4-6, peering fault reported in " +
                                                  std::to_string(detected) + "/3"};
}

// 10 -----------------------------------------------------------------------

struct OracleGrant {
  std::string grantee;
  std::set<std::string> rights;
  std::string scope;  // "" is wildcard
};

struct AccessOracle {
  bool tsp_family = false;
  std::string user = "alice";
  std::string registrar;
  std::string tsp;
  std::map<std::string, OracleGrant> grants;
  std::set<std::tuple<std::string, int, int>> keys;
  std::map<std::tuple<std::string, int, int>, bool> restricted;

  static bool network(const std::string& service) { return service == "E2U+sip" || service == "E2U+tel"; }

  bool covers(const OracleGrant& g, const std::string& actor, const std::string& right,
              const std::string& service) const {
    return g.grantee == actor && g.rights.count(right) && (g.scope.empty() || lower(g.scope) == lower(service));
  }

  bool may_write(const std::string& actor, const std::string& service, bool replacing) const {
    if (actor == user || actor == registrar) return true;
    if (tsp_family && actor == tsp && network(service)) return true;
    for (const auto& [id, g] : grants) {
      if (covers(g, actor, replacing ? "change" : "provision", service)) return true;
    }
    return false;
  }

  bool may_read_restricted(const std::string& actor, const std::string& service) const {
    if (actor == user || actor == registrar) return true;
    if (tsp_family && actor == tsp && network(service)) return true;
    for (const auto& [id, g] : grants) {
      if (covers(g, actor, "access", service)) return true;
    }
    return false;
  }

  std::size_t visible(const std::string& actor) const {
    std::size_t n = 0;
    for (const auto& k : keys) {
      if (!restricted.at(k) || may_read_restricted(actor, std::get<0>(k))) ++n;
    }
    return n;
  }
};

Outcome access_soundness() {
  std::mt19937_64 rng(1010);
  const std::vector<std::string> services{"E2U+sip", "E2U+mailto", "E2U+tel"};
  const std::vector<std::string> scopes{"*", "E2U+sip", "E2U+mailto", "e2u+TEL"};
  const std::vector<std::string> rights{"provision", "access", "change"};
  std::uniform_int_distribution<int> length(4, 14), op(0, 9), model(1, 6), key(1, 2), coin(0, 1);
  std::uniform_int_distribution<std::size_t> svc(0, services.size() - 1), scope(0, scopes.size() - 1);

  std::size_t admitted_forbidden = 0, denied_allowed = 0, read_mismatch = 0, writes = 0, reads = 0,
              invariant_failures = 0;
  for (int seq = 0; seq < 1000; ++seq) {
    int m = model(rng);
    ScenarioConfig cfg = model_config(m);
    auto topo = build_topology(cfg);
    step(*topo, subscribe_script());
    AccessOracle oracle;
    oracle.tsp_family = m == 1 || m == 4;
    oracle.registrar = cfg.aliases.at("R1");
    oracle.tsp = cfg.aliases.at("T1");
    const std::vector<std::string> actors{"alice", "bob", cfg.aliases.at("A1"), cfg.aliases.at("T1"),
                                          cfg.aliases.at("T2"), oracle.registrar};
    std::uniform_int_distribution<std::size_t> who(0, actors.size() - 1);
    int labels = 0;

    for (int n = length(rng); n > 0; --n) {
      int o = op(rng);
      if (o < 2) {
        std::string granted;
        for (const auto& r : rights) {
          if (coin(rng)) granted += (granted.empty() ? "" : ",") + r;
        }
        if (granted.empty()) granted = "provision";
        std::string grantee = actors[who(rng)];
        std::string sc = scopes[scope(rng)];
        std::string label = "g" + std::to_string(++labels);
        Fields out = step(*topo, "step grant $R1 alice " + kNumber + " " + grantee + " " + granted + " " + sc +
                                     " as=" + label);
        if (out.get_or("status", "") == "ok") {
          OracleGrant g{grantee, {}, sc == "*" ? "" : sc};
          std::istringstream in(granted);
          for (std::string r; std::getline(in, r, ',');) g.rights.insert(r);
          oracle.grants[label] = g;
        }
      } else if (o < 3 && !oracle.grants.empty()) {
        auto it = oracle.grants.begin();
        std::advance(it, static_cast<long>(rng() % oracle.grants.size()));
        Fields out = step(*topo, "step revoke $R1 alice " + it->first);
        if (out.get_or("status", "") == "ok") oracle.grants.erase(it);
      } else if (o < 8) {
        std::string actor = actors[who(rng)];
        std::string service = services[svc(rng)];
        int order = key(rng) * 10, pref = key(rng) * 10;
        bool hidden = coin(rng);
        auto k = std::make_tuple(service, order, pref);
        bool replacing = oracle.keys.count(k) != 0;
        bool allowed = oracle.may_write(actor, service, replacing);
        Fields out = step(*topo, "step provision $R1 " + actor + " " + kNumber + " " + std::to_string(order) + " " +
                                     std::to_string(pref) + " \"u\" \"" + service + "\" \"!^.*$!x:" + actor + "!\" ." +
                                     (hidden ? " restricted" : ""));
        bool written = out.get_or("status", "") == "ok";
        ++writes;
        if (written && !allowed) ++admitted_forbidden;
        if (!written && allowed) ++denied_allowed;
        if (written) {
          oracle.keys.insert(k);
          oracle.restricted[k] = hidden;
        }
      } else {
        std::string actor = actors[who(rng)];
        Fields out = step(*topo, "step get $R1 " + actor + " " + kNumber);
        ++reads;
        if (out.all("record").size() != oracle.visible(actor)) ++read_mismatch;
      }
    }
    topo->mark_complete(true);
    if (!assert_invariants(*topo).find("access_soundness")->passed) ++invariant_failures;
  }

  // Planted violation through the harness backdoor.
  ScenarioConfig cfg = model_config(1);
  auto topo = run_script(cfg, subscribe_script() + "step backdoor_write $R1 mallory " + kNumber +
                                  R"( 5 5 "u" "E2U+sip" "!^.*$!sip:evil@example.com!" .)" + "\n");
  const LogRecord* planted = last_event(*topo);
  InvariantReport report = assert_invariants(*topo);
  const InvariantResult* access = report.find("access_soundness");
  bool caught = access && !access->passed && planted &&
                access->counterexamples == std::vector<std::uint64_t>{planted->id};

  bool ok = admitted_forbidden == 0 && denied_allowed == 0 && read_mismatch == 0 && invariant_failures == 0 && caught;
  return {ok, std::to_string(writes) + " writes, " + std::to_string(reads) + " reads over 1000 sequences: " +
                  std::to_string(admitted_forbidden) + " forbidden admitted, " + std::to_string(denied_allowed) +
                  " permitted denied, " + std::to_string(read_mismatch) + " read mismatches, " +
                  std::to_string(invariant_failures) + " suite failures; planted violation " +
                  (caught ? "caught" : "missed")};
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria{
      {1, "worked-example", worked_example},
      {2, "potential-market-cells", potential_market_cells},
      {3, "growth-table-cells", growth_table_cells},
      {4, "domain-roundtrip", roundtrip_property},
      {5, "naptr-selection-oracle", naptr_selection},
      {6, "model-transparency", model_transparency},
      {7, "value-flow-fidelity", value_flow_fidelity},
      {8, "transfer-conservation", transfer_conservation},
      {9, "multi-registry-convergence", multi_registry_convergence},
      {10, "access-soundness", access_soundness},
  };

  CLI::App app{"enumdesk acceptance criteria"};
  std::vector<int> selected;
  app.add_option("--criterion", selected, "Criterion number (repeatable); default all")
      ->check(CLI::Range(1, static_cast<int>(criteria.size())));
  CLI11_PARSE(app, argc, argv);

  int failed = 0;
  for (const auto& c : criteria) {
    if (!selected.empty() && std::find(selected.begin(), selected.end(), c.id) == selected.end()) continue;
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::cout << "criterion " << c.id << " " << (o.pass ? "PASS" : "FAIL") << " " << c.name << ": " << o.detail
              << std::endl;
    if (!o.pass) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
