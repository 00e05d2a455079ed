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

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <tuple>

#include "enumdesk/error.h"
#include "enumdesk/scenario.h"
#include "enumdesk/tier_client.h"

namespace enumdesk {
namespace {

std::uint64_t cause_of(const LogRecord& r) {
  std::string c = r.fields.get_or("cause", "0");
  std::uint64_t v = 0;
  std::from_chars(c.data(), c.data() + c.size(), v);
  return v;
}

double amount_of(const std::string& s) {
  try {
    return std::stod(s);
  } catch (const std::exception&) {
    return 0;
  }
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::vector<std::string> split_words(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string w;
  while (in >> w) out.push_back(w);
  return out;
}

InvariantResult named(std::string name) {
  InvariantResult r;
  r.name = std::move(name);
  return r;
}

void add_counterexample(InvariantResult& r, std::uint64_t id) {
  r.passed = false;
  if (std::find(r.counterexamples.begin(), r.counterexamples.end(), id) == r.counterexamples.end())
    r.counterexamples.push_back(id);
}

// Last event that touched each number, for pointing at counterexamples.
std::map<std::string, std::uint64_t> last_event_per_number(const RunLog& log) {
  std::map<std::string, std::uint64_t> out;
  for (const auto& r : log.records()) {
    auto n = r.fields.get("number");
    if (!n) continue;
    out[std::string(*n)] = r.kind == "event" ? r.id : cause_of(r);
  }
  return out;
}

InvariantResult single_store(Topology& topo, const std::map<std::string, std::uint64_t>& last) {
  InvariantResult res = named("single_store");
  std::set<E164Number> in_flight;
  for (const auto& [id, reg] : topo.registrars()) {
    for (const auto& [tid, t] : reg->state().transfers()) {
      if (t.state != TransferState::Complete && t.state != TransferState::Disputed) in_flight.insert(t.number);
    }
  }
  std::map<E164Number, std::vector<std::string>> holders;
  for (const auto& [id, reg] : topo.registrars()) {
    for (const auto& [number, entry] : reg->state().entries()) holders[number].push_back(id);
  }
  for (const auto& [number, regs] : holders) {
    if (in_flight.count(number)) continue;
    bool bad = regs.size() > 1;
    if (!bad) {
      // The one holder must be the registrar the owning registry names.
      const Delegation* owner_copy = nullptr;
      for (const auto& [rid, registry] : topo.registries()) {
        auto it = registry->state().delegations().find(number);
        if (it != registry->state().delegations().end() && it->second.owner == rid) owner_copy = &it->second;
      }
      bad = !owner_copy || owner_copy->removed || owner_copy->registrar != regs.front();
    }
    if (bad) {
      auto it = last.find(number.full_digits());
      add_counterexample(res, it == last.end() ? 0 : it->second);
    }
  }
  return res;
}

InvariantResult transfer_conservation(const RunLog& log) {
  InvariantResult res = named("transfer_conservation");
  std::map<std::string, std::string> out_digest;
  std::map<std::string, std::pair<std::string, bool>> in_digest;
  std::map<std::string, std::string> final_state;
  std::map<std::string, std::uint64_t> cause;
  for (const auto& r : log.records()) {
    std::string t = r.fields.get_or("transfer", "");
    if (r.kind == "migrate_out") out_digest[t] = r.fields.get_or("digest", "");
    if (r.kind == "migrate_in") {
      in_digest[t] = {r.fields.get_or("digest", ""), r.fields.get_or("old_reachable", "0") == "1"};
      cause[t] = cause_of(r);
    }
    if (r.kind == "transfer_state") final_state[t] = r.fields.get_or("state", "");
  }
  for (const auto& [t, in] : in_digest) {
    if (final_state[t] != "Complete" || !in.second) continue;
    auto it = out_digest.find(t);
    if (it == out_digest.end() || it->second != in.first) add_counterexample(res, cause[t]);
  }
  return res;
}

// Independent access-matrix oracle: rebuilds subscriptions, grants and record
// keys from the log alone and re-judges every logged write.
InvariantResult access_soundness(const ScenarioConfig& cfg, const RunLog& log) {
  InvariantResult res = named("access_soundness");
  struct Sub {
    std::string user, tsp, registrar;
  };
  struct GrantRow {
    std::string registrar, number, grantee, scope;
    std::set<std::string> rights;
  };
  using Key = std::tuple<std::string, std::string, std::string>;
  std::map<std::string, Sub> subs;
  std::map<std::string, GrantRow> grants;
  std::map<std::pair<std::string, std::string>, std::set<Key>> keys;
  std::map<std::string, bool> reachable;

  for (const auto& r : log.records()) {
    const Fields& f = r.fields;
    std::string number = f.get_or("number", "");
    if (r.kind == "subscribe") {
      subs[number] = Sub{f.get_or("user", ""), f.get_or("tsp", ""), f.get_or("serving_registrar", "")};
      keys[{subs[number].registrar, number}].clear();
    } else if (r.kind == "grant") {
      GrantRow g{f.get_or("registrar", ""), number, f.get_or("grantee", ""), f.get_or("scope", "*"), {}};
      std::istringstream in(f.get_or("rights", ""));
      std::string right;
      while (std::getline(in, right, ',')) g.rights.insert(right);
      grants[f.get_or("grant", "")] = g;
    } else if (r.kind == "revoke") {
      grants.erase(f.get_or("grant", ""));
    } else if (r.kind == "migrate_in") {
      reachable[f.get_or("transfer", "")] = f.get_or("old_reachable", "0") == "1";
    } else if (r.kind == "transfer_state" && f.get_or("state", "") == "Complete") {
      std::string t = f.get_or("transfer", "");
      std::string from = f.get_or("from", ""), to = f.get_or("to", "");
      keys[{to, number}] = reachable[t] ? keys[{from, number}] : std::set<Key>{};
      if (subs.count(number)) subs[number].registrar = to;
    } else if (r.kind == "purge") {
      keys.erase({f.get_or("registrar", ""), number});
    } else if (r.kind == "disconnect") {
      keys.erase({f.get_or("serving_registrar", ""), number});
      subs.erase(number);
    } else if (r.kind == "write") {
      std::string reg = f.get_or("registrar", "");
      std::string actor = f.get_or("actor", "");
      std::string service = f.get_or("service", "");
      Key key{service, f.get_or("order", ""), f.get_or("preference", "")};
      auto& known = keys[{reg, number}];
      bool replacing = known.count(key) != 0;
      auto sub = subs.find(number);
      bool allowed = false;
      if (sub != subs.end() && sub->second.registrar == reg) {
        const Sub& s = sub->second;
        allowed = actor == s.user || actor == reg;
        if (!allowed && cfg.tsp_family() && actor == s.tsp) allowed = cfg.network_related_services.count(service) != 0;
        for (const auto& [gid, g] : grants) {
          if (allowed) break;
          if (g.registrar != reg || g.number != number || g.grantee != actor) continue;
          bool in_scope = g.scope == "*" || g.scope.empty() || lower(g.scope) == lower(service);
          allowed = in_scope && g.rights.count(replacing ? "change" : "provision");
        }
      }
      if (!allowed) add_counterexample(res, cause_of(r));
      known.insert(key);
    }
  }
  return res;
}

InvariantResult serial_monotonicity(const RunLog& log) {
  InvariantResult res = named("serial_monotonicity");
  std::map<std::pair<std::string, std::string>, std::uint64_t> seen;
  for (const auto& r : log.records()) {
    if (r.kind != "delegation") continue;
    auto key = std::make_pair(r.fields.get_or("registry", ""), r.fields.get_or("number", ""));
    std::uint64_t serial = static_cast<std::uint64_t>(amount_of(r.fields.get_or("serial", "0")));
    auto it = seen.find(key);
    if (it != seen.end() && serial <= it->second) add_counterexample(res, cause_of(r));
    seen[key] = serial;
  }
  return res;
}

InvariantResult billing_conservation(Topology& topo) {
  InvariantResult res = named("billing_conservation");
  const RunLog& log = topo.log();
  std::map<std::string, double> charged;
  std::map<std::string, std::size_t> charges, charged_ops;
  for (const auto& r : log.records()) {
    std::string registry = r.fields.get_or("registry", "");
    if (r.kind == "charge") {
      double amount = amount_of(r.fields.get_or("amount", "0"));
      charged[registry] += amount;
      ++charges[registry];
      const RegistryService* service = topo.registry(registry);
      std::string payer = r.fields.get_or("payer", "");
      bool accredited = service && service->state().options().accredited.count(payer);
      if (!accredited || std::abs(amount - topo.config().flat_fee) > 1e-9) add_counterexample(res, cause_of(r));
    } else if (r.kind == "delegation" && r.fields.get_or("charged", "0") == "1") {
      ++charged_ops[registry];
    }
  }
  for (const auto& [id, registry] : topo.registries()) {
    if (std::abs(registry->state().ledger_total() - charged[id]) > 1e-9 || charges[id] != charged_ops[id] ||
        registry->state().ledger().size() != charges[id]) {
      res.passed = false;
      res.note = "ledger of " + id + " disagrees with the logged charges";
    }
  }
  return res;
}

InvariantResult replica_consistency(Topology& topo, const std::map<std::string, std::uint64_t>& last) {
  InvariantResult res = named("replica_consistency");
  if (topo.registries().size() < 2) {
    res.note = "single registry";
    return res;
  }
  for (const auto& [id, registry] : topo.registries()) {
    for (const auto& [number, d] : registry->state().delegations()) {
      if (d.owner != id) continue;
      for (const auto& peer : registry->state().options().peers) {
        RegistryService* p = topo.registry(peer);
        if (!p) continue;
        auto it = p->state().delegations().find(number);
        if (it == p->state().delegations().end() || !(it->second == d)) {
          auto l = last.find(number.full_digits());
          add_counterexample(res, l == last.end() ? 0 : l->second);
        }
      }
    }
  }
  return res;
}

// Every registry Tier 0 names must lead to the same URIs for every number.
InvariantResult model_transparency(Topology& topo, const std::map<std::string, std::uint64_t>& last) {
  InvariantResult res = named("model_transparency");
  std::set<E164Number> numbers;
  for (const auto& [id, registry] : topo.registries()) {
    for (const auto& [number, d] : registry->state().delegations()) numbers.insert(number);
  }
  TierClient tiers(topo.sim(), "auditor", "tier0", topo.config().apex);
  for (const auto& number : numbers) {
    std::vector<std::string> registries;
    try {
      registries = tiers.discover(number);
    } catch (const Error&) {
      continue;
    }
    std::set<std::string> answers;
    bool timed_out = false;
    for (const auto& rid : registries) {
      std::string answer;
      try {
        Delegation d = tiers.lookup(number, {rid});
        auto reply = tiers.call("registrar:" + d.registrar,
                                Frame{std::string(kind::kGet), Fields{{"number", number.full_digits()}}});
        if (!reply) throw Error(Errc::Timeout);
        raise_if_error(*reply);
        NaptrRecordSet set{number, {}};
        for (const auto& line : reply->fields.all("record")) set.records.push_back(parse_record(line));
        answer = "serving=" + reply->fields.get_or("serving", "0");
        for (const auto& u : resolve_record_set(set, ServiceSelector::any(), number.render()).uris) answer += " " + u;
      } catch (const Error& e) {
        if (e.code() == Errc::Timeout) timed_out = true;
        answer = std::string(errc_name(e.code()));
      }
      answers.insert(answer);
    }
    if (!timed_out && answers.size() > 1) {
      auto l = last.find(number.full_digits());
      add_counterexample(res, l == last.end() ? 0 : l->second);
    }
  }
  return res;
}

InvariantResult peering_inertness(Topology& topo) {
  InvariantResult res = named("peering_inertness");
  if (topo.registries().size() > 1) {
    res.note = "multiple registries";
    return res;
  }
  for (const auto& r : topo.log().records()) {
    if (r.kind == "peer_update_sent" || (r.kind == "delegation" && r.fields.get_or("op", "") == "peer_apply"))
      add_counterexample(res, cause_of(r));
  }
  return res;
}

// Argument position of the number in each step, where one exists.
std::optional<std::size_t> number_arg(const std::string& step) {
  static const std::map<std::string, std::size_t> kPos{
      {"assign", 2},     {"subscribe", 2}, {"provision", 2}, {"grant", 2},   {"transfer", 2},
      {"disconnect", 2}, {"resolve", 0},   {"resolve_all", 0}, {"backdoor_write", 2}};
  auto it = kPos.find(step);
  if (it == kPos.end()) return std::nullopt;
  return it->second;
}

InvariantResult disconnect_safety(const RunLog& log) {
  InvariantResult res = named("disconnect_safety");
  std::set<std::string> released;
  for (const auto& r : log.records()) {
    if (r.kind == "phone_disconnect") {
      released.insert(r.fields.get_or("number", ""));
      continue;
    }
    if (r.kind != "event" || r.fields.get_or("status", "") != "ok") continue;
    std::string step = r.fields.get_or("step", "");
    auto pos = number_arg(step);
    if (!pos) continue;
    auto args = split_words(r.fields.get_or("args", ""));
    if (*pos >= args.size()) continue;
    std::string number;
    try {
      number = parse_number(args[*pos]).full_digits();
    } catch (const Error&) {
      continue;
    }
    if (!released.count(number)) continue;
    if (step == "assign") {
      released.erase(number);
    } else {
      add_counterexample(res, r.id);
    }
  }
  return res;
}

InvariantResult transfer_monotonicity(const RunLog& log) {
  InvariantResult res = named("transfer_monotonicity");
  std::map<std::string, int> position;
  for (const auto& r : log.records()) {
    if (r.kind != "transfer_state") continue;
    std::string t = r.fields.get_or("transfer", "");
    TransferState s = transfer_state_from(r.fields.get_or("state", "Requested"));
    int next = static_cast<int>(s);
    auto it = position.find(t);
    int prev = it == position.end() ? -1 : it->second;
    bool ok;
    if (s == TransferState::Disputed) {
      ok = prev != static_cast<int>(TransferState::Complete) && prev != static_cast<int>(TransferState::Disputed);
    } else {
      ok = prev != static_cast<int>(TransferState::Disputed) && next > prev;
    }
    if (!ok) add_counterexample(res, cause_of(r));
    position[t] = next;
  }
  return res;
}

}  // namespace

std::set<std::pair<std::string, std::string>> ValueFlowGraph::role_pairs() const {
  std::set<std::pair<std::string, std::string>> out;
  for (const auto& e : edges) out.emplace(e.payer_role, e.payee_role);
  return out;
}

std::string ValueFlowGraph::to_text() const {
  std::ostringstream out;
  for (const auto& e : edges) {
    out << encode_fields(Fields{{"payer", e.payer},
                                {"payer_role", e.payer_role},
                                {"payee", e.payee},
                                {"payee_role", e.payee_role},
                                {"amount", std::to_string(e.amount)},
                                {"cause", std::to_string(e.cause)}})
        << "\n";
  }
  return out.str();
}

ValueFlowGraph value_flow(const ScenarioConfig& cfg, const RunLog& log) {
  ValueFlowGraph g;
  auto role = [&](const std::string& id) {
    auto r = cfg.role_of(id);
    return r ? std::string(role_name(*r)) : std::string("Unknown");
  };
  auto edge = [&](std::string payer, std::string payee, double amount, std::uint64_t cause) {
    std::string pr = role(payer), qr = role(payee);
    g.edges.push_back(ValueFlowEdge{std::move(payer), std::move(payee), amount, cause, pr, qr});
  };
  for (const auto& r : log.records()) {
    const Fields& f = r.fields;
    if (r.kind == "subscribe") {
      edge(f.get_or("paid_by", ""), f.get_or("serving_registrar", ""), cfg.user_fee, cause_of(r));
    } else if (r.kind == "charge") {
      edge(f.get_or("payer", ""), f.get_or("registry", ""), amount_of(f.get_or("amount", "0")), cause_of(r));
    } else if (r.kind == "event" && f.get_or("step", "") == "cooperate" && f.get_or("status", "") == "ok" &&
               (cfg.model_id == 2 || cfg.model_id == 5)) {
      edge(f.get_or("asp", ""), f.get_or("tsp", ""), amount_of(f.get_or("amount", "0")), r.id);
    }
  }
  return g;
}

ValueFlowGraph value_flow(const Topology& topo) {
  if (!topo.complete()) fail(Errc::RunIncomplete, "value flow needs a finished run");
  return value_flow(topo.config(), topo.log());
}

bool InvariantReport::all_passed() const {
  return std::all_of(results.begin(), results.end(), [](const InvariantResult& r) { return r.passed; });
}

const InvariantResult* InvariantReport::find(std::string_view name) const {
  for (const auto& r : results) {
    if (r.name == name) return &r;
  }
  return nullptr;
}

std::string InvariantReport::to_text() const {
  std::string out;
  for (const auto& r : results) {
    std::string ids;
    for (auto id : r.counterexamples) {
      if (!ids.empty()) ids += ',';
      ids += std::to_string(id);
    }
    Fields f{{"invariant", r.name}, {"status", r.passed ? "pass" : "fail"}, {"counterexamples", ids}};
    if (!r.note.empty()) f.add("note", r.note);
    out += encode_fields(f) + "\n";
  }
  return out;
}

InvariantReport assert_invariants(Topology& topo) {
  const RunLog& log = topo.log();
  auto last = last_event_per_number(log);
  InvariantReport report;
  report.results.push_back(single_store(topo, last));
  report.results.push_back(transfer_conservation(log));
  report.results.push_back(access_soundness(topo.config(), log));
  report.results.push_back(serial_monotonicity(log));
  report.results.push_back(billing_conservation(topo));
  report.results.push_back(replica_consistency(topo, last));
  report.results.push_back(model_transparency(topo, last));
  report.results.push_back(peering_inertness(topo));
  report.results.push_back(disconnect_safety(log));
  report.results.push_back(transfer_monotonicity(log));
  return report;
}

PeeringLag peering_lag(const RunLog& log) {
  struct Sent {
    std::string peer;
    std::string number;
    std::uint64_t serial;
    std::uint64_t cause;
    std::uint64_t tick;
    bool done = false;
  };
  PeeringLag out;
  std::vector<Sent> open;
  std::uint64_t total_rounds = 0;
  for (const auto& r : log.records()) {
    if (r.kind == "peer_update_sent") {
      open.push_back(Sent{r.fields.get_or("peer", ""), r.fields.get_or("number", ""),
                          std::stoull(r.fields.get_or("serial", "0")), cause_of(r), r.tick});
      ++out.sent;
      continue;
    }
    if (r.kind != "delegation" || r.fields.get_or("op", "") != "peer_apply") continue;
    std::string registry = r.fields.get_or("registry", "");
    std::string number = r.fields.get_or("number", "");
    std::uint64_t serial = std::stoull(r.fields.get_or("serial", "0"));
    for (auto& s : open) {
      if (s.done || s.peer != registry || s.number != number || s.serial > serial) continue;
      s.done = true;
      ++out.applied;
      std::uint64_t rounds = cause_of(r) - s.cause;
      total_rounds += rounds;
      out.max_rounds = std::max(out.max_rounds, rounds);
      out.max_ticks = std::max(out.max_ticks, r.tick - s.tick);
    }
  }
  out.pending = out.sent - out.applied;
  if (out.applied) out.mean_rounds = static_cast<double>(total_rounds) / static_cast<double>(out.applied);
  return out;
}

std::string PeeringLag::to_text() const {
  char mean[32];
  std::snprintf(mean, sizeof mean, "%.2f", mean_rounds);
  return encode_fields(Fields{{"sent", std::to_string(sent)},
                              {"applied", std::to_string(applied)},
                              {"pending", std::to_string(pending)},
                              {"max_rounds", std::to_string(max_rounds)},
                              {"mean_rounds", mean},
                              {"max_ticks", std::to_string(max_ticks)}}) +
         "\n";
}

}  // namespace enumdesk
