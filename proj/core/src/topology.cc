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
#include <utility>

#include "enumdesk/error.h"
#include "enumdesk/scenario.h"

namespace enumdesk {
namespace {

std::string digits_of(const std::string& raw) { return parse_number(raw).full_digits(); }

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& i : items) {
    if (!out.empty()) out += ' ';
    out += i;
  }
  return out;
}

Fields send(Simulator& sim, const std::string& from, const std::string& to, std::string_view k, Fields fields) {
  auto reply = sim.call(from, to, Frame{std::string(k), std::move(fields)});
  if (!reply) fail(Errc::Timeout, to);
  raise_if_error(*reply);
  return reply->fields;
}

std::string party_address(const std::string& id) { return "party:" + id; }

}  // namespace

Topology::Topology(ScenarioConfig config)
    : config_(std::move(config)), sim_(std::make_unique<Simulator>(config_.seed)) {}

Topology::~Topology() = default;

RegistryService* Topology::registry(const std::string& id) {
  auto it = registries_.find(id);
  return it == registries_.end() ? nullptr : it->second.get();
}

RegistrarService* Topology::registrar(const std::string& id) {
  auto it = registrars_.find(id);
  return it == registrars_.end() ? nullptr : it->second.get();
}

TspDesk* Topology::desk(const std::string& id) {
  auto it = desks_.find(id);
  return it == desks_.end() ? nullptr : it->second.get();
}

Resolver Topology::resolver() { return Resolver(*sim_, "tier0", config_.apex); }

void Topology::resume_log(RunLog log) {
  log_ = std::move(log);
  sim_->advance_to(log_.last_tick());
}

std::unique_ptr<Topology> build_topology(const ScenarioConfig& config) {
  check_model_grid(config);
  std::set<std::string> registry_ids;
  for (const auto& r : config.registries) {
    if (!registry_ids.insert(r.id).second) fail(Errc::ConfigError, "duplicate registry " + r.id);
  }
  for (const auto& r : config.registries) {
    for (const auto& p : r.peers) {
      if (!registry_ids.count(p) || p == r.id) fail(Errc::ConfigError, "registry " + r.id + ": bad peer " + p);
    }
  }
  for (const auto& [prefix, ids] : config.tier0.entries) {
    for (const auto& id : ids) {
      if (!registry_ids.count(id)) fail(Errc::ConfigError, "tier0 " + prefix + ": unknown registry " + id);
    }
  }
  for (const auto& r : config.registrars) {
    if (!registry_ids.count(r.home_registry))
      fail(Errc::ConfigError, "registrar " + r.id + ": unknown home registry " + r.home_registry);
  }

  std::unique_ptr<Topology> topo(new Topology(config));
  Topology* self = topo.get();
  Simulator& sim = *topo->sim_;
  sim.set_audit_sink([self](std::string k, Fields fields) {
    fields.add("cause", std::to_string(self->current_event_));
    self->log_.append(LogRecord{self->log_.next_id(), self->sim_->tick(), std::move(k), std::move(fields)});
  });

  Tier0Table table = config.tier0;
  table.apex = config.apex;
  topo->tier0_ = std::make_unique<Tier0Service>(std::move(table));
  sim.attach("tier0", *topo->tier0_);

  for (const auto& r : config.registries) {
    RegistryOptions options{r.id, r.prefixes, r.peers, r.accredited, config.flat_fee};
    auto service = std::make_unique<RegistryService>(sim, std::move(options), config.apex);
    sim.attach(service->address(), *service);
    topo->registries_.emplace(r.id, std::move(service));
  }
  for (const auto& a : config.actors) {
    if (a.role != Role::TSP) continue;
    auto desk = std::make_unique<TspDesk>(sim, a.id, "tier0", config.apex);
    sim.attach(desk->address(), *desk);
    topo->desks_.emplace(a.id, std::move(desk));
  }
  AccessPolicy policy;
  policy.tsp_network_grant = config.tsp_family();
  policy.network_related_services = config.network_related_services;
  for (const auto& r : config.registrars) {
    Party party{r.id, config.role_of(r.id).value_or(Role::IndependentRegistrar)};
    RegistrarContext context{config.model_id, config.permitted_kinds(), r.home_registry, "tier0",
                             config.apex,     config.transfer_retries};
    auto service = std::make_unique<RegistrarService>(sim, party, r.kind, std::move(context), policy, topo->desk(r.id));
    sim.attach(service->address(), *service);
    topo->registrars_.emplace(r.id, std::move(service));
  }

  std::vector<FaultWindow> windows;
  for (const auto& f : config.faults) {
    std::vector<std::string> addresses;
    if (f.actor == "tier0") addresses.push_back("tier0");
    if (topo->registry(f.actor)) addresses.push_back("registry:" + f.actor);
    if (topo->registrar(f.actor)) addresses.push_back("registrar:" + f.actor);
    if (topo->desk(f.actor)) addresses.push_back("tsp:" + f.actor);
    if (addresses.empty()) fail(Errc::ConfigError, "fault for unknown actor " + f.actor);
    for (const auto& a : addresses) windows.push_back(FaultWindow{f.kind, a, f.from, f.to});
  }
  sim.set_faults(std::move(windows));
  return topo;
}

void run_event(Topology& topo, const ScriptEvent& ev) {
  Simulator& sim = topo.sim();
  topo.current_event_ = topo.log_.next_id();
  sim.advance_to(sim.tick() + 1);

  Fields request{{"step", ev.kind}, {"line", std::to_string(ev.line)}};
  if (!ev.args.empty()) request.add("args", join(ev.args));
  for (const auto& [k, v] : ev.options) request.add("opt." + k, v);
  if (!ev.rest.empty()) request.add("rest", ev.rest);
  std::size_t index = topo.log_.size();
  topo.log_.append(LogRecord{topo.current_event_, sim.tick(), "event", std::move(request)});

  auto opt = [&](const std::string& k) -> std::string {
    auto it = ev.options.find(k);
    return it == ev.options.end() ? std::string() : it->second;
  };
  auto label = [&](const std::string& name) {
    auto it = topo.labels().find(name);
    return it == topo.labels().end() ? name : it->second;
  };
  auto registrar_or_fail = [&](const std::string& id) {
    RegistrarService* r = topo.registrar(id);
    if (!r) fail(Errc::ScriptError, "unknown registrar " + id);
    return r;
  };

  Fields result;
  try {
    const auto& a = ev.args;
    if (ev.kind == "assign") {
      std::string number = digits_of(a[2]);
      Fields out = send(sim, party_address(a[1]), "tsp:" + a[0], kind::kAssign,
                        Fields{{"number", number}, {"user", a[1]}});
      topo.tokens()[number] = out.require("token");
      result.add("number", number);
    } else if (ev.kind == "subscribe") {
      std::string number = digits_of(a[2]);
      Fields f{{"number", number}, {"user", a[1]}, {"tsp", opt("tsp")}};
      if (!opt("via").empty()) f.add("via", opt("via"));
      if (std::string proof = opt("proof"); !proof.empty()) {
        auto it = topo.tokens().find(number);
        f.add("proof", proof == "token" && it != topo.tokens().end() ? it->second : proof);
      }
      Fields out = send(sim, party_address(a[1]), "registrar:" + a[0], kind::kSubscribe, std::move(f));
      for (const char* k : {"number", "serving_registrar", "paid_by", "owner", "serial"}) result.add(k, out.require(k));
    } else if (ev.kind == "provision") {
      Fields out = send(sim, party_address(a[1]), "registrar:" + a[0], kind::kProvision,
                        Fields{{"number", digits_of(a[2])}, {"actor", a[1]}, {"record", ev.rest}});
      result.add("written", out.require("written"));
    } else if (ev.kind == "backdoor_write") {
      NaptrRecord record = parse_record(ev.rest);
      registrar_or_fail(a[0])->backdoor_write(a[1], parse_number(a[2]), record);
      result.add("written", "1");
    } else if (ev.kind == "grant") {
      Fields out = send(sim, party_address(a[1]), "registrar:" + a[0], kind::kGrant,
                        Fields{{"number", digits_of(a[2])},
                               {"user", a[1]},
                               {"grantee", a[3]},
                               {"rights", a[4]},
                               {"scope", a[5]}});
      std::string id = out.require("grant");
      if (!opt("as").empty()) topo.labels()[opt("as")] = id;
      result.add("grant", id);
    } else if (ev.kind == "revoke") {
      Fields out = send(sim, party_address(a[1]), "registrar:" + a[0], kind::kRevoke,
                        Fields{{"user", a[1]}, {"grant", label(a[2])}});
      result.add("grant", out.require("grant"));
    } else if (ev.kind == "transfer") {
      std::string number = digits_of(a[2]);
      Fields f{{"number", number}, {"user", a[1]}, {"tsp", opt("tsp")}};
      if (!opt("until").empty()) f.add("until", opt("until"));
      if (std::string proof = opt("proof"); !proof.empty()) {
        auto it = topo.tokens().find(number);
        f.add("proof", proof == "token" && it != topo.tokens().end() ? it->second : proof);
      }
      Fields out = send(sim, party_address(a[1]), "registrar:" + a[0], kind::kTransferInit, std::move(f));
      if (!opt("as").empty()) topo.labels()[opt("as")] = out.require("transfer");
      for (const char* k : {"transfer", "state", "from", "to"}) result.add(k, out.require(k));
      for (const auto& w : out.all("warning")) result.add("warning", w);
    } else if (ev.kind == "resume") {
      Fields f{{"transfer", label(a[1])}};
      if (!opt("until").empty()) f.add("until", opt("until"));
      Fields out = send(sim, party_address(a[0]), "registrar:" + a[0], kind::kTransferResume, std::move(f));
      for (const char* k : {"transfer", "state"}) result.add(k, out.require(k));
      for (const auto& w : out.all("warning")) result.add("warning", w);
    } else if (ev.kind == "dispute") {
      TransferRecord t = registrar_or_fail(a[0])->dispute(label(a[1]), ev.rest);
      result.add("transfer", t.id);
      result.add("state", std::string(transfer_state_name(t.state)));
    } else if (ev.kind == "disconnect") {
      std::string number = digits_of(a[2]);
      const std::string& k = a[3];
      Fields out;
      if (k == "telephone") {
        out = send(sim, party_address(a[1]), "tsp:" + a[0], kind::kPhoneDisconnect,
                   Fields{{"number", number}, {"user", a[1]}});
      } else if (k == "enum_only") {
        out = send(sim, party_address(a[1]), "registrar:" + a[0], kind::kDisconnect,
                   Fields{{"number", number}, {"user", a[1]}, {"kind", k}});
      } else {
        fail(Errc::ScriptError, "disconnect kind must be enum_only or telephone");
      }
      result.add("number", number);
      result.add("enum_active", out.get_or("enum_active", "0"));
      result.add("phone_active", out.get_or("phone_active", "0"));
    } else if (ev.kind == "resolve") {
      ServiceSelector sel = ServiceSelector::parse(a.size() > 1 ? a[1] : "*");
      Resolution r = topo.resolver().resolve(a[0], sel);
      result.add("number", r.number.full_digits());
      result.add("service", sel.to_string());
      for (const auto& u : r.uris) result.add("uri", u);
      for (const auto& w : r.warnings) result.add("warning", w);
      result.add("hops", std::to_string(r.trace.size()));
    } else if (ev.kind == "resolve_all") {
      result.add("number", digits_of(a[0]));
      for (const auto& [service, uris] : topo.resolver().resolve_all(a[0])) {
        for (const auto& u : uris) result.add("uri", service + " " + u);
      }
    } else if (ev.kind == "cooperate") {
      std::string approach = a[2];
      if (approach != "registry" && approach != "asp" && approach != "user")
        fail(Errc::ScriptError, "cooperation approach must be registry, asp or user");
      result.add("asp", a[0]);
      result.add("tsp", a[1]);
      result.add("approach", approach);
      result.add("amount", a.size() > 3 ? a[3] : std::to_string(topo.config().user_fee));
    } else if (ev.kind == "get") {
      Fields out = send(sim, party_address(a[1]), "registrar:" + a[0], kind::kGet,
                        Fields{{"number", digits_of(a[2])}, {"actor", a[1]}, {"service", a.size() > 3 ? a[3] : "*"}});
      result.add("serving", out.require("serving"));
      for (const auto& r : out.all("record")) result.add("record", r);
    } else if (ev.kind == "settle") {
      sim.settle();
    } else if (ev.kind == "advance") {
      if (a[0].empty() || a[0].find_first_not_of("0123456789") != std::string::npos || a[0].size() > 18)
        fail(Errc::ScriptError, "advance takes a tick number");
      sim.advance_to(std::stoull(a[0]));
    } else {
      fail(Errc::ScriptError, "unknown step " + ev.kind);
    }
    Fields status{{"status", "ok"}};
    for (const auto& [k, v] : result.items()) status.add(k, v);
    topo.log_.amend(index, status);
  } catch (const Error& e) {
    topo.log_.amend(index, Fields{{"status", std::string(errc_name(e.code()))}, {"detail", e.detail()}});
  }
  sim.drain();
}

const RunLog& run_events(Topology& topo, const std::vector<ScriptEvent>& events) {
  for (const auto& ev : events) run_event(topo, ev);
  topo.sim().settle();
  topo.mark_complete(true);
  return topo.log();
}

std::vector<std::string> resolve_outputs(const RunLog& log) {
  std::vector<std::string> out;
  for (const auto& r : log.records()) {
    if (r.kind != "event") continue;
    std::string step = r.fields.get_or("step", "");
    if (step != "resolve" && step != "resolve_all") continue;
    std::string line = step + "|" + r.fields.get_or("args", "") + "|" + r.fields.get_or("status", "");
    for (const auto& u : r.fields.all("uri")) line += "|" + u;
    out.push_back(std::move(line));
  }
  return out;
}

}  // namespace enumdesk
