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
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <sstream>

#include "enumdesk/error.h"
#include "enumdesk/scenario.h"

namespace enumdesk {
namespace {

namespace pt = boost::property_tree;

std::vector<std::string> words(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string w;
  while (in >> w) out.push_back(w);
  return out;
}

std::string join(const std::vector<std::string>& items, const char* sep = " ") {
  std::string out;
  for (const auto& i : items) {
    if (!out.empty()) out += sep;
    out += i;
  }
  return out;
}

template <typename Set>
std::string join_set(const Set& items) {
  return join(std::vector<std::string>(items.begin(), items.end()));
}

std::uint64_t to_u64(const std::string& s, const std::string& where) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
    fail(Errc::ConfigError, where + ": expected an integer, got '" + s + "'");
  return v;
}

double to_double(const std::string& s, const std::string& where) {
  try {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size() || v < 0) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    fail(Errc::ConfigError, where + ": expected a non-negative number, got '" + s + "'");
  }
}

const pt::ptree* section(const pt::ptree& root, const std::string& name) {
  auto it = root.find(name);
  return it == root.not_found() ? nullptr : &it->second;
}

std::string value(const pt::ptree& sec, const std::string& key, const std::string& fallback) {
  auto it = sec.find(key);
  return it == sec.not_found() ? fallback : it->second.data();
}

std::string_view multiplicity_name(RegistryMultiplicity m) {
  return m == RegistryMultiplicity::Single ? "single" : "multiple";
}

std::string_view fault_kind_name(FaultWindow::Kind k) {
  return k == FaultWindow::Kind::Offline ? "offline" : "drop_peering";
}

}  // namespace

std::set<RegistrarKind> ScenarioConfig::permitted_kinds() const {
  std::set<RegistrarKind> kinds = also_permitted;
  kinds.insert(registrar_kind);
  return kinds;
}

std::optional<Role> ScenarioConfig::role_of(const std::string& party) const {
  for (const auto& a : actors) {
    if (a.id == party) return a.role;
  }
  for (const auto& r : registries) {
    if (r.id == party) return Role::Registry;
  }
  return std::nullopt;
}

ScenarioConfig parse_scenario_config(std::string_view text) {
  pt::ptree root;
  try {
    std::istringstream in{std::string(text)};
    pt::read_ini(in, root);
  } catch (const pt::ini_parser_error& e) {
    fail(Errc::ConfigError, "line " + std::to_string(e.line()) + ": " + e.message());
  }

  static const std::set<std::string> kKnown{"model",   "actors",   "registrars", "tier0",    "aliases",
                                            "services", "fees",    "faults",     "transfer"};
  ScenarioConfig cfg;
  for (const auto& [name, sec] : root) {
    if (name.rfind("registry:", 0) == 0) continue;
    if (!kKnown.count(name)) fail(Errc::ConfigError, "unknown section [" + name + "]");
  }

  const pt::ptree* model = section(root, "model");
  if (!model) fail(Errc::ConfigError, "missing [model] section");
  std::string id = value(*model, "id", "");
  if (id.empty()) fail(Errc::ConfigError, "[model] id is required");
  cfg.model_id = static_cast<int>(to_u64(id, "[model] id"));
  try {
    cfg.registrar_kind = registrar_kind_from(value(*model, "registrar_kind", ""));
  } catch (const Error& e) {
    fail(Errc::ConfigError, "[model] registrar_kind: " + e.detail());
  }
  std::string mult = value(*model, "registry_multiplicity", "");
  if (mult == "single") {
    cfg.registry_multiplicity = RegistryMultiplicity::Single;
  } else if (mult == "multiple") {
    cfg.registry_multiplicity = RegistryMultiplicity::Multiple;
  } else {
    fail(Errc::ConfigError, "[model] registry_multiplicity must be single or multiple");
  }
  for (const auto& k : words(value(*model, "also_permitted", ""))) cfg.also_permitted.insert(registrar_kind_from(k));
  cfg.seed = to_u64(value(*model, "seed", "1"), "[model] seed");
  try {
    cfg.apex = ApexConfig::make(value(*model, "apex", "e164.arpa"));
  } catch (const Error& e) {
    fail(Errc::ConfigError, "[model] apex: " + e.detail());
  }

  if (const auto* actors = section(root, "actors")) {
    for (const auto& [party, role] : *actors) cfg.actors.push_back(Party{party, role_from(role.data())});
  }
  if (const auto* regs = section(root, "registrars")) {
    for (const auto& [rid, spec] : *regs) {
      auto w = words(spec.data());
      if (w.size() != 2) fail(Errc::ConfigError, "[registrars] " + rid + ": expected '<kind> <home-registry>'");
      cfg.registrars.push_back(RegistrarSpec{rid, registrar_kind_from(w[0]), w[1]});
    }
  }
  for (const auto& [name, sec] : root) {
    if (name.rfind("registry:", 0) != 0) continue;
    RegistrySpec r;
    r.id = name.substr(9);
    for (const auto& p : words(value(sec, "prefixes", ""))) r.prefixes.insert(p);
    r.peers = words(value(sec, "peers", ""));
    for (const auto& a : words(value(sec, "accredited", ""))) r.accredited.insert(a);
    cfg.registries.push_back(std::move(r));
  }
  cfg.tier0.apex = cfg.apex;
  if (const auto* t0 = section(root, "tier0")) {
    for (const auto& [prefix, ids] : *t0) {
      if (prefix.empty() || prefix.size() > 3 ||
          !std::all_of(prefix.begin(), prefix.end(), [](char c) { return c >= '0' && c <= '9'; }))
        fail(Errc::ConfigError, "[tier0] bad country code '" + prefix + "'");
      cfg.tier0.entries[prefix] = words(ids.data());
    }
  }
  if (const auto* al = section(root, "aliases")) {
    for (const auto& [name, target] : *al) cfg.aliases[name] = target.data();
  }
  if (const auto* svc = section(root, "services")) {
    auto it = svc->find("network_related");
    if (it != svc->not_found()) {
      cfg.network_related_services.clear();
      for (const auto& s : words(it->second.data())) cfg.network_related_services.insert(s);
    }
  }
  if (const auto* fees = section(root, "fees")) {
    cfg.flat_fee = to_double(value(*fees, "flat_fee", "1.0"), "[fees] flat_fee");
    cfg.user_fee = to_double(value(*fees, "user_fee", "1.0"), "[fees] user_fee");
  }
  if (const auto* faults = section(root, "faults")) {
    for (const auto& [key, spec] : *faults) {
      auto w = words(spec.data());
      if (w.size() != 4) fail(Errc::ConfigError, "[faults] " + key + ": expected '<kind> <actor> <from> <to>'");
      FaultSpec f;
      if (w[0] == "offline") {
        f.kind = FaultWindow::Kind::Offline;
      } else if (w[0] == "drop_peering") {
        f.kind = FaultWindow::Kind::DropPeering;
      } else {
        fail(Errc::ConfigError, "[faults] " + key + ": unknown kind '" + w[0] + "'");
      }
      f.actor = w[1];
      f.from = to_u64(w[2], "[faults] " + key);
      f.to = to_u64(w[3], "[faults] " + key);
      if (f.to <= f.from) fail(Errc::ConfigError, "[faults] " + key + ": empty window");
      cfg.faults.push_back(std::move(f));
    }
  }
  if (const auto* tr = section(root, "transfer")) {
    cfg.transfer_retries = static_cast<int>(to_u64(value(*tr, "retries", "2"), "[transfer] retries"));
  }
  return cfg;
}

std::string render_scenario_config(const ScenarioConfig& cfg) {
  std::ostringstream out;
  out << "[model]\n"
      << "id = " << cfg.model_id << "\n"
      << "registrar_kind = " << registrar_kind_name(cfg.registrar_kind) << "\n"
      << "registry_multiplicity = " << multiplicity_name(cfg.registry_multiplicity) << "\n";
  if (!cfg.also_permitted.empty()) {
    std::vector<std::string> kinds;
    for (auto k : cfg.also_permitted) kinds.emplace_back(registrar_kind_name(k));
    out << "also_permitted = " << join(kinds) << "\n";
  }
  out << "seed = " << cfg.seed << "\n"
      << "apex = " << cfg.apex.apex << "\n\n[actors]\n";
  for (const auto& a : cfg.actors) out << a.id << " = " << role_name(a.role) << "\n";
  out << "\n[registrars]\n";
  for (const auto& r : cfg.registrars) out << r.id << " = " << registrar_kind_name(r.kind) << " " << r.home_registry << "\n";
  for (const auto& r : cfg.registries) {
    out << "\n[registry:" << r.id << "]\n"
        << "prefixes = " << join_set(r.prefixes) << "\n"
        << "peers = " << join(r.peers) << "\n"
        << "accredited = " << join_set(r.accredited) << "\n";
  }
  out << "\n[tier0]\n";
  for (const auto& [prefix, ids] : cfg.tier0.entries) out << prefix << " = " << join(ids) << "\n";
  if (!cfg.aliases.empty()) {
    out << "\n[aliases]\n";
    for (const auto& [k, v] : cfg.aliases) out << k << " = " << v << "\n";
  }
  out << "\n[services]\nnetwork_related = " << join_set(cfg.network_related_services) << "\n";
  out << "\n[fees]\nflat_fee = " << cfg.flat_fee << "\nuser_fee = " << cfg.user_fee << "\n";
  if (!cfg.faults.empty()) {
    out << "\n[faults]\n";
    for (std::size_t i = 0; i < cfg.faults.size(); ++i) {
      const auto& f = cfg.faults[i];
      out << "f" << i + 1 << " = " << fault_kind_name(f.kind) << " " << f.actor << " " << f.from << " " << f.to << "\n";
    }
  }
  out << "\n[transfer]\nretries = " << cfg.transfer_retries << "\n";
  return out.str();
}

void check_model_grid(const ScenarioConfig& cfg) {
  if (cfg.model_id < 1 || cfg.model_id > 6)
    fail(Errc::InvalidModelCombination, "model " + std::to_string(cfg.model_id) + " is outside 1..6");
  static constexpr RegistrarKind kKinds[] = {RegistrarKind::TSP, RegistrarKind::ASP, RegistrarKind::Independent};
  RegistrarKind kind = kKinds[(cfg.model_id - 1) % 3];
  RegistryMultiplicity mult = cfg.model_id <= 3 ? RegistryMultiplicity::Single : RegistryMultiplicity::Multiple;
  if (cfg.registrar_kind != kind || cfg.registry_multiplicity != mult)
    fail(Errc::InvalidModelCombination,
         "model " + std::to_string(cfg.model_id) + " requires " + std::string(registrar_kind_name(kind)) + "/" +
             std::string(multiplicity_name(mult)) + ", got " + std::string(registrar_kind_name(cfg.registrar_kind)) +
             "/" + std::string(multiplicity_name(cfg.registry_multiplicity)));
  std::size_t n = cfg.registries.size();
  if (mult == RegistryMultiplicity::Single ? n != 1 : n < 2)
    fail(Errc::InvalidModelCombination, "model " + std::to_string(cfg.model_id) + " with " + std::to_string(n) +
                                            " registries");
}

}  // namespace enumdesk
