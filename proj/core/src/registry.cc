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

#include "enumdesk/registry.h"

#include <algorithm>
#include <charconv>
#include <utility>

#include "enumdesk/error.h"

namespace enumdesk {
namespace {

std::uint64_t to_u64(const std::string& s) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) fail(Errc::BadFrame, "bad integer '" + s + "'");
  return v;
}

}  // namespace

CountryCodeTable Tier0Table::country_codes() const {
  CountryCodeTable table;
  for (const auto& [prefix, registries] : entries) table.add(prefix);
  return table;
}

std::vector<std::string> tier0_discover(std::string_view country_code, const Tier0Table& table) {
  for (std::size_t len = country_code.size(); len > 0; --len) {
    auto it = table.entries.find(std::string(country_code.substr(0, len)));
    if (it != table.entries.end() && !it->second.empty()) return it->second;
  }
  fail(Errc::UnknownCountryCode, std::string(country_code));
}

std::string_view peer_update_kind_name(PeerUpdateKind k) {
  switch (k) {
    case PeerUpdateKind::Created:
      return "created";
    case PeerUpdateKind::Changed:
      return "changed";
    case PeerUpdateKind::Removed:
      return "removed";
  }
  return "changed";
}

PeerUpdateKind peer_update_kind_from(std::string_view name) {
  if (name == "created") return PeerUpdateKind::Created;
  if (name == "changed") return PeerUpdateKind::Changed;
  if (name == "removed") return PeerUpdateKind::Removed;
  fail(Errc::BadFrame, "unknown peer update kind '" + std::string(name) + "'");
}

Registry::Registry(RegistryOptions options) : options_(std::move(options)) {}

bool Registry::serves(const E164Number& number) const {
  for (const auto& prefix : options_.served_prefixes) {
    if (number.full_digits().compare(0, prefix.size(), prefix) == 0) return true;
  }
  return false;
}

const Delegation* Registry::find(const E164Number& number) const {
  auto it = delegations_.find(number);
  return it == delegations_.end() ? nullptr : &it->second;
}

void Registry::check_accredited(const std::string& registrar) const {
  if (options_.accredited.count(registrar) == 0)
    fail(Errc::UnaccreditedRegistrar, registrar + " at " + options_.id);
}

void Registry::emit(const Delegation& d, PeerUpdateKind kind) {
  for (const auto& peer : options_.peers) outbox_.push_back(OutboundUpdate{peer, PeerUpdate{d, kind}});
}

void Registry::charge(const std::string& payer, const E164Number& number, std::uint64_t now) {
  ledger_.push_back(BillingEntry{payer, options_.flat_fee, number.full_digits(), now});
}

Delegation Registry::register_delegation(const E164Number& number, const std::string& registrar,
                                         const std::string& payer, std::uint64_t now) {
  check_accredited(registrar);
  if (!serves(number)) fail(Errc::NotAuthoritative, "");
  const Delegation* existing = find(number);
  if (existing && !existing->removed && existing->owner != options_.id)
    fail(Errc::NotAuthoritative, existing->owner);

  Delegation d{number, registrar, options_.id, existing ? existing->serial + 1 : 1, now, false};
  PeerUpdateKind kind = (!existing || existing->removed) ? PeerUpdateKind::Created : PeerUpdateKind::Changed;
  delegations_.insert_or_assign(number, d);
  charge(payer, number, now);
  emit(d, kind);
  return d;
}

const Delegation& Registry::lookup_delegation(const E164Number& number) const {
  const Delegation* d = find(number);
  if (!d || d->removed) fail(Errc::NoDelegation, number.full_digits());
  return *d;
}

Delegation Registry::notify_registrar_change(const E164Number& number, const std::string& new_registrar,
                                             const std::string& old_registrar, std::uint64_t now,
                                             bool charge_fee) {
  const Delegation* existing = find(number);
  if (!existing || existing->removed) fail(Errc::NoDelegation, number.full_digits());
  if (existing->owner != options_.id) fail(Errc::NotAuthoritative, existing->owner);
  if (existing->registrar != old_registrar)
    fail(Errc::StaleOldRegistrar, "current " + existing->registrar + ", claimed " + old_registrar);
  check_accredited(new_registrar);

  Delegation d = *existing;
  d.registrar = new_registrar;
  d.serial += 1;
  d.updated_at = now;
  delegations_.insert_or_assign(number, d);
  if (charge_fee) charge(new_registrar, number, now);
  notices_.push_back(RegistrarNotice{old_registrar, number.full_digits(), new_registrar});
  emit(d, PeerUpdateKind::Changed);
  return d;
}

Delegation Registry::remove_delegation(const E164Number& number, const std::string& registrar,
                                       std::uint64_t now) {
  const Delegation* existing = find(number);
  if (!existing || existing->removed) fail(Errc::NoDelegation, number.full_digits());
  if (existing->owner != options_.id) fail(Errc::NotAuthoritative, existing->owner);
  if (existing->registrar != registrar)
    fail(Errc::StaleOldRegistrar, "current " + existing->registrar + ", claimed " + registrar);

  Delegation d = *existing;
  d.serial += 1;
  d.updated_at = now;
  d.removed = true;
  delegations_.insert_or_assign(number, d);
  emit(d, PeerUpdateKind::Removed);
  return d;
}

std::size_t Registry::peer_sync(std::span<const PeerUpdate> updates) {
  for (const auto& u : updates) {
    const auto& peers = options_.peers;
    if (std::find(peers.begin(), peers.end(), u.delegation.owner) == peers.end())
      fail(Errc::UnknownPeer, u.delegation.owner + " is not a peer of " + options_.id);
  }
  std::size_t applied = 0;
  for (const auto& u : updates) {
    const Delegation* local = find(u.delegation.number);
    if (local && u.delegation.serial <= local->serial) continue;
    Delegation d = u.delegation;
    d.removed = u.kind == PeerUpdateKind::Removed;
    delegations_.insert_or_assign(d.number, d);
    ++applied;
  }
  return applied;
}

std::vector<OutboundUpdate> Registry::take_outbox() { return std::exchange(outbox_, {}); }

std::vector<RegistrarNotice> Registry::take_notices() { return std::exchange(notices_, {}); }

void Registry::restore(Delegation delegation) {
  E164Number key = delegation.number;
  delegations_.insert_or_assign(key, std::move(delegation));
}

double Registry::ledger_total() const {
  double total = 0;
  for (const auto& e : ledger_) total += e.amount;
  return total;
}

E164Number number_from_digits(std::string_view digits) { return parse_number("+" + std::string(digits)); }

Fields delegation_fields(const Delegation& d) {
  return Fields{{"number", d.number.full_digits()},
                {"registrar", d.registrar},
                {"owner", d.owner},
                {"serial", std::to_string(d.serial)},
                {"updated_at", std::to_string(d.updated_at)},
                {"removed", d.removed ? "1" : "0"}};
}

Delegation delegation_from_fields(const Fields& f) {
  return Delegation{number_from_digits(f.require("number")), f.require("registrar"), f.require("owner"),
                    to_u64(f.require("serial")), to_u64(f.get_or("updated_at", "0")),
                    f.get_or("removed", "0") == "1"};
}

Frame Tier0Service::handle(const std::string&, const Frame& request) {
  try {
    if (request.kind != kind::kDiscover) fail(Errc::BadFrame, "tier0 cannot handle " + request.kind);
    E164Number number = from_domain(request.fields.require("domain"), table_.apex);
    std::string cc = country_code_of(number, table_.country_codes());
    Fields out;
    out.add("country_code", cc);
    for (const auto& r : tier0_discover(cc, table_)) out.add("registry", r);
    return make_response(request.kind, std::move(out));
  } catch (const Error& e) {
    return make_error_response(request.kind, e);
  }
}

RegistryService::RegistryService(Simulator& sim, RegistryOptions options, ApexConfig apex)
    : sim_(sim), registry_(std::move(options)), apex_(std::move(apex)) {}

Frame RegistryService::handle(const std::string& from, const Frame& request) {
  Frame reply;
  try {
    reply = dispatch(from, request);
  } catch (const Error& e) {
    reply = make_error_response(request.kind, e);
  }
  flush();
  return reply;
}

void RegistryService::audit_delegation(const Delegation& d, std::string_view op, bool charged) {
  Fields f = delegation_fields(d);
  f.add("registry", registry_.id());
  f.add("op", std::string(op));
  f.add("charged", charged ? "1" : "0");
  sim_.audit("delegation", std::move(f));
  if (charged) {
    const auto& entry = registry_.ledger().back();
    sim_.audit("charge", Fields{{"registry", registry_.id()},
                                {"payer", entry.payer},
                                {"amount", std::to_string(entry.amount)},
                                {"number", entry.number}});
  }
}

Frame RegistryService::dispatch(const std::string& from, const Frame& request) {
  const Fields& in = request.fields;
  const std::uint64_t now = sim_.tick();

  if (request.kind == kind::kLookup) {
    E164Number number = in.get("domain") ? from_domain(*in.get("domain"), apex_)
                                         : number_from_digits(in.require("number"));
    return make_response(request.kind, delegation_fields(registry_.lookup_delegation(number)));
  }
  if (request.kind == kind::kRegister) {
    Delegation d = registry_.register_delegation(number_from_digits(in.require("number")), in.require("registrar"),
                                                 in.get_or("payer", in.require("registrar")), now);
    audit_delegation(d, "register", true);
    return make_response(request.kind, delegation_fields(d));
  }
  if (request.kind == kind::kChange) {
    bool charged = in.get_or("charge", "1") == "1";
    Delegation d = registry_.notify_registrar_change(number_from_digits(in.require("number")), in.require("new"),
                                                     in.require("old"), now, charged);
    audit_delegation(d, "change", charged);
    return make_response(request.kind, delegation_fields(d));
  }
  if (request.kind == kind::kRemove) {
    Delegation d =
        registry_.remove_delegation(number_from_digits(in.require("number")), in.require("registrar"), now);
    audit_delegation(d, "remove", false);
    return make_response(request.kind, delegation_fields(d));
  }
  if (request.kind == kind::kPeerUpdate) {
    PeerUpdate u{delegation_from_fields(in), peer_update_kind_from(in.require("update"))};
    std::string sender = from.rfind("registry:", 0) == 0 ? from.substr(9) : from;
    if (sender != u.delegation.owner) fail(Errc::UnknownPeer, "update for " + u.delegation.owner + " sent by " + sender);
    std::size_t applied = registry_.peer_sync(std::span<const PeerUpdate>(&u, 1));
    if (applied) audit_delegation(registry_.delegations().at(u.delegation.number), "peer_apply", false);
    return make_response(request.kind, Fields{{"applied", std::to_string(applied)}});
  }
  fail(Errc::BadFrame, "registry cannot handle " + request.kind);
}

void RegistryService::flush() {
  for (auto& [peer, update] : registry_.take_outbox()) {
    Frame f;
    f.kind = std::string(kind::kPeerUpdate);
    f.fields = delegation_fields(update.delegation);
    f.fields.add("update", std::string(peer_update_kind_name(update.kind)));
    sim_.audit("peer_update_sent", Fields{{"registry", registry_.id()},
                                          {"peer", peer},
                                          {"number", update.delegation.number.full_digits()},
                                          {"serial", std::to_string(update.delegation.serial)}});
    sim_.post(address(), "registry:" + peer, std::move(f));
  }
  for (const auto& n : registry_.take_notices()) {
    Frame f;
    f.kind = std::string(kind::kNotice);
    f.fields = Fields{{"number", n.number}, {"new_registrar", n.new_registrar}, {"registry", registry_.id()}};
    sim_.post(address(), "registrar:" + n.registrar, std::move(f));
  }
}

}  // namespace enumdesk
