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

#ifndef ENUMDESK_REGISTRY_H_
#define ENUMDESK_REGISTRY_H_

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "enumdesk/e164.h"
#include "enumdesk/simulator.h"

namespace enumdesk {

// Tier 0: country-code prefix → registries authoritative for it.
struct Tier0Table {
  std::map<std::string, std::vector<std::string>> entries;
  ApexConfig apex;

  CountryCodeTable country_codes() const;
};

// Registries for the longest table prefix of `country_code`.
std::vector<std::string> tier0_discover(std::string_view country_code, const Tier0Table& table);

struct Delegation {
  E164Number number;
  std::string registrar;
  std::string owner;
  std::uint64_t serial = 0;
  std::uint64_t updated_at = 0;
  bool removed = false;  // tombstone: keeps the serial after withdrawal

  friend bool operator==(const Delegation&, const Delegation&) = default;
};

enum class PeerUpdateKind { Created, Changed, Removed };
std::string_view peer_update_kind_name(PeerUpdateKind k);
PeerUpdateKind peer_update_kind_from(std::string_view name);

struct PeerUpdate {
  Delegation delegation;
  PeerUpdateKind kind = PeerUpdateKind::Created;
};

struct OutboundUpdate {
  std::string peer;
  PeerUpdate update;
};

struct BillingEntry {
  std::string payer;
  double amount = 0;
  std::string number;
  std::uint64_t tick = 0;
};

// Informational message for a registrar that lost a number.
struct RegistrarNotice {
  std::string registrar;
  std::string number;
  std::string new_registrar;
};

struct RegistryOptions {
  std::string id;
  std::set<std::string> served_prefixes;
  std::vector<std::string> peers;
  std::set<std::string> accredited;
  double flat_fee = 1.0;
};

// Tier-1 registry state. Owned delegations are mutated only by the
// register/change/remove calls; replicas of other owners change only through
// peer_sync. Every local mutation queues one PeerUpdate per peer.
class Registry {
 public:
  explicit Registry(RegistryOptions options);

  const std::string& id() const { return options_.id; }
  const RegistryOptions& options() const { return options_; }

  bool serves(const E164Number& number) const;

  // Creates or replaces the delegation and charges the flat fee to `payer`.
  Delegation register_delegation(const E164Number& number, const std::string& registrar,
                                 const std::string& payer, std::uint64_t now);

  // Local copy or replica. NoDelegation when absent or withdrawn.
  const Delegation& lookup_delegation(const E164Number& number) const;

  // Moves the delegation from old to new; charges new when `charge` is set.
  Delegation notify_registrar_change(const E164Number& number, const std::string& new_registrar,
                                     const std::string& old_registrar, std::uint64_t now,
                                     bool charge = true);

  // Withdraws an owned delegation (ENUM disconnect), keeping a tombstone.
  Delegation remove_delegation(const E164Number& number, const std::string& registrar, std::uint64_t now);

  // Applies updates with a higher serial than the local copy. UnknownPeer
  // when any update's owner is not a configured peer; nothing is applied then.
  std::size_t peer_sync(std::span<const PeerUpdate> updates);

  std::vector<OutboundUpdate> take_outbox();
  std::vector<RegistrarNotice> take_notices();

  // Restore path for snapshots; bypasses billing and peering.
  void restore(Delegation delegation);
  void restore_ledger(BillingEntry entry) { ledger_.push_back(std::move(entry)); }

  const std::map<E164Number, Delegation>& delegations() const { return delegations_; }
  const std::vector<BillingEntry>& ledger() const { return ledger_; }
  double ledger_total() const;

 private:
  const Delegation* find(const E164Number& number) const;
  void check_accredited(const std::string& registrar) const;
  void emit(const Delegation& d, PeerUpdateKind kind);
  void charge(const std::string& payer, const E164Number& number, std::uint64_t now);

  RegistryOptions options_;
  std::map<E164Number, Delegation> delegations_;
  std::vector<BillingEntry> ledger_;
  std::vector<OutboundUpdate> outbox_;
  std::vector<RegistrarNotice> notices_;
};

// Tier-0 actor: answers DISCOVER for a domain name.
class Tier0Service : public Actor {
 public:
  explicit Tier0Service(Tier0Table table) : table_(std::move(table)) {}

  Frame handle(const std::string& from, const Frame& request) override;
  const Tier0Table& table() const { return table_; }

 private:
  Tier0Table table_;
};

// Tier-1 actor wrapping a Registry. Addresses: "registry:<id>".
class RegistryService : public Actor {
 public:
  RegistryService(Simulator& sim, RegistryOptions options, ApexConfig apex);

  Frame handle(const std::string& from, const Frame& request) override;

  Registry& state() { return registry_; }
  const Registry& state() const { return registry_; }
  std::string address() const { return "registry:" + registry_.id(); }

 private:
  Frame dispatch(const std::string& from, const Frame& request);
  void flush();
  void audit_delegation(const Delegation& d, std::string_view op, bool charged);

  Simulator& sim_;
  Registry registry_;
  ApexConfig apex_;
};

Fields delegation_fields(const Delegation& d);
Delegation delegation_from_fields(const Fields& f);

// Numbers travel as bare digits on the wire.
E164Number number_from_digits(std::string_view digits);

}  // namespace enumdesk

#endif  // ENUMDESK_REGISTRY_H_
