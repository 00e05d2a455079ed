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

#ifndef ENUMDESK_REGISTRAR_H_
#define ENUMDESK_REGISTRAR_H_

#include <cstdint>
#include <initializer_list>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "enumdesk/e164.h"
#include "enumdesk/naptr.h"
#include "enumdesk/registry.h"
#include "enumdesk/simulator.h"

namespace enumdesk {

enum class Role { User, TSP, ASP, ISP, IndependentRegistrar, Registry };
std::string_view role_name(Role role);
Role role_from(std::string_view name);

enum class RegistrarKind { TSP, ASP, Independent };
std::string_view registrar_kind_name(RegistrarKind kind);
RegistrarKind registrar_kind_from(std::string_view name);
// Registrar kind a party of this role runs as, if any.
std::optional<RegistrarKind> registrar_kind_of(Role role);

struct Party {
  std::string id;
  Role role = Role::User;
};

enum class Right : std::uint8_t { Provision = 1, Access = 2, Change = 4 };

class Rights {
 public:
  Rights() = default;
  Rights(std::initializer_list<Right> rights);

  // Comma-separated subset of provision, access, change.
  static Rights parse(std::string_view text);

  bool has(Right r) const { return (bits_ & static_cast<std::uint8_t>(r)) != 0; }
  bool empty() const { return bits_ == 0; }
  std::string to_string() const;

  friend bool operator==(const Rights&, const Rights&) = default;

 private:
  std::uint8_t bits_ = 0;
};

struct AuthorizationGrant {
  std::string id;
  std::string grantor;
  std::string grantee;
  Rights rights;
  ServiceSelector scope;
  E164Number number;
};

struct Subscription {
  E164Number number;
  std::string user;
  std::string tsp;
  bool enum_active = false;
  bool phone_active = false;
  std::string serving_registrar;
  std::string paid_by;  // user, or the ASP acting as registrant
};

Fields subscription_fields(const Subscription& s);
Subscription subscription_from_fields(const Fields& f);

enum class TransferState { Requested, OldNotified, RecordsMigrated, RegistryUpdated, Complete, Disputed };
std::string_view transfer_state_name(TransferState s);
TransferState transfer_state_from(std::string_view name);

struct TransferRecord {
  TransferRecord(std::string transfer_id, E164Number transfer_number)
      : id(std::move(transfer_id)), number(std::move(transfer_number)) {}

  std::string id;
  E164Number number;
  std::string user;
  std::string tsp;
  std::string from_registrar;
  std::string to_registrar;
  std::string owner_registry;
  TransferState state = TransferState::Requested;
  std::vector<NaptrRecord> migrated_records;
  std::vector<TransferState> history;
  std::vector<std::string> warnings;
  bool old_reachable = true;
  std::string dispute_reason;
};

Fields transfer_fields(const TransferRecord& t);
TransferRecord transfer_from_fields(const Fields& f);

struct AccessPolicy {
  // Model-1 family: the number's TSP may write network-related services
  // without an explicit grant.
  bool tsp_network_grant = false;
  std::set<std::string> network_related_services{"E2U+sip", "E2U+tel"};

  bool network_related(std::string_view service) const;
};

// What entitled (or failed to entitle) a write.
enum class WriteBasis { None, Subscriber, ServingRegistrar, ImplicitTsp, Grant };
std::string_view write_basis_name(WriteBasis b);

// Local Tier-2 store: per-number subscription, NAPTR set and grants, plus
// transfers this registrar is receiving. Pure state; the service wraps I/O.
class Registrar {
 public:
  struct Entry {
    Subscription subscription;
    std::vector<NaptrRecord> records;
    std::vector<AuthorizationGrant> grants;
    std::string transfer_out;  // id of an outbound transfer in progress
  };

  struct WriteOutcome {
    NaptrRecord record;
    bool replaced = false;
    WriteBasis basis = WriteBasis::None;
  };

  Registrar(std::string id, RegistrarKind kind, AccessPolicy policy);

  const std::string& id() const { return id_; }
  RegistrarKind kind() const { return kind_; }
  const AccessPolicy& policy() const { return policy_; }

  Entry& activate(Subscription subscription, std::vector<NaptrRecord> records = {});
  void erase(const E164Number& number);
  Entry* find(const E164Number& number);
  const Entry* find(const E164Number& number) const;

  WriteBasis write_basis(const std::string& actor, const Entry& entry, const NaptrRecord& record,
                         bool replacing) const;
  bool can_read_restricted(const std::string& actor, const Entry& entry, const NaptrRecord& record) const;

  // Merge keyed by (service, order, preference). All-or-nothing:
  // EnumInactive, or AccessDenied when any record lacks a basis.
  std::vector<WriteOutcome> provision_records(const std::string& actor, const E164Number& number,
                                              const std::vector<NaptrRecord>& records);

  // Filtered view; never denies. Restricted records need read rights.
  NaptrRecordSet get_records(const std::string& actor, const E164Number& number,
                             const ServiceSelector& selector) const;

  AuthorizationGrant grant(const std::string& user, const std::string& grantee, Rights rights,
                           ServiceSelector scope, const E164Number& number);
  AuthorizationGrant revoke(const std::string& user, const std::string& grant_id);

  // Writes without any access check. Harness backdoor for planted violations.
  WriteOutcome force_write(const E164Number& number, const NaptrRecord& record);

  TransferRecord& open_transfer(TransferRecord record);
  TransferRecord* find_transfer(const std::string& id);

  const std::map<E164Number, Entry>& entries() const { return entries_; }
  const std::map<std::string, TransferRecord>& transfers() const { return transfers_; }
  std::uint64_t grant_seq() const { return grant_seq_; }
  std::uint64_t transfer_seq() const { return transfer_seq_; }
  void restore_counters(std::uint64_t grant_seq, std::uint64_t transfer_seq);
  void restore_transfer(TransferRecord record);
  void restore_grant(AuthorizationGrant grant);

  std::string next_transfer_id();

 private:
  std::string id_;
  RegistrarKind kind_;
  AccessPolicy policy_;
  std::map<E164Number, Entry> entries_;
  std::map<std::string, TransferRecord> transfers_;
  std::uint64_t grant_seq_ = 0;
  std::uint64_t transfer_seq_ = 0;
};

// Topology facts a registrar needs beyond its own state.
struct RegistrarContext {
  int model_id = 1;
  std::set<RegistrarKind> permitted_kinds;
  std::string home_registry;
  std::string tier0_address = "tier0";
  ApexConfig apex;
  int transfer_retries = 2;
};

class TspDesk;

// Tier-2 actor. Address: "registrar:<id>".
class RegistrarService : public Actor {
 public:
  RegistrarService(Simulator& sim, Party party, RegistrarKind kind, RegistrarContext context,
                   AccessPolicy policy, TspDesk* own_desk = nullptr);

  Frame handle(const std::string& from, const Frame& request) override;

  Registrar& state() { return registrar_; }
  const Registrar& state() const { return registrar_; }
  const Party& party() const { return party_; }
  const RegistrarContext& context() const { return context_; }
  std::string address() const { return "registrar:" + registrar_.id(); }

  // Old-registrar side of a dispute: asks the new registrar to stop the
  // transfer and clears the local outbound marker on success.
  TransferRecord dispute(const std::string& transfer_id, const std::string& reason);

  void backdoor_write(const std::string& actor, const E164Number& number, const NaptrRecord& record);

 private:
  Frame dispatch(const std::string& from, const Frame& request);
  Frame on_subscribe(const Fields& in);
  Frame on_provision(const Fields& in);
  Frame on_get(const Fields& in);
  Frame on_grant(const Fields& in);
  Frame on_revoke(const Fields& in);
  Frame on_transfer_init(const Fields& in);
  Frame on_transfer_resume(const Fields& in);
  Frame on_transfer_dispute(const std::string& from, const Fields& in);
  Frame on_transfer_commit(const Fields& in);
  Frame on_migrate(const Fields& in);
  Frame on_notice(const std::string& from, const Fields& in);
  Frame on_disconnect(const Fields& in);

  void require_permitted_kind() const;
  void verify_user(const E164Number& number, const std::string& user, const std::string& tsp,
                   const std::optional<std::string>& proof);
  // Sends to the home registry, following one NotAuthoritative owner hint.
  Delegation registry_request(const std::string& registry, Frame request);
  std::optional<Frame> call_with_retry(const std::string& to, const Frame& request);
  void advance(TransferRecord& transfer, std::optional<TransferState> until);
  void set_state(TransferRecord& transfer, TransferState state);
  void audit_writes(const std::string& actor, const E164Number& number,
                    const std::vector<Registrar::WriteOutcome>& writes, bool backdoor);

  Simulator& sim_;
  Party party_;
  Registrar registrar_;
  RegistrarContext context_;
  TspDesk* own_desk_;
};

struct Assignment {
  E164Number number;
  std::string user;
  std::string token;
  bool phone_active = true;
};

// Telephone service side of a TSP: number assignment, identity confirmation
// for registrars, and telephone disconnect. Address: "tsp:<id>".
class TspDesk : public Actor {
 public:
  TspDesk(Simulator& sim, std::string tsp_id, std::string tier0_address, ApexConfig apex);

  Frame handle(const std::string& from, const Frame& request) override;

  const std::string& id() const { return id_; }
  std::string address() const { return "tsp:" + id_; }

  // Throws NoPhoneService or VerificationFailed.
  void confirm(const E164Number& number, const std::string& user, const std::optional<std::string>& token) const;

  const Assignment* find(const E164Number& number) const;
  const std::map<E164Number, Assignment>& assignments() const { return assignments_; }
  void restore(Assignment assignment);

 private:
  Frame dispatch(const std::string& from, const Frame& request);

  Simulator& sim_;
  std::string id_;
  std::string tier0_address_;
  ApexConfig apex_;
  std::map<E164Number, Assignment> assignments_;
};

}  // namespace enumdesk

#endif  // ENUMDESK_REGISTRAR_H_
