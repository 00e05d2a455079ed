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

#include "enumdesk/registrar.h"

#include <algorithm>
#include <cstdio>
#include <sstream>
#include <utility>

#include "enumdesk/error.h"
#include "enumdesk/tier_client.h"

namespace enumdesk {
namespace {

bool starts_with(std::string_view s, std::string_view prefix) { return s.substr(0, prefix.size()) == prefix; }

std::string strip_prefix(const std::string& address, std::string_view prefix) {
  return starts_with(address, prefix) ? address.substr(prefix.size()) : address;
}

bool same_key(const NaptrRecord& a, const NaptrRecord& b) {
  return a.service == b.service && a.order == b.order && a.preference == b.preference;
}

// Parse errors from the record grammar surface as InvalidRecord.
NaptrRecord parse_wire_record(const std::string& line) {
  try {
    NaptrRecord r = parse_record(line);
    validate_record(r);
    return r;
  } catch (const Error& e) {
    if (e.code() == Errc::InvalidRecord) throw;
    fail(Errc::InvalidRecord, std::string(errc_name(e.code())) + ": " + e.detail());
  }
}

std::vector<NaptrRecord> records_from(const Fields& f) {
  std::vector<NaptrRecord> out;
  for (const auto& line : f.all("record")) out.push_back(parse_wire_record(line));
  return out;
}

void add_records(Fields& f, const std::vector<NaptrRecord>& records) {
  for (const auto& r : records) f.add("record", r.to_zone_line());
}

Frame request(std::string_view k, Fields fields) { return Frame{std::string(k), std::move(fields)}; }

}  // namespace

std::string_view role_name(Role role) {
  switch (role) {
    case Role::User:
      return "User";
    case Role::TSP:
      return "TSP";
    case Role::ASP:
      return "ASP";
    case Role::ISP:
      return "ISP";
    case Role::IndependentRegistrar:
      return "IndependentRegistrar";
    case Role::Registry:
      return "Registry";
  }
  return "User";
}

Role role_from(std::string_view name) {
  for (Role r : {Role::User, Role::TSP, Role::ASP, Role::ISP, Role::IndependentRegistrar, Role::Registry}) {
    if (role_name(r) == name) return r;
  }
  if (name == "Independent") return Role::IndependentRegistrar;
  fail(Errc::ConfigError, "unknown role '" + std::string(name) + "'");
}

std::string_view registrar_kind_name(RegistrarKind kind) {
  switch (kind) {
    case RegistrarKind::TSP:
      return "TSP";
    case RegistrarKind::ASP:
      return "ASP";
    case RegistrarKind::Independent:
      return "Independent";
  }
  return "Independent";
}

RegistrarKind registrar_kind_from(std::string_view name) {
  if (name == "TSP") return RegistrarKind::TSP;
  if (name == "ASP") return RegistrarKind::ASP;
  if (name == "Independent" || name == "IndependentRegistrar") return RegistrarKind::Independent;
  fail(Errc::ConfigError, "unknown registrar kind '" + std::string(name) + "'");
}

std::optional<RegistrarKind> registrar_kind_of(Role role) {
  switch (role) {
    case Role::TSP:
      return RegistrarKind::TSP;
    case Role::ASP:
    case Role::ISP:
      return RegistrarKind::ASP;
    case Role::IndependentRegistrar:
      return RegistrarKind::Independent;
    default:
      return std::nullopt;
  }
}

Rights::Rights(std::initializer_list<Right> rights) {
  for (Right r : rights) bits_ |= static_cast<std::uint8_t>(r);
}

Rights Rights::parse(std::string_view text) {
  Rights out;
  std::string item;
  std::istringstream in{std::string(text)};
  while (std::getline(in, item, ',')) {
    if (item == "provision") {
      out.bits_ |= static_cast<std::uint8_t>(Right::Provision);
    } else if (item == "access") {
      out.bits_ |= static_cast<std::uint8_t>(Right::Access);
    } else if (item == "change") {
      out.bits_ |= static_cast<std::uint8_t>(Right::Change);
    } else if (!item.empty()) {
      fail(Errc::BadFrame, "unknown right '" + item + "'");
    }
  }
  return out;
}

std::string Rights::to_string() const {
  std::string out;
  auto append = [&](Right r, const char* name) {
    if (!has(r)) return;
    if (!out.empty()) out += ',';
    out += name;
  };
  append(Right::Provision, "provision");
  append(Right::Access, "access");
  append(Right::Change, "change");
  return out;
}

Fields subscription_fields(const Subscription& s) {
  return Fields{{"number", s.number.full_digits()},
                {"user", s.user},
                {"tsp", s.tsp},
                {"enum_active", s.enum_active ? "1" : "0"},
                {"phone_active", s.phone_active ? "1" : "0"},
                {"serving_registrar", s.serving_registrar},
                {"paid_by", s.paid_by}};
}

Subscription subscription_from_fields(const Fields& f) {
  return Subscription{number_from_digits(f.require("number")),
                      f.require("user"),
                      f.get_or("tsp", ""),
                      f.get_or("enum_active", "0") == "1",
                      f.get_or("phone_active", "0") == "1",
                      f.get_or("serving_registrar", ""),
                      f.get_or("paid_by", "")};
}

std::string_view transfer_state_name(TransferState s) {
  switch (s) {
    case TransferState::Requested:
      return "Requested";
    case TransferState::OldNotified:
      return "OldNotified";
    case TransferState::RecordsMigrated:
      return "RecordsMigrated";
    case TransferState::RegistryUpdated:
      return "RegistryUpdated";
    case TransferState::Complete:
      return "Complete";
    case TransferState::Disputed:
      return "Disputed";
  }
  return "Requested";
}

TransferState transfer_state_from(std::string_view name) {
  for (TransferState s : {TransferState::Requested, TransferState::OldNotified, TransferState::RecordsMigrated,
                          TransferState::RegistryUpdated, TransferState::Complete, TransferState::Disputed}) {
    if (transfer_state_name(s) == name) return s;
  }
  fail(Errc::BadFrame, "unknown transfer state '" + std::string(name) + "'");
}

Fields transfer_fields(const TransferRecord& t) {
  Fields f{{"transfer", t.id},
           {"number", t.number.full_digits()},
           {"user", t.user},
           {"tsp", t.tsp},
           {"from", t.from_registrar},
           {"to", t.to_registrar},
           {"owner", t.owner_registry},
           {"state", std::string(transfer_state_name(t.state))},
           {"old_reachable", t.old_reachable ? "1" : "0"},
           {"reason", t.dispute_reason}};
  std::string history;
  for (auto s : t.history) {
    if (!history.empty()) history += ',';
    history += transfer_state_name(s);
  }
  f.add("history", history);
  for (const auto& w : t.warnings) f.add("warning", w);
  add_records(f, t.migrated_records);
  return f;
}

TransferRecord transfer_from_fields(const Fields& f) {
  TransferRecord t{f.require("transfer"), number_from_digits(f.require("number"))};
  t.user = f.get_or("user", "");
  t.tsp = f.get_or("tsp", "");
  t.from_registrar = f.require("from");
  t.to_registrar = f.require("to");
  t.owner_registry = f.get_or("owner", "");
  t.state = transfer_state_from(f.require("state"));
  t.old_reachable = f.get_or("old_reachable", "1") == "1";
  t.dispute_reason = f.get_or("reason", "");
  std::istringstream in(f.get_or("history", ""));
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) t.history.push_back(transfer_state_from(item));
  }
  t.warnings = f.all("warning");
  t.migrated_records = records_from(f);
  return t;
}

bool AccessPolicy::network_related(std::string_view service) const {
  return network_related_services.count(std::string(service)) != 0;
}

std::string_view write_basis_name(WriteBasis b) {
  switch (b) {
    case WriteBasis::None:
      return "none";
    case WriteBasis::Subscriber:
      return "subscriber";
    case WriteBasis::ServingRegistrar:
      return "registrar";
    case WriteBasis::ImplicitTsp:
      return "implicit_tsp";
    case WriteBasis::Grant:
      return "grant";
  }
  return "none";
}

Registrar::Registrar(std::string id, RegistrarKind kind, AccessPolicy policy)
    : id_(std::move(id)), kind_(kind), policy_(std::move(policy)) {}

Registrar::Entry& Registrar::activate(Subscription subscription, std::vector<NaptrRecord> records) {
  subscription.enum_active = true;
  subscription.phone_active = true;
  subscription.serving_registrar = id_;
  E164Number key = subscription.number;
  return entries_.insert_or_assign(key, Entry{std::move(subscription), std::move(records), {}, {}}).first->second;
}

void Registrar::erase(const E164Number& number) { entries_.erase(number); }

Registrar::Entry* Registrar::find(const E164Number& number) {
  auto it = entries_.find(number);
  return it == entries_.end() ? nullptr : &it->second;
}

const Registrar::Entry* Registrar::find(const E164Number& number) const {
  auto it = entries_.find(number);
  return it == entries_.end() ? nullptr : &it->second;
}

WriteBasis Registrar::write_basis(const std::string& actor, const Entry& entry, const NaptrRecord& record,
                                  bool replacing) const {
  if (actor == entry.subscription.user) return WriteBasis::Subscriber;
  if (actor == id_) return WriteBasis::ServingRegistrar;
  if (policy_.tsp_network_grant && actor == entry.subscription.tsp && policy_.network_related(record.service))
    return WriteBasis::ImplicitTsp;
  const Right needed = replacing ? Right::Change : Right::Provision;
  for (const auto& g : entry.grants) {
    if (g.grantee == actor && g.rights.has(needed) && g.scope.matches(record.service)) return WriteBasis::Grant;
  }
  return WriteBasis::None;
}

bool Registrar::can_read_restricted(const std::string& actor, const Entry& entry, const NaptrRecord& record) const {
  if (actor.empty()) return false;
  if (actor == entry.subscription.user || actor == id_) return true;
  if (policy_.tsp_network_grant && actor == entry.subscription.tsp && policy_.network_related(record.service))
    return true;
  for (const auto& g : entry.grants) {
    if (g.grantee == actor && g.rights.has(Right::Access) && g.scope.matches(record.service)) return true;
  }
  return false;
}

std::vector<Registrar::WriteOutcome> Registrar::provision_records(const std::string& actor, const E164Number& number,
                                                                  const std::vector<NaptrRecord>& records) {
  Entry* entry = find(number);
  if (!entry || !entry->subscription.enum_active) fail(Errc::EnumInactive, number.render() + " at " + id_);
  for (const auto& r : records) {
    try {
      validate_record(r);
    } catch (const Error& e) {
      fail(Errc::InvalidRecord, e.what());
    }
  }

  std::vector<NaptrRecord> merged = entry->records;
  std::vector<WriteOutcome> outcomes;
  for (const auto& r : records) {
    auto it = std::find_if(merged.begin(), merged.end(), [&](const NaptrRecord& m) { return same_key(m, r); });
    bool replacing = it != merged.end();
    WriteBasis basis = write_basis(actor, *entry, r, replacing);
    if (basis == WriteBasis::None)
      fail(Errc::AccessDenied, actor + " may not " + (replacing ? "change " : "provision ") + r.service + " for " +
                                   number.render());
    if (replacing) {
      *it = r;
    } else {
      merged.push_back(r);
    }
    outcomes.push_back(WriteOutcome{r, replacing, basis});
  }
  entry->records = std::move(merged);
  return outcomes;
}

NaptrRecordSet Registrar::get_records(const std::string& actor, const E164Number& number,
                                      const ServiceSelector& selector) const {
  NaptrRecordSet view{number, {}};
  const Entry* entry = find(number);
  if (!entry || !entry->subscription.enum_active) return view;
  for (const auto& r : entry->records) {
    if (!selector.matches(r.service)) continue;
    if (r.visibility == Visibility::Restricted && !can_read_restricted(actor, *entry, r)) continue;
    view.records.push_back(r);
  }
  return view;
}

AuthorizationGrant Registrar::grant(const std::string& user, const std::string& grantee, Rights rights,
                                    ServiceSelector scope, const E164Number& number) {
  Entry* entry = find(number);
  if (!entry || entry->subscription.user != user) fail(Errc::NotSubscriber, user + " for " + number.render());
  if (rights.empty()) fail(Errc::BadFrame, "grant without rights");
  AuthorizationGrant g{id_ + "/G" + std::to_string(++grant_seq_), user, grantee, rights, std::move(scope), number};
  entry->grants.push_back(g);
  return g;
}

AuthorizationGrant Registrar::revoke(const std::string& user, const std::string& grant_id) {
  for (auto& [number, entry] : entries_) {
    auto it = std::find_if(entry.grants.begin(), entry.grants.end(),
                           [&](const AuthorizationGrant& g) { return g.id == grant_id; });
    if (it == entry.grants.end()) continue;
    if (entry.subscription.user != user) fail(Errc::NotSubscriber, user + " for " + number.render());
    AuthorizationGrant g = *it;
    entry.grants.erase(it);
    return g;
  }
  fail(Errc::UnknownGrant, grant_id);
}

Registrar::WriteOutcome Registrar::force_write(const E164Number& number, const NaptrRecord& record) {
  Entry* entry = find(number);
  if (!entry) fail(Errc::EnumInactive, number.render() + " at " + id_);
  auto it = std::find_if(entry->records.begin(), entry->records.end(),
                         [&](const NaptrRecord& m) { return same_key(m, record); });
  bool replacing = it != entry->records.end();
  if (replacing) {
    *it = record;
  } else {
    entry->records.push_back(record);
  }
  return WriteOutcome{record, replacing, WriteBasis::None};
}

TransferRecord& Registrar::open_transfer(TransferRecord record) {
  std::string key = record.id;
  return transfers_.insert_or_assign(key, std::move(record)).first->second;
}

TransferRecord* Registrar::find_transfer(const std::string& id) {
  auto it = transfers_.find(id);
  return it == transfers_.end() ? nullptr : &it->second;
}

void Registrar::restore_counters(std::uint64_t grant_seq, std::uint64_t transfer_seq) {
  grant_seq_ = grant_seq;
  transfer_seq_ = transfer_seq;
}

void Registrar::restore_transfer(TransferRecord record) { open_transfer(std::move(record)); }

void Registrar::restore_grant(AuthorizationGrant grant) {
  Entry* entry = find(grant.number);
  if (!entry) fail(Errc::SnapshotError, "grant " + grant.id + " for unknown number " + grant.number.render());
  entry->grants.push_back(std::move(grant));
}

std::string Registrar::next_transfer_id() { return id_ + "/T" + std::to_string(++transfer_seq_); }

RegistrarService::RegistrarService(Simulator& sim, Party party, RegistrarKind kind, RegistrarContext context,
                                   AccessPolicy policy, TspDesk* own_desk)
    : sim_(sim),
      party_(party),
      registrar_(party.id, kind, std::move(policy)),
      context_(std::move(context)),
      own_desk_(own_desk) {}

Frame RegistrarService::handle(const std::string& from, const Frame& request) {
  try {
    return dispatch(from, request);
  } catch (const Error& e) {
    return make_error_response(request.kind, e);
  }
}

Frame RegistrarService::dispatch(const std::string& from, const Frame& request) {
  const Fields& in = request.fields;
  const std::string& k = request.kind;
  if (k == kind::kSubscribe) return on_subscribe(in);
  if (k == kind::kProvision) return on_provision(in);
  if (k == kind::kGet) return on_get(in);
  if (k == kind::kGrant) return on_grant(in);
  if (k == kind::kRevoke) return on_revoke(in);
  if (k == kind::kTransferInit) return on_transfer_init(in);
  if (k == kind::kTransferResume) return on_transfer_resume(in);
  if (k == kind::kTransferDispute) return on_transfer_dispute(from, in);
  if (k == kind::kTransferCommit) return on_transfer_commit(in);
  if (k == kind::kMigrateReq) return on_migrate(in);
  if (k == kind::kNotice) return on_notice(from, in);
  if (k == kind::kDisconnect) return on_disconnect(in);
  fail(Errc::BadFrame, "registrar cannot handle " + k);
}

void RegistrarService::require_permitted_kind() const {
  if (context_.permitted_kinds.count(registrar_.kind()) == 0)
    fail(Errc::RegistrarKindForbidden, std::string(registrar_kind_name(registrar_.kind())) + " registrar " +
                                           registrar_.id() + " in model " + std::to_string(context_.model_id));
}

void RegistrarService::verify_user(const E164Number& number, const std::string& user, const std::string& tsp,
                                   const std::optional<std::string>& proof) {
  // Model-1 family: a TSP registrar already knows its own customers.
  bool own_customer = registrar_.kind() == RegistrarKind::TSP && tsp == party_.id && own_desk_ != nullptr;
  if (own_customer && (context_.model_id == 1 || context_.model_id == 4)) {
    own_desk_->confirm(number, user, std::nullopt);
    return;
  }
  Fields f{{"number", number.full_digits()}, {"user", user}};
  if (proof) f.add("token", *proof);
  auto reply = call_with_retry("tsp:" + tsp, request(kind::kConfirm, std::move(f)));
  if (!reply) fail(Errc::VerificationFailed, "no confirmation from tsp:" + tsp);
  raise_if_error(*reply);
}

Delegation RegistrarService::registry_request(const std::string& registry, Frame req) {
  auto reply = sim_.call(address(), "registry:" + registry, req);
  if (!reply) fail(Errc::Timeout, "registry:" + registry);
  if (!reply->ok() && reply->fields.get_or("error", "") == errc_name(Errc::NotAuthoritative)) {
    std::string owner = reply->fields.get_or("detail", "");
    if (!owner.empty() && owner != registry) {
      reply = sim_.call(address(), "registry:" + owner, req);
      if (!reply) fail(Errc::Timeout, "registry:" + owner);
    }
  }
  raise_if_error(*reply);
  return delegation_from_fields(reply->fields);
}

std::optional<Frame> RegistrarService::call_with_retry(const std::string& to, const Frame& req) {
  for (int attempt = 0; attempt <= context_.transfer_retries; ++attempt) {
    if (auto reply = sim_.call(address(), to, req)) return reply;
  }
  return std::nullopt;
}

Frame RegistrarService::on_subscribe(const Fields& in) {
  require_permitted_kind();
  E164Number number = number_from_digits(in.require("number"));
  std::string user = in.require("user");
  std::string tsp = in.require("tsp");
  // An ASP registrant on the user's behalf exists only where the TSP is the
  // registrar; elsewhere the user pays directly.
  std::string via = in.get_or("via", "");
  if (context_.model_id != 1 && context_.model_id != 4) via.clear();

  if (const auto* entry = registrar_.find(number); entry && entry->subscription.enum_active)
    fail(Errc::AlreadySubscribed, number.render() + " at " + registrar_.id());
  TierClient tiers(sim_, address(), context_.tier0_address, context_.apex);
  try {
    Delegation d = tiers.lookup(number);
    if (d.registrar != registrar_.id()) fail(Errc::AlreadySubscribed, number.render() + " at " + d.registrar);
  } catch (const Error& e) {
    if (e.code() != Errc::NoDelegation) throw;
  }

  std::optional<std::string> proof;
  if (auto token = in.get("proof")) proof = std::string(*token);
  verify_user(number, user, tsp, proof);

  std::string payer = via.empty() ? user : via;
  Delegation d = registry_request(context_.home_registry,
                                  request(kind::kRegister, Fields{{"number", number.full_digits()},
                                                                  {"registrar", registrar_.id()},
                                                                  {"payer", registrar_.id()}}));
  auto& entry = registrar_.activate(Subscription{number, user, tsp, true, true, registrar_.id(), payer});

  Fields audit = subscription_fields(entry.subscription);
  audit.add("owner", d.owner);
  sim_.audit("subscribe", audit);
  Fields out = subscription_fields(entry.subscription);
  out.add("owner", d.owner);
  out.add("serial", std::to_string(d.serial));
  return make_response(kind::kSubscribe, std::move(out));
}

void RegistrarService::audit_writes(const std::string& actor, const E164Number& number,
                                    const std::vector<Registrar::WriteOutcome>& writes, bool backdoor) {
  for (const auto& w : writes) {
    sim_.audit("write", Fields{{"registrar", registrar_.id()},
                               {"actor", actor},
                               {"number", number.full_digits()},
                               {"service", w.record.service},
                               {"order", std::to_string(w.record.order)},
                               {"preference", std::to_string(w.record.preference)},
                               {"replaced", w.replaced ? "1" : "0"},
                               {"basis", std::string(write_basis_name(w.basis))},
                               {"backdoor", backdoor ? "1" : "0"}});
  }
}

Frame RegistrarService::on_provision(const Fields& in) {
  E164Number number = number_from_digits(in.require("number"));
  std::string actor = in.require("actor");
  auto writes = registrar_.provision_records(actor, number, records_from(in));
  audit_writes(actor, number, writes, false);
  Fields out{{"number", number.full_digits()}, {"written", std::to_string(writes.size())}};
  add_records(out, registrar_.find(number)->records);
  return make_response(kind::kProvision, std::move(out));
}

Frame RegistrarService::on_get(const Fields& in) {
  E164Number number = number_from_digits(in.require("number"));
  const auto* entry = registrar_.find(number);
  bool serving = entry && entry->subscription.enum_active;
  NaptrRecordSet view =
      registrar_.get_records(in.get_or("actor", ""), number, ServiceSelector::parse(in.get_or("service", "*")));
  Fields out{{"number", number.full_digits()}, {"serving", serving ? "1" : "0"}};
  add_records(out, view.records);
  return make_response(kind::kGet, std::move(out));
}

Frame RegistrarService::on_grant(const Fields& in) {
  E164Number number = number_from_digits(in.require("number"));
  AuthorizationGrant g = registrar_.grant(in.require("user"), in.require("grantee"),
                                          Rights::parse(in.require("rights")),
                                          ServiceSelector::parse(in.get_or("scope", "*")), number);
  Fields f{{"grant", g.id},
           {"registrar", registrar_.id()},
           {"grantor", g.grantor},
           {"grantee", g.grantee},
           {"rights", g.rights.to_string()},
           {"scope", g.scope.to_string()},
           {"number", number.full_digits()}};
  sim_.audit("grant", f);
  return make_response(kind::kGrant, std::move(f));
}

Frame RegistrarService::on_revoke(const Fields& in) {
  AuthorizationGrant g = registrar_.revoke(in.require("user"), in.require("grant"));
  Fields f{{"grant", g.id},
           {"registrar", registrar_.id()},
           {"grantee", g.grantee},
           {"number", g.number.full_digits()}};
  sim_.audit("revoke", f);
  return make_response(kind::kRevoke, std::move(f));
}

void RegistrarService::set_state(TransferRecord& t, TransferState state) {
  t.state = state;
  t.history.push_back(state);
  sim_.audit("transfer_state", Fields{{"transfer", t.id},
                                      {"number", t.number.full_digits()},
                                      {"state", std::string(transfer_state_name(state))},
                                      {"from", t.from_registrar},
                                      {"to", t.to_registrar},
                                      {"tick", std::to_string(sim_.tick())}});
}

Frame RegistrarService::on_transfer_init(const Fields& in) {
  require_permitted_kind();
  E164Number number = number_from_digits(in.require("number"));
  std::string user = in.require("user");
  std::string tsp = in.require("tsp");

  TierClient tiers(sim_, address(), context_.tier0_address, context_.apex);
  Delegation d = [&] {
    try {
      return tiers.lookup(number);
    } catch (const Error& e) {
      if (e.code() == Errc::NoDelegation) fail(Errc::EnumInactive, number.render());
      throw;
    }
  }();
  if (d.registrar == registrar_.id()) fail(Errc::SameRegistrar, registrar_.id());
  std::optional<std::string> proof;
  if (auto token = in.get("proof")) proof = std::string(*token);
  verify_user(number, user, tsp, proof);

  TransferRecord t{registrar_.next_transfer_id(), number};
  t.user = user;
  t.tsp = tsp;
  t.from_registrar = d.registrar;
  t.to_registrar = registrar_.id();
  t.owner_registry = d.owner;
  auto& stored = registrar_.open_transfer(std::move(t));
  set_state(stored, TransferState::Requested);

  std::optional<TransferState> until;
  if (auto u = in.get("until")) until = transfer_state_from(*u);
  advance(stored, until);
  return make_response(kind::kTransferInit, transfer_fields(stored));
}

Frame RegistrarService::on_transfer_resume(const Fields& in) {
  TransferRecord* t = registrar_.find_transfer(in.require("transfer"));
  if (!t) fail(Errc::UnknownTransfer, in.require("transfer"));
  std::optional<TransferState> until;
  if (auto u = in.get("until")) until = transfer_state_from(*u);
  advance(*t, until);
  return make_response(kind::kTransferResume, transfer_fields(*t));
}

void RegistrarService::advance(TransferRecord& t, std::optional<TransferState> until) {
  const std::string old_address = "registrar:" + t.from_registrar;
  Fields base{{"number", t.number.full_digits()}, {"transfer", t.id}, {"new_registrar", registrar_.id()}};

  while (t.state != TransferState::Complete && t.state != TransferState::Disputed) {
    if (until && t.state == *until) return;
    switch (t.state) {
      case TransferState::Requested: {
        Fields f = base;
        f.add("phase", "notify");
        auto reply = call_with_retry(old_address, request(kind::kMigrateReq, f));
        if (!reply) {
          t.old_reachable = false;
          t.warnings.push_back("old registrar " + t.from_registrar + " unreachable at notify");
        } else if (!reply->ok()) {
          t.old_reachable = false;
          t.warnings.push_back("old registrar refused notify: " + reply->fields.get_or("error", ""));
        }
        set_state(t, TransferState::OldNotified);
        break;
      }
      case TransferState::OldNotified: {
        t.migrated_records.clear();
        if (t.old_reachable) {
          Fields f = base;
          f.add("phase", "fetch");
          auto reply = call_with_retry(old_address, request(kind::kMigrateReq, f));
          if (reply && reply->ok()) {
            t.migrated_records = records_from(reply->fields);
          } else {
            t.old_reachable = false;
            t.warnings.push_back("old registrar " + t.from_registrar + " unreachable at fetch");
          }
        }
        if (!t.old_reachable) t.warnings.push_back("migrated with an empty record set");
        sim_.audit("migrate_in", Fields{{"transfer", t.id},
                                        {"number", t.number.full_digits()},
                                        {"registrar", registrar_.id()},
                                        {"digest", record_multiset_digest(t.migrated_records)},
                                        {"old_reachable", t.old_reachable ? "1" : "0"}});
        set_state(t, TransferState::RecordsMigrated);
        break;
      }
      case TransferState::RecordsMigrated: {
        try {
          registry_request(t.owner_registry, request(kind::kChange, Fields{{"number", t.number.full_digits()},
                                                                           {"new", registrar_.id()},
                                                                           {"old", t.from_registrar},
                                                                           {"charge", "1"}}));
        } catch (const Error& e) {
          t.warnings.push_back(std::string("halted: ") + e.what());
          return;
        }
        set_state(t, TransferState::RegistryUpdated);
        break;
      }
      case TransferState::RegistryUpdated: {
        registrar_.activate(Subscription{t.number, t.user, t.tsp, true, true, registrar_.id(), t.user},
                            t.migrated_records);
        Fields f = base;
        sim_.post(address(), old_address, request(kind::kTransferCommit, std::move(f)));
        set_state(t, TransferState::Complete);
        break;
      }
      default:
        return;
    }
  }
}

Frame RegistrarService::on_transfer_dispute(const std::string& from, const Fields& in) {
  std::string id = in.require("transfer");
  TransferRecord* t = registrar_.find_transfer(id);
  if (!t) fail(Errc::UnknownTransfer, id);
  std::string by = in.get_or("by", strip_prefix(from, "registrar:"));
  if (by != t->from_registrar) fail(Errc::AccessDenied, by + " is not the old registrar of " + id);
  if (t->state == TransferState::Complete) fail(Errc::AlreadyComplete, id);
  if (t->state == TransferState::Disputed) return make_response(kind::kTransferDispute, transfer_fields(*t));

  if (t->state == TransferState::RegistryUpdated) {
    registry_request(t->owner_registry, request(kind::kChange, Fields{{"number", t->number.full_digits()},
                                                                      {"new", t->from_registrar},
                                                                      {"old", registrar_.id()},
                                                                      {"charge", "0"}}));
  }
  t->dispute_reason = in.get_or("reason", "");
  set_state(*t, TransferState::Disputed);
  sim_.audit("dispute", Fields{{"transfer", id},
                               {"number", t->number.full_digits()},
                               {"by", by},
                               {"reason", t->dispute_reason}});
  return make_response(kind::kTransferDispute, transfer_fields(*t));
}

TransferRecord RegistrarService::dispute(const std::string& transfer_id, const std::string& reason) {
  auto slash = transfer_id.rfind('/');
  if (slash == std::string::npos) fail(Errc::UnknownTransfer, transfer_id);
  std::string target = "registrar:" + transfer_id.substr(0, slash);
  auto reply = sim_.call(address(), target,
                         request(kind::kTransferDispute,
                                 Fields{{"transfer", transfer_id}, {"reason", reason}, {"by", registrar_.id()}}));
  if (!reply) fail(Errc::Timeout, target);
  raise_if_error(*reply);
  TransferRecord t = transfer_from_fields(reply->fields);
  if (auto* entry = registrar_.find(t.number); entry && entry->transfer_out == transfer_id) entry->transfer_out.clear();
  return t;
}

Frame RegistrarService::on_transfer_commit(const Fields& in) {
  E164Number number = number_from_digits(in.require("number"));
  std::string id = in.require("transfer");
  auto* entry = registrar_.find(number);
  bool purged = false;
  if (entry && (entry->transfer_out.empty() || entry->transfer_out == id)) {
    sim_.audit("purge", Fields{{"transfer", id},
                               {"number", number.full_digits()},
                               {"registrar", registrar_.id()},
                               {"digest", record_multiset_digest(entry->records)}});
    registrar_.erase(number);
    purged = true;
  }
  return make_response(kind::kTransferCommit, Fields{{"purged", purged ? "1" : "0"}});
}

Frame RegistrarService::on_migrate(const Fields& in) {
  E164Number number = number_from_digits(in.require("number"));
  auto* entry = registrar_.find(number);
  if (!entry) fail(Errc::UnknownSubscription, number.render() + " at " + registrar_.id());
  std::string phase = in.require("phase");
  std::string id = in.require("transfer");
  if (phase == "notify") {
    entry->transfer_out = id;
    sim_.audit("transfer_notice", Fields{{"transfer", id},
                                         {"number", number.full_digits()},
                                         {"registrar", registrar_.id()},
                                         {"new_registrar", in.get_or("new_registrar", "")}});
    return make_response(kind::kMigrateResp, Fields{{"transfer", id}});
  }
  if (phase == "fetch") {
    sim_.audit("migrate_out", Fields{{"transfer", id},
                                     {"number", number.full_digits()},
                                     {"registrar", registrar_.id()},
                                     {"digest", record_multiset_digest(entry->records)}});
    Fields out{{"transfer", id}};
    add_records(out, entry->records);
    return make_response(kind::kMigrateResp, std::move(out));
  }
  fail(Errc::BadFrame, "unknown migrate phase '" + phase + "'");
}

Frame RegistrarService::on_notice(const std::string& from, const Fields& in) {
  sim_.audit("notice", Fields{{"registrar", registrar_.id()},
                              {"number", in.get_or("number", "")},
                              {"new_registrar", in.get_or("new_registrar", "")},
                              {"registry", in.get_or("registry", strip_prefix(from, "registry:"))}});
  return make_response(kind::kNotice);
}

Frame RegistrarService::on_disconnect(const Fields& in) {
  E164Number number = number_from_digits(in.require("number"));
  std::string user = in.require("user");
  std::string k = in.get_or("kind", "enum_only");
  if (k != "enum_only" && k != "telephone") fail(Errc::BadFrame, "unknown disconnect kind '" + k + "'");
  auto* entry = registrar_.find(number);
  if (!entry) fail(Errc::UnknownSubscription, number.render() + " at " + registrar_.id());
  if (entry->subscription.user != user) fail(Errc::NotSubscriber, user + " for " + number.render());

  TierClient tiers(sim_, address(), context_.tier0_address, context_.apex);
  try {
    Delegation d = tiers.lookup(number);
    registry_request(d.owner, request(kind::kRemove, Fields{{"number", number.full_digits()},
                                                            {"registrar", registrar_.id()}}));
  } catch (const Error& e) {
    if (e.code() != Errc::NoDelegation) throw;
  }

  Subscription s = entry->subscription;
  s.enum_active = false;
  s.phone_active = k == "enum_only";
  registrar_.erase(number);
  Fields f = subscription_fields(s);
  f.add("kind", k);
  sim_.audit("disconnect", f);
  return make_response(kind::kDisconnect, std::move(f));
}

void RegistrarService::backdoor_write(const std::string& actor, const E164Number& number, const NaptrRecord& record) {
  auto outcome = registrar_.force_write(number, record);
  audit_writes(actor, number, {outcome}, true);
}

TspDesk::TspDesk(Simulator& sim, std::string tsp_id, std::string tier0_address, ApexConfig apex)
    : sim_(sim), id_(std::move(tsp_id)), tier0_address_(std::move(tier0_address)), apex_(std::move(apex)) {}

Frame TspDesk::handle(const std::string& from, const Frame& request) {
  try {
    return dispatch(from, request);
  } catch (const Error& e) {
    return make_error_response(request.kind, e);
  }
}

void TspDesk::confirm(const E164Number& number, const std::string& user,
                      const std::optional<std::string>& token) const {
  const Assignment* a = find(number);
  if (!a || !a->phone_active) fail(Errc::NoPhoneService, number.render() + " at " + id_);
  if (a->user != user) fail(Errc::VerificationFailed, user + " is not assigned " + number.render());
  if (token && *token != a->token) fail(Errc::VerificationFailed, "bad assignment token for " + number.render());
}

const Assignment* TspDesk::find(const E164Number& number) const {
  auto it = assignments_.find(number);
  return it == assignments_.end() ? nullptr : &it->second;
}

void TspDesk::restore(Assignment assignment) {
  E164Number key = assignment.number;
  assignments_.insert_or_assign(key, std::move(assignment));
}

Frame TspDesk::dispatch(const std::string&, const Frame& req) {
  const Fields& in = req.fields;
  if (req.kind == kind::kAssign) {
    E164Number number = number_from_digits(in.require("number"));
    std::string user = in.require("user");
    if (const Assignment* a = find(number); a && a->user != user)
      fail(Errc::AlreadySubscribed, number.render() + " is assigned at " + id_);
    char token[17];
    std::snprintf(token, sizeof token, "%016llx", static_cast<unsigned long long>(sim_.rng()()));
    assignments_.insert_or_assign(number, Assignment{number, user, token, true});
    sim_.audit("assign", Fields{{"tsp", id_}, {"number", number.full_digits()}, {"user", user}});
    return make_response(req.kind, Fields{{"number", number.full_digits()}, {"token", token}});
  }
  if (req.kind == kind::kConfirm) {
    E164Number number = number_from_digits(in.require("number"));
    std::optional<std::string> token;
    if (auto t = in.get("token")) token = std::string(*t);
    confirm(number, in.require("user"), token);
    return make_response(req.kind, Fields{{"confirmed", "1"}});
  }
  if (req.kind == kind::kPhoneDisconnect) {
    E164Number number = number_from_digits(in.require("number"));
    std::string user = in.require("user");
    const Assignment* a = find(number);
    if (!a) fail(Errc::UnknownSubscription, number.render() + " at " + id_);
    if (a->user != user) fail(Errc::NotSubscriber, user + " for " + number.render());

    TierClient tiers(sim_, address(), tier0_address_, apex_);
    try {
      Delegation d = tiers.lookup(number);
      auto reply = sim_.call(address(), "registrar:" + d.registrar,
                             request(kind::kDisconnect, Fields{{"number", number.full_digits()},
                                                               {"user", user},
                                                               {"kind", "telephone"}}));
      if (!reply) fail(Errc::Timeout, "registrar:" + d.registrar);
      raise_if_error(*reply);
    } catch (const Error& e) {
      if (e.code() != Errc::NoDelegation) throw;
    }
    assignments_.erase(number);
    sim_.audit("phone_disconnect", Fields{{"tsp", id_}, {"number", number.full_digits()}, {"user", user}});
    return make_response(req.kind, Fields{{"number", number.full_digits()},
                                          {"enum_active", "0"},
                                          {"phone_active", "0"}});
  }
  fail(Errc::BadFrame, "tsp desk cannot handle " + req.kind);
}

}  // namespace enumdesk
