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

#include "enumdesk/resolver.h"

#include <set>
#include <utility>

#include "enumdesk/error.h"
#include "enumdesk/registry.h"
#include "enumdesk/tier_client.h"

namespace enumdesk {
namespace {

constexpr const char* kSelf = "resolver";

std::string tier_of(const std::string& address) {
  if (address.rfind("registry:", 0) == 0) return "tier1";
  if (address.rfind("registrar:", 0) == 0) return "tier2";
  return "tier0";
}

}  // namespace

std::string Hop::to_line() const {
  Fields f{{"seq", std::to_string(seq)}, {"tier", tier}, {"to", to}, {"kind", request_kind}};
  try {
    Frame req = decode_frame(request);
    for (const char* key : {"domain", "number"}) {
      if (auto v = req.fields.get(key)) f.add(key, std::string(*v));
    }
  } catch (const Error&) {
  }
  f.add("status", status);
  return encode_fields(f);
}

Resolver::Resolver(Simulator& sim, std::string tier0_address, ApexConfig apex, CountryCodeTable table)
    : sim_(sim), tier0_(std::move(tier0_address)), apex_(std::move(apex)), table_(std::move(table)) {}

std::vector<Hop> Resolver::hops_since(std::size_t trace_start) const {
  std::vector<Hop> hops;
  const auto& trace = sim_.trace();
  for (std::size_t i = trace_start; i < trace.size(); ++i) {
    const TraceEntry& e = trace[i];
    if (e.from != kSelf) continue;
    Hop h;
    h.seq = e.seq;
    h.tier = tier_of(e.to);
    h.to = e.to;
    h.request = e.request;
    h.response = e.response;
    h.request_kind = decode_frame(e.request).kind;
    if (e.timed_out) {
      h.status = "timeout";
    } else {
      Frame reply = decode_frame(e.response);
      h.status = reply.ok() ? "ok" : reply.fields.get_or("error", "error");
    }
    hops.push_back(std::move(h));
  }
  return hops;
}

NaptrRecordSet Resolver::fetch(const E164Number& number) {
  TierClient tiers(sim_, kSelf, tier0_, apex_);
  Delegation d = tiers.lookup(number);
  Frame get{std::string(kind::kGet), Fields{{"number", number.full_digits()}, {"service", "*"}}};
  auto reply = tiers.call("registrar:" + d.registrar, get);
  if (!reply) fail(Errc::Timeout, "registrar:" + d.registrar);
  raise_if_error(*reply);
  if (reply->fields.get_or("serving", "0") != "1") fail(Errc::EnumInactive, number.render() + " at " + d.registrar);
  NaptrRecordSet set{number, {}};
  for (const auto& line : reply->fields.all("record")) set.records.push_back(parse_record(line));
  return set;
}

Resolution Resolver::resolve(std::string_view raw_number, const ServiceSelector& service) {
  E164Number number = parse_number(raw_number, std::nullopt, table_);
  std::size_t start = sim_.trace().size();
  Resolution out{number, {}, {}, {}};
  NaptrRecordSet set = fetch(number);
  RecordSetResolution r = resolve_record_set(set, service, number.render());
  out.uris = std::move(r.uris);
  out.warnings = std::move(r.warnings);
  out.trace = hops_since(start);
  return out;
}

std::map<std::string, std::vector<std::string>> Resolver::resolve_all(std::string_view raw_number) {
  E164Number number = parse_number(raw_number, std::nullopt, table_);
  NaptrRecordSet set = fetch(number);
  std::set<std::string> services;
  for (const auto& r : set.records) services.insert(r.service);
  std::map<std::string, std::vector<std::string>> out;
  for (const auto& s : services) {
    auto r = resolve_record_set(set, ServiceSelector(s), number.render());
    if (!r.uris.empty()) out.emplace(s, std::move(r.uris));
  }
  return out;
}

}  // namespace enumdesk
