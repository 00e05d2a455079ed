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

#ifndef ENUMDESK_RESOLVER_H_
#define ENUMDESK_RESOLVER_H_

#include <map>
#include <string>
#include <vector>

#include "enumdesk/e164.h"
#include "enumdesk/naptr.h"
#include "enumdesk/simulator.h"

namespace enumdesk {

// One request/response pair seen on the wire during a resolution.
struct Hop {
  std::uint64_t seq = 0;
  std::string tier;  // tier0, tier1, tier2
  std::string to;
  std::string request_kind;
  std::string status;  // ok, timeout, or the error name
  std::string request;
  std::string response;

  std::string to_line() const;
};

struct Resolution {
  E164Number number;
  std::vector<std::string> uris;
  std::vector<std::string> warnings;
  std::vector<Hop> trace;
};

// number → domain → Tier 0 → Tier 1 → Tier 2 → NAPTR selection → URIs.
// Reads only; no actor state changes.
class Resolver {
 public:
  Resolver(Simulator& sim, std::string tier0_address = "tier0", ApexConfig apex = ApexConfig::standard(),
           CountryCodeTable table = CountryCodeTable::standard());

  // UnknownCountryCode, NoDelegation, EnumInactive. No matching service
  // yields an empty URI list.
  Resolution resolve(std::string_view raw_number, const ServiceSelector& service = ServiceSelector::any());

  // Wildcard resolution grouped by service; services without URIs omitted.
  std::map<std::string, std::vector<std::string>> resolve_all(std::string_view raw_number);

 private:
  NaptrRecordSet fetch(const E164Number& number);
  std::vector<Hop> hops_since(std::size_t trace_start) const;

  Simulator& sim_;
  std::string tier0_;
  ApexConfig apex_;
  CountryCodeTable table_;
};

}  // namespace enumdesk

#endif  // ENUMDESK_RESOLVER_H_
