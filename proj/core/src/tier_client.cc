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

#include "enumdesk/tier_client.h"

#include <utility>

#include "enumdesk/error.h"

namespace enumdesk {

TierClient::TierClient(Simulator& sim, std::string self, std::string tier0_address, ApexConfig apex)
    : sim_(sim), self_(std::move(self)), tier0_(std::move(tier0_address)), apex_(std::move(apex)) {}

std::optional<Frame> TierClient::call(const std::string& to, const Frame& request) {
  if (auto reply = sim_.call(self_, to, request)) return reply;
  return sim_.call(self_, to, request);
}

std::vector<std::string> TierClient::discover(const E164Number& number) {
  Frame request{std::string(kind::kDiscover), Fields{{"domain", to_domain(number, apex_).render()}}};
  auto reply = call(tier0_, request);
  if (!reply) fail(Errc::Timeout, tier0_);
  raise_if_error(*reply);
  return reply->fields.all("registry");
}

Delegation TierClient::lookup(const E164Number& number) { return lookup(number, discover(number)); }

Delegation TierClient::lookup(const E164Number& number, const std::vector<std::string>& registries) {
  Frame request{std::string(kind::kLookup), Fields{{"domain", to_domain(number, apex_).render()}}};
  std::optional<Error> last;
  for (const auto& id : registries) {
    auto reply = call("registry:" + id, request);
    if (!reply) continue;
    try {
      raise_if_error(*reply);
      return delegation_from_fields(reply->fields);
    } catch (const Error& e) {
      last = e;
    }
  }
  if (last) throw *last;
  fail(Errc::Timeout, "no registry answered for " + number.render());
}

}  // namespace enumdesk
