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

#ifndef ENUMDESK_TIER_CLIENT_H_
#define ENUMDESK_TIER_CLIENT_H_

#include <optional>
#include <string>
#include <vector>

#include "enumdesk/e164.h"
#include "enumdesk/registry.h"
#include "enumdesk/simulator.h"

namespace enumdesk {

// Walks Tier 0 and Tier 1 on behalf of `self`. Each hop is retried once on
// timeout.
class TierClient {
 public:
  TierClient(Simulator& sim, std::string self, std::string tier0_address, ApexConfig apex);

  std::optional<Frame> call(const std::string& to, const Frame& request);

  // Registry ids from Tier 0, in table order.
  std::vector<std::string> discover(const E164Number& number);

  // First registry answering without error wins. NoDelegation when every
  // answering registry has none; Timeout when none answered.
  Delegation lookup(const E164Number& number);
  Delegation lookup(const E164Number& number, const std::vector<std::string>& registries);

  const ApexConfig& apex() const { return apex_; }

 private:
  Simulator& sim_;
  std::string self_;
  std::string tier0_;
  ApexConfig apex_;
};

}  // namespace enumdesk

#endif  // ENUMDESK_TIER_CLIENT_H_
