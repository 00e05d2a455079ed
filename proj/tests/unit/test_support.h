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

#ifndef ENUMDESK_TESTS_UNIT_TEST_SUPPORT_H_
#define ENUMDESK_TESTS_UNIT_TEST_SUPPORT_H_

#include <gtest/gtest.h>

#include <memory>
#include <string>
#include <string_view>

#include "enumdesk/error.h"
#include "enumdesk/scenario.h"

namespace enumdesk::testing {

template <typename F>
Errc code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return Errc::EmptyInput;
}

inline ScenarioConfig model_config(int id) { return parse_scenario_config(builtin_scenario(id)); }

inline std::unique_ptr<Topology> model(int id) { return build_topology(model_config(id)); }

// Runs every step in `script` and returns the outcome fields of the last one.
inline Fields step(Topology& topo, std::string_view script) {
  for (const auto& ev : parse_script(script, topo.config().aliases)) run_event(topo, ev);
  const auto& records = topo.log().records();
  for (auto it = records.rbegin(); it != records.rend(); ++it) {
    if (it->kind == "event") return it->fields;
  }
  return {};
}

inline std::string status(const Fields& f) { return f.get_or("status", ""); }

// Assignment, subscription and one SIP record for alice.
inline constexpr std::string_view kAliceSetup =
    "step assign $T1 alice +13154434473\n"
    "step subscribe $R1 alice +13154434473 tsp=$T1\n"
    "step provision $R1 alice +13154434473 10 100 \"u\" \"E2U+sip\" \"!^.*$!sip:alice@example.com!\" .\n";

}  // namespace enumdesk::testing

#endif  // ENUMDESK_TESTS_UNIT_TEST_SUPPORT_H_
