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

#include <gtest/gtest.h>

#include <set>
#include <utility>

#include "enumdesk/scenario.h"
#include "test_support.h"

namespace enumdesk {
namespace {

using testing::code_of;
using testing::kAliceSetup;
using testing::model;
using testing::model_config;
using testing::status;
using testing::step;

using RolePairs = std::set<std::pair<std::string, std::string>>;

std::unique_ptr<Topology> canonical_run(const ScenarioConfig& cfg) {
  auto topo = build_topology(cfg);
  run_events(*topo, parse_script(builtin_canonical_script(), cfg.aliases));
  return topo;
}

TEST(Config, ShippedModelsCoverTheGrid) {
  std::set<std::pair<RegistrarKind, RegistryMultiplicity>> seen;
  for (int m = 1; m <= 6; ++m) {
    ScenarioConfig cfg = model_config(m);
    EXPECT_EQ(cfg.model_id, m);
    EXPECT_NO_THROW(check_model_grid(cfg));
    seen.emplace(cfg.registrar_kind, cfg.registry_multiplicity);
    auto topo = build_topology(cfg);
    if (m <= 3) {
      EXPECT_EQ(topo->registries().size(), 1u);
    } else {
      EXPECT_GE(topo->registries().size(), 2u);
    }
  }
  EXPECT_EQ(seen.size(), 6u);
  EXPECT_EQ(model_config(1).registrar_kind, RegistrarKind::TSP);
  EXPECT_EQ(model_config(6).registrar_kind, RegistrarKind::Independent);
}

TEST(Config, RenderParseFixedPoint) {
  for (int m = 1; m <= 6; ++m) {
    std::string once = render_scenario_config(model_config(m));
    EXPECT_EQ(render_scenario_config(parse_scenario_config(once)), once) << "model " << m;
  }
}

TEST(Config, GridViolations) {
  ScenarioConfig cfg = model_config(2);
  cfg.registrar_kind = RegistrarKind::TSP;
  EXPECT_EQ(code_of([&] { build_topology(cfg); }), Errc::InvalidModelCombination);
  cfg = model_config(1);
  cfg.model_id = 7;
  EXPECT_EQ(code_of([&] { build_topology(cfg); }), Errc::InvalidModelCombination);
  cfg = model_config(4);
  cfg.registry_multiplicity = RegistryMultiplicity::Single;
  EXPECT_EQ(code_of([&] { check_model_grid(cfg); }), Errc::InvalidModelCombination);
}

TEST(Config, MalformedDocuments) {
  EXPECT_EQ(code_of([] { parse_scenario_config("[actors]\nalice = User\n"); }), Errc::ConfigError);
  EXPECT_EQ(code_of([] { parse_scenario_config("[model]\nid = 1\n[bogus]\n"); }), Errc::ConfigError);
  EXPECT_EQ(code_of([] { parse_scenario_config("[model]\nid = one\n"); }), Errc::ConfigError);
  EXPECT_EQ(code_of([] { parse_scenario_config("[model]\nid = 1\n[faults]\nf1 = flood reg-1 1 5\n"); }),
            Errc::ConfigError);
  EXPECT_EQ(code_of([] { parse_scenario_config("[model]\nid = 1\n[faults]\nf1 = offline reg-1 5 5\n"); }),
            Errc::ConfigError);
  EXPECT_EQ(code_of([] { parse_scenario_config("[model]\nid = 1\napex = arpa\n"); }), Errc::ConfigError);
}

TEST(Config, FaultForUnknownActor) {
  ScenarioConfig cfg = model_config(1);
  cfg.faults.push_back(FaultSpec{FaultWindow::Kind::Offline, "nobody", 1, 5});
  EXPECT_EQ(code_of([&] { build_topology(cfg); }), Errc::ConfigError);
}

TEST(Script, ParsesAliasesOptionsAndTail) {
  auto events = parse_script(
      "# comment\n\nstep provision $R1 alice +13154434473 10 100 \"u\" \"E2U+sip\" \"!^.*$!sip:a@b!\" .\n"
      "step transfer $R2 alice +13154434473 tsp=$T1 as=t1\n",
      model_config(1).aliases);
  ASSERT_EQ(events.size(), 2u);
  EXPECT_EQ(events[0].line, 3u);
  EXPECT_EQ(events[0].args[0], "tsp-a");
  EXPECT_EQ(parse_record(events[0].rest).service, "E2U+sip");
  EXPECT_EQ(events[1].options.at("tsp"), "tsp-a");
  EXPECT_EQ(events[1].options.at("as"), "t1");
}

TEST(Script, Errors) {
  EXPECT_EQ(code_of([] { parse_script("provision x\n"); }), Errc::ScriptError);
  EXPECT_EQ(code_of([] { parse_script("step teleport x\n"); }), Errc::ScriptError);
  EXPECT_EQ(code_of([] { parse_script("step subscribe tsp-a\n"); }), Errc::ScriptError);
}

TEST(Run, ProvisionedUriAppearsInFinalResolve) {
  auto topo = model(1);
  step(*topo, kAliceSetup);
  Fields out = step(*topo, "step resolve +13154434473 E2U+sip");
  EXPECT_EQ(out.all("uri"), std::vector<std::string>{"sip:alice@example.com"});
}

TEST(Run, SameSeedSameLog) {
  for (int m : {1, 4, 6}) {
    std::string a = canonical_run(model_config(m))->log().to_text();
    std::string b = canonical_run(model_config(m))->log().to_text();
    EXPECT_EQ(a, b) << "model " << m;
  }
}

TEST(Run, PerEventErrorsLandInTheLog) {
  auto topo = model(1);
  Fields out = step(*topo, "step resolve +13154434499");
  EXPECT_EQ(status(out), "NoDelegation");
  EXPECT_FALSE(out.get_or("detail", "").empty());
}

TEST(Run, LogRoundtripsThroughText) {
  auto topo = canonical_run(model_config(5));
  RunLog copy = RunLog::parse(topo->log().to_text());
  EXPECT_EQ(copy.to_text(), topo->log().to_text());
}

TEST(Run, EventIdsAreMonotoneAndAuditsNameTheirCause) {
  auto topo = canonical_run(model_config(2));
  std::uint64_t prev = 0;
  std::uint64_t event = 0;
  for (const auto& r : topo->log().records()) {
    EXPECT_GT(r.id, prev);
    prev = r.id;
    if (r.kind == "event") {
      event = r.id;
    } else {
      EXPECT_EQ(r.fields.get_or("cause", ""), std::to_string(event)) << r.to_line();
    }
  }
}

TEST(Transparency, CanonicalResolveOutputsIdentical) {
  auto reference = resolve_outputs(canonical_run(model_config(1))->log());
  ASSERT_FALSE(reference.empty());
  for (int m = 2; m <= 6; ++m) EXPECT_EQ(resolve_outputs(canonical_run(model_config(m))->log()), reference) << m;
}

TEST(ValueFlow, IncompleteRun) {
  auto topo = model(1);
  step(*topo, kAliceSetup);
  EXPECT_EQ(code_of([&] { value_flow(*topo); }), Errc::RunIncomplete);
}

// Canonical payer and payee roles for each model.
TEST(ValueFlow, CanonicalEdgesMatchStatedDirections) {
  const std::map<int, RolePairs> expected{
      {1, {{"User", "TSP"}, {"ASP", "TSP"}, {"TSP", "Registry"}}},
      {2, {{"User", "ASP"}, {"ASP", "Registry"}}},
      {3, {{"User", "IndependentRegistrar"}, {"IndependentRegistrar", "Registry"}}},
      {6, {{"User", "IndependentRegistrar"}, {"IndependentRegistrar", "Registry"}}},
  };
  for (const auto& [m, pairs] : expected) {
    auto topo = canonical_run(model_config(m));
    ValueFlowGraph g = value_flow(*topo);
    EXPECT_EQ(g.role_pairs(), pairs) << "model " << m;
    for (const auto& e : g.edges) {
      EXPECT_GE(e.amount, 0.0);
      EXPECT_GT(e.cause, 0u);
    }
  }
}

TEST(ValueFlow, SingleSubscription) {
  for (auto [m, registrar] : {std::pair{1, "TSP"}, std::pair{3, "IndependentRegistrar"},
                              std::pair{6, "IndependentRegistrar"}}) {
    ScenarioConfig cfg = model_config(m);
    auto topo = build_topology(cfg);
    run_events(*topo, parse_script("step assign $T1 alice +13154434473\nstep subscribe $R1 alice +13154434473 tsp=$T1",
                                   cfg.aliases));
    RolePairs expected{{"User", registrar}, {registrar, "Registry"}};
    EXPECT_EQ(value_flow(*topo).role_pairs(), expected) << "model " << m;
  }
}

TEST(ValueFlow, EdgesTraceToLoggedEvents) {
  auto topo = canonical_run(model_config(4));
  std::set<std::uint64_t> events;
  for (const auto& r : topo->log().records()) {
    if (r.kind == "event") events.insert(r.id);
  }
  for (const auto& e : value_flow(*topo).edges) EXPECT_TRUE(events.count(e.cause)) << e.cause;
}

TEST(ValueFlow, CooperationEdgesOnlyInAspModels) {
  for (int m = 1; m <= 6; ++m) {
    ScenarioConfig cfg = model_config(m);
    auto topo = build_topology(cfg);
    run_events(*topo, parse_script("step cooperate $A1 $T1 registry 0.5", cfg.aliases));
    bool edge = value_flow(*topo).role_pairs().count({"ASP", "TSP"}) > 0;
    EXPECT_EQ(edge, m == 2 || m == 5) << "model " << m;
  }
}

TEST(Invariants, CleanCanonicalRunsPass) {
  for (int m = 1; m <= 6; ++m) {
    auto topo = canonical_run(model_config(m));
    InvariantReport report = assert_invariants(*topo);
    EXPECT_TRUE(report.all_passed()) << "model " << m << "\n" << report.to_text();
  }
}

TEST(Invariants, PlantedBackdoorWriteIsCaught) {
  ScenarioConfig cfg = model_config(1);
  auto topo = build_topology(cfg);
  std::string script = std::string(kAliceSetup) +
                       "step backdoor_write $R1 mallory +13154434473 5 5 \"u\" \"E2U+sip\" \"!^.*$!sip:evil@x!\" .\n";
  run_events(*topo, parse_script(script, cfg.aliases));
  InvariantReport report = assert_invariants(*topo);
  const InvariantResult* access = report.find("access_soundness");
  ASSERT_NE(access, nullptr);
  EXPECT_FALSE(access->passed);
  std::uint64_t planted = 0;
  for (const auto& r : topo->log().records()) {
    if (r.kind == "event" && r.fields.get_or("step", "") == "backdoor_write") planted = r.id;
  }
  EXPECT_EQ(access->counterexamples, std::vector<std::uint64_t>{planted});
}

TEST(Invariants, DroppedPeeringIsReported) {
  for (int m : {4, 5, 6}) {
    ScenarioConfig cfg = model_config(m);
    cfg.faults.push_back(FaultSpec{FaultWindow::Kind::DropPeering, "reg-1", 0, 1000});
    cfg.faults.push_back(FaultSpec{FaultWindow::Kind::DropPeering, "reg-2", 0, 1000});
    auto topo = canonical_run(cfg);
    InvariantReport report = assert_invariants(*topo);
    EXPECT_FALSE(report.all_passed()) << "model " << m;
    EXPECT_FALSE(report.find("replica_consistency")->passed) << "model " << m;
    EXPECT_GT(peering_lag(topo->log()).pending, 0u);
  }
}

TEST(Peering, CanonicalRunsConverge) {
  for (int m : {4, 5, 6}) {
    auto topo = canonical_run(model_config(m));
    PeeringLag lag = peering_lag(topo->log());
    EXPECT_GT(lag.sent, 0u);
    EXPECT_EQ(lag.pending, 0u);
    for (const auto& [id, registry] : topo->registries()) {
      for (const auto& [number, d] : registry->state().delegations()) {
        if (d.owner == id) continue;
        EXPECT_EQ(topo->registry(d.owner)->state().delegations().at(number), d);
      }
    }
  }
  EXPECT_EQ(peering_lag(canonical_run(model_config(1))->log()).sent, 0u);
}

TEST(Peering, OfflinePeerLagsThenCatchesUp) {
  ScenarioConfig cfg = model_config(4);
  cfg.faults.push_back(FaultSpec{FaultWindow::Kind::Offline, "reg-2", 1, 6});
  auto topo = build_topology(cfg);
  run_events(*topo, parse_script(std::string(kAliceSetup) + "step resolve +13154434473\nstep resolve +13154434473\n"
                                                            "step resolve +13154434473\nstep resolve +13154434473\n",
                                 cfg.aliases));
  PeeringLag lag = peering_lag(topo->log());
  EXPECT_EQ(lag.pending, 0u);
  EXPECT_GT(lag.max_rounds, 0u);
  EXPECT_TRUE(assert_invariants(*topo).find("replica_consistency")->passed);
}

}  // namespace
}  // namespace enumdesk
