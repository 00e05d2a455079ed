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

#ifndef ENUMDESK_SCENARIO_H_
#define ENUMDESK_SCENARIO_H_

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "enumdesk/e164.h"
#include "enumdesk/registrar.h"
#include "enumdesk/registry.h"
#include "enumdesk/resolver.h"
#include "enumdesk/simulator.h"

namespace enumdesk {

enum class RegistryMultiplicity { Single, Multiple };

struct RegistrarSpec {
  std::string id;
  RegistrarKind kind = RegistrarKind::TSP;
  std::string home_registry;
};

struct RegistrySpec {
  std::string id;
  std::set<std::string> prefixes;
  std::vector<std::string> peers;
  std::set<std::string> accredited;
};

struct FaultSpec {
  FaultWindow::Kind kind = FaultWindow::Kind::Offline;
  std::string actor;
  std::uint64_t from = 0;
  std::uint64_t to = 0;
};

struct ScenarioConfig {
  int model_id = 1;
  RegistrarKind registrar_kind = RegistrarKind::TSP;
  RegistryMultiplicity registry_multiplicity = RegistryMultiplicity::Single;
  std::set<RegistrarKind> also_permitted;
  std::uint64_t seed = 1;
  ApexConfig apex;

  std::vector<Party> actors;
  std::vector<RegistrarSpec> registrars;
  std::vector<RegistrySpec> registries;
  Tier0Table tier0;
  std::map<std::string, std::string> aliases;

  std::set<std::string> network_related_services{"E2U+sip", "E2U+tel"};
  double flat_fee = 1.0;
  double user_fee = 1.0;
  std::vector<FaultSpec> faults;
  int transfer_retries = 2;

  std::set<RegistrarKind> permitted_kinds() const;
  // Models 1 and 4: the TSP is the registrar and may act for its network.
  bool tsp_family() const { return model_id == 1 || model_id == 4; }
  std::optional<Role> role_of(const std::string& party) const;
};

// INI document with sections model, actors, registrars, registry:<id>,
// tier0, aliases, services, fees, faults, transfer. ConfigError on anything
// malformed; the grid check happens in build_topology.
ScenarioConfig parse_scenario_config(std::string_view text);
std::string render_scenario_config(const ScenarioConfig& config);

// Model grid: 1-3 single registry, 4-6 multiple; TSP, ASP, Independent.
void check_model_grid(const ScenarioConfig& config);

struct ScriptEvent {
  std::size_t line = 0;
  std::string kind;
  std::vector<std::string> args;               // positional
  std::map<std::string, std::string> options;  // key=value tokens
  std::string rest;                            // raw tail (zone line, reason)
};

// Line-delimited `step <kind> <args>`; '#' comments and blank lines skipped.
// Aliases `$NAME` are substituted from the config. ScriptError on bad lines.
std::vector<ScriptEvent> parse_script(std::string_view text, const std::map<std::string, std::string>& aliases = {});

struct LogRecord {
  std::uint64_t id = 0;
  std::uint64_t tick = 0;
  std::string kind;  // "event" or an audit kind
  Fields fields;

  std::string to_line() const;
};

// Replayable run log. Event ids are monotone; audit records carry the
// originating event as cause=<id>.
class RunLog {
 public:
  void append(LogRecord record) { records_.push_back(std::move(record)); }
  // Adds fields to an earlier record (an event's outcome after its audits).
  void amend(std::size_t index, const Fields& extra);
  std::size_t size() const { return records_.size(); }
  const std::vector<LogRecord>& records() const { return records_; }
  std::uint64_t next_id() const { return records_.empty() ? 1 : records_.back().id + 1; }
  std::uint64_t last_tick() const { return records_.empty() ? 0 : records_.back().tick; }

  std::string to_text() const;
  // SnapshotError with the line number on a malformed line.
  static RunLog parse(std::string_view text);

 private:
  std::vector<LogRecord> records_;
};

// A running topology built from a ScenarioConfig.
class Topology {
 public:
  Topology(const Topology&) = delete;
  Topology& operator=(const Topology&) = delete;
  ~Topology();

  const ScenarioConfig& config() const { return config_; }
  Simulator& sim() { return *sim_; }
  const Simulator& sim() const { return *sim_; }

  RegistryService* registry(const std::string& id);
  RegistrarService* registrar(const std::string& id);
  TspDesk* desk(const std::string& id);
  const std::map<std::string, std::unique_ptr<RegistryService>>& registries() const { return registries_; }
  const std::map<std::string, std::unique_ptr<RegistrarService>>& registrars() const { return registrars_; }
  const std::map<std::string, std::unique_ptr<TspDesk>>& desks() const { return desks_; }

  Resolver resolver();

  RunLog& log() { return log_; }
  const RunLog& log() const { return log_; }
  bool complete() const { return complete_; }
  void mark_complete(bool complete) { complete_ = complete; }

  // Script labels (as=...) for grants and transfers, and assignment tokens.
  std::map<std::string, std::string>& labels() { return labels_; }
  std::map<std::string, std::string>& tokens() { return tokens_; }

  // Continues a previous run: next log id and tick.
  void resume_log(RunLog log);

 private:
  friend std::unique_ptr<Topology> build_topology(const ScenarioConfig& config);
  explicit Topology(ScenarioConfig config);

  ScenarioConfig config_;
  std::unique_ptr<Simulator> sim_;
  std::unique_ptr<Tier0Service> tier0_;
  std::map<std::string, std::unique_ptr<RegistryService>> registries_;
  std::map<std::string, std::unique_ptr<TspDesk>> desks_;
  std::map<std::string, std::unique_ptr<RegistrarService>> registrars_;
  RunLog log_;
  std::uint64_t current_event_ = 0;
  bool complete_ = false;
  std::map<std::string, std::string> labels_;
  std::map<std::string, std::string> tokens_;

  friend void run_event(Topology& topology, const ScriptEvent& event);
};

// InvalidModelCombination on a grid violation; ConfigError on dangling ids.
std::unique_ptr<Topology> build_topology(const ScenarioConfig& config);

// Executes one event at the next tick, then delivers queued messages.
// Per-event errors land in the log.
void run_event(Topology& topology, const ScriptEvent& event);

// Every event in order, then settle(); marks the run complete.
const RunLog& run_events(Topology& topology, const std::vector<ScriptEvent>& events);

struct ValueFlowEdge {
  std::string payer;
  std::string payee;
  double amount = 0;
  std::uint64_t cause = 0;
  std::string payer_role;
  std::string payee_role;
};

struct ValueFlowGraph {
  std::vector<ValueFlowEdge> edges;

  std::set<std::pair<std::string, std::string>> role_pairs() const;
  std::string to_text() const;
};

// RunIncomplete before run_events finished.
ValueFlowGraph value_flow(const Topology& topology);
ValueFlowGraph value_flow(const ScenarioConfig& config, const RunLog& log);

// How far peer replication trails the owner. A round is one script event;
// an update applied during the event that sent it has lag 0.
struct PeeringLag {
  std::size_t sent = 0;
  std::size_t applied = 0;
  std::size_t pending = 0;  // no replica at or past the sent serial yet
  std::uint64_t max_rounds = 0;
  double mean_rounds = 0;
  std::uint64_t max_ticks = 0;

  std::string to_text() const;
};

PeeringLag peering_lag(const RunLog& log);

struct InvariantResult {
  std::string name;
  bool passed = true;
  std::vector<std::uint64_t> counterexamples;  // event ids
  std::string note;
};

struct InvariantReport {
  std::vector<InvariantResult> results;

  bool all_passed() const;
  const InvariantResult* find(std::string_view name) const;
  std::string to_text() const;
};

InvariantReport assert_invariants(Topology& topology);

// URI lists of every resolve / resolve_all event, keyed by event order.
std::vector<std::string> resolve_outputs(const RunLog& log);

// Shipped fixtures, compiled into the library.
std::string_view builtin_scenario(int model_id);
std::string_view builtin_canonical_script();

}  // namespace enumdesk

#endif  // ENUMDESK_SCENARIO_H_
