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

// enumctl: command-line front end for the enumdesk library.
//
// Exit codes: 0 success, 1 resolution or operation error, 2 config, fixture
// or snapshot error, 3 invariant failure.

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "enumdesk/error.h"
#include "enumdesk/market.h"
#include "enumdesk/scenario.h"
#include "enumdesk/snapshot.h"

namespace {

using namespace enumdesk;

constexpr int kOk = 0;
constexpr int kOperationFailed = 1;
constexpr int kBadInput = 2;
constexpr int kInvariantFailed = 3;

int exit_code_for(Errc code) {
  switch (code) {
    case Errc::ConfigError:
    case Errc::FixtureError:
    case Errc::SnapshotError:
    case Errc::ScriptError:
    case Errc::InvalidModelCombination:
    case Errc::BadApex:
      return kBadInput;
    default:
      return kOperationFailed;
  }
}

std::string read_text(const std::string& path, Errc on_missing) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(on_missing, "cannot read " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void apply_environment(ScenarioConfig& config) {
  const char* apex = std::getenv("ENUM_APEX");
  if (!apex || !*apex) return;
  try {
    config.apex = ApexConfig::make(apex);
  } catch (const Error& e) {
    fail(Errc::ConfigError, "ENUM_APEX: " + e.detail());
  }
  config.tier0.apex = config.apex;
}

ScenarioConfig load_config(int model, const std::string& path, std::optional<std::uint64_t> seed) {
  ScenarioConfig config =
      parse_scenario_config(path.empty() ? std::string(builtin_scenario(model)) : read_text(path, Errc::ConfigError));
  if (seed) config.seed = *seed;
  apply_environment(config);
  return config;
}

std::string script_text(const std::string& path) {
  return path.empty() ? std::string(builtin_canonical_script()) : read_text(path, Errc::ScriptError);
}

// Runs one event and returns its log record; 1 when the event failed.
int run_logged(Topology& topo, const ScriptEvent& ev) {
  std::size_t index = topo.log().size();
  run_event(topo, ev);
  const LogRecord& record = topo.log().records().at(index);
  std::cout << record.to_line() << "\n";
  std::string status = record.fields.get_or("status", "");
  if (status == "ok") return kOk;
  std::cerr << "error: " << status << ": " << record.fields.get_or("detail", "") << "\n";
  return kOperationFailed;
}

int run_stateful(const std::string& dir, const std::vector<ScriptEvent>& events) {
  StateLock lock(dir);
  auto topo = load_state(dir);
  int code = kOk;
  for (const auto& ev : events) {
    if (run_logged(*topo, ev) != kOk) code = kOperationFailed;
  }
  save_state(*topo, dir);
  return code;
}

ScriptEvent make_event(std::string kind, std::vector<std::string> args, std::map<std::string, std::string> options = {},
                       std::string rest = {}) {
  ScriptEvent ev;
  ev.kind = std::move(kind);
  ev.args = std::move(args);
  ev.options = std::move(options);
  ev.rest = std::move(rest);
  return ev;
}

void put_if(std::map<std::string, std::string>& options, const std::string& key, const std::string& value) {
  if (!value.empty()) options[key] = value;
}

struct ResolveArgs {
  std::string number;
  std::string service = "*";
  std::string scenario_file;
  std::string script;
  std::string state;
  bool trace = false;
};

int cmd_resolve(const ResolveArgs& a) {
  std::unique_ptr<Topology> topo;
  std::optional<StateLock> lock;
  if (!a.state.empty()) {
    lock.emplace(a.state);
    topo = load_state(a.state);
  } else {
    ScenarioConfig config = load_config(1, a.scenario_file, std::nullopt);
    topo = build_topology(config);
    run_events(*topo, parse_script(script_text(a.script), config.aliases));
  }
  std::optional<Resolution> resolved;
  try {
    resolved = topo->resolver().resolve(a.number, ServiceSelector::parse(a.service));
  } catch (const Error& e) {
    std::cerr << errc_name(e.code()) << ": " << e.detail() << "\n";
    return exit_code_for(e.code()) == kBadInput ? kBadInput : kOperationFailed;
  }
  const Resolution& r = *resolved;
  for (const auto& uri : r.uris) std::cout << uri << "\n";
  for (const auto& w : r.warnings) std::cerr << "warning: " << w << "\n";
  if (a.trace) {
    for (const auto& hop : r.trace) std::cout << "hop " << hop.to_line() << "\n";
  }
  return r.uris.empty() ? kOperationFailed : kOk;
}

struct ScenarioArgs {
  int model = 0;
  std::string config;
  std::string script;
  std::optional<std::uint64_t> seed;
  std::string report = "invariants";
};

int cmd_scenario_run(const ScenarioArgs& a) {
  if (a.model == 0 && a.config.empty()) fail(Errc::ConfigError, "give --model or --config");
  ScenarioConfig config = load_config(a.model, a.config, a.seed);
  auto topo = build_topology(config);
  run_events(*topo, parse_script(script_text(a.script), config.aliases));
  InvariantReport invariants = assert_invariants(*topo);
  if (a.report == "invariants") {
    std::cout << invariants.to_text();
  } else if (a.report == "valueflow") {
    std::cout << value_flow(*topo).to_text();
  } else if (a.report == "log") {
    std::cout << topo->log().to_text();
  } else if (a.report == "peering") {
    std::cout << peering_lag(topo->log()).to_text();
  } else {
    for (const auto& line : resolve_outputs(topo->log())) std::cout << line << "\n";
  }
  if (!invariants.all_passed()) {
    std::cerr << "invariant failure\n";
    return kInvariantFailed;
  }
  return kOk;
}

struct MarketArgs {
  std::string fixtures;
  std::string format = "text";
  std::string output;
  double penetration = 0.05;
};

int cmd_market_report(const MarketArgs& a) {
  std::vector<MarketTable> tables = a.fixtures.empty() ? builtin_market_fixtures() : load_market_fixtures(a.fixtures);
  std::string report =
      market_report(tables, a.format == "csv" ? ReportFormat::Csv : ReportFormat::Text, a.penetration);
  if (a.output.empty()) {
    std::cout << report;
  } else {
    write_atomically(a.output, report);
  }
  return kOk;
}

int cmd_report(const std::string& dir, const std::string& kind) {
  StateLock lock(dir);
  auto topo = load_state(dir);
  if (kind == "valueflow") {
    std::cout << value_flow(topo->config(), topo->log()).to_text();
    return kOk;
  }
  if (kind == "log") {
    std::cout << topo->log().to_text();
    return kOk;
  }
  if (kind == "peering") {
    std::cout << peering_lag(topo->log()).to_text();
    return kOk;
  }
  InvariantReport report = assert_invariants(*topo);
  std::cout << report.to_text();
  return report.all_passed() ? kOk : kInvariantFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ENUM registry, registrar and resolver desk"};
  app.require_subcommand(1);
  int code = kOk;

  ResolveArgs resolve;
  auto* resolve_cmd = app.add_subcommand("resolve", "Resolve a number to URIs");
  resolve_cmd->add_option("number", resolve.number, "E.164 number")->required();
  resolve_cmd->add_option("--service", resolve.service, "Service selector, * for all");
  resolve_cmd->add_option("--scenario-file", resolve.scenario_file, "Scenario config (default: built-in model 1)");
  resolve_cmd->add_option("--script", resolve.script, "Event script run first (default: canonical)");
  resolve_cmd->add_option("--state", resolve.state, "Resolve against a state directory instead");
  resolve_cmd->add_flag("--trace", resolve.trace, "Print the hop log");
  resolve_cmd->callback([&] { code = cmd_resolve(resolve); });

  ScenarioArgs scenario;
  auto* scenario_cmd = app.add_subcommand("scenario", "Scenario runs");
  scenario_cmd->require_subcommand(1);
  auto* run_cmd = scenario_cmd->add_subcommand("run", "Run an event script under a model");
  auto* model_opt = run_cmd->add_option("--model", scenario.model, "Built-in model 1..6");
  run_cmd->add_option("--config", scenario.config, "Scenario config file")->excludes(model_opt);
  run_cmd->add_option("--script", scenario.script, "Event script (default: canonical)");
  run_cmd->add_option("--seed", scenario.seed, "Override the config seed");
  run_cmd->add_option("--report", scenario.report, "Report to print")
      ->check(CLI::IsMember({"invariants", "valueflow", "log", "peering", "resolve"}));
  run_cmd->callback([&] { code = cmd_scenario_run(scenario); });

  MarketArgs market;
  auto* market_cmd = app.add_subcommand("market", "Market estimation");
  market_cmd->require_subcommand(1);
  auto* market_report_cmd = market_cmd->add_subcommand("report", "Market tables with derived rows");
  market_report_cmd->add_option("--fixtures", market.fixtures, "Directory with fig3_*.csv (default: built-in)");
  market_report_cmd->add_option("--format", market.format, "text or csv")->check(CLI::IsMember({"text", "csv"}));
  market_report_cmd->add_option("--output", market.output, "Write to a file instead of stdout");
  market_report_cmd->add_option("--penetration", market.penetration, "Penetration fraction");
  market_report_cmd->callback([&] { code = cmd_market_report(market); });

  std::string state;
  int init_model = 0;
  std::string init_config;
  std::optional<std::uint64_t> init_seed;
  auto* init_cmd = app.add_subcommand("init", "Create a state directory");
  init_cmd->add_option("--state", state, "State directory")->required();
  auto* init_model_opt = init_cmd->add_option("--model", init_model, "Built-in model 1..6");
  init_cmd->add_option("--config", init_config, "Scenario config file")->excludes(init_model_opt);
  init_cmd->add_option("--seed", init_seed, "Override the config seed");
  init_cmd->callback([&] {
    if (init_model == 0 && init_config.empty()) fail(Errc::ConfigError, "give --model or --config");
    init_state(state, load_config(init_model, init_config, init_seed));
  });

  std::string step_script;
  std::vector<std::string> step_lines;
  auto* step_cmd = app.add_subcommand("step", "Run script events against a state directory");
  step_cmd->add_option("--state", state, "State directory")->required();
  step_cmd->add_option("--script", step_script, "Event script file");
  step_cmd->add_option("--event", step_lines, "One script line, repeatable");
  step_cmd->callback([&] {
    std::string text = step_script.empty() ? std::string() : read_text(step_script, Errc::ScriptError);
    for (const auto& line : step_lines) text += "\n" + line;
    ScenarioConfig config = parse_scenario_config(read_text(state + "/scenario.conf", Errc::SnapshotError));
    code = run_stateful(state, parse_script(text, config.aliases));
  });

  std::string registrar, actor, number, record;
  auto* provision_cmd = app.add_subcommand("provision", "Write a NAPTR record");
  provision_cmd->add_option("--state", state, "State directory")->required();
  provision_cmd->add_option("--registrar", registrar, "Serving registrar")->required();
  provision_cmd->add_option("--actor", actor, "Writing party")->required();
  provision_cmd->add_option("--number", number, "E.164 number")->required();
  provision_cmd->add_option("--record", record, "Zone line")->required();
  provision_cmd->callback(
      [&] { code = run_stateful(state, {make_event("provision", {registrar, actor, number}, {}, record)}); });

  std::string user, tsp, proof, until, label;
  auto* transfer_cmd = app.add_subcommand("transfer", "Move a number to another registrar");
  transfer_cmd->add_option("--state", state, "State directory")->required();
  transfer_cmd->add_option("--to", registrar, "New registrar")->required();
  transfer_cmd->add_option("--user", user, "Subscriber")->required();
  transfer_cmd->add_option("--number", number, "E.164 number")->required();
  transfer_cmd->add_option("--tsp", tsp, "Number's TSP");
  transfer_cmd->add_option("--proof", proof, "Identity proof, or 'token'");
  transfer_cmd->add_option("--until", until, "Stop after this state");
  transfer_cmd->add_option("--as", label, "Label for later steps");
  transfer_cmd->callback([&] {
    std::map<std::string, std::string> options;
    put_if(options, "tsp", tsp);
    put_if(options, "proof", proof);
    put_if(options, "until", until);
    put_if(options, "as", label);
    code = run_stateful(state, {make_event("transfer", {registrar, user, number}, options)});
  });

  std::string target, disconnect_kind = "enum_only";
  auto* disconnect_cmd = app.add_subcommand("disconnect", "Disconnect ENUM or telephone service");
  disconnect_cmd->add_option("--state", state, "State directory")->required();
  disconnect_cmd->add_option("--target", target, "Registrar (enum_only) or TSP (telephone)")->required();
  disconnect_cmd->add_option("--user", user, "Subscriber")->required();
  disconnect_cmd->add_option("--number", number, "E.164 number")->required();
  disconnect_cmd->add_option("--kind", disconnect_kind, "enum_only or telephone")
      ->check(CLI::IsMember({"enum_only", "telephone"}));
  disconnect_cmd->callback(
      [&] { code = run_stateful(state, {make_event("disconnect", {target, user, number, disconnect_kind})}); });

  std::string report_kind = "invariants";
  auto* report_cmd = app.add_subcommand("report", "Report on a state directory");
  report_cmd->add_option("--state", state, "State directory")->required();
  report_cmd->add_option("--report", report_kind, "invariants, valueflow, log or peering")
      ->check(CLI::IsMember({"invariants", "valueflow", "log", "peering"}));
  report_cmd->callback([&] { code = cmd_report(state, report_kind); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kOk : kBadInput;
  } catch (const Error& e) {
    std::cerr << "error: " << errc_name(e.code()) << ": " << e.detail() << "\n";
    return exit_code_for(e.code());
  }
  return code;
}
