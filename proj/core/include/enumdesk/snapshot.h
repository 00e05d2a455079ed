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

#ifndef ENUMDESK_SNAPSHOT_H_
#define ENUMDESK_SNAPSHOT_H_

#include <memory>
#include <string>
#include <string_view>

#include "enumdesk/scenario.h"

namespace enumdesk {

// State directory layout:
//   scenario.conf           the config the topology is built from
//   registry.snap           delegations per registry, one section each
//   ledger.snap             registry billing entries
//   registrar-<id>.snap     subscriptions, records, grants, transfers
//   subscriptions.snap      TSP number assignments and script labels
//   journal.log             run log across invocations
// Every file is replaced by write-temp-then-rename.

std::string render_registry_snapshot(const Topology& topology);
std::string render_ledger_snapshot(const Topology& topology);
std::string render_registrar_snapshot(const RegistrarService& registrar);
std::string render_subscriptions_snapshot(Topology& topology);

// SnapshotError with the file name and line number on malformed input.
void restore_registry_snapshot(Topology& topology, std::string_view text);
void restore_ledger_snapshot(Topology& topology, std::string_view text);
void restore_registrar_snapshot(RegistrarService& registrar, std::string_view text);
void restore_subscriptions_snapshot(Topology& topology, std::string_view text);

// Writes `content` beside `path` and renames it into place.
void write_atomically(const std::string& path, std::string_view content);

// Holds an advisory lock on <dir>/.lock for its lifetime. SnapshotError when
// another process holds it.
class StateLock {
 public:
  explicit StateLock(const std::string& dir);
  ~StateLock();
  StateLock(const StateLock&) = delete;
  StateLock& operator=(const StateLock&) = delete;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Creates the directory with the config and empty snapshots.
void init_state(const std::string& dir, const ScenarioConfig& config);

// Rebuilds the topology from the directory. The simulator is reseeded from
// the config seed and the journal length so each invocation draws fresh but
// reproducible randomness.
std::unique_ptr<Topology> load_state(const std::string& dir);

// Settles the simulator and writes every snapshot plus the journal.
void save_state(Topology& topology, const std::string& dir);

}  // namespace enumdesk

#endif  // ENUMDESK_SNAPSHOT_H_
