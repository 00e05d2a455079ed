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

#ifndef ENUMDESK_SIMULATOR_H_
#define ENUMDESK_SIMULATOR_H_

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "enumdesk/wire.h"

namespace enumdesk {

// A participant addressable on the simulated wire. Every request, including
// fire-and-forget messages, is answered by handle(); the simulator discards
// the reply of an async message after recording it.
class Actor {
 public:
  virtual ~Actor() = default;
  virtual Frame handle(const std::string& from, const Frame& request) = 0;
};

struct FaultWindow {
  enum class Kind { Offline, DropPeering };
  Kind kind = Kind::Offline;
  std::string address;
  std::uint64_t from = 0;  // inclusive tick
  std::uint64_t to = 0;    // exclusive tick
};

struct TraceEntry {
  std::uint64_t seq = 0;
  std::uint64_t tick = 0;
  std::string from;
  std::string to;
  std::string request;   // encoded frame
  std::string response;  // encoded frame; empty when timed out or dropped
  bool async = false;
  bool timed_out = false;
  bool dropped = false;
};

// Deterministic message bus. Synchronous calls are delivered immediately;
// posted messages queue until drain(), which delivers them in an order drawn
// from the seeded generator. Logical time only moves when the owner calls
// advance_to() or settle().
class Simulator {
 public:
  using AuditSink = std::function<void(std::string kind, Fields fields)>;

  explicit Simulator(std::uint64_t seed);

  Simulator(const Simulator&) = delete;
  Simulator& operator=(const Simulator&) = delete;

  void attach(const std::string& address, Actor& actor);
  bool has(const std::string& address) const { return actors_.count(address) != 0; }

  void set_faults(std::vector<FaultWindow> faults) { faults_ = std::move(faults); }
  const std::vector<FaultWindow>& faults() const { return faults_; }
  bool online(const std::string& address) const;

  // nullopt on timeout (unknown or offline target).
  std::optional<Frame> call(const std::string& from, const std::string& to, const Frame& request);
  void post(const std::string& from, const std::string& to, Frame message);

  // Delivers every deliverable queued message; returns the count delivered.
  std::size_t drain();
  // drain(), jumping the clock past fault windows until the queue is empty.
  void settle();
  std::size_t pending() const { return queue_.size(); }

  std::uint64_t tick() const { return tick_; }
  void advance_to(std::uint64_t tick);

  const std::vector<TraceEntry>& trace() const { return trace_; }

  std::mt19937_64& rng() { return rng_; }

  void set_audit_sink(AuditSink sink) { audit_sink_ = std::move(sink); }
  void audit(std::string kind, Fields fields);

 private:
  struct Queued {
    std::uint64_t seq;
    std::string from;
    std::string to;
    std::string bytes;
  };

  bool peering_dropped(const std::string& from, const std::string& to, const Frame& message) const;
  void deliver(Queued message);

  std::uint64_t tick_ = 0;
  std::uint64_t seq_ = 0;
  std::mt19937_64 rng_;
  std::map<std::string, Actor*> actors_;
  std::vector<FaultWindow> faults_;
  std::vector<Queued> queue_;
  std::vector<TraceEntry> trace_;
  AuditSink audit_sink_;
};

}  // namespace enumdesk

#endif  // ENUMDESK_SIMULATOR_H_
