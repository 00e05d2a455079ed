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

#include "enumdesk/simulator.h"

#include <algorithm>
#include <limits>

namespace enumdesk {

Simulator::Simulator(std::uint64_t seed) : rng_(seed) {}

void Simulator::attach(const std::string& address, Actor& actor) { actors_[address] = &actor; }

bool Simulator::online(const std::string& address) const {
  if (!has(address)) return false;
  for (const auto& f : faults_) {
    if (f.kind == FaultWindow::Kind::Offline && f.address == address && tick_ >= f.from && tick_ < f.to)
      return false;
  }
  return true;
}

bool Simulator::peering_dropped(const std::string& from, const std::string& to, const Frame& message) const {
  if (message.kind != kind::kPeerUpdate) return false;
  for (const auto& f : faults_) {
    if (f.kind == FaultWindow::Kind::DropPeering && (f.address == from || f.address == to) &&
        tick_ >= f.from && tick_ < f.to)
      return true;
  }
  return false;
}

std::optional<Frame> Simulator::call(const std::string& from, const std::string& to, const Frame& request) {
  TraceEntry entry;
  entry.seq = ++seq_;
  entry.tick = tick_;
  entry.from = from;
  entry.to = to;
  entry.request = encode_frame(request);
  if (!online(to)) {
    entry.timed_out = true;
    trace_.push_back(std::move(entry));
    return std::nullopt;
  }
  std::size_t slot = trace_.size();
  trace_.push_back(entry);

  Frame decoded = decode_frame(trace_[slot].request);
  Frame reply = actors_.at(to)->handle(from, decoded);
  std::string bytes = encode_frame(reply);
  trace_[slot].response = bytes;
  return decode_frame(bytes);
}

void Simulator::post(const std::string& from, const std::string& to, Frame message) {
  if (peering_dropped(from, to, message)) {
    TraceEntry entry;
    entry.seq = ++seq_;
    entry.tick = tick_;
    entry.from = from;
    entry.to = to;
    entry.request = encode_frame(message);
    entry.async = true;
    entry.dropped = true;
    trace_.push_back(std::move(entry));
    return;
  }
  queue_.push_back(Queued{++seq_, from, to, encode_frame(message)});
}

void Simulator::deliver(Queued message) {
  TraceEntry entry;
  entry.seq = message.seq;
  entry.tick = tick_;
  entry.from = message.from;
  entry.to = message.to;
  entry.request = message.bytes;
  entry.async = true;
  std::size_t slot = trace_.size();
  trace_.push_back(std::move(entry));
  Frame reply = actors_.at(message.to)->handle(message.from, decode_frame(message.bytes));
  trace_[slot].response = encode_frame(reply);
}

std::size_t Simulator::drain() {
  std::size_t delivered = 0;
  while (true) {
    std::vector<std::size_t> ready;
    for (std::size_t i = 0; i < queue_.size(); ++i) {
      if (online(queue_[i].to)) ready.push_back(i);
    }
    if (ready.empty()) break;
    std::uniform_int_distribution<std::size_t> pick(0, ready.size() - 1);
    std::size_t index = ready[pick(rng_)];
    Queued message = std::move(queue_[index]);
    queue_.erase(queue_.begin() + static_cast<std::ptrdiff_t>(index));
    if (!has(message.to)) continue;  // unknown target: message is lost
    deliver(std::move(message));
    ++delivered;
  }
  return delivered;
}

void Simulator::settle() {
  while (true) {
    drain();
    if (queue_.empty()) return;
    // Every queued target is offline; jump to the earliest window end.
    std::uint64_t next = std::numeric_limits<std::uint64_t>::max();
    for (const auto& f : faults_) {
      if (f.kind == FaultWindow::Kind::Offline && f.to > tick_) next = std::min(next, f.to);
    }
    if (next == std::numeric_limits<std::uint64_t>::max()) {
      // Targets that never come back (unknown addresses): drop them.
      queue_.clear();
      return;
    }
    tick_ = next;
  }
}

void Simulator::advance_to(std::uint64_t tick) { tick_ = std::max(tick_, tick); }

void Simulator::audit(std::string kind, Fields fields) {
  if (audit_sink_) audit_sink_(std::move(kind), std::move(fields));
}

}  // namespace enumdesk
