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

#include "enumdesk/snapshot.h"

#include <boost/interprocess/sync/file_lock.hpp>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "enumdesk/error.h"

namespace enumdesk {
namespace {

namespace fs = std::filesystem;

constexpr std::string_view kRegistrySnap = "registry.snap";
constexpr std::string_view kLedgerSnap = "ledger.snap";
constexpr std::string_view kSubscriptionsSnap = "subscriptions.snap";
constexpr std::string_view kConfig = "scenario.conf";
constexpr std::string_view kJournal = "journal.log";

// Line cursor that skips blanks and '#' comments and knows where it is.
class Lines {
 public:
  Lines(std::string file, std::string_view text) : file_(std::move(file)), in_(std::string(text)) {}

  bool next(std::string& line) {
    while (std::getline(in_, line)) {
      ++no_;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty() && line[0] != '#') return true;
    }
    return false;
  }

  [[noreturn]] void bad(const std::string& what) const {
    fail(Errc::SnapshotError, file_ + " line " + std::to_string(no_) + ": " + what);
  }

  // Runs `body`, converting any library error into a positioned one.
  template <typename F>
  auto guard(F&& body) const {
    try {
      return body();
    } catch (const Error& e) {
      if (e.code() == Errc::SnapshotError) throw;
      bad(std::string(errc_name(e.code())) + " " + e.detail());
    }
  }

 private:
  std::string file_;
  std::istringstream in_;
  std::size_t no_ = 0;
};

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    std::size_t pos = line.find(sep, start);
    out.push_back(line.substr(start, pos == std::string::npos ? std::string::npos : pos - start));
    if (pos == std::string::npos) return out;
    start = pos + 1;
  }
}

std::uint64_t to_u64(const Lines& at, const std::string& s) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) at.bad("bad integer '" + s + "'");
  return v;
}

double to_amount(const Lines& at, const std::string& s) {
  try {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  at.bad("bad amount '" + s + "'");
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::SnapshotError, "cannot read " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string format_amount(double v) {
  std::ostringstream out;
  out.precision(17);
  out << v;
  return out.str();
}

}  // namespace

std::string render_registry_snapshot(const Topology& topo) {
  std::string out = "# number|registrar|owner|serial|updated_at|state\n";
  for (const auto& [id, service] : topo.registries()) {
    out += "@registry " + id + "\n";
    for (const auto& [number, d] : service->state().delegations()) {
      out += number.full_digits() + "|" + d.registrar + "|" + d.owner + "|" + std::to_string(d.serial) + "|" +
             std::to_string(d.updated_at) + "|" + (d.removed ? "removed" : "live") + "\n";
    }
  }
  return out;
}

std::string render_ledger_snapshot(const Topology& topo) {
  std::string out = "# payer|amount|number|tick\n";
  for (const auto& [id, service] : topo.registries()) {
    out += "@registry " + id + "\n";
    for (const auto& e : service->state().ledger()) {
      out += e.payer + "|" + format_amount(e.amount) + "|" + e.number + "|" + std::to_string(e.tick) + "\n";
    }
  }
  return out;
}

std::string render_registrar_snapshot(const RegistrarService& service) {
  const Registrar& r = service.state();
  std::string out = "# registrar " + r.id() + "\n";
  out += encode_fields(Fields{{"type", "counters"},
                              {"grants", std::to_string(r.grant_seq())},
                              {"transfers", std::to_string(r.transfer_seq())}}) +
         "\n";
  for (const auto& [number, entry] : r.entries()) {
    Fields f{{"type", "entry"}};
    Fields sub = subscription_fields(entry.subscription);
    for (const auto& [k, v] : sub.items()) f.add(k, v);
    f.add("transfer_out", entry.transfer_out);
    out += encode_fields(f) + "\n";
    for (const auto& rec : entry.records) {
      out += encode_fields(Fields{{"type", "record"}, {"number", number.full_digits()}, {"line", rec.to_zone_line()}}) +
             "\n";
    }
    for (const auto& g : entry.grants) {
      out += encode_fields(Fields{{"type", "grant"},
                                  {"grant", g.id},
                                  {"grantor", g.grantor},
                                  {"grantee", g.grantee},
                                  {"rights", g.rights.to_string()},
                                  {"scope", g.scope.to_string()},
                                  {"number", g.number.full_digits()}}) +
             "\n";
    }
  }
  for (const auto& [id, t] : r.transfers()) {
    Fields f{{"type", "transfer"}};
    Fields body = transfer_fields(t);
    for (const auto& [k, v] : body.items()) f.add(k, v);
    out += encode_fields(f) + "\n";
  }
  return out;
}

std::string render_subscriptions_snapshot(Topology& topo) {
  std::string out = "# assign|tsp|number|user|token|phone_active\n# label|name|value\n";
  for (const auto& [tsp, desk] : topo.desks()) {
    for (const auto& [number, a] : desk->assignments()) {
      out += "assign|" + tsp + "|" + number.full_digits() + "|" + a.user + "|" + a.token + "|" +
             (a.phone_active ? "1" : "0") + "\n";
    }
  }
  for (const auto& [name, value] : topo.labels()) out += "label|" + name + "|" + value + "\n";
  return out;
}

void restore_registry_snapshot(Topology& topo, std::string_view text) {
  Lines lines(std::string(kRegistrySnap), text);
  RegistryService* current = nullptr;
  std::string line;
  while (lines.next(line)) {
    if (line.rfind("@registry ", 0) == 0) {
      current = topo.registry(line.substr(10));
      if (!current) lines.bad("unknown registry " + line.substr(10));
      continue;
    }
    if (!current) lines.bad("delegation outside a @registry section");
    auto cols = split(line, '|');
    if (cols.size() != 6) lines.bad("expected 6 columns");
    if (cols[5] != "live" && cols[5] != "removed") lines.bad("state must be live or removed");
    Delegation d{lines.guard([&] { return number_from_digits(cols[0]); }),
                 cols[1],
                 cols[2],
                 to_u64(lines, cols[3]),
                 to_u64(lines, cols[4]),
                 cols[5] == "removed"};
    current->state().restore(std::move(d));
  }
}

void restore_ledger_snapshot(Topology& topo, std::string_view text) {
  Lines lines(std::string(kLedgerSnap), text);
  RegistryService* current = nullptr;
  std::string line;
  while (lines.next(line)) {
    if (line.rfind("@registry ", 0) == 0) {
      current = topo.registry(line.substr(10));
      if (!current) lines.bad("unknown registry " + line.substr(10));
      continue;
    }
    if (!current) lines.bad("entry outside a @registry section");
    auto cols = split(line, '|');
    if (cols.size() != 4) lines.bad("expected 4 columns");
    current->state().restore_ledger(BillingEntry{cols[0], to_amount(lines, cols[1]), cols[2], to_u64(lines, cols[3])});
  }
}

void restore_registrar_snapshot(RegistrarService& service, std::string_view text) {
  Registrar& r = service.state();
  Lines lines("registrar-" + r.id() + ".snap", text);
  std::string line;
  while (lines.next(line)) {
    Fields f = lines.guard([&] { return decode_fields(line); });
    std::string type = f.get_or("type", "");
    lines.guard([&] {
      if (type == "counters") {
        r.restore_counters(to_u64(lines, f.require("grants")), to_u64(lines, f.require("transfers")));
      } else if (type == "entry") {
        Subscription sub = subscription_from_fields(f);
        Registrar::Entry& entry = r.activate(sub);
        entry.subscription = std::move(sub);
        entry.transfer_out = f.get_or("transfer_out", "");
      } else if (type == "record") {
        Registrar::Entry* entry = r.find(number_from_digits(f.require("number")));
        if (!entry) lines.bad("record for a number with no entry");
        entry->records.push_back(parse_record(f.require("line")));
      } else if (type == "grant") {
        r.restore_grant(AuthorizationGrant{f.require("grant"), f.require("grantor"), f.require("grantee"),
                                           Rights::parse(f.require("rights")), ServiceSelector::parse(f.require("scope")),
                                           number_from_digits(f.require("number"))});
      } else if (type == "transfer") {
        r.restore_transfer(transfer_from_fields(f));
      } else {
        lines.bad("unknown line type '" + type + "'");
      }
    });
  }
}

void restore_subscriptions_snapshot(Topology& topo, std::string_view text) {
  Lines lines(std::string(kSubscriptionsSnap), text);
  std::string line;
  while (lines.next(line)) {
    auto cols = split(line, '|');
    if (cols[0] == "assign") {
      if (cols.size() != 6) lines.bad("expected 6 columns");
      TspDesk* desk = topo.desk(cols[1]);
      if (!desk) lines.bad("unknown TSP " + cols[1]);
      if (cols[5] != "0" && cols[5] != "1") lines.bad("phone_active must be 0 or 1");
      Assignment a{lines.guard([&] { return number_from_digits(cols[2]); }), cols[3], cols[4], cols[5] == "1"};
      topo.tokens()[a.number.full_digits()] = a.token;
      desk->restore(std::move(a));
    } else if (cols[0] == "label") {
      if (cols.size() != 3) lines.bad("expected 3 columns");
      topo.labels()[cols[1]] = cols[2];
    } else {
      lines.bad("unknown line type '" + cols[0] + "'");
    }
  }
}

void write_atomically(const std::string& path, std::string_view content) {
  fs::path target(path);
  fs::path temp = target;
  temp += ".tmp";
  {
    std::ofstream out(temp, std::ios::binary | std::ios::trunc);
    if (!out) fail(Errc::SnapshotError, "cannot write " + temp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) fail(Errc::SnapshotError, "short write to " + temp.string());
  }
  std::error_code ec;
  fs::rename(temp, target, ec);
  if (ec) fail(Errc::SnapshotError, "cannot replace " + target.string() + ": " + ec.message());
}

struct StateLock::Impl {
  boost::interprocess::file_lock lock;
};

StateLock::StateLock(const std::string& dir) {
  fs::path path = fs::path(dir) / ".lock";
  { std::ofstream touch(path, std::ios::app); }
  try {
    auto impl = std::make_unique<Impl>();
    impl->lock = boost::interprocess::file_lock(path.c_str());
    if (!impl->lock.try_lock()) fail(Errc::SnapshotError, dir + " is locked by another process");
    impl_ = std::move(impl);
  } catch (const boost::interprocess::interprocess_exception& e) {
    fail(Errc::SnapshotError, "cannot lock " + path.string() + ": " + e.what());
  }
}

StateLock::~StateLock() {
  if (impl_) impl_->lock.unlock();
}

void init_state(const std::string& dir, const ScenarioConfig& config) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(Errc::SnapshotError, "cannot create " + dir + ": " + ec.message());
  StateLock lock(dir);
  auto topo = build_topology(config);
  fs::path root(dir);
  for (const auto& entry : fs::directory_iterator(root)) {
    std::string name = entry.path().filename().string();
    if (name.rfind("registrar-", 0) == 0 && entry.path().extension() == ".snap") fs::remove(entry.path());
  }
  write_atomically((root / kConfig).string(), render_scenario_config(config));
  save_state(*topo, dir);
}

std::unique_ptr<Topology> load_state(const std::string& dir) {
  fs::path root(dir);
  if (!fs::is_directory(root)) fail(Errc::SnapshotError, "no state directory " + dir);
  ScenarioConfig config;
  try {
    config = parse_scenario_config(read_file(root / kConfig));
  } catch (const Error& e) {
    if (e.code() == Errc::SnapshotError) throw;
    fail(Errc::SnapshotError, std::string(kConfig) + ": " + e.detail());
  }
  auto topo = build_topology(config);
  restore_registry_snapshot(*topo, read_file(root / kRegistrySnap));
  restore_ledger_snapshot(*topo, read_file(root / kLedgerSnap));
  for (const auto& [id, service] : topo->registrars()) {
    fs::path path = root / ("registrar-" + id + ".snap");
    if (fs::exists(path)) restore_registrar_snapshot(*service, read_file(path));
  }
  restore_subscriptions_snapshot(*topo, read_file(root / kSubscriptionsSnap));
  RunLog journal;
  try {
    journal = RunLog::parse(read_file(root / kJournal));
  } catch (const Error& e) {
    fail(Errc::SnapshotError, std::string(kJournal) + " " + e.detail());
  }
  topo->sim().rng().seed(config.seed ^ (journal.size() * 0x9E3779B97F4A7C15ULL));
  topo->resume_log(std::move(journal));
  return topo;
}

void save_state(Topology& topo, const std::string& dir) {
  topo.sim().settle();
  fs::path root(dir);
  std::vector<std::pair<fs::path, std::string>> files;
  files.emplace_back(root / kRegistrySnap, render_registry_snapshot(topo));
  files.emplace_back(root / kLedgerSnap, render_ledger_snapshot(topo));
  for (const auto& [id, service] : topo.registrars()) {
    files.emplace_back(root / ("registrar-" + id + ".snap"), render_registrar_snapshot(*service));
  }
  files.emplace_back(root / kSubscriptionsSnap, render_subscriptions_snapshot(topo));
  files.emplace_back(root / kJournal, topo.log().to_text());
  for (const auto& [path, content] : files) write_atomically(path.string(), content);
}

}  // namespace enumdesk
