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

#include <cctype>
#include <charconv>
#include <sstream>

#include "enumdesk/error.h"
#include "enumdesk/scenario.h"

namespace enumdesk {
namespace {

struct Arity {
  std::size_t min;
  std::size_t max;
  bool tail;  // remainder of the line after `min` positionals is kept raw
};

const std::map<std::string, Arity, std::less<>>& arities() {
  static const std::map<std::string, Arity, std::less<>> kArity{
      {"assign", {3, 3, false}},     {"subscribe", {3, 3, false}},      {"provision", {3, 3, true}},
      {"grant", {6, 6, false}},      {"revoke", {3, 3, false}},         {"transfer", {3, 3, false}},
      {"resume", {2, 2, false}},     {"dispute", {2, 2, true}},         {"disconnect", {4, 4, false}},
      {"resolve", {1, 2, false}},    {"resolve_all", {1, 1, false}},    {"cooperate", {3, 4, false}},
      {"backdoor_write", {3, 3, true}}, {"get", {3, 4, false}},         {"settle", {0, 0, false}},
      {"advance", {1, 1, false}},
  };
  return kArity;
}

bool ident(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

std::string substitute(std::string_view line, const std::map<std::string, std::string>& aliases) {
  std::string out;
  for (std::size_t i = 0; i < line.size();) {
    if (line[i] == '$') {
      std::size_t j = i + 1;
      while (j < line.size() && ident(line[j])) ++j;
      auto it = aliases.find(std::string(line.substr(i + 1, j - i - 1)));
      if (j > i + 1 && it != aliases.end()) {
        out += it->second;
        i = j;
        continue;
      }
    }
    out += line[i++];
  }
  return out;
}

// Next whitespace-delimited token starting at `pos`; advances `pos`.
std::string next_token(std::string_view line, std::size_t& pos) {
  while (pos < line.size() && std::isspace(static_cast<unsigned char>(line[pos]))) ++pos;
  std::size_t start = pos;
  while (pos < line.size() && !std::isspace(static_cast<unsigned char>(line[pos]))) ++pos;
  return std::string(line.substr(start, pos - start));
}

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::uint64_t parse_u64(const std::string& s, std::size_t line) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
    fail(Errc::SnapshotError, "line " + std::to_string(line) + ": bad integer '" + s + "'");
  return v;
}

}  // namespace

std::vector<ScriptEvent> parse_script(std::string_view text, const std::map<std::string, std::string>& aliases) {
  std::vector<ScriptEvent> events;
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    line = substitute(line, aliases);
    auto where = [&] { return "line " + std::to_string(line_no); };

    std::size_t pos = 0;
    if (next_token(line, pos) != "step") fail(Errc::ScriptError, where() + ": expected 'step <kind> ...'");
    ScriptEvent ev;
    ev.line = line_no;
    ev.kind = next_token(line, pos);
    auto arity = arities().find(ev.kind);
    if (arity == arities().end()) fail(Errc::ScriptError, where() + ": unknown step '" + ev.kind + "'");
    const Arity& a = arity->second;

    if (a.tail) {
      for (std::size_t i = 0; i < a.min; ++i) {
        std::string tok = next_token(line, pos);
        if (tok.empty()) break;
        ev.args.push_back(std::move(tok));
      }
      ev.rest = trim(std::string_view(line).substr(pos));
      if (ev.args.size() < a.min || (ev.kind != "dispute" && ev.rest.empty()))
        fail(Errc::ScriptError, where() + ": step " + ev.kind + " is missing arguments");
    } else {
      for (std::string tok = next_token(line, pos); !tok.empty(); tok = next_token(line, pos)) {
        auto eq = tok.find('=');
        if (eq != std::string::npos && eq > 0) {
          ev.options[tok.substr(0, eq)] = tok.substr(eq + 1);
        } else {
          ev.args.push_back(std::move(tok));
        }
      }
      if (ev.args.size() < a.min || ev.args.size() > a.max)
        fail(Errc::ScriptError, where() + ": step " + ev.kind + " takes " + std::to_string(a.min) +
                                    (a.max != a.min ? ".." + std::to_string(a.max) : "") + " arguments, got " +
                                    std::to_string(ev.args.size()));
    }
    events.push_back(std::move(ev));
  }
  return events;
}

std::string LogRecord::to_line() const {
  Fields head{{"id", std::to_string(id)}, {"tick", std::to_string(tick)}, {"kind", kind}};
  std::string line = encode_fields(head);
  if (!fields.empty()) line += ";" + encode_fields(fields);
  return line;
}

void RunLog::amend(std::size_t index, const Fields& extra) {
  for (const auto& [k, v] : extra.items()) records_.at(index).fields.add(k, v);
}

std::string RunLog::to_text() const {
  std::string out;
  for (const auto& r : records_) {
    out += r.to_line();
    out += '\n';
  }
  return out;
}

RunLog RunLog::parse(std::string_view text) {
  RunLog log;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    Fields all;
    try {
      all = decode_fields(line);
    } catch (const Error& e) {
      fail(Errc::SnapshotError, "line " + std::to_string(line_no) + ": " + e.detail());
    }
    const auto& items = all.items();
    if (items.size() < 3 || items[0].first != "id" || items[1].first != "tick" || items[2].first != "kind")
      fail(Errc::SnapshotError, "line " + std::to_string(line_no) + ": expected id, tick and kind");
    LogRecord r;
    r.id = parse_u64(items[0].second, line_no);
    r.tick = parse_u64(items[1].second, line_no);
    r.kind = items[2].second;
    for (std::size_t i = 3; i < items.size(); ++i) r.fields.add(items[i].first, items[i].second);
    if (!log.records_.empty() && r.id <= log.records_.back().id)
      fail(Errc::SnapshotError, "line " + std::to_string(line_no) + ": ids must increase");
    log.records_.push_back(std::move(r));
  }
  return log;
}

}  // namespace enumdesk
