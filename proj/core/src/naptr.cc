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

#include "enumdesk/naptr.h"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <regex>

#include "enumdesk/error.h"

namespace enumdesk {
namespace {

bool iequals(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(a[i])) !=
        std::tolower(static_cast<unsigned char>(b[i])))
      return false;
  }
  return true;
}

std::string lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

// Splits a zone line into fields. Double-quoted fields may contain blanks;
// inside quotes only \" is an escape, every other backslash is kept.
std::vector<std::string> split_fields(std::string_view line) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i >= line.size()) break;
    std::string field;
    if (line[i] == '"') {
      ++i;
      bool closed = false;
      while (i < line.size()) {
        if (line[i] == '\\' && i + 1 < line.size() && line[i + 1] == '"') {
          field += '"';
          i += 2;
        } else if (line[i] == '"') {
          closed = true;
          ++i;
          break;
        } else {
          field += line[i++];
        }
      }
      if (!closed) fail(Errc::FieldCount, "unterminated quoted field");
    } else {
      while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) field += line[i++];
    }
    out.push_back(std::move(field));
  }
  return out;
}

std::uint16_t parse_u16(const std::string& text, const char* what) {
  unsigned value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size() || value > 65535)
    fail(Errc::BadInteger, std::string(what) + " '" + text + "'");
  return static_cast<std::uint16_t>(value);
}

std::string quote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '\\';
    out += c;
  }
  out += '"';
  return out;
}

std::regex compile(const RewriteRule& rule) {
  try {
    return std::regex(rule.pattern, std::regex::extended);
  } catch (const std::regex_error& e) {
    fail(Errc::InvalidRecord, "pattern '" + rule.pattern + "': " + e.what());
  }
}

}  // namespace

std::string_view visibility_name(Visibility v) {
  return v == Visibility::Public ? "public" : "restricted";
}

std::string NaptrRecord::to_zone_line() const {
  std::string out = std::to_string(order) + " " + std::to_string(preference) + " " + quote(flags) +
                    " " + quote(service) + " " + quote(regexp) + " " +
                    (replacement.empty() ? std::string(".") : replacement);
  if (visibility == Visibility::Restricted) out += " restricted";
  return out;
}

RewriteRule parse_rewrite(std::string_view regexp) {
  if (regexp.size() < 3) fail(Errc::BadDelimiter, std::string(regexp));
  const char delim = regexp[0];
  if (std::isdigit(static_cast<unsigned char>(delim)) || delim == '\\' ||
      std::isspace(static_cast<unsigned char>(delim)))
    fail(Errc::BadDelimiter, std::string(regexp));

  // Positions of unescaped delimiters after the first.
  std::vector<std::size_t> cuts;
  for (std::size_t i = 1; i < regexp.size(); ++i) {
    if (regexp[i] == '\\') {
      ++i;
      continue;
    }
    if (regexp[i] == delim) cuts.push_back(i);
  }
  if (cuts.size() != 2 || cuts[1] != regexp.size() - 1) fail(Errc::BadDelimiter, std::string(regexp));

  RewriteRule rule;
  rule.delimiter = delim;
  std::string_view pattern = regexp.substr(1, cuts[0] - 1);
  for (std::size_t i = 0; i < pattern.size(); ++i) {
    if (pattern[i] == '\\' && i + 1 < pattern.size() && pattern[i + 1] == delim) {
      rule.pattern += delim;
      ++i;
    } else {
      rule.pattern += pattern[i];
    }
  }
  rule.replacement = std::string(regexp.substr(cuts[0] + 1, cuts[1] - cuts[0] - 1));
  if (rule.pattern.empty()) fail(Errc::BadDelimiter, "empty pattern");
  return rule;
}

void validate_record(const NaptrRecord& r) {
  if (r.flags != "u" && !r.flags.empty()) fail(Errc::InvalidRecord, "unsupported flags '" + r.flags + "'");
  if (r.flags == "u" && r.regexp.empty() && r.replacement.empty())
    fail(Errc::FlagRegexpConflict, "flag u requires a regexp");
  if (r.regexp.empty() == r.replacement.empty())
    fail(Errc::InvalidRecord, "exactly one of regexp and replacement must be set");
  if (!r.regexp.empty()) compile(parse_rewrite(r.regexp));
}

NaptrRecord parse_record(std::string_view line) {
  auto fields = split_fields(line);
  if (fields.size() != 6 && fields.size() != 7)
    fail(Errc::FieldCount, std::to_string(fields.size()) + " fields");

  NaptrRecord r;
  r.order = parse_u16(fields[0], "order");
  r.preference = parse_u16(fields[1], "preference");
  r.flags = lower(fields[2]);
  r.service = fields[3];
  r.regexp = fields[4];
  r.replacement = fields[5] == "." ? std::string() : fields[5];
  if (fields.size() == 7) {
    if (fields[6] == "restricted") {
      r.visibility = Visibility::Restricted;
    } else if (fields[6] != "public") {
      fail(Errc::FieldCount, "unexpected trailing field '" + fields[6] + "'");
    }
  }
  validate_record(r);
  return r;
}

ServiceSelector::ServiceSelector(std::string service) : service_(std::move(service)) {
  if (service_ == "*") service_.clear();
}

ServiceSelector ServiceSelector::parse(std::string_view text) {
  return ServiceSelector(std::string(text));
}

bool ServiceSelector::matches(std::string_view service) const {
  return wildcard() || iequals(service_, service);
}

bool ServiceSelector::within(const ServiceSelector& outer) const {
  if (outer.wildcard()) return true;
  if (wildcard()) return false;
  return iequals(service_, outer.service_);
}

std::vector<NaptrRecord> select(const NaptrRecordSet& set, const ServiceSelector& selector,
                                Visibility requester) {
  std::vector<NaptrRecord> out;
  for (const auto& r : set.records) {
    if (!selector.matches(r.service)) continue;
    if (requester == Visibility::Public && r.visibility == Visibility::Restricted) continue;
    out.push_back(r);
  }
  std::stable_sort(out.begin(), out.end(), [](const NaptrRecord& a, const NaptrRecord& b) {
    if (a.order != b.order) return a.order < b.order;
    return a.preference < b.preference;
  });
  return out;
}

std::string apply_regexp(const NaptrRecord& record, std::string_view subject) {
  if (record.regexp.empty()) fail(Errc::InvalidRecord, "record has no regexp");
  RewriteRule rule = parse_rewrite(record.regexp);
  std::regex re = compile(rule);

  std::match_results<std::string_view::const_iterator> m;
  if (!std::regex_search(subject.begin(), subject.end(), m, re))
    fail(Errc::NoMatch, std::string(subject) + " !~ " + rule.pattern);

  std::string out;
  const std::string& rep = rule.replacement;
  for (std::size_t i = 0; i < rep.size(); ++i) {
    if (rep[i] != '\\' || i + 1 >= rep.size()) {
      out += rep[i];
      continue;
    }
    char next = rep[++i];
    if (next >= '1' && next <= '9') {
      std::size_t group = static_cast<std::size_t>(next - '0');
      if (group > re.mark_count())
        fail(Errc::BadBackreference, "\\" + std::string(1, next) + " with " +
                                         std::to_string(re.mark_count()) + " groups");
      if (m[group].matched) out.append(m[group].first, m[group].second);
    } else {
      out += next;
    }
  }
  return out;
}

RecordSetResolution resolve_record_set(const NaptrRecordSet& set, const ServiceSelector& selector,
                                       std::string_view subject, Visibility requester) {
  RecordSetResolution result;
  for (const auto& r : select(set, selector, requester)) {
    if (!r.terminal()) continue;
    try {
      result.uris.push_back(apply_regexp(r, subject));
    } catch (const Error& e) {
      result.warnings.push_back(r.to_zone_line() + ": " + e.what());
    }
  }
  return result;
}

std::string record_multiset_digest(const std::vector<NaptrRecord>& records) {
  std::vector<std::string> lines;
  lines.reserve(records.size());
  for (const auto& r : records) lines.push_back(r.to_zone_line());
  std::sort(lines.begin(), lines.end());
  std::uint64_t h = 1469598103934665603ULL;
  for (const auto& line : lines) {
    for (unsigned char c : line) {
      h ^= c;
      h *= 1099511628211ULL;
    }
    h ^= '\n';
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf) + "/" + std::to_string(records.size());
}

}  // namespace enumdesk
