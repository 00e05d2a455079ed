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

#ifndef ENUMDESK_NAPTR_H_
#define ENUMDESK_NAPTR_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "enumdesk/e164.h"

namespace enumdesk {

enum class Visibility { Public, Restricted };

std::string_view visibility_name(Visibility v);

// One Naming Authority Pointer entry. Supported flags are "u" (terminal,
// rewrite to URI) and "" (non-terminal, points at `replacement`). A "u"
// record that carries only a replacement is treated as non-terminal.
struct NaptrRecord {
  std::uint16_t order = 0;
  std::uint16_t preference = 0;
  std::string flags;
  std::string service;
  std::string regexp;
  std::string replacement;  // "" when absent; rendered as "."
  Visibility visibility = Visibility::Public;

  bool terminal() const { return flags == "u" && !regexp.empty(); }

  // `order pref "flags" "service" "regexp" replacement`, plus a trailing
  // `restricted` token for restricted records.
  std::string to_zone_line() const;

  friend bool operator==(const NaptrRecord&, const NaptrRecord&) = default;
};

// Parsed substitution expression: delimiter, pattern, replacement.
struct RewriteRule {
  char delimiter = '!';
  std::string pattern;      // with escaped delimiters already unescaped
  std::string replacement;  // raw, backreferences still encoded as \N
};

RewriteRule parse_rewrite(std::string_view regexp);

// Checks the record invariants; throws the parse_record error codes.
void validate_record(const NaptrRecord& record);

NaptrRecord parse_record(std::string_view line);

// Matches one service field, or everything when wildcard. Comparison is
// ASCII case-insensitive.
class ServiceSelector {
 public:
  ServiceSelector() = default;  // wildcard
  explicit ServiceSelector(std::string service);

  static ServiceSelector any() { return ServiceSelector(); }
  // "*" or "" → wildcard.
  static ServiceSelector parse(std::string_view text);

  bool wildcard() const { return service_.empty(); }
  const std::string& service() const { return service_; }
  bool matches(std::string_view service) const;
  std::string to_string() const { return wildcard() ? "*" : service_; }

  // True when every service this selector matches is also matched by `outer`.
  bool within(const ServiceSelector& outer) const;

  friend bool operator==(const ServiceSelector&, const ServiceSelector&) = default;

 private:
  std::string service_;
};

struct NaptrRecordSet {
  E164Number number;
  std::vector<NaptrRecord> records;
};

// Filter by selector and visibility, then stable ascending sort on
// (order, preference).
std::vector<NaptrRecord> select(const NaptrRecordSet& set, const ServiceSelector& selector,
                                Visibility requester);

// Rewrites `subject` ("+" and the digits) through the record's regexp.
// Throws NoMatch, BadBackreference, or InvalidRecord.
std::string apply_regexp(const NaptrRecord& record, std::string_view subject);

struct RecordSetResolution {
  std::vector<std::string> uris;
  std::vector<std::string> warnings;
};

// select() and then apply_regexp() on each terminal record. Non-terminal
// records are skipped; per-record rewrite failures become warnings.
RecordSetResolution resolve_record_set(const NaptrRecordSet& set, const ServiceSelector& selector,
                                       std::string_view subject,
                                       Visibility requester = Visibility::Public);

// Order-independent digest of a record multiset (hex FNV-1a over sorted zone
// lines). Used to compare stores across registrars.
std::string record_multiset_digest(const std::vector<NaptrRecord>& records);

}  // namespace enumdesk

#endif  // ENUMDESK_NAPTR_H_
