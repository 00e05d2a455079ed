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

#include "enumdesk/e164.h"

#include <algorithm>
#include <cctype>

#include "enumdesk/error.h"

namespace enumdesk {
namespace {

bool all_digits(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c) != 0; });
}

bool is_separator(char c) {
  return c == '-' || c == ' ' || c == '\t' || c == '.' || c == '(' || c == ')';
}

bool iequals(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(a[i])) !=
        std::tolower(static_cast<unsigned char>(b[i])))
      return false;
  }
  return true;
}

std::string detect_country_code(std::string_view digits, const CountryCodeTable& table) {
  if (auto cc = table.longest_match(digits)) return *cc;
  // Unlisted code: fall back to the world-zone digit.
  return std::string(digits.substr(0, 1));
}

}  // namespace

CountryCodeTable::CountryCodeTable(std::set<std::string> prefixes) {
  for (auto& p : prefixes) add(p);
}

const CountryCodeTable& CountryCodeTable::standard() {
  static const CountryCodeTable table({"1", "44", "49", "81", "82", "86"});
  return table;
}

void CountryCodeTable::add(std::string prefix) {
  if (prefix.empty() || prefix.size() > 3 || !all_digits(prefix))
    fail(Errc::UnknownCountryCode, "country code must be 1-3 digits: '" + prefix + "'");
  prefixes_.insert(std::move(prefix));
}

std::optional<std::string> CountryCodeTable::longest_match(std::string_view digits) const {
  for (std::size_t len = std::min<std::size_t>(3, digits.size()); len > 0; --len) {
    auto it = prefixes_.find(std::string(digits.substr(0, len)));
    if (it != prefixes_.end()) return *it;
  }
  return std::nullopt;
}

E164Number E164Number::from_digits(std::string full_digits, std::string country_code) {
  if (!all_digits(full_digits)) fail(Errc::NonDigitContent, full_digits);
  if (full_digits.size() < kMinE164Digits || full_digits.size() > kMaxE164Digits)
    fail(Errc::LengthOutOfRange, std::to_string(full_digits.size()) + " digits");
  if (country_code.empty() || country_code.size() > 3 || !all_digits(country_code) ||
      full_digits.compare(0, country_code.size(), country_code) != 0)
    fail(Errc::MissingCountryCode, "'" + country_code + "' is not a prefix of " + full_digits);
  return E164Number(std::move(full_digits), std::move(country_code));
}

ApexConfig ApexConfig::make(std::string apex, std::string label) {
  while (!apex.empty() && apex.back() == '.') apex.pop_back();
  if (apex.empty()) fail(Errc::BadApex, "empty apex");
  std::size_t start = 0;
  while (true) {
    std::size_t dot = apex.find('.', start);
    std::size_t len = (dot == std::string::npos ? apex.size() : dot) - start;
    if (len == 0 || len > 63) fail(Errc::BadApex, apex);
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  return ApexConfig{std::move(apex), std::move(label)};
}

const ApexConfig& ApexConfig::standard() {
  static const ApexConfig apex{};
  return apex;
}

std::size_t ApexConfig::label_count() const {
  return static_cast<std::size_t>(std::count(apex.begin(), apex.end(), '.')) + 1;
}

std::string EnumDomain::render() const {
  std::string out;
  out.reserve(digit_labels.size() * 2 + apex.size());
  for (char d : digit_labels) {
    out += d;
    out += '.';
  }
  out += apex;
  return out;
}

std::size_t EnumDomain::label_count() const {
  return digit_labels.size() + static_cast<std::size_t>(std::count(apex.begin(), apex.end(), '.')) + 1;
}

E164Number parse_number(std::string_view raw, const std::optional<std::string>& default_country_code,
                        const CountryCodeTable& table) {
  if (raw.empty()) fail(Errc::EmptyInput);

  std::size_t pos = 0;
  while (pos < raw.size() && (raw[pos] == ' ' || raw[pos] == '\t')) ++pos;
  bool international = pos < raw.size() && raw[pos] == '+';
  if (international) ++pos;

  std::string digits;
  for (; pos < raw.size(); ++pos) {
    char c = raw[pos];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      digits += c;
    } else if (!is_separator(c)) {
      fail(Errc::NonDigitContent, std::string(raw));
    }
  }
  if (digits.empty() && !international) fail(Errc::EmptyInput, std::string(raw));

  std::string cc;
  if (!international) {
    if (!default_country_code) fail(Errc::MissingCountryCode, std::string(raw));
    cc = *default_country_code;
    digits = cc + digits;
  }
  if (digits.size() < kMinE164Digits || digits.size() > kMaxE164Digits)
    fail(Errc::LengthOutOfRange, std::to_string(digits.size()) + " digits");
  if (cc.empty()) cc = detect_country_code(digits, table);
  return E164Number::from_digits(std::move(digits), std::move(cc));
}

EnumDomain to_domain(const E164Number& number, const ApexConfig& apex) {
  EnumDomain d;
  d.digit_labels.assign(number.full_digits().rbegin(), number.full_digits().rend());
  d.apex = apex.apex;
  return d;
}

E164Number from_domain(std::string_view domain, const ApexConfig& apex, const CountryCodeTable& table) {
  while (!domain.empty() && domain.back() == '.') domain.remove_suffix(1);

  std::string_view labels;
  if (iequals(domain, apex.apex)) {
    labels = {};
  } else if (domain.size() > apex.apex.size() &&
             domain[domain.size() - apex.apex.size() - 1] == '.' &&
             iequals(domain.substr(domain.size() - apex.apex.size()), apex.apex)) {
    labels = domain.substr(0, domain.size() - apex.apex.size() - 1);
  } else {
    fail(Errc::WrongApex, std::string(domain));
  }

  std::string digits;
  if (!labels.empty()) {
    std::size_t start = 0;
    while (true) {
      std::size_t dot = labels.find('.', start);
      std::string_view label =
          labels.substr(start, dot == std::string_view::npos ? std::string_view::npos : dot - start);
      if (label.size() != 1 || !std::isdigit(static_cast<unsigned char>(label[0])))
        fail(Errc::NonDigitLabel, std::string(label));
      digits += label[0];
      if (dot == std::string_view::npos) break;
      start = dot + 1;
    }
  }
  std::reverse(digits.begin(), digits.end());
  if (digits.size() < kMinE164Digits || digits.size() > kMaxE164Digits)
    fail(Errc::LengthOutOfRange, std::to_string(digits.size()) + " digits");
  std::string cc = detect_country_code(digits, table);
  return E164Number::from_digits(std::move(digits), std::move(cc));
}

std::string country_code_of(const E164Number& number, const CountryCodeTable& table) {
  if (auto cc = table.longest_match(number.full_digits())) return *cc;
  fail(Errc::UnknownCountryCode, number.full_digits());
}

}  // namespace enumdesk
