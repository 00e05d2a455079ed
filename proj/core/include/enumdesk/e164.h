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

#ifndef ENUMDESK_E164_H_
#define ENUMDESK_E164_H_

#include <compare>
#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace enumdesk {

inline constexpr std::size_t kMinE164Digits = 3;
inline constexpr std::size_t kMaxE164Digits = 15;

// Longest-prefix table of country codes (1 to 3 digits each).
class CountryCodeTable {
 public:
  CountryCodeTable() = default;
  explicit CountryCodeTable(std::set<std::string> prefixes);

  // {1, 44, 49, 81, 82, 86}
  static const CountryCodeTable& standard();

  void add(std::string prefix);
  bool empty() const { return prefixes_.empty(); }
  const std::set<std::string>& prefixes() const { return prefixes_; }

  std::optional<std::string> longest_match(std::string_view digits) const;

 private:
  std::set<std::string> prefixes_;
};

// A validated international number. Construction goes through from_digits or
// the parsers below, so an instance always satisfies the length and digit
// invariants.
class E164Number {
 public:
  // Throws LengthOutOfRange, NonDigitContent, or MissingCountryCode when the
  // country code is empty or is not a prefix of the digits.
  static E164Number from_digits(std::string full_digits, std::string country_code);

  const std::string& full_digits() const { return full_digits_; }
  const std::string& country_code() const { return country_code_; }
  std::string_view national_digits() const {
    return std::string_view(full_digits_).substr(country_code_.size());
  }

  // "+" followed by the digits.
  std::string render() const { return "+" + full_digits_; }

  // Identity is the digit string; the country-code split is metadata.
  friend bool operator==(const E164Number& a, const E164Number& b) {
    return a.full_digits_ == b.full_digits_;
  }
  friend std::strong_ordering operator<=>(const E164Number& a, const E164Number& b) {
    return a.full_digits_ <=> b.full_digits_;
  }

 private:
  E164Number(std::string full, std::string cc)
      : full_digits_(std::move(full)), country_code_(std::move(cc)) {}

  std::string full_digits_;
  std::string country_code_;
};

struct ApexConfig {
  std::string apex = "e164.arpa";
  std::string label = "ENUM";

  // Validates the apex: non-empty dot-separated labels of 1..63 characters.
  static ApexConfig make(std::string apex, std::string label = "ENUM");
  static const ApexConfig& standard();

  std::size_t label_count() const;
};

struct EnumDomain {
  std::vector<char> digit_labels;  // reversed digits, one per label
  std::string apex;

  std::string render() const;
  std::size_t label_count() const;
};

// Normalizes free-form input into an E164Number. A leading "+" marks the
// international form; hyphen, space, dot and parentheses are separators.
// Without "+", default_country_code is prepended (MissingCountryCode when
// absent).
E164Number parse_number(std::string_view raw,
                        const std::optional<std::string>& default_country_code = std::nullopt,
                        const CountryCodeTable& table = CountryCodeTable::standard());

EnumDomain to_domain(const E164Number& number, const ApexConfig& apex = ApexConfig::standard());

// Inverse of to_domain. Accepts an optional trailing root dot and compares
// the apex case-insensitively.
E164Number from_domain(std::string_view domain, const ApexConfig& apex = ApexConfig::standard(),
                       const CountryCodeTable& table = CountryCodeTable::standard());

std::string country_code_of(const E164Number& number,
                            const CountryCodeTable& table = CountryCodeTable::standard());

}  // namespace enumdesk

#endif  // ENUMDESK_E164_H_
