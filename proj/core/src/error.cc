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

#include "enumdesk/error.h"

#include <utility>

namespace enumdesk {
namespace {

constexpr std::pair<Errc, std::string_view> kNames[] = {
    {Errc::EmptyInput, "EmptyInput"},
    {Errc::NonDigitContent, "NonDigitContent"},
    {Errc::LengthOutOfRange, "LengthOutOfRange"},
    {Errc::MissingCountryCode, "MissingCountryCode"},
    {Errc::WrongApex, "WrongApex"},
    {Errc::NonDigitLabel, "NonDigitLabel"},
    {Errc::UnknownCountryCode, "UnknownCountryCode"},
    {Errc::BadApex, "BadApex"},
    {Errc::FieldCount, "FieldCount"},
    {Errc::BadInteger, "BadInteger"},
    {Errc::BadDelimiter, "BadDelimiter"},
    {Errc::FlagRegexpConflict, "FlagRegexpConflict"},
    {Errc::InvalidRecord, "InvalidRecord"},
    {Errc::NoMatch, "NoMatch"},
    {Errc::BadBackreference, "BadBackreference"},
    {Errc::NotAuthoritative, "NotAuthoritative"},
    {Errc::UnaccreditedRegistrar, "UnaccreditedRegistrar"},
    {Errc::NoDelegation, "NoDelegation"},
    {Errc::StaleOldRegistrar, "StaleOldRegistrar"},
    {Errc::UnknownPeer, "UnknownPeer"},
    {Errc::NoPhoneService, "NoPhoneService"},
    {Errc::RegistrarKindForbidden, "RegistrarKindForbidden"},
    {Errc::VerificationFailed, "VerificationFailed"},
    {Errc::AccessDenied, "AccessDenied"},
    {Errc::EnumInactive, "EnumInactive"},
    {Errc::NotSubscriber, "NotSubscriber"},
    {Errc::UnknownGrant, "UnknownGrant"},
    {Errc::SameRegistrar, "SameRegistrar"},
    {Errc::AlreadyComplete, "AlreadyComplete"},
    {Errc::UnknownTransfer, "UnknownTransfer"},
    {Errc::UnknownSubscription, "UnknownSubscription"},
    {Errc::AlreadySubscribed, "AlreadySubscribed"},
    {Errc::Timeout, "Timeout"},
    {Errc::BadFrame, "BadFrame"},
    {Errc::InvalidModelCombination, "InvalidModelCombination"},
    {Errc::RunIncomplete, "RunIncomplete"},
    {Errc::ConfigError, "ConfigError"},
    {Errc::ScriptError, "ScriptError"},
    {Errc::SnapshotError, "SnapshotError"},
    {Errc::MissingYear, "MissingYear"},
    {Errc::ZeroBase, "ZeroBase"},
    {Errc::BadPenetration, "BadPenetration"},
    {Errc::FixtureError, "FixtureError"},
};

std::string compose(Errc code, const std::string& detail) {
  std::string out(errc_name(code));
  if (!detail.empty()) {
    out += ": ";
    out += detail;
  }
  return out;
}

}  // namespace

std::string_view errc_name(Errc code) {
  for (const auto& [c, name] : kNames) {
    if (c == code) return name;
  }
  return "Unknown";
}

std::optional<Errc> errc_from_name(std::string_view name) {
  for (const auto& [c, n] : kNames) {
    if (n == name) return c;
  }
  return std::nullopt;
}

Error::Error(Errc code, std::string detail)
    : std::runtime_error(compose(code, detail)),
      code_(code),
      detail_(std::move(detail)) {}

void fail(Errc code, std::string detail) { throw Error(code, std::move(detail)); }

}  // namespace enumdesk
