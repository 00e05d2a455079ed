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

#ifndef ENUMDESK_ERROR_H_
#define ENUMDESK_ERROR_H_

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace enumdesk {

// Every failure the stack can report. The names double as the wire and log
// spelling (see errc_name), so renaming one is a protocol change.
enum class Errc {
  // e164-core
  EmptyInput,
  NonDigitContent,
  LengthOutOfRange,
  MissingCountryCode,
  WrongApex,
  NonDigitLabel,
  UnknownCountryCode,
  BadApex,
  // naptr-engine
  FieldCount,
  BadInteger,
  BadDelimiter,
  FlagRegexpConflict,
  InvalidRecord,
  NoMatch,
  BadBackreference,
  // registry-tier
  NotAuthoritative,
  UnaccreditedRegistrar,
  NoDelegation,
  StaleOldRegistrar,
  UnknownPeer,
  // registrar-tier
  NoPhoneService,
  RegistrarKindForbidden,
  VerificationFailed,
  AccessDenied,
  EnumInactive,
  NotSubscriber,
  UnknownGrant,
  SameRegistrar,
  AlreadyComplete,
  UnknownTransfer,
  UnknownSubscription,
  AlreadySubscribed,
  // transport and scenarios
  Timeout,
  BadFrame,
  InvalidModelCombination,
  RunIncomplete,
  ConfigError,
  ScriptError,
  SnapshotError,
  // market-model
  MissingYear,
  ZeroBase,
  BadPenetration,
  FixtureError,
};

std::string_view errc_name(Errc code);
std::optional<Errc> errc_from_name(std::string_view name);

class Error : public std::runtime_error {
 public:
  Error(Errc code, std::string detail = {});

  Errc code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  Errc code_;
  std::string detail_;
};

[[noreturn]] void fail(Errc code, std::string detail = {});

}  // namespace enumdesk

#endif  // ENUMDESK_ERROR_H_
