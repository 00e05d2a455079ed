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

#ifndef ENUMDESK_WIRE_H_
#define ENUMDESK_WIRE_H_

#include <initializer_list>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "enumdesk/error.h"

namespace enumdesk {

// Ordered key=value pairs. Keys may repeat (e.g. one `record` per line).
class Fields {
 public:
  Fields() = default;
  Fields(std::initializer_list<std::pair<std::string, std::string>> init) : items_(init) {}

  Fields& add(std::string key, std::string value);
  // Replaces the first occurrence or appends.
  Fields& set(std::string_view key, std::string value);

  std::optional<std::string_view> get(std::string_view key) const;
  std::string get_or(std::string_view key, std::string_view fallback) const;
  // BadFrame when missing.
  std::string require(std::string_view key) const;
  std::vector<std::string> all(std::string_view key) const;

  const std::vector<std::pair<std::string, std::string>>& items() const { return items_; }
  bool empty() const { return items_.empty(); }

  friend bool operator==(const Fields&, const Fields&) = default;

 private:
  std::vector<std::pair<std::string, std::string>> items_;
};

// `k=v;k=v` with %XX escapes for '%', ';', '=', CR and LF.
std::string encode_fields(const Fields& fields);
Fields decode_fields(std::string_view text);

// Request kinds.
namespace kind {
inline constexpr std::string_view kDiscover = "DISCOVER";
inline constexpr std::string_view kLookup = "LOOKUP";
inline constexpr std::string_view kRegister = "REGISTER";
inline constexpr std::string_view kChange = "CHANGE";
inline constexpr std::string_view kRemove = "REMOVE";
inline constexpr std::string_view kPeerUpdate = "PEER_UPDATE";
inline constexpr std::string_view kSubscribe = "SUBSCRIBE";
inline constexpr std::string_view kProvision = "PROVISION";
inline constexpr std::string_view kGet = "GET";
inline constexpr std::string_view kGrant = "GRANT";
inline constexpr std::string_view kRevoke = "REVOKE";
inline constexpr std::string_view kTransferInit = "TRANSFER_INIT";
inline constexpr std::string_view kTransferResume = "TRANSFER_RESUME";
inline constexpr std::string_view kTransferDispute = "TRANSFER_DISPUTE";
inline constexpr std::string_view kTransferCommit = "TRANSFER_COMMIT";
inline constexpr std::string_view kDisconnect = "DISCONNECT";
inline constexpr std::string_view kMigrateReq = "MIGRATE_REQ";
inline constexpr std::string_view kMigrateResp = "MIGRATE_RESP";
inline constexpr std::string_view kNotice = "NOTICE";
inline constexpr std::string_view kAssign = "ASSIGN";
inline constexpr std::string_view kConfirm = "CONFIRM";
inline constexpr std::string_view kPhoneDisconnect = "PHONE_DISCONNECT";
inline constexpr std::string_view kResponse = "RESP";
}  // namespace kind

// One request or response. The kind travels as the first field.
struct Frame {
  std::string kind;
  Fields fields;

  bool ok() const;  // response without an error field
  friend bool operator==(const Frame&, const Frame&) = default;
};

// Decimal byte length, ':', then the UTF-8 payload `kind=X;...`.
std::string encode_frame(const Frame& frame);
// Decodes exactly one frame; BadFrame on length mismatch or garbage.
Frame decode_frame(std::string_view bytes);

Frame make_response(std::string_view request_kind, Fields fields = {});
Frame make_error_response(std::string_view request_kind, const Error& error);
// Throws the carried Error when the response reports one.
void raise_if_error(const Frame& response);

}  // namespace enumdesk

#endif  // ENUMDESK_WIRE_H_
