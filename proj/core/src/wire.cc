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

#include "enumdesk/wire.h"

#include <charconv>

namespace enumdesk {
namespace {

bool needs_escape(char c) { return c == '%' || c == ';' || c == '=' || c == '\n' || c == '\r'; }

void append_escaped(std::string& out, std::string_view s) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  for (char c : s) {
    if (needs_escape(c)) {
      out += '%';
      out += kHex[(static_cast<unsigned char>(c) >> 4) & 0xF];
      out += kHex[static_cast<unsigned char>(c) & 0xF];
    } else {
      out += c;
    }
  }
}

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  return -1;
}

std::string unescape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '%') {
      out += s[i];
      continue;
    }
    int hi = i + 1 < s.size() ? hex_value(s[i + 1]) : -1;
    int lo = i + 2 < s.size() ? hex_value(s[i + 2]) : -1;
    if (hi < 0 || lo < 0) fail(Errc::BadFrame, "bad escape in '" + std::string(s) + "'");
    out += static_cast<char>(hi * 16 + lo);
    i += 2;
  }
  return out;
}

}  // namespace

Fields& Fields::add(std::string key, std::string value) {
  items_.emplace_back(std::move(key), std::move(value));
  return *this;
}

Fields& Fields::set(std::string_view key, std::string value) {
  for (auto& [k, v] : items_) {
    if (k == key) {
      v = std::move(value);
      return *this;
    }
  }
  return add(std::string(key), std::move(value));
}

std::optional<std::string_view> Fields::get(std::string_view key) const {
  for (const auto& [k, v] : items_) {
    if (k == key) return std::string_view(v);
  }
  return std::nullopt;
}

std::string Fields::get_or(std::string_view key, std::string_view fallback) const {
  auto v = get(key);
  return std::string(v ? *v : fallback);
}

std::string Fields::require(std::string_view key) const {
  auto v = get(key);
  if (!v) fail(Errc::BadFrame, "missing field '" + std::string(key) + "'");
  return std::string(*v);
}

std::vector<std::string> Fields::all(std::string_view key) const {
  std::vector<std::string> out;
  for (const auto& [k, v] : items_) {
    if (k == key) out.push_back(v);
  }
  return out;
}

std::string encode_fields(const Fields& fields) {
  std::string out;
  bool first = true;
  for (const auto& [k, v] : fields.items()) {
    if (!first) out += ';';
    first = false;
    append_escaped(out, k);
    out += '=';
    append_escaped(out, v);
  }
  return out;
}

Fields decode_fields(std::string_view text) {
  Fields fields;
  if (text.empty()) return fields;
  std::size_t start = 0;
  while (true) {
    std::size_t end = text.find(';', start);
    std::string_view pair = text.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start);
    std::size_t eq = pair.find('=');
    if (eq == std::string_view::npos || eq == 0) fail(Errc::BadFrame, "malformed pair '" + std::string(pair) + "'");
    fields.add(unescape(pair.substr(0, eq)), unescape(pair.substr(eq + 1)));
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
  return fields;
}

bool Frame::ok() const { return !fields.get("error").has_value(); }

std::string encode_frame(const Frame& frame) {
  Fields all;
  all.add("kind", frame.kind);
  for (const auto& [k, v] : frame.fields.items()) all.add(k, v);
  std::string payload = encode_fields(all);
  return std::to_string(payload.size()) + ":" + payload;
}

Frame decode_frame(std::string_view bytes) {
  std::size_t colon = bytes.find(':');
  if (colon == std::string_view::npos || colon == 0) fail(Errc::BadFrame, "missing length prefix");
  std::size_t length = 0;
  auto [ptr, ec] = std::from_chars(bytes.data(), bytes.data() + colon, length);
  if (ec != std::errc() || ptr != bytes.data() + colon) fail(Errc::BadFrame, "bad length prefix");
  std::string_view payload = bytes.substr(colon + 1);
  if (payload.size() != length)
    fail(Errc::BadFrame, "length " + std::to_string(length) + " but " + std::to_string(payload.size()) + " bytes");

  Fields all = decode_fields(payload);
  if (all.items().empty() || all.items().front().first != "kind") fail(Errc::BadFrame, "first field must be kind");
  Frame frame;
  frame.kind = all.items().front().second;
  for (std::size_t i = 1; i < all.items().size(); ++i)
    frame.fields.add(all.items()[i].first, all.items()[i].second);
  return frame;
}

Frame make_response(std::string_view request_kind, Fields fields) {
  Frame f;
  f.kind = request_kind == kind::kMigrateReq ? std::string(kind::kMigrateResp) : std::string(kind::kResponse);
  f.fields.add("re", std::string(request_kind));
  for (const auto& [k, v] : fields.items()) f.fields.add(k, v);
  return f;
}

Frame make_error_response(std::string_view request_kind, const Error& error) {
  return make_response(request_kind, Fields{{"error", std::string(errc_name(error.code()))},
                                            {"detail", error.detail()}});
}

void raise_if_error(const Frame& response) {
  auto err = response.fields.get("error");
  if (!err) return;
  auto code = errc_from_name(*err);
  if (!code) fail(Errc::BadFrame, "unknown error '" + std::string(*err) + "'");
  throw Error(*code, response.fields.get_or("detail", ""));
}

}  // namespace enumdesk
