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

#ifndef ENUMDESK_SRC_EMBEDDED_H_
#define ENUMDESK_SRC_EMBEDDED_H_

#include <string_view>

namespace enumdesk::embedded {

// Generated at build time from data/. Empty view for an unknown name.
std::string_view scenario(int model_id);
std::string_view canonical_script();
std::string_view market_csv(std::string_view name);

}  // namespace enumdesk::embedded

#endif  // ENUMDESK_SRC_EMBEDDED_H_
