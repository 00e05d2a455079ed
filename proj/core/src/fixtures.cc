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

#include "embedded.h"
#include "enumdesk/error.h"
#include "enumdesk/scenario.h"

namespace enumdesk {

std::string_view builtin_scenario(int model_id) {
  std::string_view text = embedded::scenario(model_id);
  if (text.empty()) fail(Errc::InvalidModelCombination, "no built-in model " + std::to_string(model_id));
  return text;
}

std::string_view builtin_canonical_script() { return embedded::canonical_script(); }

}  // namespace enumdesk
