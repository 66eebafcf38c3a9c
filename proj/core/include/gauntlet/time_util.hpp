// Copyright 2026 The PromptGauntlet Authors.
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

#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <string>

namespace gauntlet {

// Produces RFC 3339 UTC timestamps for events; injectable for tests and
// deterministic fixture generation.
using Clock = std::function<std::string()>;

std::string format_rfc3339(std::chrono::system_clock::time_point tp);
std::string utc_now_rfc3339();

// Clock that starts at `start` and advances one second per call.
Clock stepping_clock(std::chrono::system_clock::time_point start);

}  // namespace gauntlet
