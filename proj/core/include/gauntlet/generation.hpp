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

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "gauntlet/chat_client.hpp"
#include "gauntlet/interaction.hpp"
#include "gauntlet/template.hpp"
#include "gauntlet/time_util.hpp"

namespace gauntlet::generation {

struct GenerationConfig {
  std::string endpoint_url;
  std::string model_name;
  double temperature = 0.7;
  int max_tokens = 256;
  std::optional<std::int64_t> seed;
  int parallelism = 4;
  chat::RetryPolicy retry;

  void validate() const;
};

// Opaque, deterministic id; it does not embed the template id.
std::string candidate_id_for(const std::string& template_id,
                             const std::string& interaction_id);

chat::ChatRequest build_request(const templates::PromptTemplate& tmpl,
                                const InteractionRecord& interaction,
                                const GenerationConfig& config);

struct GenerationFailure {
  std::string template_id;
  std::string interaction_id;
  int attempts = 0;
  std::string error;
  bool operator==(const GenerationFailure&) const = default;
};

using PairKey = std::pair<std::string, std::string>;  // (template_id, interaction_id)

struct GenerationSummary {
  std::size_t total_pairs = 0;
  std::size_t cached = 0;
  std::size_t generated = 0;
  std::size_t failed = 0;
  std::vector<GenerationFailure> failures;
};

// Receives results as they complete. Calls are serialized; the callbacks
// never run concurrently with each other.
struct GenerationSink {
  std::function<void(const Candidate&, const chat::ChatRequest&)> on_candidate;
  std::function<void(const GenerationFailure&)> on_failure;
};

// Requests one candidate for every (template, interaction) pair not already
// in `cached`, with at most config.parallelism requests in flight. Failures
// are reported through the sink and the summary; the run always continues.
GenerationSummary generate_all(const std::vector<templates::PromptTemplate>& templates,
                               const std::vector<InteractionRecord>& interactions,
                               const GenerationConfig& config,
                               const chat::ChatClient& client,
                               const std::set<PairKey>& cached,
                               const GenerationSink& sink,
                               const Clock& clock = utc_now_rfc3339);

}  // namespace gauntlet::generation
