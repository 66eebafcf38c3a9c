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

#include "gauntlet/generation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <thread>
#include <tuple>

#include "gauntlet/error.hpp"

namespace gauntlet::generation {

void GenerationConfig::validate() const {
  if (endpoint_url.empty()) throw Error(ErrorCode::kConfig, "endpoint_url is required");
  if (model_name.empty()) throw Error(ErrorCode::kConfig, "model_name is required");
  if (!(temperature >= 0.0) || !std::isfinite(temperature)) {
    throw Error(ErrorCode::kConfig, "temperature must be >= 0");
  }
  if (max_tokens < 1) throw Error(ErrorCode::kConfig, "max_tokens must be positive");
  if (parallelism < 1 || parallelism > 64) {
    throw Error(ErrorCode::kConfig, "parallelism must be in [1, 64]");
  }
  if (retry.max_attempts < 1) throw Error(ErrorCode::kConfig, "retry attempts must be >= 1");
}

std::string candidate_id_for(const std::string& template_id,
                             const std::string& interaction_id) {
  // FNV-1a over "template\0interaction".
  std::uint64_t h = 0xcbf29ce484222325ULL;
  const auto feed = [&h](unsigned char c) {
    h ^= c;
    h *= 0x100000001b3ULL;
  };
  for (char c : template_id) feed(static_cast<unsigned char>(c));
  feed(0);
  for (char c : interaction_id) feed(static_cast<unsigned char>(c));
  char buf[24];
  std::snprintf(buf, sizeof buf, "c%016llx", static_cast<unsigned long long>(h));
  return buf;
}

chat::ChatRequest build_request(const templates::PromptTemplate& tmpl,
                                const InteractionRecord& interaction,
                                const GenerationConfig& config) {
  templates::RenderedPrompt rendered = templates::render(tmpl, slot_values(interaction));
  return {config.model_name, std::move(rendered.messages), config.temperature,
          config.max_tokens, config.seed};
}

GenerationSummary generate_all(const std::vector<templates::PromptTemplate>& templates,
                               const std::vector<InteractionRecord>& interactions,
                               const GenerationConfig& config,
                               const chat::ChatClient& client,
                               const std::set<PairKey>& cached,
                               const GenerationSink& sink,
                               const Clock& clock) {
  config.validate();
  struct Job {
    const templates::PromptTemplate* tmpl;
    const InteractionRecord* interaction;
  };
  GenerationSummary summary;
  std::vector<Job> jobs;
  for (const auto& tmpl : templates) {
    for (const auto& interaction : interactions) {
      ++summary.total_pairs;
      if (cached.contains({tmpl.template_id, interaction.interaction_id})) {
        ++summary.cached;
        continue;
      }
      jobs.push_back({&tmpl, &interaction});
    }
  }

  std::mutex sink_mutex;
  std::atomic<std::size_t> next{0};
  const auto fail = [&](const Job& job, int attempts, std::string error) {
    GenerationFailure failure{job.tmpl->template_id, job.interaction->interaction_id,
                              attempts, std::move(error)};
    std::lock_guard lock(sink_mutex);
    ++summary.failed;
    if (sink.on_failure) sink.on_failure(failure);
    summary.failures.push_back(std::move(failure));
  };
  const auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      const Job& job = jobs[i];
      chat::ChatRequest request;
      try {
        request = build_request(*job.tmpl, *job.interaction, config);
      } catch (const Error& e) {
        fail(job, 0, e.what());
        continue;
      }
      const chat::ChatOutcome outcome = client.complete(request);
      if (!outcome.response) {
        fail(job, outcome.attempts, outcome.error);
        continue;
      }
      Candidate candidate{candidate_id_for(job.tmpl->template_id, job.interaction->interaction_id),
                          job.tmpl->template_id,
                          job.interaction->interaction_id,
                          outcome.response->text,
                          outcome.response->finish_reason,
                          outcome.response->usage,
                          ""};
      std::lock_guard lock(sink_mutex);
      candidate.created_at = clock();
      try {
        if (sink.on_candidate) sink.on_candidate(candidate, request);
        ++summary.generated;
      } catch (const Error& e) {
        // Not persisted, so not generated.
        ++summary.failed;
        summary.failures.push_back({candidate.template_id, candidate.interaction_id,
                                    outcome.attempts, e.what()});
      }
    }
  };

  const std::size_t n_threads =
      std::min<std::size_t>(static_cast<std::size_t>(config.parallelism), jobs.size());
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(n_threads);
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  }
  std::sort(summary.failures.begin(), summary.failures.end(),
            [](const GenerationFailure& a, const GenerationFailure& b) {
              return std::tie(a.template_id, a.interaction_id) <
                     std::tie(b.template_id, b.interaction_id);
            });
  return summary;
}

}  // namespace gauntlet::generation
