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

// Minimal chat-completions client: deterministic request bodies, a pluggable
// transport, and retry with exponential backoff.

#include <chrono>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gauntlet/interaction.hpp"
#include "gauntlet/template.hpp"

namespace gauntlet::chat {

struct ChatRequest {
  std::string model;
  std::vector<templates::ChatMessage> messages;
  double temperature = 0.7;
  int max_tokens = 256;
  std::optional<std::int64_t> seed;
};

// Byte-stable JSON body (keys sorted, messages in template order).
std::string serialize_request(const ChatRequest& request);

struct ChatResponse {
  std::string text;
  std::string finish_reason;
  TokenUsage usage;
};

// Parses an OpenAI-style completion body; throws Error(kGenerationFailed)
// when there is no non-empty first choice.
ChatResponse parse_response(std::string_view body);

struct HttpResult {
  int status = 0;  // 0 = no response (connection failure, timeout)
  std::string body;
  std::string transport_error;
};

class ChatTransport {
 public:
  virtual ~ChatTransport() = default;
  virtual HttpResult post_chat_completion(const std::string& body) = 0;
};

struct HttpTransportOptions {
  std::string endpoint_url;  // e.g. http://localhost:8000/v1
  std::string api_key;       // sent as a bearer token when non-empty
  std::chrono::seconds connect_timeout{10};
  std::chrono::seconds read_timeout{120};
};

// POSTs to <endpoint_url>/chat/completions.
std::unique_ptr<ChatTransport> make_http_transport(const HttpTransportOptions& options);

// Reads PROMPTGAUNTLET_API_KEY; empty when unset.
std::string api_key_from_env();

struct RetryPolicy {
  int max_attempts = 3;
  std::chrono::milliseconds initial_backoff{500};
  double multiplier = 2.0;
  std::chrono::milliseconds max_backoff{8000};

  std::chrono::milliseconds delay_before(int attempt) const;  // attempt >= 2
};

bool is_retryable_status(int status);

struct ChatOutcome {
  std::optional<ChatResponse> response;
  int attempts = 0;
  int last_status = 0;
  std::string error;
};

using Sleeper = std::function<void(std::chrono::milliseconds)>;

class ChatClient {
 public:
  ChatClient(std::shared_ptr<ChatTransport> transport, RetryPolicy retry,
             Sleeper sleeper = {});

  // Never throws for endpoint failures; they come back in ChatOutcome.
  ChatOutcome complete(const ChatRequest& request) const;

 private:
  std::shared_ptr<ChatTransport> transport_;
  RetryPolicy retry_;
  Sleeper sleeper_;
};

}  // namespace gauntlet::chat
