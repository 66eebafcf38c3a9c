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

#include "gauntlet/chat_client.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "gauntlet/error.hpp"

namespace gauntlet::chat {
namespace {

using json = nlohmann::json;

struct ParsedUrl {
  std::string scheme_host_port;
  std::string base_path;
};

ParsedUrl split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw Error(ErrorCode::kConfig, "endpoint url needs a scheme: " + url);
  }
  const auto path_begin = url.find('/', scheme_end + 3);
  ParsedUrl out;
  out.scheme_host_port = url.substr(0, path_begin);
  out.base_path = path_begin == std::string::npos ? "" : url.substr(path_begin);
  while (!out.base_path.empty() && out.base_path.back() == '/') out.base_path.pop_back();
  return out;
}

class HttpTransport final : public ChatTransport {
 public:
  explicit HttpTransport(const HttpTransportOptions& options)
      : url_(split_url(options.endpoint_url)), options_(options) {}

  HttpResult post_chat_completion(const std::string& body) override {
    httplib::Client client(url_.scheme_host_port);
    client.set_connection_timeout(options_.connect_timeout);
    client.set_read_timeout(options_.read_timeout);
    if (!options_.api_key.empty()) client.set_bearer_token_auth(options_.api_key);
    auto res = client.Post(url_.base_path + "/chat/completions", body, "application/json");
    if (!res) return {0, "", httplib::to_string(res.error())};
    return {res->status, res->body, ""};
  }

 private:
  ParsedUrl url_;
  HttpTransportOptions options_;
};

}  // namespace

std::string serialize_request(const ChatRequest& request) {
  json messages = json::array();
  for (const auto& m : request.messages) {
    messages.push_back({{"role", std::string(templates::to_string(m.role))},
                        {"content", m.content}});
  }
  json body = {{"model", request.model},
               {"messages", std::move(messages)},
               {"temperature", request.temperature},
               {"max_tokens", request.max_tokens}};
  if (request.seed) body["seed"] = *request.seed;
  return body.dump();
}

ChatResponse parse_response(std::string_view body) {
  json doc;
  try {
    doc = json::parse(body);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kGenerationFailed, std::string("unparseable response: ") + e.what());
  }
  const auto choices = doc.find("choices");
  if (choices == doc.end() || !choices->is_array() || choices->empty()) {
    throw Error(ErrorCode::kGenerationFailed, "response has no choices");
  }
  const json& first = (*choices)[0];
  ChatResponse out;
  const auto message = first.find("message");
  if (message != first.end() && message->contains("content") &&
      (*message)["content"].is_string()) {
    out.text = (*message)["content"].get<std::string>();
  }
  if (out.text.empty()) {
    throw Error(ErrorCode::kGenerationFailed, "response message content is empty");
  }
  if (auto fr = first.find("finish_reason"); fr != first.end() && fr->is_string()) {
    out.finish_reason = fr->get<std::string>();
  }
  if (auto usage = doc.find("usage"); usage != doc.end() && usage->is_object()) {
    out.usage.prompt_tokens = usage->value("prompt_tokens", std::int64_t{0});
    out.usage.completion_tokens = usage->value("completion_tokens", std::int64_t{0});
    out.usage.total_tokens = usage->value("total_tokens", std::int64_t{0});
  }
  return out;
}

std::unique_ptr<ChatTransport> make_http_transport(const HttpTransportOptions& options) {
  return std::make_unique<HttpTransport>(options);
}

std::string api_key_from_env() {
  const char* key = std::getenv("PROMPTGAUNTLET_API_KEY");
  return key ? std::string(key) : std::string();
}

std::chrono::milliseconds RetryPolicy::delay_before(int attempt) const {
  const double scaled =
      static_cast<double>(initial_backoff.count()) * std::pow(multiplier, attempt - 2);
  const double capped = std::min(scaled, static_cast<double>(max_backoff.count()));
  return std::chrono::milliseconds(static_cast<std::int64_t>(capped));
}

bool is_retryable_status(int status) {
  return status == 0 || status == 408 || status == 429 || status >= 500;
}

ChatClient::ChatClient(std::shared_ptr<ChatTransport> transport, RetryPolicy retry,
                       Sleeper sleeper)
    : transport_(std::move(transport)), retry_(retry), sleeper_(std::move(sleeper)) {
  if (!sleeper_) {
    sleeper_ = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
  }
  if (retry_.max_attempts < 1) {
    throw Error(ErrorCode::kConfig, "retry max_attempts must be >= 1");
  }
}

ChatOutcome ChatClient::complete(const ChatRequest& request) const {
  const std::string body = serialize_request(request);
  ChatOutcome outcome;
  for (int attempt = 1; attempt <= retry_.max_attempts; ++attempt) {
    if (attempt > 1) sleeper_(retry_.delay_before(attempt));
    outcome.attempts = attempt;
    const HttpResult result = transport_->post_chat_completion(body);
    outcome.last_status = result.status;
    if (result.status >= 200 && result.status < 300) {
      try {
        outcome.response = parse_response(result.body);
        outcome.error.clear();
        return outcome;
      } catch (const Error& e) {
        outcome.error = e.what();
        return outcome;
      }
    }
    outcome.error = result.status == 0
                        ? "transport error: " + result.transport_error
                        : "HTTP " + std::to_string(result.status);
    if (!is_retryable_status(result.status)) break;
  }
  return outcome;
}

}  // namespace gauntlet::chat
