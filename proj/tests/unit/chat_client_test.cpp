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

#include <cstdlib>
#include <deque>
#include <mutex>
#include <thread>

#include <doctest.h>
#include <httplib.h>
#include <nlohmann/json.hpp>

#include "support/expect.hpp"

namespace gauntlet::chat {
namespace {

using json = nlohmann::json;

std::string ok_body(const std::string& text) {
  return json{{"choices", {{{"message", {{"role", "assistant"}, {"content", text}}},
                            {"finish_reason", "stop"}}}},
              {"usage", {{"prompt_tokens", 11}, {"completion_tokens", 5}, {"total_tokens", 16}}}}
      .dump();
}

class ScriptedTransport : public ChatTransport {
 public:
  explicit ScriptedTransport(std::deque<HttpResult> script) : script_(std::move(script)) {}
  HttpResult post_chat_completion(const std::string& body) override {
    bodies.push_back(body);
    HttpResult r = script_.front();
    if (script_.size() > 1) script_.pop_front();
    return r;
  }
  std::vector<std::string> bodies;

 private:
  std::deque<HttpResult> script_;
};

ChatRequest sample_request() {
  ChatRequest r;
  r.model = "m";
  r.messages = {{templates::Role::kSystem, "sys"}, {templates::Role::kUser, "hello"}};
  r.temperature = 0.5;
  r.max_tokens = 64;
  return r;
}

TEST_CASE("request body") {
  ChatRequest r = sample_request();
  json body = json::parse(serialize_request(r));
  CHECK(body["model"] == "m");
  CHECK(body["messages"][0]["role"] == "system");
  CHECK(body["messages"][1]["content"] == "hello");
  CHECK(body["temperature"] == 0.5);
  CHECK(body["max_tokens"] == 64);
  CHECK_FALSE(body.contains("seed"));
  r.seed = 42;
  body = json::parse(serialize_request(r));
  CHECK(body["seed"] == 42);
  CHECK(serialize_request(r) == serialize_request(r));
}

TEST_CASE("response parsing") {
  const ChatResponse r = parse_response(ok_body("What next?"));
  CHECK(r.text == "What next?");
  CHECK(r.finish_reason == "stop");
  CHECK(r.usage.total_tokens == 16);
  CHECK(testing::error_code([] { parse_response("{}"); }) == ErrorCode::kGenerationFailed);
  CHECK(testing::error_code([] { parse_response("nope"); }) == ErrorCode::kGenerationFailed);
  CHECK(testing::error_code([] { parse_response(ok_body("")); }) == ErrorCode::kGenerationFailed);
}

TEST_CASE("retry schedule") {
  const RetryPolicy p;
  CHECK(p.delay_before(2).count() == 500);
  CHECK(p.delay_before(3).count() == 1000);
  CHECK(p.delay_before(10).count() == 8000);
  CHECK(is_retryable_status(0));
  CHECK(is_retryable_status(429));
  CHECK(is_retryable_status(503));
  CHECK(is_retryable_status(408));
  CHECK_FALSE(is_retryable_status(400));
  CHECK_FALSE(is_retryable_status(401));
}

TEST_CASE("client retries transient failures then succeeds") {
  auto transport = std::make_shared<ScriptedTransport>(
      std::deque<HttpResult>{{500, "", ""}, {0, "", "refused"}, {200, ok_body("Q?"), ""}});
  std::vector<std::int64_t> sleeps;
  ChatClient client(transport, RetryPolicy{}, [&](auto d) { sleeps.push_back(d.count()); });
  const ChatOutcome out = client.complete(sample_request());
  REQUIRE(out.response);
  CHECK(out.response->text == "Q?");
  CHECK(out.attempts == 3);
  CHECK(sleeps == std::vector<std::int64_t>{500, 1000});
  CHECK(transport->bodies.size() == 3);
  CHECK(transport->bodies[0] == transport->bodies[2]);
}

TEST_CASE("client gives up after max attempts") {
  auto transport = std::make_shared<ScriptedTransport>(std::deque<HttpResult>{{503, "", ""}});
  ChatClient client(transport, RetryPolicy{}, [](auto) {});
  const ChatOutcome out = client.complete(sample_request());
  CHECK_FALSE(out.response);
  CHECK(out.attempts == 3);
  CHECK(out.last_status == 503);
  CHECK(out.error.find("503") != std::string::npos);
}

TEST_CASE("client does not retry client errors") {
  auto transport = std::make_shared<ScriptedTransport>(std::deque<HttpResult>{{401, "", ""}});
  ChatClient client(transport, RetryPolicy{}, [](auto) {});
  const ChatOutcome out = client.complete(sample_request());
  CHECK_FALSE(out.response);
  CHECK(out.attempts == 1);
}

TEST_CASE("http transport talks to an OpenAI-compatible endpoint") {
  httplib::Server server;
  std::mutex mu;
  std::string seen_auth, seen_body, seen_path;
  server.Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
    std::lock_guard lock(mu);
    seen_auth = req.get_header_value("Authorization");
    seen_body = req.body;
    seen_path = req.path;
    res.set_content(ok_body("From the server?"), "application/json");
  });
  const int port = server.bind_to_any_port("127.0.0.1");
  REQUIRE(port > 0);
  std::thread th([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  HttpTransportOptions opts;
  opts.endpoint_url = "http://127.0.0.1:" + std::to_string(port) + "/v1/";
  opts.api_key = "sekret";
  ChatClient client(make_http_transport(opts), RetryPolicy{}, [](auto) {});
  const ChatOutcome out = client.complete(sample_request());
  server.stop();
  th.join();

  REQUIRE(out.response);
  CHECK(out.response->text == "From the server?");
  CHECK(seen_auth == "Bearer sekret");
  CHECK(seen_path == "/v1/chat/completions");
  CHECK(json::parse(seen_body)["model"] == "m");
}

TEST_CASE("unreachable endpoint is reported, not thrown") {
  HttpTransportOptions opts;
  opts.endpoint_url = "http://127.0.0.1:9/v1";
  opts.connect_timeout = std::chrono::seconds(1);
  ChatClient client(make_http_transport(opts), RetryPolicy{2}, [](auto) {});
  const ChatOutcome out = client.complete(sample_request());
  CHECK_FALSE(out.response);
  CHECK(out.attempts == 2);
  CHECK(out.last_status == 0);
}

TEST_CASE("api key comes from the environment") {
  ::setenv("PROMPTGAUNTLET_API_KEY", "k-123", 1);
  CHECK(api_key_from_env() == "k-123");
  ::unsetenv("PROMPTGAUNTLET_API_KEY");
  CHECK(api_key_from_env().empty());
}

}  // namespace
}  // namespace gauntlet::chat
