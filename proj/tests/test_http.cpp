// Copyright (c) 2026 The corruptrag Authors. All Rights Reserved.
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

#include <thread>

#include <gtest/gtest.h>
#include <httplib.h>
#include <nlohmann/json.hpp>

#include "corruptrag/error.hpp"
#include "corruptrag/http.hpp"
#include "corruptrag/provider.hpp"
#include "corruptrag/remote.hpp"

namespace corruptrag {
namespace {

using json = nlohmann::json;

// Replays canned responses and records every request.
class FakeTransport final : public HttpTransport {
 public:
  explicit FakeTransport(std::vector<HttpResponse> replies) : replies_(std::move(replies)) {}
  HttpResponse post(const std::string& url, const std::map<std::string, std::string>& headers,
                    const std::string& body) override {
    std::lock_guard lock(mu_);
    urls.push_back(url);
    last_headers = headers;
    bodies.push_back(body);
    auto r = replies_[std::min(calls, replies_.size() - 1)];
    ++calls;
    return r;
  }
  std::vector<std::string> urls;
  std::vector<std::string> bodies;
  std::map<std::string, std::string> last_headers;
  std::size_t calls = 0;

 private:
  std::mutex mu_;
  std::vector<HttpResponse> replies_;
};

HttpResponse reply(int status, std::string body = "{}", std::map<std::string, std::string> headers = {}) {
  HttpResponse r;
  r.status = status;
  r.body = std::move(body);
  r.headers = std::move(headers);
  return r;
}

std::string chat_body(const std::string& content) {
  return json{{"choices", {{{"message", {{"role", "assistant"}, {"content", content}}}}}},
              {"usage", {{"prompt_tokens", 11}, {"completion_tokens", 3}}}}
      .dump();
}

TEST(Retry, HonoursRetryAfterThenBacksOff) {
  FakeTransport t({reply(429, "slow down", {{"retry-after", "2"}}), reply(503), reply(200, "ok")});
  std::vector<std::chrono::milliseconds> sleeps;
  RetryPolicy policy;
  policy.initial_delay = std::chrono::milliseconds(100);
  auto r = post_with_retry(t, "http://x/y", {}, "{}", policy, nullptr,
                           [&](std::chrono::milliseconds d) { sleeps.push_back(d); });
  EXPECT_EQ(r.body, "ok");
  ASSERT_EQ(sleeps.size(), 2u);
  EXPECT_EQ(sleeps[0], std::chrono::milliseconds(2000));
  EXPECT_EQ(sleeps[1], std::chrono::milliseconds(200));
}

TEST(Retry, AuthFailuresAreNotRetried) {
  FakeTransport t({reply(401, "bad key")});
  try {
    post_with_retry(t, "http://x/y", {}, "{}", RetryPolicy{}, nullptr, [](auto) {});
    FAIL();
  } catch (const ProviderError& e) {
    EXPECT_EQ(e.http_status(), 401);
    EXPECT_FALSE(e.retryable());
    EXPECT_NE(std::string(e.what()).find("authentication"), std::string::npos);
  }
  EXPECT_EQ(t.calls, 1u);
}

TEST(Retry, GivesUpAfterMaxRetries) {
  FakeTransport t({reply(500)});
  RetryPolicy policy;
  policy.max_retries = 2;
  EXPECT_THROW(post_with_retry(t, "http://x/y", {}, "{}", policy, nullptr, [](auto) {}), ProviderError);
  EXPECT_EQ(t.calls, 3u);
}

TEST(Retry, TransportFailureIsRetryable) {
  HttpResponse down;
  down.transport_error = "connection refused";
  FakeTransport t({down, reply(200, "fine")});
  EXPECT_EQ(post_with_retry(t, "http://x/y", {}, "{}", RetryPolicy{}, nullptr, [](auto) {}).body, "fine");
}

TEST(Retry, RetryAfterParsing) {
  EXPECT_EQ(parse_retry_after(reply(429, "", {{"retry-after", "1.5"}})), std::chrono::milliseconds(1500));
  EXPECT_FALSE(parse_retry_after(reply(429, "", {{"retry-after", "Wed, 21 Oct 2015 07:28:00 GMT"}})));
  EXPECT_FALSE(parse_retry_after(reply(429)));
}

TEST(Url, SplitsOriginAndPath) {
  auto u = parse_url("https://api.example.com:8443/v1/chat/completions");
  EXPECT_EQ(u.origin, "https://api.example.com:8443");
  EXPECT_EQ(u.path, "/v1/chat/completions");
  EXPECT_EQ(parse_url("http://h").path, "/");
  EXPECT_THROW(parse_url("ftp://h/x"), Error);
}

TEST(ApiKey, MissingVariableIsAConfigError) {
  EXPECT_EQ(resolve_api_key(""), "");
  try {
    resolve_api_key("CORRUPTRAG_TEST_SURELY_UNSET_VAR");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kConfig);
  }
}

TEST(TokenBucketTest, BurstThenThrottle) {
  TokenBucket bucket(50.0, 2.0);
  auto start = std::chrono::steady_clock::now();
  for (int i = 0; i < 4; ++i) bucket.acquire();
  auto elapsed = std::chrono::steady_clock::now() - start;
  EXPECT_GE(elapsed, std::chrono::milliseconds(30));
}

TEST(RemoteChat, BuildsOpenAiCompatibleRequest) {
  auto t = std::make_shared<FakeTransport>(std::vector<HttpResponse>{reply(200, chat_body(" Brazil "))});
  RemoteEndpoint ep;
  ep.url = "https://api.example.com/v1/chat/completions";
  ep.model = "m1";
  ep.api_key = "sk-test";
  RemoteChatProvider p(ep, 0.0, 256, t, [](auto) {});
  auto c = p.complete({{"user", "hello"}});
  EXPECT_EQ(c.text, " Brazil ");
  EXPECT_EQ(c.input_tokens, 11u);
  EXPECT_EQ(c.output_tokens, 3u);
  auto body = json::parse(t->bodies.at(0));
  EXPECT_EQ(body["model"], "m1");
  EXPECT_EQ(body["temperature"], 0.0);
  EXPECT_EQ(body["max_tokens"], 256);
  EXPECT_EQ(body["messages"][0]["content"], "hello");
  EXPECT_EQ(t->last_headers.at("Authorization"), "Bearer sk-test");
}

TEST(RemoteChat, MalformedResponseIsAProviderError) {
  EXPECT_THROW(RemoteChatProvider::parse_response("not json", {}), ProviderError);
  EXPECT_THROW(RemoteChatProvider::parse_response(R"({"choices": []})", {}), ProviderError);
}

TEST(RemoteEmbed, BatchesAndRestoresOrderFromIndex) {
  std::vector<HttpResponse> replies;
  replies.push_back(reply(200, R"({"data": [{"index": 1, "embedding": [2, 2]}, {"index": 0, "embedding": [1, 1]}]})"));
  replies.push_back(reply(200, R"({"data": [{"index": 0, "embedding": [3, 3]}]})"));
  auto t = std::make_shared<FakeTransport>(replies);
  RemoteEndpoint ep;
  ep.url = "http://localhost/v1/embeddings";
  ep.model = "e1";
  RemoteEmbedder e(ep, 2, 1, t, nullptr, [](auto) {});
  std::vector<std::string> texts{"a", "b", "c"};
  auto out = e.embed_batch(texts);
  ASSERT_EQ(out.size(), 3u);
  EXPECT_EQ(out[0], EmbeddingVector({1, 1}));
  EXPECT_EQ(out[1], EmbeddingVector({2, 2}));
  EXPECT_EQ(out[2], EmbeddingVector({3, 3}));
  EXPECT_EQ(t->calls, 2u);
  EXPECT_EQ(json::parse(t->bodies[0])["input"], json({"a", "b"}));
}

TEST(RemoteEmbed, WrongCountIsAProviderError) {
  EXPECT_THROW(RemoteEmbedder::parse_response(R"({"data": [{"index": 0, "embedding": [1]}]})", 2), ProviderError);
}

TEST(ChatClientTest, LedgerAndBudget) {
  auto t = std::make_shared<FakeTransport>(std::vector<HttpResponse>{reply(200, chat_body("ok"))});
  RemoteEndpoint ep;
  ep.url = "http://localhost/v1/chat/completions";
  ep.model = "m";
  auto provider = std::make_shared<RemoteChatProvider>(ep, 0.0, 16, t, [](auto) {});
  auto ledger = std::make_shared<CostLedger>(TokenPrices{1.0, 2.0});
  auto budget = std::make_shared<Budget>(2, 0.0);
  ChatClient client(provider, ledger, budget);
  client.send_user("a");
  client.send_user("b");
  EXPECT_THROW(client.send_user("c"), BudgetExhausted);
  auto totals = ledger->totals();
  EXPECT_EQ(totals.calls, 2u);
  EXPECT_EQ(totals.input_tokens, 22u);
  EXPECT_NEAR(totals.total_cost, (22 * 1.0 + 6 * 2.0) / 1e6, 1e-15);
}

TEST(ChatClientTest, SpendCapStopsFurtherCalls) {
  auto t = std::make_shared<FakeTransport>(std::vector<HttpResponse>{reply(200, chat_body("ok"))});
  RemoteEndpoint ep;
  ep.url = "http://localhost/v1/chat/completions";
  ep.model = "m";
  auto provider = std::make_shared<RemoteChatProvider>(ep, 0.0, 16, t, [](auto) {});
  ChatClient client(provider, std::make_shared<CostLedger>(TokenPrices{100000.0, 0.0}),
                    std::make_shared<Budget>(0, 1.0));
  client.send_user("a");  // 11 tokens at 0.1 per token = 1.1
  EXPECT_THROW(client.send_user("b"), BudgetExhausted);
}

TEST(HttplibTransportTest, TalksToALocalServer) {
  httplib::Server server;
  server.Post("/v1/chat/completions", [](const httplib::Request& req, httplib::Response& res) {
    auto body = json::parse(req.body);
    std::string echoed = body["messages"][0]["content"];
    res.set_content(chat_body("echo: " + echoed), "application/json");
  });
  server.Post("/limited", [](const httplib::Request&, httplib::Response& res) {
    res.status = 429;
    res.set_header("Retry-After", "0");
    res.set_content("{}", "application/json");
  });
  int port = server.bind_to_any_port("127.0.0.1");
  ASSERT_GT(port, 0);
  std::thread th([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  RemoteEndpoint ep;
  ep.url = "http://127.0.0.1:" + std::to_string(port) + "/v1/chat/completions";
  ep.model = "local";
  RemoteChatProvider provider(ep, 0.0, 32);
  EXPECT_EQ(provider.complete({{"user", "ping"}}).text, "echo: ping");

  HttplibTransport transport(std::chrono::seconds(5));
  RetryPolicy policy;
  policy.max_retries = 1;
  int sleeps = 0;
  try {
    post_with_retry(transport, "http://127.0.0.1:" + std::to_string(port) + "/limited", {}, "{}", policy, nullptr,
                    [&](auto) { ++sleeps; });
    FAIL();
  } catch (const ProviderError& e) {
    EXPECT_EQ(e.http_status(), 429);
    EXPECT_TRUE(e.retryable());
    EXPECT_EQ(e.retry_after(), std::chrono::milliseconds(0));
  }
  EXPECT_EQ(sleeps, 1);

  server.stop();
  th.join();
}

}  // namespace
}  // namespace corruptrag
