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

#include "corruptrag/http.hpp"

#include <algorithm>
#include <cstdlib>
#include <thread>

#include <httplib.h>

#include "corruptrag/error.hpp"
#include "corruptrag/text.hpp"

namespace corruptrag {

ParsedUrl parse_url(const std::string& url) {
  auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw Error(ErrorCode::kConfig, "endpoint URL '" + url + "' has no scheme");
  }
  auto scheme = url.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https") {
    throw Error(ErrorCode::kConfig, "unsupported URL scheme '" + scheme + "'");
  }
  auto path_start = url.find('/', scheme_end + 3);
  ParsedUrl out;
  out.origin = url.substr(0, path_start);
  out.path = path_start == std::string::npos ? "/" : url.substr(path_start);
  if (out.origin.size() <= scheme_end + 3) {
    throw Error(ErrorCode::kConfig, "endpoint URL '" + url + "' has no host");
  }
  return out;
}

HttplibTransport::HttplibTransport(std::chrono::seconds timeout) : timeout_(timeout) {}

HttpResponse HttplibTransport::post(const std::string& url,
                                    const std::map<std::string, std::string>& headers,
                                    const std::string& body) {
  auto parsed = parse_url(url);
  httplib::Client client(parsed.origin);
  client.set_connection_timeout(timeout_);
  client.set_read_timeout(timeout_);
  client.set_write_timeout(timeout_);

  httplib::Headers hdrs;
  std::string content_type = "application/json";
  for (const auto& [k, v] : headers) {
    if (text::to_lower(k) == "content-type") {
      content_type = v;
    } else {
      hdrs.emplace(k, v);
    }
  }

  HttpResponse out;
  auto result = client.Post(parsed.path, hdrs, body, content_type);
  if (!result) {
    out.transport_error = httplib::to_string(result.error());
    return out;
  }
  out.status = result->status;
  out.body = result->body;
  for (const auto& [k, v] : result->headers) out.headers[text::to_lower(k)] = v;
  return out;
}

TokenBucket::TokenBucket(double rate_per_second, double burst)
    : rate_(rate_per_second), capacity_(std::max(1.0, burst)), tokens_(capacity_), last_(Clock::now()) {}

void TokenBucket::acquire() {
  if (rate_ <= 0.0) return;
  std::unique_lock lock(mu_);
  for (;;) {
    auto now = Clock::now();
    std::chrono::duration<double> elapsed = now - last_;
    last_ = now;
    tokens_ = std::min(capacity_, tokens_ + elapsed.count() * rate_);
    if (tokens_ >= 1.0) {
      tokens_ -= 1.0;
      return;
    }
    auto wait = std::chrono::duration<double>((1.0 - tokens_) / rate_);
    lock.unlock();
    std::this_thread::sleep_for(wait);
    lock.lock();
  }
}

std::optional<std::chrono::milliseconds> parse_retry_after(const HttpResponse& response) {
  auto it = response.headers.find("retry-after");
  if (it == response.headers.end()) return std::nullopt;
  try {
    std::size_t consumed = 0;
    double seconds = std::stod(it->second, &consumed);
    if (consumed == 0 || seconds < 0) return std::nullopt;
    return std::chrono::milliseconds(static_cast<long long>(seconds * 1000.0));
  } catch (const std::exception&) {
    return std::nullopt;  // HTTP-date form is not supported
  }
}

namespace {

bool is_retryable(const HttpResponse& r) {
  return r.status == 0 || r.status == 429 || r.status == 408 || r.status >= 500;
}

std::string describe(const HttpResponse& r) {
  if (r.status == 0) return "transport failure: " + r.transport_error;
  std::string snippet = r.body.substr(0, 300);
  if (r.status == 401 || r.status == 403) return "authentication failed (HTTP " + std::to_string(r.status) + "): " + snippet;
  if (r.status == 429) return "rate limited or quota exceeded (HTTP 429): " + snippet;
  return "HTTP " + std::to_string(r.status) + ": " + snippet;
}

}  // namespace

HttpResponse post_with_retry(HttpTransport& transport, const std::string& url,
                             const std::map<std::string, std::string>& headers,
                             const std::string& body, const RetryPolicy& policy,
                             TokenBucket* limiter, const SleepFn& sleep) {
  auto delay = policy.initial_delay;
  for (int attempt = 0;; ++attempt) {
    if (limiter) limiter->acquire();
    HttpResponse response = transport.post(url, headers, body);
    if (response.status >= 200 && response.status < 300) return response;

    bool retryable = is_retryable(response);
    auto hint = parse_retry_after(response);
    if (!retryable || attempt >= policy.max_retries) {
      throw ProviderError(describe(response), response.status, retryable, hint);
    }
    auto wait = std::min(hint.value_or(delay), policy.max_delay);
    if (sleep) {
      sleep(wait);
    } else {
      std::this_thread::sleep_for(wait);
    }
    delay = std::min(policy.max_delay,
                     std::chrono::milliseconds(static_cast<long long>(delay.count() * policy.backoff_factor)));
  }
}

std::string resolve_api_key(const std::string& env_var) {
  if (env_var.empty()) return {};
  const char* value = std::getenv(env_var.c_str());
  if (value == nullptr || *value == '\0') {
    throw Error(ErrorCode::kConfig, "environment variable " + env_var + " is not set");
  }
  return value;
}

}  // namespace corruptrag
