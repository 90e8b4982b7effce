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

#pragma once

#include <chrono>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

namespace corruptrag {

struct HttpResponse {
  int status = 0;  // 0 = transport failure, no HTTP status received
  std::string body;
  std::map<std::string, std::string> headers;  // lower-cased names
  std::string transport_error;
};

class HttpTransport {
 public:
  virtual ~HttpTransport() = default;
  virtual HttpResponse post(const std::string& url, const std::map<std::string, std::string>& headers,
                            const std::string& body) = 0;
};

// cpp-httplib backed transport; supports http:// and https:// URLs.
class HttplibTransport final : public HttpTransport {
 public:
  explicit HttplibTransport(std::chrono::seconds timeout = std::chrono::seconds(60));
  HttpResponse post(const std::string& url, const std::map<std::string, std::string>& headers,
                    const std::string& body) override;

 private:
  std::chrono::seconds timeout_;
};

struct ParsedUrl {
  std::string origin;  // scheme://host[:port]
  std::string path;    // starts with '/'
};
ParsedUrl parse_url(const std::string& url);

// Token bucket shared by concurrent callers. rate <= 0 disables limiting.
class TokenBucket {
 public:
  TokenBucket(double rate_per_second, double burst);
  void acquire();

 private:
  using Clock = std::chrono::steady_clock;
  double rate_;
  double capacity_;
  double tokens_;
  Clock::time_point last_;
  std::mutex mu_;
};

struct RetryPolicy {
  int max_retries = 3;
  std::chrono::milliseconds initial_delay{500};
  double backoff_factor = 2.0;
  std::chrono::milliseconds max_delay{30000};
};

using SleepFn = std::function<void(std::chrono::milliseconds)>;

// Parses Retry-After (delta seconds only).
std::optional<std::chrono::milliseconds> parse_retry_after(const HttpResponse& response);

// POSTs with rate limiting and exponential backoff. 429, 5xx and transport
// failures are retried; once retries run out (or on any other non-2xx) a
// ProviderError is thrown carrying status, retryability and the server's
// Retry-After hint.
HttpResponse post_with_retry(HttpTransport& transport, const std::string& url,
                             const std::map<std::string, std::string>& headers,
                             const std::string& body, const RetryPolicy& policy,
                             TokenBucket* limiter = nullptr, const SleepFn& sleep = {});

// Resolves an API key from the named environment variable. Empty name means
// no authentication; a named but unset variable is a config error.
std::string resolve_api_key(const std::string& env_var);

}  // namespace corruptrag
