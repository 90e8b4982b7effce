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
#include <optional>
#include <stdexcept>
#include <string>

namespace corruptrag {

enum class ErrorCode {
  kInvalidArgument,
  kIo,
  kParse,
  kConstraint,
  kSchema,
  kDimensionMismatch,
  kProvider,
  kBudget,
  kConfig,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Transport, auth, quota and malformed-response failures from a remote
// provider. retry_after carries the server's backoff hint when one was sent.
class ProviderError : public Error {
 public:
  ProviderError(const std::string& message, int http_status, bool retryable,
                std::optional<std::chrono::milliseconds> retry_after = {})
      : Error(ErrorCode::kProvider, message),
        http_status_(http_status),
        retryable_(retryable),
        retry_after_(retry_after) {}

  int http_status() const noexcept { return http_status_; }
  bool retryable() const noexcept { return retryable_; }
  std::optional<std::chrono::milliseconds> retry_after() const noexcept {
    return retry_after_;
  }

 private:
  int http_status_;
  bool retryable_;
  std::optional<std::chrono::milliseconds> retry_after_;
};

class BudgetExhausted : public Error {
 public:
  explicit BudgetExhausted(const std::string& message)
      : Error(ErrorCode::kBudget, message) {}
};

}  // namespace corruptrag
