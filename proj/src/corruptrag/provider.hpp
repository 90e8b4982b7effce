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

#include <atomic>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace corruptrag {

struct ChatMessage {
  std::string role;  // "system" | "user" | "assistant"
  std::string content;
};

struct Completion {
  std::string text;
  std::uint64_t input_tokens = 0;
  std::uint64_t output_tokens = 0;
};

// Chat-completion backend. Implementations must be safe to call from
// several threads at once.
class ChatProvider {
 public:
  virtual ~ChatProvider() = default;
  virtual std::string id() const = 0;
  virtual Completion complete(const std::vector<ChatMessage>& messages) = 0;
};

// Prices are currency units per one million tokens.
struct TokenPrices {
  double input_per_million = 0.0;
  double output_per_million = 0.0;
};

struct LedgerTotals {
  std::uint64_t input_tokens = 0;
  std::uint64_t output_tokens = 0;
  std::uint64_t calls = 0;
  double total_cost = 0.0;
};

// Atomic token accumulator. Totals only grow.
class CostLedger {
 public:
  explicit CostLedger(TokenPrices prices = {}) : prices_(prices) {}

  void charge(std::uint64_t input_tokens, std::uint64_t output_tokens);
  LedgerTotals totals() const;
  double total_cost() const { return totals().total_cost; }
  const TokenPrices& prices() const { return prices_; }

 private:
  TokenPrices prices_;
  std::atomic<std::uint64_t> input_tokens_{0};
  std::atomic<std::uint64_t> output_tokens_{0};
  std::atomic<std::uint64_t> calls_{0};
};

double cost_of(const TokenPrices& prices, std::uint64_t input_tokens, std::uint64_t output_tokens);

// Caps on provider calls and spend for a whole run. Zero means unlimited.
// reserve_call() throws BudgetExhausted once either cap is reached.
class Budget {
 public:
  Budget(std::uint64_t max_calls, double max_spend) : max_calls_(max_calls), max_spend_(max_spend) {}

  void reserve_call();
  void record_spend(double amount);

  std::uint64_t calls() const { return calls_.load(); }
  double spent() const;

 private:
  std::uint64_t max_calls_;
  double max_spend_;
  std::atomic<std::uint64_t> calls_{0};
  std::atomic<std::uint64_t> spend_micros_{0};
};

// Provider handle that meters every call against a ledger and an optional
// budget. Cheap to copy; copies share the same ledger and budget.
class ChatClient {
 public:
  ChatClient() = default;
  ChatClient(std::shared_ptr<ChatProvider> provider, std::shared_ptr<CostLedger> ledger,
             std::shared_ptr<Budget> budget = nullptr);

  explicit operator bool() const { return provider_ != nullptr; }

  Completion send(const std::vector<ChatMessage>& messages) const;
  Completion send_user(const std::string& prompt) const;

  ChatProvider& provider() const { return *provider_; }
  const std::shared_ptr<CostLedger>& ledger() const { return ledger_; }

  // Same provider and budget, different ledger.
  ChatClient with_ledger(std::shared_ptr<CostLedger> ledger) const;

 private:
  std::shared_ptr<ChatProvider> provider_;
  std::shared_ptr<CostLedger> ledger_;
  std::shared_ptr<Budget> budget_;
};

}  // namespace corruptrag
