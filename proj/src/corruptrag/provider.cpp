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

#include "corruptrag/provider.hpp"

#include <cmath>

#include "corruptrag/error.hpp"

namespace corruptrag {

double cost_of(const TokenPrices& prices, std::uint64_t input_tokens, std::uint64_t output_tokens) {
  return static_cast<double>(input_tokens) * prices.input_per_million / 1e6 +
         static_cast<double>(output_tokens) * prices.output_per_million / 1e6;
}

void CostLedger::charge(std::uint64_t input_tokens, std::uint64_t output_tokens) {
  input_tokens_ += input_tokens;
  output_tokens_ += output_tokens;
  ++calls_;
}

LedgerTotals CostLedger::totals() const {
  LedgerTotals t;
  t.input_tokens = input_tokens_.load();
  t.output_tokens = output_tokens_.load();
  t.calls = calls_.load();
  t.total_cost = cost_of(prices_, t.input_tokens, t.output_tokens);
  return t;
}

void Budget::reserve_call() {
  if (max_spend_ > 0.0 && spent() >= max_spend_) {
    throw BudgetExhausted("spend budget of " + std::to_string(max_spend_) + " exhausted");
  }
  auto previous = calls_.fetch_add(1);
  if (max_calls_ > 0 && previous >= max_calls_) {
    calls_.fetch_sub(1);
    throw BudgetExhausted("provider call budget of " + std::to_string(max_calls_) + " exhausted");
  }
}

void Budget::record_spend(double amount) {
  if (amount <= 0.0) return;
  spend_micros_ += static_cast<std::uint64_t>(std::llround(amount * 1e6));
}

double Budget::spent() const { return static_cast<double>(spend_micros_.load()) / 1e6; }

ChatClient::ChatClient(std::shared_ptr<ChatProvider> provider, std::shared_ptr<CostLedger> ledger,
                       std::shared_ptr<Budget> budget)
    : provider_(std::move(provider)), ledger_(std::move(ledger)), budget_(std::move(budget)) {
  if (!provider_) throw Error(ErrorCode::kInvalidArgument, "chat client needs a provider");
  if (!ledger_) ledger_ = std::make_shared<CostLedger>();
}

Completion ChatClient::send(const std::vector<ChatMessage>& messages) const {
  if (!provider_) throw Error(ErrorCode::kConfig, "no chat provider configured");
  if (budget_) budget_->reserve_call();
  Completion c = provider_->complete(messages);
  ledger_->charge(c.input_tokens, c.output_tokens);
  if (budget_) budget_->record_spend(cost_of(ledger_->prices(), c.input_tokens, c.output_tokens));
  return c;
}

Completion ChatClient::send_user(const std::string& prompt) const {
  return send({{"user", prompt}});
}

ChatClient ChatClient::with_ledger(std::shared_ptr<CostLedger> ledger) const {
  ChatClient copy = *this;
  copy.ledger_ = ledger ? std::move(ledger) : std::make_shared<CostLedger>(ledger_->prices());
  return copy;
}

}  // namespace corruptrag
