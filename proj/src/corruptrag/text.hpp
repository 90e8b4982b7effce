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

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace corruptrag::text {

std::string_view trim(std::string_view s);
bool is_blank(std::string_view s);

// ASCII case folding; bytes >= 0x80 pass through untouched.
std::string to_lower(std::string_view s);

// Lowercased tokens split on runs of non-alphanumeric ASCII bytes. Non-ASCII
// bytes count as token characters so UTF-8 words stay whole.
std::vector<std::string> tokenize(std::string_view s);

std::vector<std::string> split_whitespace(std::string_view s);
std::size_t whitespace_token_count(std::string_view s);

std::string join(std::span<const std::string> parts, std::string_view sep);

// Concatenation operator used to assemble poisoned texts: single-space join
// that skips empty parts.
std::string concat(std::span<const std::string> parts);

std::uint64_t fnv1a64(std::string_view s);

// Hex SHA-256 of the input.
std::string sha256_hex(std::string_view s);

// Case-folded, punctuation stripped, whitespace collapsed. Used by the
// fallback answer judge.
std::string normalize_answer(std::string_view s);

// True when needle's normalized token sequence appears on token boundaries
// inside haystack's normalized form. An empty needle never matches.
bool contains_normalized(std::string_view haystack, std::string_view needle);

bool contains_icase(std::string_view haystack, std::string_view needle);

std::string replace_all(std::string s, std::string_view from, std::string_view to);

}  // namespace corruptrag::text
