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

#include <gtest/gtest.h>

#include "corruptrag/text.hpp"

namespace corruptrag::text {
namespace {

TEST(Text, TokenizeLowercasesAndSplitsOnPunctuation) {
  EXPECT_EQ(tokenize("What century, do WE live-in?"),
            (std::vector<std::string>{"what", "century", "do", "we", "live", "in"}));
  EXPECT_TRUE(tokenize("  ?! ").empty());
}

TEST(Text, NonAsciiBytesStayInsideTokens) {
  auto tokens = tokenize("caf\xc3\xa9 au lait");
  ASSERT_EQ(tokens.size(), 3u);
  EXPECT_EQ(tokens[0], "caf\xc3\xa9");
}

TEST(Text, TrimAndBlank) {
  EXPECT_EQ(trim("  a b \n"), "a b");
  EXPECT_TRUE(is_blank(" \t\n"));
  EXPECT_FALSE(is_blank(" x "));
}

TEST(Text, ConcatSkipsEmptyParts) {
  std::vector<std::string> parts{"a", "", "b"};
  EXPECT_EQ(concat(parts), "a b");
  EXPECT_EQ(join(parts, "|"), "a||b");
}

TEST(Text, Fnv1aKnownVectors) {
  EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
}

TEST(Text, Sha256KnownVector) {
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Text, NormalizedContainmentRespectsTokenBoundaries) {
  EXPECT_TRUE(contains_normalized("Riverside County.", "Riverside County"));
  EXPECT_TRUE(contains_normalized("brazil hosted and won", "Brazil"));
  EXPECT_FALSE(contains_normalized("Brazilian team", "Brazil"));
  EXPECT_FALSE(contains_normalized("I do not know", "Brazil"));
  EXPECT_FALSE(contains_normalized("anything", "  ..  "));
}

TEST(Text, CaseInsensitiveContainment) {
  EXPECT_TRUE(contains_icase("Please RESPOND ONLY WITH: [x]", "respond only with"));
  EXPECT_FALSE(contains_icase("respond with", "respond only with"));
}

TEST(Text, ReplaceAllDoesNotRescanReplacement) {
  EXPECT_EQ(replace_all("{a}{a}", "{a}", "{a}{a}"), "{a}{a}{a}{a}");
  EXPECT_EQ(replace_all("abc", "", "x"), "abc");
}

}  // namespace
}  // namespace corruptrag::text
