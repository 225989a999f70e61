// Copyright 2026 The slmut Authors
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

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "slmut/model_ir.hpp"

namespace slmut {

inline constexpr std::string_view kDefaultMaskToken = "<MASK>";
inline constexpr std::size_t kDefaultContextWindow = 256;

// JSON lexical tokens. A bare mask placeholder (outside a string) is its own
// token so masked numbers still tokenize.
enum class TokenKind { String, Number, Punct, Literal, Mask, Other };

struct Token {
  TokenKind kind;
  std::size_t begin;
  std::size_t end;
};

std::vector<Token> tokenize(std::string_view text,
                            std::string_view mask_token = kDefaultMaskToken);

// Number of positions at which two token streams differ, or nullopt when the
// streams have different lengths.
std::optional<std::size_t> count_token_differences(std::string_view a,
                                                   std::string_view b);

// Bytes a value occupies in the rendering (escaped, unquoted for strings).
std::string rendered_token(const PropertyValue& value);

// One site per maskable value in rendering order. Block names are included
// only on request.
std::vector<MaskSite> enumerate_sites(const ModelIR& model,
                                      bool include_names = false);

struct MaskedSequence {
  MaskSite site;
  std::string text;
  std::string mask_token{kDefaultMaskToken};
  std::size_t context_window = kDefaultContextWindow;
  // Index of the placeholder's token inside `text`.
  std::size_t mask_token_index = 0;
  // Tokens kept on each side of the placeholder.
  std::size_t left_tokens = 0;
  std::size_t right_tokens = 0;
  bool truncated = false;
  // Byte range of render_text(model) covered by `text`.
  std::size_t window_begin = 0;
  std::size_t window_end = 0;
};

struct MaskOptions {
  std::string mask_token{kDefaultMaskToken};
  std::size_t context_window = kDefaultContextWindow;
};

// Replaces the site's value with the placeholder and keeps at most
// `context_window` tokens on each side. Throws UnknownSite.
MaskedSequence mask(const ModelIR& model, const MaskSite& site,
                    const MaskOptions& options = {});

// Splices `token` (rendered form) back in place of the placeholder.
std::string unmask(const MaskedSequence& sequence, std::string_view token);

}  // namespace slmut
