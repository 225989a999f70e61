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

#include "slmut/masking.hpp"

#include <algorithm>

#include <nlohmann/json.hpp>

namespace slmut {

namespace {

bool is_number_char(char c) {
  return (c >= '0' && c <= '9') || c == '-' || c == '+' || c == '.' ||
         c == 'e' || c == 'E';
}

bool is_word_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}

}  // namespace

std::vector<Token> tokenize(std::string_view text,
                            std::string_view mask_token) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  const std::size_t n = text.size();
  while (i < n) {
    char c = text[i];
    if (c == ' ' || c == '\n' || c == '\t' || c == '\r') {
      ++i;
      continue;
    }
    std::size_t start = i;
    if (!mask_token.empty() && text.substr(i, mask_token.size()) == mask_token) {
      i += mask_token.size();
      tokens.push_back({TokenKind::Mask, start, i});
    } else if (c == '"') {
      ++i;
      while (i < n && text[i] != '"') i += text[i] == '\\' ? 2 : 1;
      i = std::min(i + 1, n);
      tokens.push_back({TokenKind::String, start, i});
    } else if (c == '{' || c == '}' || c == '[' || c == ']' || c == ':' ||
               c == ',') {
      ++i;
      tokens.push_back({TokenKind::Punct, start, i});
    } else if (c == '-' || (c >= '0' && c <= '9')) {
      while (i < n && is_number_char(text[i])) ++i;
      tokens.push_back({TokenKind::Number, start, i});
    } else if (is_word_char(c)) {
      while (i < n && is_word_char(text[i])) ++i;
      tokens.push_back({TokenKind::Literal, start, i});
    } else {
      ++i;
      tokens.push_back({TokenKind::Other, start, i});
    }
  }
  return tokens;
}

std::optional<std::size_t> count_token_differences(std::string_view a,
                                                   std::string_view b) {
  auto ta = tokenize(a, {});
  auto tb = tokenize(b, {});
  if (ta.size() != tb.size()) return std::nullopt;
  std::size_t diffs = 0;
  for (std::size_t i = 0; i < ta.size(); ++i) {
    auto sa = a.substr(ta[i].begin, ta[i].end - ta[i].begin);
    auto sb = b.substr(tb[i].begin, tb[i].end - tb[i].begin);
    if (sa != sb) ++diffs;
  }
  return diffs;
}

std::string rendered_token(const PropertyValue& value) {
  if (value.is_number()) return format_number(value.as_number());
  std::string quoted = nlohmann::json(value.as_string()).dump();
  return quoted.substr(1, quoted.size() - 2);
}

std::vector<MaskSite> enumerate_sites(const ModelIR& model,
                                      bool include_names) {
  std::vector<ValueSpan> spans;
  render_text(model, &spans);
  std::vector<MaskSite> sites;
  sites.reserve(spans.size());
  for (const ValueSpan& span : spans) {
    if (span.kind == SiteKind::BlockName && !include_names) continue;
    const Block* block = model.find_block(span.block_id);
    MaskSite site;
    site.block_id = span.block_id;
    site.kind = span.kind;
    site.property_key = span.key;
    site.original = span.kind == SiteKind::BlockName
                        ? PropertyValue::text(block->name)
                        : *block->find(span.key);
    site.text_span = {span.begin, span.end};
    sites.push_back(std::move(site));
  }
  return sites;
}

MaskedSequence mask(const ModelIR& model, const MaskSite& site,
                    const MaskOptions& options) {
  std::vector<ValueSpan> spans;
  const std::string rendered = render_text(model, &spans);
  auto it = std::find_if(spans.begin(), spans.end(), [&](const ValueSpan& s) {
    return s.block_id == site.block_id && s.kind == site.kind &&
           s.key == site.property_key;
  });
  if (it == spans.end())
    throw UnknownSite("no maskable value at " + site.block_id + "/" +
                      site.property_key);

  MaskedSequence seq;
  seq.site = site;
  seq.site.text_span = {it->begin, it->end};
  seq.site.original = site.kind == SiteKind::BlockName
                          ? PropertyValue::text(model.find_block(site.block_id)->name)
                          : *model.find_block(site.block_id)->find(site.property_key);
  seq.mask_token = options.mask_token;
  seq.context_window = options.context_window;

  std::string full = rendered.substr(0, it->begin);
  full += options.mask_token;
  full.append(rendered, it->end);
  const std::size_t mask_at = it->begin;
  const std::ptrdiff_t shift =
      static_cast<std::ptrdiff_t>(it->end - it->begin) -
      static_cast<std::ptrdiff_t>(options.mask_token.size());

  auto tokens = tokenize(full, options.mask_token);
  std::size_t idx = 0;
  for (; idx < tokens.size(); ++idx)
    if (tokens[idx].begin <= mask_at && mask_at < tokens[idx].end) break;

  const std::size_t w = options.context_window;
  const std::size_t left = std::min(w, idx);
  const std::size_t right = std::min(w, tokens.size() - 1 - idx);
  seq.left_tokens = left;
  seq.right_tokens = right;
  seq.truncated = left < idx || right < tokens.size() - 1 - idx;
  if (!seq.truncated) {
    seq.text = std::move(full);
    seq.mask_token_index = idx;
    seq.window_begin = 0;
    seq.window_end = rendered.size();
    return seq;
  }
  const std::size_t begin = tokens[idx - left].begin;
  const std::size_t end = tokens[idx + right].end;
  seq.text = full.substr(begin, end - begin);
  seq.mask_token_index = left;
  seq.window_begin = begin;
  seq.window_end = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(end) +
                                            shift);
  return seq;
}

std::string unmask(const MaskedSequence& sequence, std::string_view token) {
  auto tokens = tokenize(sequence.text, sequence.mask_token);
  const Token& t = tokens.at(sequence.mask_token_index);
  std::size_t at = sequence.text.find(sequence.mask_token, t.begin);
  std::string out = sequence.text.substr(0, at);
  out += token;
  out.append(sequence.text, at + sequence.mask_token.size());
  return out;
}

}  // namespace slmut
