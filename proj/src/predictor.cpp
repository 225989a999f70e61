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

#include "slmut/predictor.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "slmut/ingest.hpp"
#include "slmut/support.hpp"

namespace slmut {

namespace {

using nlohmann::json;

std::string unquote(std::string_view token) {
  try {
    return json::parse(token).get<std::string>();
  } catch (const json::exception&) {
    return std::string(token.substr(1, token.size() >= 2 ? token.size() - 2 : 0));
  }
}

std::string canonical_literal(std::string_view literal) {
  if (auto v = parse_number(literal)) return format_number(*v);
  return std::string(literal);
}

}  // namespace

void sort_predictions(std::vector<Prediction>& predictions) {
  std::sort(predictions.begin(), predictions.end(),
            [](const Prediction& a, const Prediction& b) {
              if (a.score != b.score) return a.score > b.score;
              return a.token < b.token;
            });
}

std::size_t count_masks(std::string_view text, std::string_view mask_token) {
  if (mask_token.empty()) return 0;
  std::size_t count = 0;
  for (auto pos = text.find(mask_token); pos != std::string_view::npos;
       pos = text.find(mask_token, pos + mask_token.size()))
    ++count;
  return count;
}

std::vector<std::vector<Prediction>> Predictor::predict_batch(
    std::span<const MaskedSequence> sequences, std::size_t top_k) const {
  std::vector<std::vector<Prediction>> out;
  out.reserve(sequences.size());
  for (const auto& s : sequences) out.push_back(predict(s, top_k));
  return out;
}

// ---------------------------------------------------------------------------
// FrequencyPredictor

FrequencyPredictor::FrequencyPredictor(std::string mask_token)
    : mask_token_(std::move(mask_token)) {}

std::string FrequencyPredictor::key_class(std::string_view key) {
  while (key.size() > 1 && key.back() >= '0' && key.back() <= '9')
    key.remove_suffix(1);
  return std::string(key);
}

void FrequencyPredictor::train(const ModelIR& model) {
  for (const Block& b : model.blocks)
    for (const auto& [key, value] : b.properties)
      ++counts_[key_class(key)][value.canonical()];
}

void FrequencyPredictor::train_text(std::string_view rendered_text) {
  train(parse_model(rendered_text, ModelFormat::Json));
}

PredictorHandshake FrequencyPredictor::handshake() const {
  return {mask_token_, std::size_t{1} << 20, "offline-frequency"};
}

std::vector<Prediction> FrequencyPredictor::predict(
    const MaskedSequence& sequence, std::size_t top_k) const {
  return predict_text(sequence.text, top_k);
}

std::vector<Prediction> FrequencyPredictor::predict_text(
    std::string_view text, std::size_t top_k) const {
  const std::size_t masks = count_masks(text, mask_token_);
  if (masks != 1)
    throw ProtocolError("expected exactly one mask placeholder, found " +
                        std::to_string(masks));
  if (top_k == 0) return {};

  const auto tokens = tokenize(text, mask_token_);
  const std::size_t mask_at = text.find(mask_token_);
  std::size_t idx = 0;
  for (; idx < tokens.size(); ++idx)
    if (tokens[idx].begin <= mask_at && mask_at < tokens[idx].end) break;
  auto slice = [&](std::size_t i) {
    return text.substr(tokens[i].begin, tokens[i].end - tokens[i].begin);
  };
  auto is_colon = [&](std::size_t i) {
    return tokens[i].kind == TokenKind::Punct && slice(i) == ":";
  };
  if (idx < 2 || !is_colon(idx - 1) ||
      tokens[idx - 2].kind != TokenKind::String)
    return {};
  const std::string key = key_class(unquote(slice(idx - 2)));
  const bool is_name = key == "name";

  std::map<std::string, std::size_t> counts;
  if (!is_name)
    if (auto it = counts_.find(key); it != counts_.end()) counts = it->second;

  // Context votes: every `"key": value` pair of the same key class.
  for (std::size_t i = 0; i + 2 < tokens.size(); ++i) {
    if (i + 2 == idx) continue;
    if (tokens[i].kind != TokenKind::String || !is_colon(i + 1)) continue;
    const Token& v = tokens[i + 2];
    if (v.kind != TokenKind::String && v.kind != TokenKind::Number) continue;
    if (key_class(unquote(slice(i))) != key) continue;
    // A block name is the "name" entry directly followed by "type".
    if (is_name && !(i + 4 < tokens.size() && slice(i + 4) == "\"type\""))
      continue;
    std::string value = v.kind == TokenKind::String
                            ? unquote(slice(i + 2))
                            : canonical_literal(slice(i + 2));
    if (value.find(mask_token_) != std::string::npos) continue;
    ++counts[value];
  }

  std::size_t total = 0;
  for (const auto& [_, c] : counts) total += c;
  std::vector<Prediction> out;
  out.reserve(counts.size());
  for (const auto& [token, c] : counts)
    out.push_back({token, static_cast<double>(c) / static_cast<double>(total)});
  sort_predictions(out);
  if (out.size() > top_k) out.resize(top_k);
  return out;
}

// ---------------------------------------------------------------------------
// HttpPredictor

std::vector<Prediction> parse_prediction_response(std::string_view body,
                                                  std::size_t top_k) {
  json doc;
  try {
    doc = json::parse(body);
  } catch (const json::parse_error& e) {
    throw ProtocolError(std::string("malformed /predict response: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("predictions") ||
      !doc["predictions"].is_array())
    throw ProtocolError("/predict response lacks a predictions array");
  std::vector<Prediction> out;
  for (const auto& p : doc["predictions"]) {
    if (!p.is_object() || !p.contains("token") || !p["token"].is_string() ||
        !p.contains("score") || !p["score"].is_number())
      throw ProtocolError("prediction entries need a string token and a score");
    double score = p["score"].get<double>();
    if (!std::isfinite(score) || score < 0.0 || score > 1.0)
      throw ProtocolError("prediction score outside [0, 1]");
    out.push_back({p["token"].get<std::string>(), score});
  }
  sort_predictions(out);
  if (out.size() > top_k) out.resize(top_k);
  return out;
}

PredictorHandshake parse_handshake_response(std::string_view body) {
  json doc;
  try {
    doc = json::parse(body);
  } catch (const json::parse_error& e) {
    throw ProtocolError(std::string("malformed /handshake response: ") +
                        e.what());
  }
  if (!doc.is_object() || !doc.value("mask_token", json()).is_string() ||
      !doc.value("max_input_tokens", json()).is_number_unsigned() ||
      !doc.value("model_id", json()).is_string())
    throw ProtocolError("/handshake response has the wrong shape");
  PredictorHandshake h{doc["mask_token"].get<std::string>(),
                       doc["max_input_tokens"].get<std::size_t>(),
                       doc["model_id"].get<std::string>()};
  if (h.mask_token.empty()) throw ProtocolError("empty mask token");
  if (h.max_input_tokens == 0) throw ProtocolError("max_input_tokens is zero");
  return h;
}

HttpPredictor::HttpPredictor(std::string endpoint, HttpPredictorOptions options)
    : endpoint_(std::move(endpoint)), options_(options) {}

namespace {

template <typename Call>
std::string request_with_retry(const std::string& endpoint,
                               const HttpPredictorOptions& options,
                               const char* what, Call&& call) {
  auto backoff = options.initial_backoff;
  std::string last_error = "no attempt made";
  for (int attempt = 0; attempt < options.attempts; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(backoff);
      backoff = std::min(backoff * 2, options.max_backoff);
    }
    httplib::Client client(endpoint);
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(
        options.timeout);
    const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(
        options.timeout - secs);
    client.set_connection_timeout(secs.count(), usecs.count());
    client.set_read_timeout(secs.count(), usecs.count());
    client.set_write_timeout(secs.count(), usecs.count());
    httplib::Result res = call(client);
    if (!res) {
      last_error = httplib::to_string(res.error());
      continue;
    }
    if (res->status == 200) return res->body;
    if (res->status == 400)
      throw ProtocolError(std::string(what) + " rejected: " + res->body);
    last_error = "HTTP " + std::to_string(res->status);
    if (res->status < 500) throw ProtocolError(std::string(what) + ": " + last_error);
  }
  throw PredictorUnavailable(std::string(what) + " at " + endpoint +
                             " failed after " +
                             std::to_string(options.attempts) +
                             " attempts: " + last_error);
}

}  // namespace

PredictorHandshake HttpPredictor::handshake() const {
  std::string body = request_with_retry(
      endpoint_, options_, "handshake",
      [](httplib::Client& c) { return c.Get("/handshake"); });
  return parse_handshake_response(body);
}

std::vector<Prediction> HttpPredictor::predict_text(std::string_view text,
                                                    std::size_t top_k) const {
  const std::string payload =
      json{{"text", std::string(text)}, {"top_k", top_k}}.dump();
  std::string body = request_with_retry(
      endpoint_, options_, "predict", [&](httplib::Client& c) {
        return c.Post("/predict", payload, "application/json");
      });
  return parse_prediction_response(body, top_k);
}

std::vector<Prediction> HttpPredictor::predict(const MaskedSequence& sequence,
                                               std::size_t top_k) const {
  return predict_text(sequence.text, top_k);
}

std::vector<std::vector<Prediction>> HttpPredictor::predict_batch(
    std::span<const MaskedSequence> sequences, std::size_t top_k) const {
  std::vector<std::vector<Prediction>> out(sequences.size());
  parallel_for(sequences.size(), options_.max_in_flight, [&](std::size_t i) {
    out[i] = predict(sequences[i], top_k);
  });
  return out;
}

}  // namespace slmut
