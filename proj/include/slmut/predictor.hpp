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

// Masked-token predictors: the HTTP client for an MLM service and an offline
// frequency model used for hermetic runs.

#pragma once

#include <chrono>
#include <cstddef>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "slmut/masking.hpp"
#include "slmut/model_ir.hpp"

namespace slmut {

struct Prediction {
  std::string token;
  double score = 0.0;

  friend bool operator==(const Prediction&, const Prediction&) = default;
};

struct PredictorHandshake {
  std::string mask_token;
  std::size_t max_input_tokens = 0;
  std::string model_id;
};

// Score descending, then token ascending.
void sort_predictions(std::vector<Prediction>& predictions);

// Number of occurrences of `mask_token` in `text`.
std::size_t count_masks(std::string_view text, std::string_view mask_token);

// Implementations are safe for concurrent predict() calls.
class Predictor {
 public:
  virtual ~Predictor() = default;

  virtual PredictorHandshake handshake() const = 0;

  // At most top_k predictions, sorted by sort_predictions.
  virtual std::vector<Prediction> predict(const MaskedSequence& sequence,
                                          std::size_t top_k) const = 0;

  // Results are paired with inputs by index.
  virtual std::vector<std::vector<Prediction>> predict_batch(
      std::span<const MaskedSequence> sequences, std::size_t top_k) const;
};

// Counts values seen per property key in a training corpus. A query's own
// context adds one count per occurrence of a value under the same key, and is
// the only source of candidates for block names. Keys are grouped by class
// (trailing digits dropped) so Condition2 shares counts with Condition.
class FrequencyPredictor final : public Predictor {
 public:
  explicit FrequencyPredictor(std::string mask_token = std::string(kDefaultMaskToken));

  void train(const ModelIR& model);
  // Reads the unmasked rendering carried by a corpus record.
  void train_text(std::string_view rendered_text);

  PredictorHandshake handshake() const override;
  std::vector<Prediction> predict(const MaskedSequence& sequence,
                                  std::size_t top_k) const override;

  // Protocol-level entry point. Throws ProtocolError unless `text` holds
  // exactly one placeholder.
  std::vector<Prediction> predict_text(std::string_view text,
                                       std::size_t top_k) const;

  static std::string key_class(std::string_view key);

 private:
  std::string mask_token_;
  std::map<std::string, std::map<std::string, std::size_t>> counts_;
};

struct HttpPredictorOptions {
  std::chrono::milliseconds timeout{30000};
  int attempts = 3;
  std::chrono::milliseconds initial_backoff{200};
  std::chrono::milliseconds max_backoff{2000};
  std::size_t max_in_flight = 4;
};

// Client for the wire protocol:
//   GET  /handshake -> {"mask_token", "max_input_tokens", "model_id"}
//   POST /predict {"text", "top_k"} -> {"predictions": [{"token", "score"}]}
class HttpPredictor final : public Predictor {
 public:
  explicit HttpPredictor(std::string endpoint,
                         HttpPredictorOptions options = {});

  PredictorHandshake handshake() const override;
  std::vector<Prediction> predict(const MaskedSequence& sequence,
                                  std::size_t top_k) const override;
  std::vector<std::vector<Prediction>> predict_batch(
      std::span<const MaskedSequence> sequences,
      std::size_t top_k) const override;

  std::vector<Prediction> predict_text(std::string_view text,
                                       std::size_t top_k) const;

 private:
  std::string endpoint_;
  HttpPredictorOptions options_;
};

// Parses a /predict response body; throws ProtocolError on a malformed body
// or scores outside [0, 1]. Re-sorts and truncates to top_k.
std::vector<Prediction> parse_prediction_response(std::string_view body,
                                                  std::size_t top_k);
PredictorHandshake parse_handshake_response(std::string_view body);

}  // namespace slmut
