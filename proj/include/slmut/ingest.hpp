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

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "slmut/model_ir.hpp"

namespace slmut {

enum class ModelFormat { Xml, Json };

// Picks the format from the file extension (.xml / .json).
ModelFormat format_from_path(const std::filesystem::path& path);

// Parses the XML subset (<Model>, <System>, <Block>, <P>, <Line>) or the JSON
// IR. Both the interchange form ("properties") and the rendered form
// ("Properties", no connections) are accepted as JSON.
//
// Unknown XML attributes and elements are dropped. Unknown block types become
// StateflowStub blocks and produce a warning in `warnings`.
//
// Throws ParseError on malformed input and SchemaError on JSON that lacks
// required keys or carries values of the wrong kind.
ModelIR parse_model(std::string_view source, ModelFormat format,
                    std::vector<Diagnostic>* warnings = nullptr);

ModelIR load_model(const std::filesystem::path& path,
                   std::vector<Diagnostic>* warnings = nullptr);

struct MaskTarget {
  std::size_t position = 0;  // byte offset of the placeholder in masked_text
  std::string token;         // original bytes the placeholder replaced

  friend bool operator==(const MaskTarget&, const MaskTarget&) = default;
};

struct CorpusRecord {
  std::string model_name;
  std::string text;
  std::string masked_text;
  std::vector<MaskTarget> targets;
};

struct CorpusOptions {
  double mask_rate = 0.15;
  std::uint64_t seed = 0;
  std::string mask_token = "<MASK>";
  std::size_t jobs = 1;
};

// One record per model, in input order. Masks a seeded sample of
// round(mask_rate * n) of the n maskable tokens (property values and block
// names). Throws EmptyCorpus for an empty model list.
std::vector<CorpusRecord> build_corpus(std::span<const ModelIR> models,
                                       const CorpusOptions& options);

// JSON-lines encoding, one compact object per record, LF endings.
std::string corpus_to_jsonl(std::span<const CorpusRecord> records);
std::vector<CorpusRecord> corpus_from_jsonl(std::string_view jsonl);

// Puts the original tokens back.
std::string unmask_record(const CorpusRecord& record,
                          std::string_view mask_token = "<MASK>");

}  // namespace slmut
