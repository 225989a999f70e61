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

// In-memory block-diagram model, its canonical JSON rendering and the static
// half of the compile check.

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "slmut/errors.hpp"

namespace slmut {

using BlockId = std::string;

enum class BlockType {
  Inport,
  Outport,
  Constant,
  Gain,
  Sum,
  Product,
  RelationalOperator,
  LogicalOperator,
  Switch,
  UnitDelay,
  DiscreteIntegrator,
  Saturation,
  Goto,
  From,
  StateflowStub,
};

std::string_view to_string(BlockType type);
std::optional<BlockType> block_type_from_string(std::string_view name);
std::span<const BlockType> all_block_types();

// Output depends only on state, so the block breaks algebraic loops.
bool is_delay_class(BlockType type);

enum class ValueKind { Number, Text, Enum };

std::string_view to_string(ValueKind kind);

// Tagged property value. Numbers compare by their canonical printing, so -0
// and 0 are the same value.
class PropertyValue {
 public:
  struct Number {
    double value = 0.0;
  };
  struct Text {
    std::string value;
  };
  struct Enum {
    std::string symbol;
  };

  PropertyValue() : repr_(Number{}) {}
  static PropertyValue number(double v) { return PropertyValue(Number{v}); }
  static PropertyValue text(std::string v) {
    return PropertyValue(Text{std::move(v)});
  }
  static PropertyValue enumeration(std::string symbol) {
    return PropertyValue(Enum{std::move(symbol)});
  }

  ValueKind kind() const;
  bool is_number() const { return kind() == ValueKind::Number; }

  // Precondition: matching kind.
  double as_number() const { return std::get<Number>(repr_).value; }
  // Text value or enum symbol.
  const std::string& as_string() const;

  // Canonical unquoted form: shortest round-trip decimal for numbers, the raw
  // string otherwise.
  std::string canonical() const;

  friend bool operator==(const PropertyValue& a, const PropertyValue& b) {
    return a.kind() == b.kind() && a.canonical() == b.canonical();
  }

 private:
  explicit PropertyValue(std::variant<Number, Text, Enum> r)
      : repr_(std::move(r)) {}
  std::variant<Number, Text, Enum> repr_;
};

// Shortest decimal string that parses back to the same double; -0 prints as 0.
std::string format_number(double v);
// Accepts only finite JSON-style numbers consuming the whole input.
std::optional<double> parse_number(std::string_view text);

// Declared shape of one property key of a block type.
struct PropertySpec {
  std::string_view key;
  ValueKind kind;
  bool required;
};

std::span<const PropertySpec> property_specs(BlockType type);
const PropertySpec* find_property_spec(BlockType type, std::string_view key);

// Kind a value under (type, key) must have. StateflowStub keys and unknown
// keys are free text.
ValueKind expected_kind(BlockType type, std::string_view key);

// Vocabulary membership for enum-valued keys; always true for other keys.
bool in_vocabulary(BlockType type, std::string_view key,
                   std::string_view symbol);

// Fixed vocabulary of an enum key, or empty for open (pattern) vocabularies
// such as Sum signs.
std::span<const std::string_view> enum_vocabulary(BlockType type,
                                                  std::string_view key);

// Builds a value of the kind declared for (type, key) from a raw token.
// Numbers that fail to parse become Text so validation rejects them.
PropertyValue value_from_token(BlockType type, std::string_view key,
                               std::string_view token);

struct Block {
  BlockId id;
  std::string name;
  BlockType type = BlockType::StateflowStub;
  // Kept in declared order: schema keys first, then extras by insertion.
  std::vector<std::pair<std::string, PropertyValue>> properties;

  const PropertyValue* find(std::string_view key) const;
  void set(std::string key, PropertyValue value);
  std::optional<double> number(std::string_view key) const;
  std::optional<std::string> string(std::string_view key) const;

  friend bool operator==(const Block&, const Block&) = default;
};

struct Connection {
  BlockId src_block;
  std::size_t src_port = 0;
  BlockId dst_block;
  std::size_t dst_port = 0;

  friend bool operator==(const Connection&, const Connection&) = default;
};

struct ModelIR {
  std::string name;
  std::vector<Block> blocks;
  std::vector<Connection> connections;
  double sample_time = 1.0;

  const Block* find_block(std::string_view id) const;
  Block* find_block(std::string_view id);
};

// Natural order over ids: digit runs compare numerically.
bool id_less(std::string_view a, std::string_view b);

// Blocks sorted by id (render order).
std::vector<const Block*> blocks_in_id_order(const ModelIR& model);

// Equality up to block declaration order. Connections are compared as an
// ordered list unless excluded.
bool same_content(const ModelIR& a, const ModelIR& b,
                  bool compare_connections = true);

// Number of input/output ports a block exposes. Variadic blocks derive their
// arity from properties or, for LogicalOperator, from connections.
std::size_t input_arity(const ModelIR& model, const Block& block);
std::size_t output_arity(const Block& block);

// ---------------------------------------------------------------------------
// Rendering

enum class SiteKind { Property, BlockName };

// Byte range of one rendered value. Strings cover the escaped content between
// the quotes; numbers cover the literal.
struct ValueSpan {
  BlockId block_id;
  SiteKind kind = SiteKind::Property;
  std::string key;
  std::size_t begin = 0;
  std::size_t end = 0;
};

// Blocks-and-properties view fed to the predictor. No "connections" key.
// Spans, when requested, are appended in rendering order.
std::string render_text(const ModelIR& model,
                        std::vector<ValueSpan>* spans = nullptr);

// Full interchange form including connections.
std::string render_ir_json(const ModelIR& model);

// ---------------------------------------------------------------------------
// Validation

enum class Severity { Warning, Error };

struct Diagnostic {
  Severity severity = Severity::Error;
  // Block id, or "connection[<index>]", or empty for model-wide issues.
  std::string location;
  std::string message;
};

struct ValidityReport {
  bool ok = true;
  std::vector<Diagnostic> diagnostics;

  std::size_t error_count() const;
};

ValidityReport validate(const ModelIR& model);

// Blocks in evaluation order (topological over the delay-broken graph, with
// Goto->From edges), ties broken by id order. Empty optional on a cycle.
std::optional<std::vector<std::size_t>> evaluation_order(const ModelIR& model);

// ---------------------------------------------------------------------------
// Mutation sites

// Address of one maskable value. text_span is filled by enumerate_sites.
struct MaskSite {
  BlockId block_id;
  SiteKind kind = SiteKind::Property;
  std::string property_key;  // "name" for BlockName sites
  PropertyValue original;
  std::pair<std::size_t, std::size_t> text_span{0, 0};

  // Identity ignoring span and original.
  bool same_address(const MaskSite& other) const {
    return block_id == other.block_id && kind == other.kind &&
           property_key == other.property_key;
  }
};

// Copy of the model with one value replaced. Throws UnknownSite.
ModelIR apply_delta(const ModelIR& model, const MaskSite& site,
                    const PropertyValue& new_value);

}  // namespace slmut
