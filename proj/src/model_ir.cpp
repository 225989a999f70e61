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

#include "slmut/model_ir.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <functional>
#include <map>
#include <queue>
#include <set>

#include <nlohmann/json.hpp>

namespace slmut {

namespace {

struct TypeName {
  BlockType type;
  std::string_view name;
};

constexpr std::array<TypeName, 15> kTypeNames{{
    {BlockType::Inport, "Inport"},
    {BlockType::Outport, "Outport"},
    {BlockType::Constant, "Constant"},
    {BlockType::Gain, "Gain"},
    {BlockType::Sum, "Sum"},
    {BlockType::Product, "Product"},
    {BlockType::RelationalOperator, "RelationalOperator"},
    {BlockType::LogicalOperator, "LogicalOperator"},
    {BlockType::Switch, "Switch"},
    {BlockType::UnitDelay, "UnitDelay"},
    {BlockType::DiscreteIntegrator, "DiscreteIntegrator"},
    {BlockType::Saturation, "Saturation"},
    {BlockType::Goto, "Goto"},
    {BlockType::From, "From"},
    {BlockType::StateflowStub, "StateflowStub"},
}};

constexpr std::array<BlockType, 15> kAllTypes{
    BlockType::Inport,         BlockType::Outport,
    BlockType::Constant,       BlockType::Gain,
    BlockType::Sum,            BlockType::Product,
    BlockType::RelationalOperator, BlockType::LogicalOperator,
    BlockType::Switch,         BlockType::UnitDelay,
    BlockType::DiscreteIntegrator, BlockType::Saturation,
    BlockType::Goto,           BlockType::From,
    BlockType::StateflowStub};

constexpr PropertySpec kDataType{"OutDataTypeStr", ValueKind::Enum, false};
constexpr PropertySpec kSaturate{"SaturateOnIntegerOverflow", ValueKind::Enum,
                                 false};

constexpr std::array<PropertySpec, 1> kInportSpecs{{kDataType}};
constexpr std::array<PropertySpec, 2> kConstantSpecs{
    {{"Value", ValueKind::Number, true}, kDataType}};
constexpr std::array<PropertySpec, 3> kGainSpecs{
    {{"Gain", ValueKind::Number, true}, kDataType, kSaturate}};
constexpr std::array<PropertySpec, 3> kSumSpecs{
    {{"Signs", ValueKind::Enum, true}, kDataType, kSaturate}};
constexpr std::array<PropertySpec, 3> kProductSpecs{
    {{"Inputs", ValueKind::Enum, true}, kDataType, kSaturate}};
constexpr std::array<PropertySpec, 1> kOperatorSpecs{
    {{"Operator", ValueKind::Enum, true}}};
constexpr std::array<PropertySpec, 2> kSwitchSpecs{
    {{"Threshold", ValueKind::Number, true}, kDataType}};
constexpr std::array<PropertySpec, 2> kUnitDelaySpecs{
    {{"InitialCondition", ValueKind::Number, true}, kDataType}};
constexpr std::array<PropertySpec, 4> kIntegratorSpecs{
    {{"InitialCondition", ValueKind::Number, true},
     {"SampleTime", ValueKind::Number, false},
     kDataType,
     kSaturate}};
constexpr std::array<PropertySpec, 3> kSaturationSpecs{
    {{"UpperLimit", ValueKind::Number, true},
     {"LowerLimit", ValueKind::Number, true},
     kDataType}};
constexpr std::array<PropertySpec, 1> kTagSpecs{
    {{"GotoTag", ValueKind::Text, true}}};

constexpr std::array<std::string_view, 6> kRelationalOps{"==", "~=", "<",
                                                         "<=", ">",  ">="};
constexpr std::array<std::string_view, 6> kLogicalOps{"AND",  "OR",  "XOR",
                                                      "NAND", "NOR", "NOT"};
constexpr std::array<std::string_view, 3> kDataTypes{"double", "single",
                                                     "int32"};
constexpr std::array<std::string_view, 2> kOnOff{"on", "off"};

bool all_of_chars(std::string_view s, std::string_view alphabet) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [&](char c) {
    return alphabet.find(c) != std::string_view::npos;
  });
}

std::size_t spec_rank(BlockType type, std::string_view key) {
  auto specs = property_specs(type);
  for (std::size_t i = 0; i < specs.size(); ++i)
    if (specs[i].key == key) return i;
  return specs.size();
}

std::string json_string(std::string_view s) {
  return nlohmann::json(std::string(s)).dump();
}

// Appends `"<escaped>"` and returns the span of the escaped content.
std::pair<std::size_t, std::size_t> append_string(std::string& out,
                                                  std::string_view s) {
  std::string quoted = json_string(s);
  std::size_t begin = out.size() + 1;
  out += quoted;
  return {begin, out.size() - 1};
}

std::pair<std::size_t, std::size_t> append_value(std::string& out,
                                                 const PropertyValue& v) {
  if (v.is_number()) {
    std::size_t begin = out.size();
    out += format_number(v.as_number());
    return {begin, out.size()};
  }
  return append_string(out, v.as_string());
}

struct RenderOptions {
  bool include_connections = false;
  std::string_view properties_key = "Properties";
};

std::string render_impl(const ModelIR& model, const RenderOptions& options,
                        std::vector<ValueSpan>* spans) {
  std::string out;
  out += "{\n  \"name\": ";
  append_string(out, model.name);
  out += ",\n  \"sample_time\": ";
  out += format_number(model.sample_time);
  out += ",\n  \"blocks\": [";
  auto blocks = blocks_in_id_order(model);
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const Block& b = *blocks[i];
    out += i == 0 ? "\n" : ",\n";
    out += "    {\n      \"id\": ";
    append_string(out, b.id);
    out += ",\n      \"name\": ";
    auto name_span = append_string(out, b.name);
    if (spans)
      spans->push_back({b.id, SiteKind::BlockName, "name", name_span.first,
                        name_span.second});
    out += ",\n      \"type\": ";
    append_string(out, to_string(b.type));
    out += ",\n      ";
    append_string(out, options.properties_key);
    out += ": {";
    for (std::size_t p = 0; p < b.properties.size(); ++p) {
      if (p > 0) out += ", ";
      const auto& [key, value] = b.properties[p];
      append_string(out, key);
      out += ": ";
      auto span = append_value(out, value);
      if (spans)
        spans->push_back(
            {b.id, SiteKind::Property, key, span.first, span.second});
    }
    out += "}\n    }";
  }
  out += blocks.empty() ? "]" : "\n  ]";
  if (options.include_connections) {
    out += ",\n  \"connections\": [";
    for (std::size_t i = 0; i < model.connections.size(); ++i) {
      const Connection& c = model.connections[i];
      out += i == 0 ? "\n    {\"src\": " : ",\n    {\"src\": ";
      append_string(out, c.src_block);
      out += ", \"src_port\": " + std::to_string(c.src_port) + ", \"dst\": ";
      append_string(out, c.dst_block);
      out += ", \"dst_port\": " + std::to_string(c.dst_port) + "}";
    }
    out += model.connections.empty() ? "]" : "\n  ]";
  }
  out += "\n}\n";
  return out;
}

void add(ValidityReport& report, Severity severity, std::string location,
         std::string message) {
  report.diagnostics.push_back(
      {severity, std::move(location), std::move(message)});
}

// Dependency graph used for loop detection and evaluation order. Edges run
// from producer to consumer; inputs of delay-class blocks are not edges.
std::vector<std::vector<std::size_t>> dependency_graph(const ModelIR& model) {
  std::map<std::string_view, std::size_t> index;
  for (std::size_t i = 0; i < model.blocks.size(); ++i)
    index.emplace(model.blocks[i].id, i);
  std::vector<std::vector<std::size_t>> succ(model.blocks.size());
  for (const auto& c : model.connections) {
    auto s = index.find(c.src_block);
    auto d = index.find(c.dst_block);
    if (s == index.end() || d == index.end()) continue;
    if (is_delay_class(model.blocks[d->second].type)) continue;
    succ[s->second].push_back(d->second);
  }
  std::multimap<std::string, std::size_t> gotos;
  for (std::size_t i = 0; i < model.blocks.size(); ++i) {
    const Block& b = model.blocks[i];
    if (b.type == BlockType::Goto)
      if (auto tag = b.string("GotoTag")) gotos.emplace(*tag, i);
  }
  for (std::size_t i = 0; i < model.blocks.size(); ++i) {
    const Block& b = model.blocks[i];
    if (b.type != BlockType::From) continue;
    auto tag = b.string("GotoTag");
    if (!tag) continue;
    auto [lo, hi] = gotos.equal_range(*tag);
    for (auto it = lo; it != hi; ++it) succ[it->second].push_back(i);
  }
  return succ;
}

}  // namespace

std::string_view to_string(BlockType type) {
  for (const auto& t : kTypeNames)
    if (t.type == type) return t.name;
  return "StateflowStub";
}

std::optional<BlockType> block_type_from_string(std::string_view name) {
  for (const auto& t : kTypeNames)
    if (t.name == name) return t.type;
  return std::nullopt;
}

std::span<const BlockType> all_block_types() { return kAllTypes; }

bool is_delay_class(BlockType type) {
  return type == BlockType::UnitDelay || type == BlockType::DiscreteIntegrator;
}

std::string_view to_string(ValueKind kind) {
  switch (kind) {
    case ValueKind::Number:
      return "number";
    case ValueKind::Text:
      return "text";
    case ValueKind::Enum:
      return "enum";
  }
  return "text";
}

ValueKind PropertyValue::kind() const {
  switch (repr_.index()) {
    case 0:
      return ValueKind::Number;
    case 1:
      return ValueKind::Text;
    default:
      return ValueKind::Enum;
  }
}

const std::string& PropertyValue::as_string() const {
  if (const auto* t = std::get_if<Text>(&repr_)) return t->value;
  return std::get<Enum>(repr_).symbol;
}

std::string PropertyValue::canonical() const {
  if (is_number()) return format_number(as_number());
  return as_string();
}

std::string format_number(double v) {
  if (v == 0.0) return "0";
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

std::optional<double> parse_number(std::string_view text) {
  if (text.empty()) return std::nullopt;
  // from_chars accepts "inf"/"nan" and hex-free general form; JSON-style
  // numbers start with '-' or a digit.
  char first = text.front();
  if (first != '-' && (first < '0' || first > '9')) return std::nullopt;
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) return std::nullopt;
  if (!std::isfinite(v)) return std::nullopt;
  return v;
}

std::span<const PropertySpec> property_specs(BlockType type) {
  switch (type) {
    case BlockType::Inport:
      return kInportSpecs;
    case BlockType::Constant:
      return kConstantSpecs;
    case BlockType::Gain:
      return kGainSpecs;
    case BlockType::Sum:
      return kSumSpecs;
    case BlockType::Product:
      return kProductSpecs;
    case BlockType::RelationalOperator:
    case BlockType::LogicalOperator:
      return kOperatorSpecs;
    case BlockType::Switch:
      return kSwitchSpecs;
    case BlockType::UnitDelay:
      return kUnitDelaySpecs;
    case BlockType::DiscreteIntegrator:
      return kIntegratorSpecs;
    case BlockType::Saturation:
      return kSaturationSpecs;
    case BlockType::Goto:
    case BlockType::From:
      return kTagSpecs;
    case BlockType::Outport:
    case BlockType::StateflowStub:
      return {};
  }
  return {};
}

const PropertySpec* find_property_spec(BlockType type, std::string_view key) {
  for (const auto& spec : property_specs(type))
    if (spec.key == key) return &spec;
  return nullptr;
}

ValueKind expected_kind(BlockType type, std::string_view key) {
  if (const auto* spec = find_property_spec(type, key)) return spec->kind;
  return ValueKind::Text;
}

std::span<const std::string_view> enum_vocabulary(BlockType type,
                                                  std::string_view key) {
  if (key == "Operator" && type == BlockType::RelationalOperator)
    return kRelationalOps;
  if (key == "Operator" && type == BlockType::LogicalOperator)
    return kLogicalOps;
  if (key == "OutDataTypeStr") return kDataTypes;
  if (key == "SaturateOnIntegerOverflow") return kOnOff;
  return {};
}

bool in_vocabulary(BlockType type, std::string_view key,
                   std::string_view symbol) {
  if (expected_kind(type, key) != ValueKind::Enum) return true;
  if (key == "Signs") return all_of_chars(symbol, "+-");
  if (key == "Inputs") return all_of_chars(symbol, "*/");
  auto vocab = enum_vocabulary(type, key);
  return std::find(vocab.begin(), vocab.end(), symbol) != vocab.end();
}

PropertyValue value_from_token(BlockType type, std::string_view key,
                               std::string_view token) {
  switch (expected_kind(type, key)) {
    case ValueKind::Number:
      if (auto v = parse_number(token)) return PropertyValue::number(*v);
      return PropertyValue::text(std::string(token));
    case ValueKind::Enum:
      return PropertyValue::enumeration(std::string(token));
    case ValueKind::Text:
      break;
  }
  return PropertyValue::text(std::string(token));
}

const PropertyValue* Block::find(std::string_view key) const {
  for (const auto& [k, v] : properties)
    if (k == key) return &v;
  return nullptr;
}

void Block::set(std::string key, PropertyValue value) {
  for (auto& [k, v] : properties) {
    if (k == key) {
      v = std::move(value);
      return;
    }
  }
  std::size_t rank = spec_rank(type, key);
  auto pos = std::find_if(properties.begin(), properties.end(),
                          [&](const auto& kv) {
                            return spec_rank(type, kv.first) > rank;
                          });
  properties.emplace(pos, std::move(key), std::move(value));
}

std::optional<double> Block::number(std::string_view key) const {
  const PropertyValue* v = find(key);
  if (!v || !v->is_number()) return std::nullopt;
  return v->as_number();
}

std::optional<std::string> Block::string(std::string_view key) const {
  const PropertyValue* v = find(key);
  if (!v || v->is_number()) return std::nullopt;
  return v->as_string();
}

const Block* ModelIR::find_block(std::string_view id) const {
  for (const auto& b : blocks)
    if (b.id == id) return &b;
  return nullptr;
}

Block* ModelIR::find_block(std::string_view id) {
  for (auto& b : blocks)
    if (b.id == id) return &b;
  return nullptr;
}

bool id_less(std::string_view a, std::string_view b) {
  auto is_digit = [](char c) { return c >= '0' && c <= '9'; };
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.size() && j < b.size()) {
    if (is_digit(a[i]) && is_digit(b[j])) {
      std::size_t ei = i;
      std::size_t ej = j;
      while (ei < a.size() && is_digit(a[ei])) ++ei;
      while (ej < b.size() && is_digit(b[ej])) ++ej;
      std::string_view da = a.substr(i, ei - i);
      std::string_view db = b.substr(j, ej - j);
      while (da.size() > 1 && da.front() == '0') da.remove_prefix(1);
      while (db.size() > 1 && db.front() == '0') db.remove_prefix(1);
      if (da.size() != db.size()) return da.size() < db.size();
      if (da != db) return da < db;
      i = ei;
      j = ej;
    } else {
      if (a[i] != b[j]) return a[i] < b[j];
      ++i;
      ++j;
    }
  }
  if ((a.size() - i) != (b.size() - j)) return (a.size() - i) < (b.size() - j);
  // Equal under natural order ("01" vs "1"): fall back to bytes.
  return a < b;
}

std::vector<const Block*> blocks_in_id_order(const ModelIR& model) {
  std::vector<const Block*> out;
  out.reserve(model.blocks.size());
  for (const auto& b : model.blocks) out.push_back(&b);
  std::stable_sort(out.begin(), out.end(), [](const Block* x, const Block* y) {
    return id_less(x->id, y->id);
  });
  return out;
}

bool same_content(const ModelIR& a, const ModelIR& b,
                  bool compare_connections) {
  if (a.name != b.name || format_number(a.sample_time) !=
                              format_number(b.sample_time))
    return false;
  auto ba = blocks_in_id_order(a);
  auto bb = blocks_in_id_order(b);
  if (ba.size() != bb.size()) return false;
  for (std::size_t i = 0; i < ba.size(); ++i)
    if (!(*ba[i] == *bb[i])) return false;
  return !compare_connections || a.connections == b.connections;
}

std::size_t input_arity(const ModelIR& model, const Block& block) {
  auto connected = [&]() {
    std::size_t n = 0;
    for (const auto& c : model.connections)
      if (c.dst_block == block.id) n = std::max(n, c.dst_port + 1);
    return n;
  };
  switch (block.type) {
    case BlockType::Inport:
    case BlockType::Constant:
    case BlockType::From:
      return 0;
    case BlockType::Outport:
    case BlockType::Gain:
    case BlockType::UnitDelay:
    case BlockType::DiscreteIntegrator:
    case BlockType::Saturation:
    case BlockType::Goto:
      return 1;
    case BlockType::RelationalOperator:
      return 2;
    case BlockType::Switch:
      return 3;
    case BlockType::Sum:
      return block.string("Signs").value_or("").size();
    case BlockType::Product:
      return block.string("Inputs").value_or("").size();
    case BlockType::LogicalOperator:
      if (block.string("Operator").value_or("") == "NOT") return 1;
      return std::max<std::size_t>(connected(), 1);
    case BlockType::StateflowStub:
      return connected();
  }
  return 0;
}

std::size_t output_arity(const Block& block) {
  switch (block.type) {
    case BlockType::Outport:
    case BlockType::Goto:
      return 0;
    case BlockType::StateflowStub:
      // Stubs may expose any number of outputs; validate() warns instead.
      return static_cast<std::size_t>(-1);
    default:
      return 1;
  }
}

std::string render_text(const ModelIR& model, std::vector<ValueSpan>* spans) {
  return render_impl(model, RenderOptions{}, spans);
}

std::string render_ir_json(const ModelIR& model) {
  return render_impl(model, RenderOptions{true, "properties"}, nullptr);
}

std::size_t ValidityReport::error_count() const {
  return static_cast<std::size_t>(
      std::count_if(diagnostics.begin(), diagnostics.end(),
                    [](const Diagnostic& d) {
                      return d.severity == Severity::Error;
                    }));
}

std::optional<std::vector<std::size_t>> evaluation_order(const ModelIR& model) {
  auto succ = dependency_graph(model);
  const std::size_t n = model.blocks.size();
  std::vector<std::size_t> indegree(n, 0);
  for (const auto& edges : succ)
    for (std::size_t d : edges) ++indegree[d];

  // Rank by id so ties never depend on declaration order.
  std::vector<std::size_t> rank(n);
  {
    std::vector<std::size_t> by_id(n);
    for (std::size_t i = 0; i < n; ++i) by_id[i] = i;
    std::stable_sort(by_id.begin(), by_id.end(),
                     [&](std::size_t x, std::size_t y) {
                       return id_less(model.blocks[x].id, model.blocks[y].id);
                     });
    for (std::size_t r = 0; r < n; ++r) rank[by_id[r]] = r;
  }
  auto later = [&](std::size_t x, std::size_t y) { return rank[x] > rank[y]; };
  std::priority_queue<std::size_t, std::vector<std::size_t>, decltype(later)>
      ready(later);
  for (std::size_t i = 0; i < n; ++i)
    if (indegree[i] == 0) ready.push(i);
  std::vector<std::size_t> order;
  order.reserve(n);
  while (!ready.empty()) {
    std::size_t b = ready.top();
    ready.pop();
    order.push_back(b);
    for (std::size_t d : succ[b])
      if (--indegree[d] == 0) ready.push(d);
  }
  if (order.size() != n) return std::nullopt;
  return order;
}

ValidityReport validate(const ModelIR& model) {
  ValidityReport report;

  if (!std::isfinite(model.sample_time) || model.sample_time <= 0.0)
    add(report, Severity::Error, "", "sample_time must be positive");

  std::set<std::string_view> ids;
  std::map<std::string_view, std::size_t> index;
  for (std::size_t i = 0; i < model.blocks.size(); ++i) {
    const Block& b = model.blocks[i];
    if (b.id.empty()) add(report, Severity::Error, "", "block with empty id");
    if (!ids.insert(b.id).second)
      add(report, Severity::Error, b.id, "duplicate block id");
    index.emplace(b.id, i);
  }

  std::set<std::string_view> outport_names;
  for (const Block& b : model.blocks) {
    for (const auto& spec : property_specs(b.type))
      if (spec.required && !b.find(spec.key))
        add(report, Severity::Error, b.id,
            "missing required property " + std::string(spec.key));
    for (const auto& [key, value] : b.properties) {
      ValueKind want = expected_kind(b.type, key);
      if (value.kind() != want) {
        add(report, Severity::Error, b.id,
            "property " + key + " must be " + std::string(to_string(want)));
        continue;
      }
      if (value.is_number() && !std::isfinite(value.as_number()))
        add(report, Severity::Error, b.id, "property " + key + " not finite");
      if (want == ValueKind::Enum &&
          !in_vocabulary(b.type, key, value.as_string()))
        add(report, Severity::Error, b.id,
            "value '" + value.as_string() + "' outside vocabulary of " + key);
    }
    if (b.type == BlockType::Saturation) {
      auto lo = b.number("LowerLimit");
      auto hi = b.number("UpperLimit");
      if (lo && hi && *lo > *hi)
        add(report, Severity::Error, b.id, "LowerLimit exceeds UpperLimit");
    }
    if (auto ts = b.number("SampleTime"); ts && *ts <= 0.0)
      add(report, Severity::Error, b.id, "SampleTime must be positive");
    if ((b.type == BlockType::Goto || b.type == BlockType::From) &&
        b.string("GotoTag").value_or("").empty() && b.find("GotoTag"))
      add(report, Severity::Error, b.id, "empty GotoTag");
    if (b.type == BlockType::Outport && !outport_names.insert(b.name).second)
      add(report, Severity::Error, b.id, "duplicate Outport name " + b.name);
  }

  std::set<std::pair<std::string_view, std::size_t>> driven;
  for (std::size_t i = 0; i < model.connections.size(); ++i) {
    const Connection& c = model.connections[i];
    std::string where = "connection[" + std::to_string(i) + "]";
    auto s = index.find(c.src_block);
    auto d = index.find(c.dst_block);
    if (s == index.end())
      add(report, Severity::Error, where, "unknown source block " + c.src_block);
    if (d == index.end())
      add(report, Severity::Error, where,
          "unknown destination block " + c.dst_block);
    if (s == index.end() || d == index.end()) continue;
    const Block& src = model.blocks[s->second];
    const Block& dst = model.blocks[d->second];
    if (c.src_port >= output_arity(src))
      add(report, Severity::Error, where,
          "source port " + std::to_string(c.src_port) + " out of range");
    if (c.dst_port >= input_arity(model, dst))
      add(report, Severity::Error, where,
          "destination port " + std::to_string(c.dst_port) + " out of range");
    if (!driven.emplace(c.dst_block, c.dst_port).second)
      add(report, Severity::Error, where, "input port driven twice");
    if (src.type == BlockType::StateflowStub)
      add(report, Severity::Warning, where,
          "stateflow stub output is held at 0");
  }

  for (const Block& b : model.blocks) {
    std::size_t arity = input_arity(model, b);
    if (b.type == BlockType::StateflowStub) continue;
    for (std::size_t p = 0; p < arity; ++p)
      if (!driven.count({b.id, p}))
        add(report, Severity::Warning, b.id,
            "input port " + std::to_string(p) + " unconnected, reads 0");
  }

  std::multiset<std::string> goto_tags;
  std::multiset<std::string> from_tags;
  for (const Block& b : model.blocks) {
    auto tag = b.string("GotoTag");
    if (!tag) continue;
    if (b.type == BlockType::Goto) goto_tags.insert(*tag);
    if (b.type == BlockType::From) from_tags.insert(*tag);
  }
  for (const Block& b : model.blocks) {
    auto tag = b.string("GotoTag");
    if (!tag) continue;
    if (b.type == BlockType::Goto && !from_tags.count(*tag))
      add(report, Severity::Warning, b.id, "Goto tag " + *tag + " has no From");
    if (b.type == BlockType::From && !goto_tags.count(*tag))
      add(report, Severity::Warning, b.id,
          "From tag " + *tag + " has no matching Goto");
  }

  if (!evaluation_order(model)) {
    // Strip blocks that cannot be on a cycle (no path back) from both ends;
    // what remains sits on or between algebraic loops.
    auto succ = dependency_graph(model);
    const std::size_t n = model.blocks.size();
    std::vector<bool> alive(n, true);
    bool changed = true;
    while (changed) {
      changed = false;
      std::vector<std::size_t> in(n, 0);
      std::vector<std::size_t> out(n, 0);
      for (std::size_t s = 0; s < n; ++s) {
        if (!alive[s]) continue;
        for (std::size_t d : succ[s])
          if (alive[d]) {
            ++out[s];
            ++in[d];
          }
      }
      for (std::size_t i = 0; i < n; ++i)
        if (alive[i] && (in[i] == 0 || out[i] == 0)) {
          alive[i] = false;
          changed = true;
        }
    }
    for (std::size_t i = 0; i < n; ++i)
      if (alive[i])
        add(report, Severity::Error, model.blocks[i].id,
            "algebraic loop through block");
  }

  report.ok = report.error_count() == 0;
  return report;
}

ModelIR apply_delta(const ModelIR& model, const MaskSite& site,
                    const PropertyValue& new_value) {
  ModelIR out = model;
  Block* block = out.find_block(site.block_id);
  if (!block) throw UnknownSite("no block with id " + site.block_id);
  if (site.kind == SiteKind::BlockName) {
    block->name = new_value.canonical();
    return out;
  }
  for (auto& [key, value] : block->properties) {
    if (key == site.property_key) {
      value = new_value;
      return out;
    }
  }
  throw UnknownSite("block " + site.block_id + " has no property " +
                    site.property_key);
}

}  // namespace slmut
