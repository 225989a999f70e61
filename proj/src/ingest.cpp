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

#include "slmut/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <optional>
#include <sstream>

#include <expat.h>
#include <nlohmann/json.hpp>

#include "slmut/support.hpp"

namespace slmut {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// XML

struct XmlElement {
  std::string name;
  std::map<std::string, std::string> attributes;
  std::string text;
  std::size_t line = 0;
  std::vector<std::unique_ptr<XmlElement>> children;

  const std::string* attribute(const std::string& key) const {
    auto it = attributes.find(key);
    return it == attributes.end() ? nullptr : &it->second;
  }
};

struct XmlBuilder {
  XML_Parser parser = nullptr;
  std::unique_ptr<XmlElement> root;
  std::vector<XmlElement*> stack;

  static void on_start(void* data, const XML_Char* name,
                       const XML_Char** attrs) {
    auto* self = static_cast<XmlBuilder*>(data);
    auto element = std::make_unique<XmlElement>();
    element->name = name;
    element->line = XML_GetCurrentLineNumber(self->parser);
    for (std::size_t i = 0; attrs[i]; i += 2)
      element->attributes[attrs[i]] = attrs[i + 1];
    XmlElement* raw = element.get();
    if (self->stack.empty())
      self->root = std::move(element);
    else
      self->stack.back()->children.push_back(std::move(element));
    self->stack.push_back(raw);
  }

  static void on_end(void* data, const XML_Char*) {
    static_cast<XmlBuilder*>(data)->stack.pop_back();
  }

  static void on_text(void* data, const XML_Char* s, int len) {
    auto* self = static_cast<XmlBuilder*>(data);
    if (!self->stack.empty())
      self->stack.back()->text.append(s, static_cast<std::size_t>(len));
  }
};

std::unique_ptr<XmlElement> parse_xml(std::string_view source) {
  XmlBuilder builder;
  std::unique_ptr<std::remove_pointer_t<XML_Parser>, decltype(&XML_ParserFree)>
      parser(XML_ParserCreate("UTF-8"), &XML_ParserFree);
  if (!parser) throw ParseError(0, "cannot create XML parser");
  builder.parser = parser.get();
  XML_SetUserData(parser.get(), &builder);
  XML_SetElementHandler(parser.get(), &XmlBuilder::on_start,
                        &XmlBuilder::on_end);
  XML_SetCharacterDataHandler(parser.get(), &XmlBuilder::on_text);
  if (XML_Parse(parser.get(), source.data(), static_cast<int>(source.size()),
                XML_TRUE) == XML_STATUS_ERROR) {
    throw ParseError(XML_GetCurrentLineNumber(parser.get()),
                     XML_ErrorString(XML_GetErrorCode(parser.get())));
  }
  if (!builder.root) throw ParseError(1, "empty document");
  return std::move(builder.root);
}

std::string trim(std::string_view s) {
  const char* ws = " \t\r\n";
  auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(ws);
  return std::string(s.substr(b, e - b + 1));
}

std::optional<std::size_t> parse_index(std::string_view s) {
  if (s.empty()) return std::nullopt;
  std::size_t v = 0;
  for (char c : s) {
    if (c < '0' || c > '9') return std::nullopt;
    v = v * 10 + static_cast<std::size_t>(c - '0');
  }
  return v;
}

// Simulink writes "|+-" or a plain input count for Sum signs and Product
// inputs. Both normalize to the symbol string.
std::string normalize_symbol_list(std::string_view raw, char unit) {
  std::string out;
  if (auto n = parse_index(raw)) return std::string(*n, unit);
  for (char c : raw)
    if (c != '|' && c != ' ') out += c;
  return out;
}

PropertyValue xml_property(BlockType type, const std::string& key,
                           const std::string& raw, std::size_t line) {
  if (key == "Signs")
    return PropertyValue::enumeration(normalize_symbol_list(raw, '+'));
  if (key == "Inputs" && type == BlockType::Product)
    return PropertyValue::enumeration(normalize_symbol_list(raw, '*'));
  switch (expected_kind(type, key)) {
    case ValueKind::Number:
      if (auto v = parse_number(raw)) return PropertyValue::number(*v);
      throw ParseError(line, "property " + key + " expects a number, got '" +
                                 raw + "'");
    case ValueKind::Enum:
      return PropertyValue::enumeration(raw);
    case ValueKind::Text:
      break;
  }
  return PropertyValue::text(raw);
}

struct PendingLine {
  std::string src;
  std::size_t src_port = 0;
  std::string dst;
  std::size_t dst_port = 0;
  std::size_t line = 0;
};

// "3#out:1" -> ("3", 0)
std::optional<std::pair<std::string, std::size_t>> parse_endpoint(
    std::string_view s) {
  auto hash = s.find('#');
  auto colon = s.rfind(':');
  if (hash == std::string_view::npos || colon == std::string_view::npos ||
      colon < hash)
    return std::nullopt;
  auto port = parse_index(s.substr(colon + 1));
  if (!port || *port == 0) return std::nullopt;
  return std::make_pair(std::string(s.substr(0, hash)), *port - 1);
}

class XmlModelReader {
 public:
  explicit XmlModelReader(std::vector<Diagnostic>* warnings)
      : warnings_(warnings) {}

  ModelIR read(const XmlElement& root) {
    if (root.name != "Model")
      throw ParseError(root.line, "expected <Model> root, found <" +
                                      root.name + ">");
    if (const auto* name = root.attribute("Name")) model_.name = *name;
    if (const auto* ts = root.attribute("SampleTime")) {
      auto v = parse_number(*ts);
      if (!v) throw ParseError(root.line, "bad SampleTime '" + *ts + "'");
      model_.sample_time = *v;
    }
    visit_children(root);
    resolve_lines();
    return std::move(model_);
  }

 private:
  void visit_children(const XmlElement& parent) {
    for (const auto& child : parent.children) {
      if (child->name == "Block")
        read_block(*child);
      else if (child->name == "Line")
        read_line(*child);
      else if (child->name == "System")
        visit_children(*child);
    }
  }

  void read_block(const XmlElement& e) {
    const auto* type_name = e.attribute("BlockType");
    if (!type_name) throw ParseError(e.line, "<Block> without BlockType");
    Block block;
    auto type = block_type_from_string(*type_name);
    block.type = type.value_or(BlockType::StateflowStub);
    if (const auto* sid = e.attribute("SID"))
      block.id = *sid;
    else
      block.id = std::to_string(model_.blocks.size() + 1);
    if (const auto* name = e.attribute("Name")) block.name = *name;
    if (!type && warnings_)
      warnings_->push_back({Severity::Warning, block.id,
                            "unknown block type " + *type_name +
                                " mapped to StateflowStub"});
    for (const auto& p : e.children) {
      if (p->name != "P") continue;
      const auto* key = p->attribute("Name");
      if (!key) throw ParseError(p->line, "<P> without Name");
      if (type && !find_property_spec(block.type, *key)) continue;
      block.set(*key, xml_property(block.type, *key, trim(p->text), p->line));
    }
    model_.blocks.push_back(std::move(block));
  }

  void read_line(const XmlElement& e) {
    const auto* src = e.attribute("SrcBlock");
    const auto* dst = e.attribute("DstBlock");
    if (src && dst) {
      auto sp = parse_index(e.attribute("SrcPort") ? *e.attribute("SrcPort")
                                                   : "1");
      auto dp = parse_index(e.attribute("DstPort") ? *e.attribute("DstPort")
                                                   : "1");
      if (!sp || !dp || *sp == 0 || *dp == 0)
        throw ParseError(e.line, "ports are 1-based integers");
      lines_.push_back({*src, *sp - 1, *dst, *dp - 1, e.line});
      return;
    }
    // Native form: <P Name="Src">3#out:1</P> plus Dst or <Branch> children.
    std::optional<std::pair<std::string, std::size_t>> source;
    for (const auto& p : e.children)
      if (p->name == "P" && p->attribute("Name") &&
          *p->attribute("Name") == "Src")
        source = parse_endpoint(trim(p->text));
    if (!source) throw ParseError(e.line, "<Line> without a source");
    collect_destinations(e, *source);
  }

  void collect_destinations(
      const XmlElement& e, const std::pair<std::string, std::size_t>& source) {
    for (const auto& p : e.children) {
      if (p->name == "Branch") {
        collect_destinations(*p, source);
      } else if (p->name == "P" && p->attribute("Name") &&
                 *p->attribute("Name") == "Dst") {
        auto dst = parse_endpoint(trim(p->text));
        if (!dst) throw ParseError(p->line, "bad destination '" + p->text + "'");
        lines_.push_back(
            {source.first, source.second, dst->first, dst->second, p->line});
      }
    }
  }

  // Line endpoints may name a block by SID or by Name.
  std::string resolve(const std::string& ref) const {
    if (model_.find_block(ref)) return ref;
    for (const auto& b : model_.blocks)
      if (b.name == ref) return b.id;
    return ref;
  }

  void resolve_lines() {
    for (const auto& l : lines_)
      model_.connections.push_back(
          {resolve(l.src), l.src_port, resolve(l.dst), l.dst_port});
  }

  std::vector<Diagnostic>* warnings_;
  ModelIR model_;
  std::vector<PendingLine> lines_;
};

// ---------------------------------------------------------------------------
// JSON

std::size_t line_of_offset(std::string_view source, std::size_t offset) {
  offset = std::min(offset, source.size());
  return 1 + static_cast<std::size_t>(
                 std::count(source.begin(), source.begin() + offset, '\n'));
}

const ordered_json& require(const ordered_json& obj, const char* key,
                            const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end())
    throw SchemaError(where + ": missing required key \"" + key + "\"");
  return *it;
}

std::string require_string(const ordered_json& obj, const char* key,
                           const std::string& where) {
  const ordered_json& v = require(obj, key, where);
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  throw SchemaError(where + ": \"" + key + "\" must be a string");
}

std::size_t require_port(const ordered_json& obj, const char* key,
                         const std::string& where) {
  const ordered_json& v = require(obj, key, where);
  if (!v.is_number_unsigned())
    throw SchemaError(where + ": \"" + key + "\" must be a port index >= 0");
  return v.get<std::size_t>();
}

PropertyValue json_property(BlockType type, const std::string& key,
                            const ordered_json& v, const std::string& where) {
  ValueKind want = expected_kind(type, key);
  if (want == ValueKind::Number) {
    if (!v.is_number())
      throw SchemaError(where + ": property " + key + " must be a number");
    return PropertyValue::number(v.get<double>());
  }
  if (!v.is_string())
    throw SchemaError(where + ": property " + key + " must be a string");
  if (want == ValueKind::Enum)
    return PropertyValue::enumeration(v.get<std::string>());
  return PropertyValue::text(v.get<std::string>());
}

ModelIR read_json_model(std::string_view source,
                        std::vector<Diagnostic>* warnings) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(source.begin(), source.end());
  } catch (const json::parse_error& e) {
    throw ParseError(line_of_offset(source, e.byte == 0 ? 0 : e.byte - 1),
                     e.what());
  }
  if (!doc.is_object()) throw SchemaError("model: top level must be an object");
  ModelIR model;
  model.name = require_string(doc, "name", "model");
  if (auto it = doc.find("sample_time"); it != doc.end()) {
    if (!it->is_number()) throw SchemaError("model: sample_time must be a number");
    model.sample_time = it->get<double>();
  }
  const ordered_json& blocks = require(doc, "blocks", "model");
  if (!blocks.is_array()) throw SchemaError("model: blocks must be an array");
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const ordered_json& jb = blocks[i];
    std::string where = "blocks[" + std::to_string(i) + "]";
    if (!jb.is_object()) throw SchemaError(where + ": must be an object");
    Block block;
    block.id = require_string(jb, "id", where);
    block.name = jb.contains("name") ? require_string(jb, "name", where) : "";
    std::string type_name = require_string(jb, "type", where);
    auto type = block_type_from_string(type_name);
    block.type = type.value_or(BlockType::StateflowStub);
    if (!type && warnings)
      warnings->push_back({Severity::Warning, block.id,
                           "unknown block type " + type_name +
                               " mapped to StateflowStub"});
    const ordered_json* props = nullptr;
    if (auto it = jb.find("properties"); it != jb.end()) props = &*it;
    if (auto it = jb.find("Properties"); it != jb.end()) props = &*it;
    if (props) {
      if (!props->is_object())
        throw SchemaError(where + ": properties must be an object");
      for (auto it = props->begin(); it != props->end(); ++it) {
        if (type && block.type != BlockType::StateflowStub &&
            !find_property_spec(block.type, it.key()))
          throw SchemaError(where + ": unknown property " + it.key() +
                            " for " + type_name);
        block.set(it.key(), json_property(block.type, it.key(), it.value(),
                                          where));
      }
    }
    model.blocks.push_back(std::move(block));
  }
  if (auto it = doc.find("connections"); it != doc.end()) {
    if (!it->is_array()) throw SchemaError("model: connections must be an array");
    for (std::size_t i = 0; i < it->size(); ++i) {
      const ordered_json& jc = (*it)[i];
      std::string where = "connections[" + std::to_string(i) + "]";
      if (!jc.is_object()) throw SchemaError(where + ": must be an object");
      model.connections.push_back(
          {require_string(jc, "src", where), require_port(jc, "src_port", where),
           require_string(jc, "dst", where),
           require_port(jc, "dst_port", where)});
    }
  }
  return model;
}

}  // namespace

ModelFormat format_from_path(const std::filesystem::path& path) {
  return path.extension() == ".xml" ? ModelFormat::Xml : ModelFormat::Json;
}

ModelIR parse_model(std::string_view source, ModelFormat format,
                    std::vector<Diagnostic>* warnings) {
  if (format == ModelFormat::Json) return read_json_model(source, warnings);
  auto root = parse_xml(source);
  return XmlModelReader(warnings).read(*root);
}

ModelIR load_model(const std::filesystem::path& path,
                   std::vector<Diagnostic>* warnings) {
  return parse_model(read_file(path), format_from_path(path), warnings);
}

std::vector<CorpusRecord> build_corpus(std::span<const ModelIR> models,
                                       const CorpusOptions& options) {
  if (models.empty()) throw EmptyCorpus();
  std::vector<CorpusRecord> records(models.size());
  parallel_for(models.size(), options.jobs, [&](std::size_t m) {
    const ModelIR& model = models[m];
    std::vector<ValueSpan> spans;
    CorpusRecord record;
    record.model_name = model.name;
    record.text = render_text(model, &spans);

    const std::size_t n = spans.size();
    const auto count = static_cast<std::size_t>(
        std::llround(options.mask_rate * static_cast<double>(n)));
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    Rng rng(mix_seed(options.seed, m));
    rng.shuffle(order);
    std::vector<std::size_t> chosen(order.begin(),
                                    order.begin() + std::min(count, n));
    std::sort(chosen.begin(), chosen.end());

    std::size_t cursor = 0;
    for (std::size_t idx : chosen) {
      const ValueSpan& span = spans[idx];
      record.masked_text.append(record.text, cursor, span.begin - cursor);
      record.targets.push_back(
          {record.masked_text.size(),
           record.text.substr(span.begin, span.end - span.begin)});
      record.masked_text += options.mask_token;
      cursor = span.end;
    }
    record.masked_text.append(record.text, cursor);
    records[m] = std::move(record);
  });
  return records;
}

std::string corpus_to_jsonl(std::span<const CorpusRecord> records) {
  std::string out;
  for (const auto& r : records) {
    json targets = json::array();
    for (const auto& t : r.targets)
      targets.push_back({{"position", t.position}, {"token", t.token}});
    json line = {{"model_name", r.model_name},
                 {"text", r.text},
                 {"masked_text", r.masked_text},
                 {"targets", targets}};
    out += line.dump();
    out += '\n';
  }
  return out;
}

std::vector<CorpusRecord> corpus_from_jsonl(std::string_view jsonl) {
  std::vector<CorpusRecord> records;
  std::size_t line_no = 0;
  std::istringstream in{std::string(jsonl)};
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(line_no, e.what());
    }
    CorpusRecord r;
    try {
      r.model_name = j.at("model_name").get<std::string>();
      r.text = j.at("text").get<std::string>();
      r.masked_text = j.value("masked_text", r.text);
      for (const auto& t : j.value("targets", json::array()))
        r.targets.push_back({t.at("position").get<std::size_t>(),
                             t.at("token").get<std::string>()});
    } catch (const json::exception& e) {
      throw SchemaError("corpus line " + std::to_string(line_no) + ": " +
                        e.what());
    }
    records.push_back(std::move(r));
  }
  return records;
}

std::string unmask_record(const CorpusRecord& record,
                          std::string_view mask_token) {
  std::string out;
  std::size_t cursor = 0;
  for (const auto& t : record.targets) {
    out.append(record.masked_text, cursor, t.position - cursor);
    out += t.token;
    cursor = t.position + mask_token.size();
  }
  out.append(record.masked_text, cursor);
  return out;
}

}  // namespace slmut
