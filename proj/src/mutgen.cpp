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

#include "slmut/mutgen.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdio>
#include <map>
#include <set>

#include <nlohmann/json.hpp>

#include "slmut/sim.hpp"
#include "slmut/support.hpp"

namespace slmut {

namespace {

using nlohmann::json;

struct PatternInfo {
  Pattern pattern;
  std::string_view label;
  std::string_view key;
};

constexpr std::array<PatternInfo, 11> kPatterns{{
    {Pattern::SignalDataTypes, "Mutate signal data types", "signal_data_types"},
    {Pattern::GotoFrom, "Mutate GoTo/From blocks", "goto_from"},
    {Pattern::SaturateOnIntegerOverflow,
     "Mutate \"Saturate on integer overflow\"", "saturate_on_integer_overflow"},
    {Pattern::ConstantAndGain, "Mutate constant and gain values",
     "constant_and_gain"},
    {Pattern::MathRelationalLogical,
     "Mutate math, relational and logical operator blocks",
     "math_relational_logical"},
    {Pattern::InitialConditionAndSampleTime,
     "Mutate initial conditions and sample time",
     "initial_condition_and_sample_time"},
    {Pattern::StateflowTransitionConditions,
     "Mutate Stateflow transition conditions", "stateflow_transition_conditions"},
    {Pattern::StateflowVariableNames, "Mutate Stateflow variable names",
     "stateflow_variable_names"},
    {Pattern::StateflowActions, "Mutate Stateflow actions", "stateflow_actions"},
    {Pattern::StateflowKeywords, "Mutate Stateflow keywords",
     "stateflow_keywords"},
    {Pattern::Unclassified, "Unclassified", "unclassified"},
}};

constexpr std::array<Pattern, 10> kKnown{
    Pattern::SignalDataTypes,
    Pattern::GotoFrom,
    Pattern::SaturateOnIntegerOverflow,
    Pattern::ConstantAndGain,
    Pattern::MathRelationalLogical,
    Pattern::InitialConditionAndSampleTime,
    Pattern::StateflowTransitionConditions,
    Pattern::StateflowVariableNames,
    Pattern::StateflowActions,
    Pattern::StateflowKeywords,
};

constexpr std::array<std::string_view, 17> kOperators{
    "constant_add_one",
    "constant_negate",
    "constant_sub_one",
    "constant_times_ten",
    "data_type_replacement",
    "goto_tag_swap",
    "initial_condition_replacement",
    "logical_operator_replacement",
    "product_operator_flip",
    "relational_operator_replacement",
    "sample_time_replacement",
    "saturate_toggle",
    "saturation_limit_replacement",
    "stateflow_keyword_replacement",
    "stateflow_operator_replacement",
    "stateflow_variable_swap",
    "sum_sign_flip",
};

bool starts_with(std::string_view s, std::string_view prefix) {
  return s.substr(0, prefix.size()) == prefix;
}

bool is_ident(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

// Single-position flips plus inversion of the whole string, deduplicated.
std::vector<std::string> sign_flips(const std::string& s, char a, char b) {
  auto flip = [&](char c) { return c == a ? b : a; };
  std::vector<std::string> out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    std::string m = s;
    m[i] = flip(m[i]);
    out.push_back(m);
  }
  std::string inv = s;
  for (char& c : inv) c = flip(c);
  out.push_back(inv);
  std::vector<std::string> unique;
  for (auto& m : out)
    if (m != s && std::find(unique.begin(), unique.end(), m) == unique.end())
      unique.push_back(m);
  return unique;
}

struct Candidate {
  std::size_t site_index = 0;
  PropertyValue replacement;
  Provenance provenance;
};

// Shared tail of both generators: dedupe, compile-check, number.
MutantSet finish(const ModelIR& model, const std::vector<MaskSite>& sites,
                 std::vector<Candidate> candidates, const std::string& approach,
                 std::size_t jobs, MutantStats stats) {
  MutantSet set;
  set.base_model = model.name;
  set.approach = approach;

  std::vector<Candidate> unique;
  std::set<std::pair<std::size_t, std::string>> seen;
  for (auto& c : candidates) {
    ++stats.generated;
    const MaskSite& site = sites[c.site_index];
    if (c.replacement == site.original) {
      ++stats.discarded_identical;
      continue;
    }
    std::string key = std::string(to_string(c.replacement.kind())) + ":" +
                      c.replacement.canonical();
    if (!seen.emplace(c.site_index, key).second) {
      ++stats.discarded_duplicate;
      continue;
    }
    unique.push_back(std::move(c));
  }

  std::vector<Mutant> built(unique.size());
  std::vector<char> ok(unique.size(), 0);
  parallel_for(unique.size(), jobs, [&](std::size_t i) {
    Mutant& m = built[i];
    m.base_model = model.name;
    m.site = sites[unique[i].site_index];
    m.block_type = model.find_block(m.site.block_id)->type;
    m.replacement = unique[i].replacement;
    m.provenance = unique[i].provenance;
    m.pattern = classify(m);
    ok[i] = compile_check(materialize(model, m)).ok;
  });

  // Canonical order: site order, then rank or operator name.
  std::vector<std::size_t> order(unique.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& x = unique[a];
    const auto& y = unique[b];
    if (x.site_index != y.site_index) return x.site_index < y.site_index;
    if (x.provenance.kind == Provenance::Kind::Mlm)
      return x.provenance.rank < y.provenance.rank;
    return x.provenance.op < y.provenance.op;
  });

  const std::string tag = approach == "mlm" ? "mlm" : "op";
  for (std::size_t i : order) {
    if (!ok[i]) {
      ++stats.discarded_uncompilable;
      continue;
    }
    char id[16];
    std::snprintf(id, sizeof id, "%04zu", set.mutants.size() + 1);
    built[i].id = model.name + "-" + tag + "-" + id;
    set.mutants.push_back(std::move(built[i]));
  }
  set.stats = stats;
  return set;
}

}  // namespace

std::span<const Pattern> known_patterns() { return kKnown; }

std::string_view pattern_label(Pattern p) {
  for (const auto& info : kPatterns)
    if (info.pattern == p) return info.label;
  return "Unclassified";
}

std::string_view pattern_key(Pattern p) {
  for (const auto& info : kPatterns)
    if (info.pattern == p) return info.key;
  return "unclassified";
}

Pattern classify(BlockType type, const MaskSite& site) {
  if (site.kind == SiteKind::BlockName) {
    if (type == BlockType::Goto || type == BlockType::From) return Pattern::GotoFrom;
    if (type == BlockType::StateflowStub) return Pattern::StateflowVariableNames;
    return Pattern::Unclassified;
  }
  const std::string& key = site.property_key;
  if (type == BlockType::StateflowStub) {
    if (starts_with(key, "Condition")) return Pattern::StateflowTransitionConditions;
    if (starts_with(key, "Action")) return Pattern::StateflowActions;
    if (starts_with(key, "Variable")) return Pattern::StateflowVariableNames;
    if (starts_with(key, "Keyword")) return Pattern::StateflowKeywords;
    return Pattern::Unclassified;
  }
  if (key == "OutDataTypeStr") return Pattern::SignalDataTypes;
  if (key == "SaturateOnIntegerOverflow") return Pattern::SaturateOnIntegerOverflow;
  if (key == "GotoTag") return Pattern::GotoFrom;
  if (key == "InitialCondition" || key == "SampleTime")
    return Pattern::InitialConditionAndSampleTime;
  switch (type) {
    case BlockType::Constant:
      if (key == "Value") return Pattern::ConstantAndGain;
      break;
    case BlockType::Gain:
      if (key == "Gain") return Pattern::ConstantAndGain;
      break;
    case BlockType::Switch:
      if (key == "Threshold") return Pattern::ConstantAndGain;
      break;
    case BlockType::Saturation:
      if (key == "UpperLimit" || key == "LowerLimit") return Pattern::ConstantAndGain;
      break;
    case BlockType::Sum:
      if (key == "Signs") return Pattern::MathRelationalLogical;
      break;
    case BlockType::Product:
      if (key == "Inputs") return Pattern::MathRelationalLogical;
      break;
    case BlockType::RelationalOperator:
    case BlockType::LogicalOperator:
      if (key == "Operator") return Pattern::MathRelationalLogical;
      break;
    default:
      break;
  }
  return Pattern::Unclassified;
}

Pattern classify(const Mutant& mutant) {
  return classify(mutant.block_type, mutant.site);
}

std::optional<double> MutantStats::compilable_fraction(std::size_t kept) const {
  const std::size_t denom = generated - discarded_identical;
  if (denom == 0) return std::nullopt;
  return static_cast<double>(kept) / static_cast<double>(denom);
}

CompileResult compile_check(const ModelIR& model) {
  ValidityReport report = validate(model);
  if (!report.ok) {
    for (const auto& d : report.diagnostics)
      if (d.severity == Severity::Error)
        return {false, d.location + ": " + d.message};
  }
  try {
    if (auto fault = smoke_run(model))
      return {false, fault->block + ": " + std::string(to_string(fault->kind)) +
                         " at step " + std::to_string(fault->step)};
  } catch (const SimulationError& e) {
    return {false, e.what()};
  }
  return {true, {}};
}

ModelIR materialize(const ModelIR& base, const Mutant& mutant) {
  return apply_delta(base, mutant.site, mutant.replacement);
}

std::span<const std::string_view> operator_names() { return kOperators; }

// ---------------------------------------------------------------------------
// Predictor-driven generation

MutantSet generate_mlm(const ModelIR& model, const Predictor& predictor,
                       const MlmOptions& options) {
  if (options.k == 0) throw Error("k must be positive");
  const PredictorHandshake hs = predictor.handshake();
  MaskOptions mopts;
  mopts.mask_token = hs.mask_token;
  mopts.context_window =
      std::min(options.context_window, (hs.max_input_tokens - 1) / 2);

  const std::vector<MaskSite> sites = enumerate_sites(model, options.mask_names);
  std::vector<MaskedSequence> seqs;
  seqs.reserve(sites.size());
  for (const auto& s : sites) seqs.push_back(mask(model, s, mopts));

  std::vector<std::vector<Prediction>> preds;
  std::string failure;
  try {
    preds = predictor.predict_batch(seqs, options.k + 1);
  } catch (const PredictorUnavailable& e) {
    failure = e.what();
    // Fall back to per-site calls to keep whatever can still be answered.
    preds.clear();
    for (const auto& s : seqs) {
      try {
        preds.push_back(predictor.predict(s, options.k + 1));
      } catch (const PredictorUnavailable&) {
        break;
      }
    }
  }

  std::vector<Candidate> candidates;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    const MaskSite& site = sites[i];
    const Block* block = model.find_block(site.block_id);
    std::size_t taken = 0;
    std::set<std::string> local;
    for (std::size_t r = 0; r < preds[i].size() && taken < options.k; ++r) {
      const Prediction& p = preds[i][r];
      PropertyValue v = site.kind == SiteKind::BlockName
                            ? PropertyValue::text(p.token)
                            : value_from_token(block->type, site.property_key, p.token);
      Provenance prov;
      prov.kind = Provenance::Kind::Mlm;
      prov.rank = r + 1;
      prov.score = p.score;
      // Identical and repeated predictions do not count towards k.
      if (!(v == site.original) && local.insert(v.canonical()).second) ++taken;
      candidates.push_back({i, std::move(v), prov});
    }
  }

  MutantSet set = finish(model, sites, std::move(candidates), "mlm",
                         options.jobs, MutantStats{});
  if (!failure.empty()) {
    set.partial = true;
    throw PartialMutantSet(failure, std::move(set));
  }
  return set;
}

// ---------------------------------------------------------------------------
// Rule-based operators

std::vector<std::string> keyword_substitutions(std::string_view text) {
  static constexpr std::array<std::string_view, 3> kWords{"before", "after", "at"};
  std::vector<std::string> out;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (i > 0 && is_ident(text[i - 1])) continue;
    for (auto w : kWords) {
      if (text.substr(i, w.size()) != w) continue;
      std::size_t end = i + w.size();
      if (end < text.size() && is_ident(text[end])) continue;
      for (auto alt : kWords) {
        if (alt == w) continue;
        std::string m(text.substr(0, i));
        m += alt;
        m += text.substr(end);
        out.push_back(std::move(m));
      }
    }
  }
  return out;
}

std::vector<std::string> operator_substitutions(std::string_view text) {
  static constexpr std::array<std::string_view, 6> kRel{"==", "~=", "<=", ">=", "<", ">"};
  static constexpr std::array<std::string_view, 4> kArith{"+", "-", "*", "/"};
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    std::string_view found;
    std::span<const std::string_view> group;
    std::string_view self;
    if (text.substr(i, 2) == "!=") {
      found = "!=";
      self = "~=";
      group = kRel;
    } else {
      for (auto op : kRel)
        if (text.substr(i, op.size()) == op) {
          found = self = op;
          group = kRel;
          break;
        }
      if (found.empty())
        for (auto op : kArith)
          if (text.substr(i, 1) == op) {
            found = self = op;
            group = kArith;
            break;
          }
    }
    if (found.empty()) {
      ++i;
      continue;
    }
    for (auto alt : group) {
      if (alt == self) continue;
      std::string m(text.substr(0, i));
      m += alt;
      m += text.substr(i + found.size());
      out.push_back(std::move(m));
    }
    i += found.size();
  }
  return out;
}

MutantSet generate_operators(const ModelIR& model, std::size_t jobs) {
  const std::vector<MaskSite> sites = enumerate_sites(model, false);

  std::set<std::string> tags;
  std::vector<std::string> variables;
  for (const Block& b : model.blocks) {
    if (b.type == BlockType::Goto || b.type == BlockType::From)
      if (auto t = b.string("GotoTag")) tags.insert(*t);
    if (b.type == BlockType::StateflowStub)
      for (const auto& [k, v] : b.properties)
        if (starts_with(k, "Variable") &&
            std::find(variables.begin(), variables.end(), v.as_string()) ==
                variables.end())
          variables.push_back(v.as_string());
  }

  std::vector<Candidate> candidates;
  for (std::size_t i = 0; i < sites.size(); ++i) {
    const MaskSite& site = sites[i];
    const Block& b = *model.find_block(site.block_id);
    const std::string& key = site.property_key;
    const PropertyValue& orig = site.original;
    auto add = [&](std::string_view op, PropertyValue v) {
      Provenance prov;
      prov.kind = Provenance::Kind::Operator;
      prov.op = std::string(op);
      candidates.push_back({i, std::move(v), prov});
    };
    auto add_enum = [&](std::string_view op, const std::string& s) {
      add(op, PropertyValue::enumeration(s));
    };

    if (key == "OutDataTypeStr") {
      for (auto dt : {"double", "single", "int32"})
        if (orig.as_string() != dt) add_enum("data_type_replacement", dt);
    } else if (key == "SaturateOnIntegerOverflow") {
      add_enum("saturate_toggle", orig.as_string() == "on" ? "off" : "on");
    } else if (key == "GotoTag") {
      for (const auto& t : tags)
        if (t != orig.as_string()) add("goto_tag_swap", PropertyValue::text(t));
    } else if (key == "InitialCondition" || key == "SampleTime") {
      if (!orig.is_number()) continue;
      const char* op = key == "InitialCondition" ? "initial_condition_replacement"
                                                 : "sample_time_replacement";
      for (double v : {0.0, 1.0, 2.0 * orig.as_number()}) add(op, PropertyValue::number(v));
    } else if ((b.type == BlockType::Constant && key == "Value") ||
               (b.type == BlockType::Gain && key == "Gain")) {
      if (!orig.is_number()) continue;
      const double x = orig.as_number();
      add("constant_negate", PropertyValue::number(-x));
      add("constant_add_one", PropertyValue::number(x + 1.0));
      add("constant_sub_one", PropertyValue::number(x - 1.0));
      add("constant_times_ten", PropertyValue::number(x * 10.0));
    } else if (b.type == BlockType::Saturation &&
               (key == "UpperLimit" || key == "LowerLimit")) {
      if (!orig.is_number()) continue;
      const double x = orig.as_number();
      add("saturation_limit_replacement", PropertyValue::number(-x));
      add("saturation_limit_replacement", PropertyValue::number(x * 2.0));
    } else if (b.type == BlockType::RelationalOperator && key == "Operator") {
      for (auto op : enum_vocabulary(b.type, key))
        if (op != orig.as_string())
          add_enum("relational_operator_replacement", std::string(op));
    } else if (b.type == BlockType::LogicalOperator && key == "Operator") {
      for (auto op : enum_vocabulary(b.type, key))
        if (op != orig.as_string())
          add_enum("logical_operator_replacement", std::string(op));
    } else if (b.type == BlockType::Sum && key == "Signs") {
      for (auto& s : sign_flips(orig.as_string(), '+', '-'))
        add_enum("sum_sign_flip", s);
    } else if (b.type == BlockType::Product && key == "Inputs") {
      for (auto& s : sign_flips(orig.as_string(), '*', '/'))
        add_enum("product_operator_flip", s);
    } else if (b.type == BlockType::StateflowStub) {
      const std::string& text = orig.as_string();
      if (starts_with(key, "Variable")) {
        for (const auto& v : variables)
          if (v != text) add("stateflow_variable_swap", PropertyValue::text(v));
        continue;
      }
      for (auto& m : keyword_substitutions(text))
        add("stateflow_keyword_replacement", PropertyValue::text(m));
      for (auto& m : operator_substitutions(text))
        add("stateflow_operator_replacement", PropertyValue::text(m));
    }
  }
  return finish(model, sites, std::move(candidates), "operators", jobs,
                MutantStats{});
}

// ---------------------------------------------------------------------------
// Reports

namespace {

json value_to_json(const PropertyValue& v) {
  if (v.is_number()) return v.as_number() == 0.0 ? json(0.0) : json(v.as_number());
  return v.as_string();
}

}  // namespace

std::string mutant_set_to_json(const MutantSet& set) {
  json mutants = json::array();
  std::map<std::string, std::size_t> counts;
  for (Pattern p : kKnown) counts[std::string(pattern_key(p))] = 0;
  std::size_t unclassified = 0;
  for (const Mutant& m : set.mutants) {
    json prov;
    if (m.provenance.kind == Provenance::Kind::Mlm)
      prov = {{"kind", "mlm"}, {"rank", m.provenance.rank}, {"score", m.provenance.score}};
    else
      prov = {{"kind", "operator"}, {"operator", m.provenance.op}};
    mutants.push_back({
        {"id", m.id},
        {"site",
         {{"block_id", m.site.block_id},
          {"block_type", to_string(m.block_type)},
          {"kind", m.site.kind == SiteKind::BlockName ? "name" : "property"},
          {"key", m.site.property_key},
          {"span", {m.site.text_span.first, m.site.text_span.second}}}},
        {"original", value_to_json(m.site.original)},
        {"replacement", value_to_json(m.replacement)},
        {"provenance", prov},
        {"pattern", pattern_key(m.pattern)},
    });
    if (m.pattern == Pattern::Unclassified)
      ++unclassified;
    else
      ++counts[std::string(pattern_key(m.pattern))];
  }
  const auto& s = set.stats;
  auto frac = s.compilable_fraction(set.mutants.size());
  json stats{{"generated", s.generated},
             {"discarded_identical", s.discarded_identical},
             {"discarded_duplicate", s.discarded_duplicate},
             {"discarded_uncompilable", s.discarded_uncompilable},
             {"emitted", set.mutants.size()},
             {"compilable_fraction", frac ? json(*frac) : json("n/a")}};
  json doc{{"base_model", set.base_model},
           {"approach", set.approach},
           {"partial", set.partial},
           {"stats", stats},
           {"patterns", counts},
           {"unclassified", unclassified},
           {"mutants", mutants}};
  if (set.approach == "operators")
    doc["catalog"] = "rule-based reconstruction of the block-based fault patterns";
  return doc.dump(2) + "\n";
}

}  // namespace slmut
