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

#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <set>

#include <nlohmann/json.hpp>

#include "slmut/ingest.hpp"
#include "slmut/masking.hpp"
#include "slmut/mutgen.hpp"
#include "slmut/predictor.hpp"

namespace slmut {
namespace {

using nlohmann::json;

const std::string kFixtures = SLMUT_FIXTURES;

ModelIR bench(const std::string& name) {
  return load_model(kFixtures + "/bench/" + name + ".json");
}

FrequencyPredictor bench_predictor() {
  FrequencyPredictor p;
  for (const char* name : {"two_tank", "integrator", "autopilot"}) p.train(bench(name));
  return p;
}

// Answers every query with the same list; optionally goes down at one block.
class ScriptedPredictor final : public Predictor {
 public:
  explicit ScriptedPredictor(std::vector<Prediction> answer, std::string down_at = "")
      : answer_(std::move(answer)), down_at_(std::move(down_at)) {}

  PredictorHandshake handshake() const override {
    PredictorHandshake h;
    h.mask_token = std::string(kDefaultMaskToken);
    h.max_input_tokens = 512;
    h.model_id = "scripted";
    return h;
  }

  std::vector<Prediction> predict(const MaskedSequence& seq, std::size_t top_k) const override {
    if (!down_at_.empty() && seq.site.block_id == down_at_)
      throw PredictorUnavailable("scripted outage");
    std::vector<Prediction> out = answer_;
    if (out.size() > top_k) out.resize(top_k);
    return out;
  }

 private:
  std::vector<Prediction> answer_;
  std::string down_at_;
};

ModelIR relational() {
  return parse_model(R"({"name": "rel", "blocks": [
    {"id": "1", "name": "a", "type": "Inport"},
    {"id": "2", "name": "b", "type": "Inport"},
    {"id": "3", "name": "cmp", "type": "RelationalOperator", "properties": {"Operator": "<"}},
    {"id": "4", "name": "y", "type": "Outport"}],
    "connections": [
      {"src": "1", "src_port": 0, "dst": "3", "dst_port": 0},
      {"src": "2", "src_port": 0, "dst": "3", "dst_port": 1},
      {"src": "3", "src_port": 0, "dst": "4", "dst_port": 0}]})",
                     ModelFormat::Json);
}

MaskSite site(std::string key, SiteKind kind = SiteKind::Property) {
  return MaskSite{"1", kind, std::move(key), PropertyValue::text("x")};
}

void expect_valid_set(const ModelIR& model, const MutantSet& set) {
  const MutantStats& s = set.stats;
  EXPECT_EQ(s.generated, set.mutants.size() + s.discarded_identical +
                             s.discarded_duplicate + s.discarded_uncompilable);
  const std::string base = render_text(model);
  std::set<std::string> ids;
  for (const Mutant& m : set.mutants) {
    SCOPED_TRACE(m.id);
    EXPECT_TRUE(ids.insert(m.id).second);
    ModelIR mutated = materialize(model, m);
    EXPECT_TRUE(compile_check(mutated).ok);
    EXPECT_EQ(count_token_differences(base, render_text(mutated)), 1u);
    EXPECT_EQ(m.pattern, classify(m));
  }
}

TEST(Classify, EveryPatternHasASite) {
  EXPECT_EQ(classify(BlockType::Gain, site("OutDataTypeStr")), Pattern::SignalDataTypes);
  EXPECT_EQ(classify(BlockType::From, site("GotoTag")), Pattern::GotoFrom);
  EXPECT_EQ(classify(BlockType::Gain, site("SaturateOnIntegerOverflow")),
            Pattern::SaturateOnIntegerOverflow);
  EXPECT_EQ(classify(BlockType::Constant, site("Value")), Pattern::ConstantAndGain);
  EXPECT_EQ(classify(BlockType::Saturation, site("LowerLimit")), Pattern::ConstantAndGain);
  EXPECT_EQ(classify(BlockType::Sum, site("Signs")), Pattern::MathRelationalLogical);
  EXPECT_EQ(classify(BlockType::LogicalOperator, site("Operator")),
            Pattern::MathRelationalLogical);
  EXPECT_EQ(classify(BlockType::UnitDelay, site("InitialCondition")),
            Pattern::InitialConditionAndSampleTime);
  EXPECT_EQ(classify(BlockType::StateflowStub, site("Condition2")),
            Pattern::StateflowTransitionConditions);
  EXPECT_EQ(classify(BlockType::StateflowStub, site("Variable1")),
            Pattern::StateflowVariableNames);
  EXPECT_EQ(classify(BlockType::StateflowStub, site("Action")), Pattern::StateflowActions);
  EXPECT_EQ(classify(BlockType::StateflowStub, site("Keyword")), Pattern::StateflowKeywords);
}

TEST(Classify, NamesAndStrayKeysAreUnclassified) {
  EXPECT_EQ(classify(BlockType::Gain, site("name", SiteKind::BlockName)),
            Pattern::Unclassified);
  EXPECT_EQ(classify(BlockType::Goto, site("name", SiteKind::BlockName)), Pattern::GotoFrom);
  EXPECT_EQ(classify(BlockType::StateflowStub, site("Comment")), Pattern::Unclassified);
  EXPECT_EQ(known_patterns().size(), 10u);
  EXPECT_EQ(pattern_label(Pattern::GotoFrom), "Mutate GoTo/From blocks");
}

TEST(Substitutions, KeywordsAreWholeWords) {
  auto subs = keyword_substitutions("after(5, sec)");
  EXPECT_EQ(subs, (std::vector<std::string>{"before(5, sec)", "at(5, sec)"}));
  EXPECT_TRUE(keyword_substitutions("afterwards = attic").empty());
}

TEST(Substitutions, OperatorsOneOccurrenceEach) {
  auto rel = operator_substitutions("x != 1");
  EXPECT_EQ(rel.size(), 5u);
  EXPECT_TRUE(std::count(rel.begin(), rel.end(), "x == 1"));
  EXPECT_FALSE(std::count(rel.begin(), rel.end(), "x ~= 1"));
  auto two = operator_substitutions("a + b >= c");
  EXPECT_EQ(two.size(), 3u + 5u);
  EXPECT_TRUE(std::count(two.begin(), two.end(), "a + b < c"));
  EXPECT_TRUE(std::count(two.begin(), two.end(), "a * b >= c"));
}

TEST(GenerateOperators, RelationalOperatorGivesFive) {
  MutantSet set = generate_operators(relational());
  ASSERT_EQ(set.mutants.size(), 5u);
  std::set<std::string> ops;
  for (const Mutant& m : set.mutants) {
    EXPECT_EQ(m.provenance.op, "relational_operator_replacement");
    ops.insert(m.replacement.as_string());
  }
  EXPECT_EQ(ops, (std::set<std::string>{"==", "~=", "<=", ">=", ">"}));
  expect_valid_set(relational(), set);
}

TEST(GenerateOperators, SumSignFlips) {
  ModelIR m = bench("integrator");
  MutantSet set = generate_operators(m);
  std::set<std::string> flips;
  for (const Mutant& x : set.mutants)
    if (x.provenance.op == "sum_sign_flip") flips.insert(x.replacement.as_string());
  EXPECT_EQ(flips, (std::set<std::string>{"--", "++", "-+"}));
}

TEST(GenerateOperators, BenchSetsAreValidAndDeterministic) {
  for (const char* name : {"two_tank", "integrator", "autopilot"}) {
    SCOPED_TRACE(name);
    ModelIR m = bench(name);
    MutantSet a = generate_operators(m, 1);
    expect_valid_set(m, a);
    EXPECT_EQ(mutant_set_to_json(a), mutant_set_to_json(generate_operators(m, 8)));
  }
}

// Tag swaps on the From blocks of two_tank, as produced by the predictor.
TEST(GenerateMlm, TwoTankTagSwaps) {
  ModelIR m = bench("two_tank");
  MutantSet set = generate_mlm(m, bench_predictor());
  std::set<std::pair<std::string, std::string>> swaps;
  for (const Mutant& x : set.mutants)
    if (x.site.property_key == "GotoTag" && x.block_type == BlockType::From)
      swaps.insert({x.site.original.as_string(), x.replacement.as_string()});
  EXPECT_TRUE(swaps.count({"SL_Input", "SH_Input"}));
  EXPECT_TRUE(swaps.count({"SL_Input", "prev_pump"}));
  EXPECT_TRUE(swaps.count({"SH_Input", "SL_Input"}));
  EXPECT_TRUE(swaps.count({"SH_Input", "prev_pump"}));
  expect_valid_set(m, set);
}

TEST(GenerateMlm, ZeroKThrows) {
  MlmOptions opts;
  opts.k = 0;
  EXPECT_THROW(generate_mlm(bench("two_tank"), bench_predictor(), opts), Error);
}

TEST(GenerateMlm, IdenticalAndRepeatedPredictionsDoNotCountTowardsK) {
  ModelIR m = relational();
  // k + 1 = 4 predictions requested: the original, a value, its repeat, a value.
  ScriptedPredictor p({{"<", 0.5}, {">", 0.2}, {">", 0.1}, {"==", 0.1}, {">=", 0.1}});
  MlmOptions opts;
  opts.k = 3;
  MutantSet set = generate_mlm(m, p, opts);
  ASSERT_EQ(set.mutants.size(), 2u);
  EXPECT_EQ(set.mutants[0].replacement.as_string(), ">");
  EXPECT_EQ(set.mutants[0].provenance.rank, 2u);
  EXPECT_EQ(set.mutants[1].replacement.as_string(), "==");
  EXPECT_EQ(set.stats.discarded_identical, 1u);
  EXPECT_EQ(set.stats.discarded_duplicate, 1u);
  ASSERT_TRUE(set.stats.compilable_fraction(set.mutants.size()));
  // Duplicates stay in the denominator: 2 / (4 - 1).
  EXPECT_DOUBLE_EQ(*set.stats.compilable_fraction(set.mutants.size()), 2.0 / 3.0);
}

TEST(GenerateMlm, UncompilablePredictionsAreDiscarded) {
  ModelIR m = relational();
  ScriptedPredictor p({{"AND", 0.9}, {">", 0.1}});
  MutantSet set = generate_mlm(m, p);
  ASSERT_EQ(set.mutants.size(), 1u);
  EXPECT_EQ(set.stats.discarded_uncompilable, 1u);
  EXPECT_DOUBLE_EQ(*set.stats.compilable_fraction(1), 0.5);
}

TEST(GenerateMlm, OutageYieldsPartialSet) {
  ModelIR m = bench("two_tank");
  ScriptedPredictor p({{"7", 1.0}}, "8");
  try {
    generate_mlm(m, p);
    FAIL() << "expected PartialMutantSet";
  } catch (const PartialMutantSet& e) {
    EXPECT_TRUE(e.partial().partial);
    for (const Mutant& x : e.partial().mutants) EXPECT_TRUE(id_less(x.site.block_id, "8"));
    auto j = json::parse(mutant_set_to_json(e.partial()));
    EXPECT_TRUE(j["partial"].get<bool>());
  }
}

TEST(GenerateMlm, JobsDoNotChangeOutput) {
  ModelIR m = bench("autopilot");
  FrequencyPredictor p = bench_predictor();
  MlmOptions one;
  MlmOptions many;
  many.jobs = 8;
  EXPECT_EQ(mutant_set_to_json(generate_mlm(m, p, one)),
            mutant_set_to_json(generate_mlm(m, p, many)));
}

TEST(Report, CountsPatterns) {
  ModelIR m = bench("autopilot");
  MutantSet set = generate_operators(m);
  json j = json::parse(mutant_set_to_json(set));
  EXPECT_EQ(j["approach"], "operators");
  EXPECT_EQ(j["mutants"].size(), set.mutants.size());
  std::size_t total = 0;
  for (const auto& [key, n] : j["patterns"].items()) total += n.get<std::size_t>();
  EXPECT_EQ(total, set.mutants.size());
  EXPECT_EQ(j["stats"]["emitted"].get<std::size_t>(), set.mutants.size());
}

}  // namespace
}  // namespace slmut
