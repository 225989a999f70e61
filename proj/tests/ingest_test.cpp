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

#include "slmut/ingest.hpp"

namespace slmut {
namespace {

const std::string kFixtures = SLMUT_FIXTURES;

TEST(ParseXml, GotoTagBecomesProperty) {
  const char* xml = R"(<Model Name="m"><System>
    <Block BlockType="Goto" Name="g1" SID="1"><P Name="GotoTag">SL_Input</P></Block>
  </System></Model>)";
  ModelIR m = parse_model(xml, ModelFormat::Xml);
  ASSERT_EQ(m.blocks.size(), 1u);
  EXPECT_EQ(m.blocks[0].type, BlockType::Goto);
  EXPECT_EQ(m.blocks[0].name, "g1");
  EXPECT_EQ(*m.blocks[0].string("GotoTag"), "SL_Input");
}

TEST(ParseXml, SimulinkSignsAndNativeLines) {
  const char* xml = R"(<Model Name="m" SampleTime="0.5"><System>
    <Block BlockType="Inport" Name="a" SID="1"/>
    <Block BlockType="Inport" Name="b" SID="2"/>
    <Block BlockType="Sum" Name="s" SID="3"><P Name="Signs">|+-</P></Block>
    <Block BlockType="Outport" Name="y" SID="4"/>
    <Line><P Name="Src">1#out:1</P><P Name="Dst">3#in:1</P></Line>
    <Line><P Name="Src">2#out:1</P><Branch><P Name="Dst">3#in:2</P></Branch></Line>
    <Line SrcBlock="s" SrcPort="1" DstBlock="y" DstPort="1"/>
  </System></Model>)";
  ModelIR m = parse_model(xml, ModelFormat::Xml);
  EXPECT_EQ(m.sample_time, 0.5);
  EXPECT_EQ(*m.find_block("3")->string("Signs"), "+-");
  ASSERT_EQ(m.connections.size(), 3u);
  EXPECT_EQ(m.connections[1], (Connection{"2", 0, "3", 1}));
  EXPECT_EQ(m.connections[2], (Connection{"3", 0, "4", 0}));
  EXPECT_TRUE(validate(m).ok);
}

TEST(ParseXml, UnknownBlockTypeWarnsAndBecomesStub) {
  const char* xml = R"(<Model Name="m"><System>
    <Block BlockType="Scope" Name="sc" SID="7"/>
  </System></Model>)";
  std::vector<Diagnostic> warnings;
  ModelIR m = parse_model(xml, ModelFormat::Xml, &warnings);
  EXPECT_EQ(m.blocks[0].type, BlockType::StateflowStub);
  ASSERT_EQ(warnings.size(), 1u);
  EXPECT_EQ(warnings[0].severity, Severity::Warning);
}

TEST(ParseXml, MalformedReportsLine) {
  try {
    parse_model("<Model>\n<System>\n<Block></System>", ModelFormat::Xml);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_GE(e.line(), 2u);
  }
}

TEST(ParseXml, BadNumberIsAParseError) {
  const char* xml = R"(<Model Name="m"><System>
    <Block BlockType="Gain" Name="k" SID="1"><P Name="Gain">abc</P></Block>
  </System></Model>)";
  EXPECT_THROW(parse_model(xml, ModelFormat::Xml), ParseError);
}

TEST(ParseJson, MissingKeyIsSchemaError) {
  EXPECT_THROW(parse_model(R"({"blocks": []})", ModelFormat::Json), SchemaError);
  EXPECT_THROW(parse_model(R"({"name": "m", "blocks": [{"id": "1"}]})", ModelFormat::Json),
               SchemaError);
}

TEST(ParseJson, BadJsonIsParseError) {
  EXPECT_THROW(parse_model("{\"name\": ", ModelFormat::Json), ParseError);
}

TEST(ParseJson, EmptyModelRoundTrips) {
  ModelIR m = parse_model(R"({"name": "empty", "blocks": []})", ModelFormat::Json);
  EXPECT_TRUE(m.blocks.empty());
  ModelIR back = parse_model(render_text(m), ModelFormat::Json);
  EXPECT_TRUE(same_content(m, back));
}

TEST(ParseJson, StubKeepsFreeTextProperties) {
  ModelIR m = parse_model(R"({"name": "m", "blocks": [{"id": "1", "name": "chart",
      "type": "StateflowStub", "properties": {"Condition": "x > 1"}}]})",
                          ModelFormat::Json);
  EXPECT_EQ(*m.blocks[0].string("Condition"), "x > 1");
}

TEST(ParseJson, StubKeepsPropertyOrder) {
  const char* text = R"({"name": "m", "blocks": [{"id": "1", "name": "chart",
      "type": "StateflowStub", "properties": {"Condition": "a", "Action1": "b"}}]})";
  ModelIR m = parse_model(text, ModelFormat::Json);
  ASSERT_EQ(m.blocks[0].properties.size(), 2u);
  EXPECT_EQ(m.blocks[0].properties[0].first, "Condition");
  EXPECT_EQ(render_ir_json(parse_model(render_ir_json(m), ModelFormat::Json)), render_ir_json(m));
}

TEST(LoadModel, XmlAndJsonFixturesAgree) {
  ModelIR x = load_model(kFixtures + "/xml/two_tank.xml");
  ModelIR j = load_model(kFixtures + "/bench/two_tank.json");
  EXPECT_TRUE(same_content(x, j));
  EXPECT_EQ(render_ir_json(x), render_ir_json(j));
}

TEST(Corpus, EmptyInputThrows) {
  EXPECT_THROW(build_corpus({}, CorpusOptions{}), EmptyCorpus);
}

TEST(Corpus, UnmaskRestoresText) {
  std::vector<ModelIR> models{load_model(kFixtures + "/bench/two_tank.json"),
                              load_model(kFixtures + "/bench/autopilot.json")};
  CorpusOptions opts;
  opts.mask_rate = 0.3;
  opts.seed = 7;
  auto records = build_corpus(models, opts);
  ASSERT_EQ(records.size(), 2u);
  for (const auto& r : records) {
    EXPECT_FALSE(r.targets.empty());
    EXPECT_EQ(unmask_record(r), r.text);
  }
}

TEST(Corpus, JsonlRoundTripAndSeedDeterminism) {
  std::vector<ModelIR> models{load_model(kFixtures + "/bench/integrator.json")};
  CorpusOptions opts;
  opts.seed = 3;
  auto a = build_corpus(models, opts);
  opts.jobs = 4;
  auto b = build_corpus(models, opts);
  EXPECT_EQ(corpus_to_jsonl(a), corpus_to_jsonl(b));
  auto back = corpus_from_jsonl(corpus_to_jsonl(a));
  ASSERT_EQ(back.size(), a.size());
  EXPECT_EQ(back[0].masked_text, a[0].masked_text);
  EXPECT_EQ(back[0].targets, a[0].targets);
}

TEST(Corpus, CustomMaskToken) {
  std::vector<ModelIR> models{load_model(kFixtures + "/bench/integrator.json")};
  CorpusOptions opts;
  opts.mask_token = "[M]";
  opts.mask_rate = 1.0;
  auto r = build_corpus(models, opts)[0];
  EXPECT_NE(r.masked_text.find("[M]"), std::string::npos);
  EXPECT_EQ(unmask_record(r, "[M]"), r.text);
}

}  // namespace
}  // namespace slmut
