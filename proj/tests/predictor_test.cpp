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

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "slmut/ingest.hpp"
#include "slmut/masking.hpp"
#include "slmut/predictor.hpp"
#include "slmut/protocol_server.hpp"
#include "slmut/support.hpp"
#include "free_port.hpp"

namespace slmut {
namespace {

using nlohmann::json;

const std::string kFixtures = SLMUT_FIXTURES;
const std::string kTestData = SLMUT_TESTDATA;

FrequencyPredictor bench_predictor() {
  FrequencyPredictor p;
  for (const char* name : {"two_tank", "integrator", "autopilot"})
    p.train(load_model(kFixtures + "/bench/" + name + ".json"));
  return p;
}

std::string gain_model(double gain) {
  return R"({"name": "g", "blocks": [{"id": "1", "name": "k", "type": "Gain",
      "properties": {"Gain": )" +
         format_number(gain) + "}}]}";
}

TEST(SortPredictions, ScoreDescendingThenToken) {
  std::vector<Prediction> p{{"b", 0.5}, {"a", 0.5}, {"c", 0.9}};
  sort_predictions(p);
  EXPECT_EQ(p[0].token, "c");
  EXPECT_EQ(p[1].token, "a");
  EXPECT_EQ(p[2].token, "b");
}

TEST(CountMasks, CountsOccurrences) {
  EXPECT_EQ(count_masks("a <MASK> b <MASK>", "<MASK>"), 2u);
  EXPECT_EQ(count_masks("nothing", "<MASK>"), 0u);
}

TEST(KeyClass, StripsTrailingDigits) {
  EXPECT_EQ(FrequencyPredictor::key_class("Variable12"), "Variable");
  EXPECT_EQ(FrequencyPredictor::key_class("Gain"), "Gain");
}

// Nine training models carry Gain 2 and one carries Gain 3.
TEST(FrequencyPredictor, ScoresAreRelativeFrequencies) {
  FrequencyPredictor p;
  for (int i = 0; i < 9; ++i) p.train_text(gain_model(2));
  p.train_text(gain_model(3));
  auto preds = p.predict_text(R"({"Properties": {"Gain": <MASK>}})", 5);
  ASSERT_EQ(preds.size(), 2u);
  EXPECT_EQ(preds[0].token, "2");
  EXPECT_DOUBLE_EQ(preds[0].score, 0.9);
  EXPECT_EQ(preds[1].token, "3");
  EXPECT_DOUBLE_EQ(preds[1].score, 0.1);
}

TEST(FrequencyPredictor, ContextVotesForGotoTags) {
  FrequencyPredictor p;
  ModelIR m = load_model(kFixtures + "/bench/two_tank.json");
  auto sites = enumerate_sites(m);
  const MaskSite* sl_from = nullptr;
  for (const auto& s : sites)
    if (s.block_id == "8") sl_from = &s;
  ASSERT_NE(sl_from, nullptr);
  MaskOptions whole;
  whole.context_window = 1 << 20;
  auto preds = p.predict(mask(m, *sl_from, whole), 3);
  ASSERT_EQ(preds.size(), 3u);
  std::set<std::string> top;
  for (const auto& x : preds) top.insert(x.token);
  EXPECT_TRUE(top.count("SH_Input"));
  EXPECT_TRUE(top.count("prev_pump"));
}

TEST(FrequencyPredictor, RejectsMultiMask) {
  FrequencyPredictor p = bench_predictor();
  EXPECT_THROW(p.predict_text(R"({"Gain": <MASK>, "Value": <MASK>})", 3), ProtocolError);
}

TEST(FrequencyPredictor, RespectsTopK) {
  FrequencyPredictor p = bench_predictor();
  EXPECT_EQ(p.predict_text(R"({"Value": <MASK>})", 1).size(), 1u);
  EXPECT_TRUE(p.predict_text(R"({"Value": <MASK>})", 0).empty());
}

TEST(FrequencyPredictor, HandshakeAdvertisesMaskToken) {
  FrequencyPredictor p("[MASK]");
  EXPECT_EQ(p.handshake().mask_token, "[MASK]");
  EXPECT_GT(p.handshake().max_input_tokens, 0u);
}

TEST(ParseResponses, RejectBadShapes) {
  EXPECT_THROW(parse_prediction_response("{}", 3), ProtocolError);
  EXPECT_THROW(parse_prediction_response("not json", 3), ProtocolError);
  EXPECT_THROW(parse_prediction_response(R"({"predictions": [{"token": "a", "score": 2}]})", 3),
               ProtocolError);
  EXPECT_THROW(parse_handshake_response(R"({"mask_token": 1})"), ProtocolError);
  auto p = parse_prediction_response(
      R"({"predictions": [{"token": "a", "score": 0.1}, {"token": "b", "score": 0.8}]})", 1);
  ASSERT_EQ(p.size(), 1u);
  EXPECT_EQ(p[0].token, "b");
}

// ---------------------------------------------------------------------------
// Conformance vectors, run in-process and over HTTP.

struct Reply {
  int status;
  std::string body;
};

void check_vectors(const std::function<Reply()>& handshake,
                   const std::function<Reply(const std::string&)>& predict) {
  json vectors = json::parse(read_file(kTestData + "/protocol_vectors.json"));

  Reply h = handshake();
  EXPECT_EQ(h.status, vectors["handshake"]["status"].get<int>());
  json hb = json::parse(h.body);
  for (const auto& [field, type] : vectors["handshake"]["fields"].items()) {
    ASSERT_TRUE(hb.contains(field)) << field;
    if (type == "string") EXPECT_TRUE(hb[field].is_string()) << field;
    if (type == "integer") EXPECT_TRUE(hb[field].is_number_integer()) << field;
  }

  for (const json& v : vectors["predict"]) {
    SCOPED_TRACE(v["name"].get<std::string>());
    std::string body = v.contains("raw_body") ? v["raw_body"].get<std::string>()
                                              : v["body"].dump();
    Reply r = predict(body);
    EXPECT_EQ(r.status, v["status"].get<int>());
    json doc = json::parse(r.body, nullptr, false);
    ASSERT_FALSE(doc.is_discarded());
    if (r.status != 200) {
      EXPECT_TRUE(doc.contains("error"));
      continue;
    }
    ASSERT_TRUE(doc["predictions"].is_array());
    const auto& preds = doc["predictions"];
    EXPECT_LE(preds.size(), v["max_predictions"].get<std::size_t>());
    for (std::size_t i = 0; i < preds.size(); ++i) {
      EXPECT_TRUE(preds[i]["token"].is_string());
      double s = preds[i]["score"].get<double>();
      EXPECT_GE(s, 0.0);
      EXPECT_LE(s, 1.0);
      if (i == 0) continue;
      double prev = preds[i - 1]["score"].get<double>();
      EXPECT_TRUE(prev > s || (prev == s && preds[i - 1]["token"].get<std::string>() <
                                                preds[i]["token"].get<std::string>()));
    }
  }
}

TEST(Conformance, InProcessHandlers) {
  FrequencyPredictor p = bench_predictor();
  check_vectors(
      [&] {
        auto r = handle_handshake(&p);
        return Reply{r.status, r.body};
      },
      [&](const std::string& body) {
        auto r = handle_predict(&p, body);
        return Reply{r.status, r.body};
      });
}

TEST(Conformance, OverHttp) {
  FrequencyPredictor p = bench_predictor();
  ProtocolServer server(&p);
  int port = server.start("127.0.0.1", 0);
  httplib::Client client("127.0.0.1", port);
  check_vectors(
      [&] {
        auto r = client.Get("/handshake");
        return Reply{r ? r->status : -1, r ? r->body : ""};
      },
      [&](const std::string& body) {
        auto r = client.Post("/predict", body, "application/json");
        return Reply{r ? r->status : -1, r ? r->body : ""};
      });
  server.stop();
}

TEST(Conformance, ServiceWithoutModelAnswers503) {
  EXPECT_EQ(handle_handshake(nullptr).status, 503);
  EXPECT_EQ(handle_predict(nullptr, "{}").status, 503);
}

// The HTTP client over the served offline predictor must behave exactly like
// the offline predictor itself.
TEST(HttpPredictor, InterchangeableWithOffline) {
  FrequencyPredictor p = bench_predictor();
  ProtocolServer server(&p);
  int port = server.start("127.0.0.1", 0);
  HttpPredictor remote("http://127.0.0.1:" + std::to_string(port));
  EXPECT_EQ(remote.handshake().mask_token, p.handshake().mask_token);

  ModelIR m = load_model(kFixtures + "/bench/autopilot.json");
  std::vector<MaskedSequence> seqs;
  for (const auto& s : enumerate_sites(m)) seqs.push_back(mask(m, s));
  auto batch = remote.predict_batch(seqs, 4);
  ASSERT_EQ(batch.size(), seqs.size());
  for (std::size_t i = 0; i < seqs.size(); ++i) {
    auto local = p.predict(seqs[i], 4);
    ASSERT_EQ(batch[i].size(), local.size());
    for (std::size_t j = 0; j < local.size(); ++j) {
      EXPECT_EQ(batch[i][j].token, local[j].token);
      EXPECT_NEAR(batch[i][j].score, local[j].score, 1e-12);
    }
  }
  EXPECT_THROW(remote.predict_text(R"({"a": <MASK>, "b": <MASK>})", 3), ProtocolError);
  server.stop();
}

TEST(HttpPredictor, UnreachableEndpointThrowsAfterRetries) {
  int port = test_util::closed_port();
  HttpPredictorOptions opts;
  opts.timeout = std::chrono::milliseconds(200);
  opts.attempts = 2;
  opts.initial_backoff = std::chrono::milliseconds(1);
  HttpPredictor remote("http://127.0.0.1:" + std::to_string(port), opts);
  EXPECT_THROW(remote.handshake(), PredictorUnavailable);
}

}  // namespace
}  // namespace slmut
