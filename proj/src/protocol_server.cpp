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

#include "slmut/protocol_server.hpp"

#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

namespace slmut {

namespace {

using nlohmann::json;

ProtocolResponse error_response(int status, const std::string& message) {
  return {status, json{{"error", message}}.dump()};
}

}  // namespace

ProtocolResponse handle_handshake(const FrequencyPredictor* predictor) {
  if (!predictor) return error_response(503, "model not loaded");
  PredictorHandshake h = predictor->handshake();
  return {200, json{{"mask_token", h.mask_token},
                    {"max_input_tokens", h.max_input_tokens},
                    {"model_id", h.model_id}}
                   .dump()};
}

ProtocolResponse handle_predict(const FrequencyPredictor* predictor,
                                std::string_view request_body) {
  if (!predictor) return error_response(503, "model not loaded");
  json req = json::parse(request_body, nullptr, false);
  if (req.is_discarded() || !req.is_object())
    return error_response(400, "body is not a JSON object");
  if (!req.contains("text") || !req["text"].is_string())
    return error_response(400, "missing string field: text");
  if (!req.contains("top_k") || !req["top_k"].is_number_integer() ||
      req["top_k"].get<long long>() < 1)
    return error_response(400, "top_k must be a positive integer");
  try {
    auto preds = predictor->predict_text(req["text"].get<std::string>(),
                                         req["top_k"].get<std::size_t>());
    json arr = json::array();
    for (const auto& p : preds)
      arr.push_back({{"token", p.token}, {"score", p.score}});
    return {200, json{{"predictions", arr}}.dump()};
  } catch (const ProtocolError& e) {
    return error_response(400, e.what());
  }
}

struct ProtocolServer::Impl {
  const FrequencyPredictor* predictor;
  httplib::Server server;
  std::thread thread;
};

ProtocolServer::ProtocolServer(const FrequencyPredictor* predictor)
    : impl_(std::make_unique<Impl>()) {
  impl_->predictor = predictor;
  auto reply = [](httplib::Response& res, const ProtocolResponse& r) {
    res.status = r.status;
    res.set_content(r.body, "application/json");
  };
  impl_->server.Get("/handshake", [this, reply](const httplib::Request&,
                                                httplib::Response& res) {
    reply(res, handle_handshake(impl_->predictor));
  });
  impl_->server.Post("/predict", [this, reply](const httplib::Request& req,
                                               httplib::Response& res) {
    reply(res, handle_predict(impl_->predictor, req.body));
  });
}

ProtocolServer::~ProtocolServer() { stop(); }

int ProtocolServer::start(const std::string& host, int port) {
  int bound = port == 0 ? impl_->server.bind_to_any_port(host)
                        : (impl_->server.bind_to_port(host, port) ? port : -1);
  if (bound < 0) throw Error("cannot bind " + host + ":" + std::to_string(port));
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return bound;
}

void ProtocolServer::listen(const std::string& host, int port) {
  if (!impl_->server.listen(host, port))
    throw Error("cannot listen on " + host + ":" + std::to_string(port));
}

void ProtocolServer::stop() {
  if (impl_->server.is_running()) impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

}  // namespace slmut
