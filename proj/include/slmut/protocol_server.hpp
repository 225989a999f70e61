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

// Serves a FrequencyPredictor over the predictor wire protocol, so the HTTP
// client can be exercised without an ML runtime.

#pragma once

#include <memory>
#include <string>
#include <string_view>

#include "slmut/predictor.hpp"

namespace slmut {

struct ProtocolResponse {
  int status = 200;
  std::string body;
};

// Request handlers, usable without a socket. A null predictor means no model
// is loaded (503).
ProtocolResponse handle_handshake(const FrequencyPredictor* predictor);
ProtocolResponse handle_predict(const FrequencyPredictor* predictor,
                                std::string_view request_body);

class ProtocolServer {
 public:
  explicit ProtocolServer(const FrequencyPredictor* predictor);
  ~ProtocolServer();
  ProtocolServer(const ProtocolServer&) = delete;
  ProtocolServer& operator=(const ProtocolServer&) = delete;

  // Binds (port 0 picks a free one) and serves on a background thread.
  // Returns the bound port.
  int start(const std::string& host = "127.0.0.1", int port = 0);
  // Serves on the calling thread until stop().
  void listen(const std::string& host, int port);
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace slmut
