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

// Fixed-step discrete-time interpreter for the supported block set.

#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "slmut/model_ir.hpp"

namespace slmut {

enum class GeneratorKind { Constant, Step, Ramp, Piecewise };

std::string_view to_string(GeneratorKind kind);

struct SignalGenerator {
  GeneratorKind kind = GeneratorKind::Constant;
  double value = 0.0;        // Constant
  std::size_t t0 = 0;        // Step: v0 before t0, v1 from t0 on
  double v0 = 0.0;
  double v1 = 0.0;
  double slope = 0.0;        // Ramp: slope * t * sample_time
  // Piecewise: (start step, value), sorted by start; value 0 before the first.
  std::vector<std::pair<std::size_t, double>> breakpoints;

  static SignalGenerator constant(double v);
  static SignalGenerator step(std::size_t t0, double v0, double v1);
  static SignalGenerator ramp(double slope);
  static SignalGenerator piecewise(
      std::vector<std::pair<std::size_t, double>> breakpoints);

  double at(std::size_t t, double sample_time) const;

  friend bool operator==(const SignalGenerator&,
                         const SignalGenerator&) = default;
};

struct TestCase {
  std::string id;
  std::size_t duration_steps = 1;
  // Keyed by Inport block id.
  std::map<BlockId, SignalGenerator> inputs;

  friend bool operator==(const TestCase&, const TestCase&) = default;
};

std::string suite_to_json(std::span<const TestCase> suite);
std::vector<TestCase> suite_from_json(std::string_view text);

// Named internal signal: output `port` of `block`.
struct Probe {
  std::string name;
  BlockId block;
  std::size_t port = 0;
};

enum class FaultKind { NonFinite, UnresolvedFrom, MultipleGotoForTag };

std::string_view to_string(FaultKind kind);

struct RuntimeFault {
  std::size_t step = 0;
  BlockId block;
  FaultKind kind = FaultKind::NonFinite;
};

struct SignalTrace {
  // Outport names in id order, then probe names.
  std::vector<std::string> signals;
  // values[s][t]; every column has length() entries.
  std::vector<std::vector<double>> values;
  std::size_t duration_steps = 0;
  // Set when the run aborted; the trace then stops at fault->step.
  std::optional<RuntimeFault> fault;

  std::size_t length() const;
  bool aborted() const { return fault.has_value(); }
  // Null when `signal` is not recorded.
  const std::vector<double>* find(std::string_view signal) const;
};

std::string trace_to_csv(const SignalTrace& trace);

// A model prepared for repeated runs. Throws SimulationError when the model
// has an algebraic loop or a probe names an unknown block.
class Simulator {
 public:
  explicit Simulator(const ModelIR& model, std::span<const Probe> probes = {});
  ~Simulator();
  Simulator(Simulator&&) noexcept;
  Simulator& operator=(Simulator&&) noexcept;

  // Throws SimulationError if an Inport has no generator.
  SignalTrace run(const TestCase& test) const;

  // Inport ids in id order.
  const std::vector<BlockId>& inports() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

SignalTrace simulate(const ModelIR& model, const TestCase& test,
                     std::span<const Probe> probes = {});

// Dynamic half of the compile check: every Inport held at 1.0 for `steps`
// steps. Returns the fault, if any. Throws SimulationError as Simulator does.
std::optional<RuntimeFault> smoke_run(const ModelIR& model,
                                      std::size_t steps = 10);

}  // namespace slmut
