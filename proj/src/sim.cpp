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

#include "slmut/sim.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

namespace slmut {

namespace {

using nlohmann::json;

enum class DataType { Double, Single, Int32 };

enum class RelOp { Eq, Ne, Lt, Le, Gt, Ge };
enum class LogicOp { And, Or, Xor, Nand, Nor, Not };

constexpr int kUnconnected = -1;

struct Node {
  std::size_t block = 0;  // index into model.blocks
  BlockType type = BlockType::StateflowStub;
  std::vector<int> in;    // slot per input port
  int out = kUnconnected; // slot of output port 0
  DataType dtype = DataType::Double;
  bool saturate = false;
  double p0 = 0.0;  // Value, Gain, Threshold, InitialCondition, UpperLimit
  double p1 = 0.0;  // LowerLimit, integrator step
  std::vector<double> signs;  // Sum: +1/-1; Product: +1 multiply, -1 divide
  RelOp rel = RelOp::Eq;
  LogicOp logic = LogicOp::And;
  int state = kUnconnected;   // state index for delay blocks
  int source = kUnconnected;  // From: slot of the matching Goto
};

double to_int32(double v, bool saturate) {
  if (!std::isfinite(v)) return v;
  double t = std::trunc(v);
  constexpr double lo = -2147483648.0;
  constexpr double hi = 2147483647.0;
  if (saturate) return std::clamp(t, lo, hi);
  double r = std::fmod(t, 4294967296.0);
  if (r < 0) r += 4294967296.0;
  if (r >= 2147483648.0) r -= 4294967296.0;
  return r;
}

double cast(double v, DataType dt, bool saturate) {
  switch (dt) {
    case DataType::Double:
      return v;
    case DataType::Single:
      return static_cast<double>(static_cast<float>(v));
    case DataType::Int32:
      return to_int32(v, saturate);
  }
  return v;
}

RelOp parse_rel(std::string_view op) {
  if (op == "~=") return RelOp::Ne;
  if (op == "<") return RelOp::Lt;
  if (op == "<=") return RelOp::Le;
  if (op == ">") return RelOp::Gt;
  if (op == ">=") return RelOp::Ge;
  return RelOp::Eq;
}

LogicOp parse_logic(std::string_view op) {
  if (op == "OR") return LogicOp::Or;
  if (op == "XOR") return LogicOp::Xor;
  if (op == "NAND") return LogicOp::Nand;
  if (op == "NOR") return LogicOp::Nor;
  if (op == "NOT") return LogicOp::Not;
  return LogicOp::And;
}

}  // namespace

std::string_view to_string(GeneratorKind kind) {
  switch (kind) {
    case GeneratorKind::Constant:
      return "constant";
    case GeneratorKind::Step:
      return "step";
    case GeneratorKind::Ramp:
      return "ramp";
    case GeneratorKind::Piecewise:
      return "piecewise";
  }
  return "constant";
}

std::string_view to_string(FaultKind kind) {
  switch (kind) {
    case FaultKind::NonFinite:
      return "NonFinite";
    case FaultKind::UnresolvedFrom:
      return "UnresolvedFrom";
    case FaultKind::MultipleGotoForTag:
      return "MultipleGotoForTag";
  }
  return "NonFinite";
}

SignalGenerator SignalGenerator::constant(double v) {
  SignalGenerator g;
  g.kind = GeneratorKind::Constant;
  g.value = v;
  return g;
}

SignalGenerator SignalGenerator::step(std::size_t t0, double v0, double v1) {
  SignalGenerator g;
  g.kind = GeneratorKind::Step;
  g.t0 = t0;
  g.v0 = v0;
  g.v1 = v1;
  return g;
}

SignalGenerator SignalGenerator::ramp(double slope) {
  SignalGenerator g;
  g.kind = GeneratorKind::Ramp;
  g.slope = slope;
  return g;
}

SignalGenerator SignalGenerator::piecewise(
    std::vector<std::pair<std::size_t, double>> breakpoints) {
  SignalGenerator g;
  g.kind = GeneratorKind::Piecewise;
  std::stable_sort(breakpoints.begin(), breakpoints.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  g.breakpoints = std::move(breakpoints);
  return g;
}

double SignalGenerator::at(std::size_t t, double sample_time) const {
  switch (kind) {
    case GeneratorKind::Constant:
      return value;
    case GeneratorKind::Step:
      return t < t0 ? v0 : v1;
    case GeneratorKind::Ramp:
      return slope * static_cast<double>(t) * sample_time;
    case GeneratorKind::Piecewise: {
      double v = 0.0;
      for (const auto& [start, val] : breakpoints) {
        if (start > t) break;
        v = val;
      }
      return v;
    }
  }
  return 0.0;
}

// ---------------------------------------------------------------------------
// Test suite JSON

namespace {

json generator_to_json(const SignalGenerator& g) {
  json j{{"kind", to_string(g.kind)}};
  switch (g.kind) {
    case GeneratorKind::Constant:
      j["value"] = g.value;
      break;
    case GeneratorKind::Step:
      j["t0"] = g.t0;
      j["v0"] = g.v0;
      j["v1"] = g.v1;
      break;
    case GeneratorKind::Ramp:
      j["slope"] = g.slope;
      break;
    case GeneratorKind::Piecewise: {
      json bps = json::array();
      for (const auto& [s, v] : g.breakpoints) bps.push_back({s, v});
      j["breakpoints"] = bps;
      break;
    }
  }
  return j;
}

double get_number(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_number())
    throw SchemaError(std::string("generator needs numeric field ") + key);
  return j[key].get<double>();
}

SignalGenerator generator_from_json(const json& j) {
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string())
    throw SchemaError("generator needs a kind");
  const std::string kind = j["kind"].get<std::string>();
  if (kind == "constant") return SignalGenerator::constant(get_number(j, "value"));
  if (kind == "step") {
    double t0 = get_number(j, "t0");
    if (t0 < 0) throw SchemaError("step t0 must be non-negative");
    return SignalGenerator::step(static_cast<std::size_t>(t0),
                                 get_number(j, "v0"), get_number(j, "v1"));
  }
  if (kind == "ramp") return SignalGenerator::ramp(get_number(j, "slope"));
  if (kind == "piecewise") {
    if (!j.contains("breakpoints") || !j["breakpoints"].is_array())
      throw SchemaError("piecewise generator needs breakpoints");
    std::vector<std::pair<std::size_t, double>> bps;
    for (const auto& bp : j["breakpoints"]) {
      if (!bp.is_array() || bp.size() != 2 || !bp[0].is_number_unsigned() ||
          !bp[1].is_number())
        throw SchemaError("breakpoints are [step, value] pairs");
      bps.emplace_back(bp[0].get<std::size_t>(), bp[1].get<double>());
    }
    return SignalGenerator::piecewise(std::move(bps));
  }
  throw SchemaError("unknown generator kind: " + kind);
}

}  // namespace

std::string suite_to_json(std::span<const TestCase> suite) {
  json tests = json::array();
  for (const TestCase& tc : suite) {
    json inputs = json::object();
    for (const auto& [id, g] : tc.inputs) inputs[id] = generator_to_json(g);
    tests.push_back(
        {{"id", tc.id}, {"duration_steps", tc.duration_steps}, {"inputs", inputs}});
  }
  return json{{"tests", tests}}.dump(2) + "\n";
}

std::vector<TestCase> suite_from_json(std::string_view text) {
  json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded()) throw ParseError(0, "test suite is not valid JSON");
  const json& tests = doc.is_object() && doc.contains("tests") ? doc["tests"] : doc;
  if (!tests.is_array()) throw SchemaError("test suite must be a list of tests");
  std::vector<TestCase> out;
  for (const json& t : tests) {
    if (!t.is_object() || !t.contains("id") || !t["id"].is_string())
      throw SchemaError("test case needs a string id");
    TestCase tc;
    tc.id = t["id"].get<std::string>();
    if (!t.contains("duration_steps") || !t["duration_steps"].is_number_unsigned() ||
        t["duration_steps"].get<std::size_t>() == 0)
      throw SchemaError("test " + tc.id + ": duration_steps must be positive");
    tc.duration_steps = t["duration_steps"].get<std::size_t>();
    if (t.contains("inputs")) {
      if (!t["inputs"].is_object())
        throw SchemaError("test " + tc.id + ": inputs must be an object");
      for (const auto& [id, g] : t["inputs"].items())
        tc.inputs[id] = generator_from_json(g);
    }
    out.push_back(std::move(tc));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Traces

std::size_t SignalTrace::length() const {
  return values.empty() ? (fault ? fault->step : duration_steps)
                        : values.front().size();
}

const std::vector<double>* SignalTrace::find(std::string_view signal) const {
  for (std::size_t i = 0; i < signals.size(); ++i)
    if (signals[i] == signal) return &values[i];
  return nullptr;
}

std::string trace_to_csv(const SignalTrace& trace) {
  std::string out;
  for (std::size_t i = 0; i < trace.signals.size(); ++i) {
    if (i) out += ',';
    out += trace.signals[i];
  }
  out += '\n';
  for (std::size_t t = 0; t < trace.length(); ++t) {
    for (std::size_t i = 0; i < trace.values.size(); ++i) {
      if (i) out += ',';
      out += format_number(trace.values[i][t]);
    }
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// Simulator

struct Simulator::Impl {
  double sample_time = 1.0;
  std::vector<BlockId> block_ids;
  std::vector<Node> nodes;  // evaluation order
  std::size_t slot_count = 0;
  std::size_t state_count = 0;
  std::vector<double> initial_state;
  std::vector<std::pair<BlockId, int>> inports;  // id, slot
  std::vector<BlockId> inport_ids;
  std::vector<std::string> signals;
  std::vector<int> signal_slots;
  // Structural fault raised at step 0 of every run.
  std::optional<RuntimeFault> static_fault;
};

Simulator::Simulator(const ModelIR& model, std::span<const Probe> probes)
    : impl_(std::make_unique<Impl>()) {
  Impl& m = *impl_;
  m.sample_time = model.sample_time;
  auto order = evaluation_order(model);
  if (!order) throw SimulationError("model " + model.name + " has an algebraic loop");

  std::map<std::pair<std::string, std::size_t>, int> slots;
  auto slot_of = [&](const std::string& block, std::size_t port) {
    auto [it, inserted] = slots.emplace(std::make_pair(block, port),
                                        static_cast<int>(m.slot_count));
    if (inserted) ++m.slot_count;
    return it->second;
  };
  std::map<std::pair<std::string, std::size_t>, int> drivers;
  for (const Connection& c : model.connections)
    drivers[{c.dst_block, c.dst_port}] = slot_of(c.src_block, c.src_port);

  std::multimap<std::string, std::size_t> gotos;
  for (std::size_t i = 0; i < model.blocks.size(); ++i)
    if (model.blocks[i].type == BlockType::Goto)
      gotos.emplace(model.blocks[i].string("GotoTag").value_or(""), i);

  for (const Block& b : model.blocks) m.block_ids.push_back(b.id);

  for (std::size_t idx : *order) {
    const Block& b = model.blocks[idx];
    Node n;
    n.block = idx;
    n.type = b.type;
    const std::size_t arity = input_arity(model, b);
    for (std::size_t p = 0; p < arity; ++p) {
      auto it = drivers.find({b.id, p});
      n.in.push_back(it == drivers.end() ? kUnconnected : it->second);
    }
    if (b.type != BlockType::Outport) n.out = slot_of(b.id, 0);
    const std::string dt = b.string("OutDataTypeStr").value_or("double");
    n.dtype = dt == "int32" ? DataType::Int32
              : dt == "single" ? DataType::Single
                               : DataType::Double;
    n.saturate = b.string("SaturateOnIntegerOverflow").value_or("off") == "on";

    switch (b.type) {
      case BlockType::Inport:
        m.inports.emplace_back(b.id, n.out);
        break;
      case BlockType::Constant:
        n.p0 = b.number("Value").value_or(0.0);
        break;
      case BlockType::Gain:
        n.p0 = b.number("Gain").value_or(1.0);
        break;
      case BlockType::Sum:
        for (char c : b.string("Signs").value_or(""))
          n.signs.push_back(c == '-' ? -1.0 : 1.0);
        break;
      case BlockType::Product:
        for (char c : b.string("Inputs").value_or(""))
          n.signs.push_back(c == '/' ? -1.0 : 1.0);
        break;
      case BlockType::RelationalOperator:
        n.rel = parse_rel(b.string("Operator").value_or("=="));
        break;
      case BlockType::LogicalOperator:
        n.logic = parse_logic(b.string("Operator").value_or("AND"));
        break;
      case BlockType::Switch:
        n.p0 = b.number("Threshold").value_or(0.0);
        break;
      case BlockType::UnitDelay:
      case BlockType::DiscreteIntegrator:
        n.state = static_cast<int>(m.state_count++);
        m.initial_state.push_back(b.number("InitialCondition").value_or(0.0));
        n.p1 = b.number("SampleTime").value_or(model.sample_time);
        break;
      case BlockType::Saturation:
        n.p0 = b.number("UpperLimit").value_or(0.0);
        n.p1 = b.number("LowerLimit").value_or(0.0);
        break;
      case BlockType::From: {
        const std::string tag = b.string("GotoTag").value_or("");
        const auto count = gotos.count(tag);
        if (count == 1) {
          n.source = slot_of(model.blocks[gotos.find(tag)->second].id, 0);
        } else if (!m.static_fault) {
          m.static_fault = RuntimeFault{
              0, b.id,
              count == 0 ? FaultKind::UnresolvedFrom
                         : FaultKind::MultipleGotoForTag};
        }
        break;
      }
      default:
        break;
    }
    m.nodes.push_back(std::move(n));
  }

  std::sort(m.inports.begin(), m.inports.end(),
            [](const auto& a, const auto& b) { return id_less(a.first, b.first); });
  for (const auto& [id, _] : m.inports) m.inport_ids.push_back(id);

  for (const Block* b : blocks_in_id_order(model)) {
    if (b->type != BlockType::Outport) continue;
    m.signals.push_back(b->name.empty() ? b->id : b->name);
    auto it = drivers.find({b->id, 0});
    m.signal_slots.push_back(it == drivers.end() ? kUnconnected : it->second);
  }
  for (const Probe& p : probes) {
    const Block* b = model.find_block(p.block);
    if (!b) throw SimulationError("probe " + p.name + " names unknown block " + p.block);
    m.signals.push_back(p.name);
    m.signal_slots.push_back(slot_of(b->id, p.port));
  }
  // Probes on ports no node writes read 0.
}

Simulator::~Simulator() = default;
Simulator::Simulator(Simulator&&) noexcept = default;
Simulator& Simulator::operator=(Simulator&&) noexcept = default;

const std::vector<BlockId>& Simulator::inports() const { return impl_->inport_ids; }

SignalTrace Simulator::run(const TestCase& test) const {
  const Impl& m = *impl_;
  std::vector<const SignalGenerator*> gens;
  for (const auto& [id, _] : m.inports) {
    auto it = test.inputs.find(id);
    if (it == test.inputs.end())
      throw SimulationError("test " + test.id + " has no input for Inport " + id);
    gens.push_back(&it->second);
  }

  SignalTrace trace;
  trace.signals = m.signals;
  trace.duration_steps = test.duration_steps;
  trace.values.assign(m.signals.size(), {});
  for (auto& v : trace.values) v.reserve(test.duration_steps);
  if (m.static_fault) {
    trace.fault = m.static_fault;
    return trace;
  }

  std::vector<double> slot(m.slot_count, 0.0);
  std::vector<double> state = m.initial_state;
  auto in = [&](const Node& n, std::size_t p) {
    int s = n.in[p];
    return s == kUnconnected ? 0.0 : slot[static_cast<std::size_t>(s)];
  };

  for (std::size_t t = 0; t < test.duration_steps; ++t) {
    std::size_t inport_index = 0;
    for (const Node& n : m.nodes) {
      double y = 0.0;
      switch (n.type) {
        case BlockType::Inport:
          y = gens[inport_index++]->at(t, m.sample_time);
          break;
        case BlockType::Outport:
          continue;
        case BlockType::Constant:
          y = n.p0;
          break;
        case BlockType::Gain:
          y = n.p0 * in(n, 0);
          break;
        case BlockType::Sum:
          for (std::size_t p = 0; p < n.signs.size(); ++p) y += n.signs[p] * in(n, p);
          break;
        case BlockType::Product:
          y = 1.0;
          for (std::size_t p = 0; p < n.signs.size(); ++p)
            y = n.signs[p] > 0 ? y * in(n, p) : y / in(n, p);
          break;
        case BlockType::RelationalOperator: {
          double a = in(n, 0), b = in(n, 1);
          bool r = false;
          switch (n.rel) {
            case RelOp::Eq: r = a == b; break;
            case RelOp::Ne: r = a != b; break;
            case RelOp::Lt: r = a < b; break;
            case RelOp::Le: r = a <= b; break;
            case RelOp::Gt: r = a > b; break;
            case RelOp::Ge: r = a >= b; break;
          }
          y = r ? 1.0 : 0.0;
          break;
        }
        case BlockType::LogicalOperator: {
          std::size_t trues = 0;
          for (std::size_t p = 0; p < n.in.size(); ++p) trues += in(n, p) != 0.0;
          const std::size_t k = n.in.size();
          bool r = false;
          switch (n.logic) {
            case LogicOp::And: r = trues == k; break;
            case LogicOp::Or: r = trues > 0; break;
            case LogicOp::Xor: r = trues % 2 == 1; break;
            case LogicOp::Nand: r = trues != k; break;
            case LogicOp::Nor: r = trues == 0; break;
            case LogicOp::Not: r = in(n, 0) == 0.0; break;
          }
          y = r ? 1.0 : 0.0;
          break;
        }
        case BlockType::Switch:
          y = in(n, 1) >= n.p0 ? in(n, 0) : in(n, 2);
          break;
        case BlockType::UnitDelay:
        case BlockType::DiscreteIntegrator:
          y = state[static_cast<std::size_t>(n.state)];
          break;
        case BlockType::Saturation:
          y = std::min(std::max(in(n, 0), n.p1), n.p0);
          break;
        case BlockType::Goto:
          y = in(n, 0);
          break;
        case BlockType::From:
          y = slot[static_cast<std::size_t>(n.source)];
          break;
        case BlockType::StateflowStub:
          y = 0.0;
          break;
      }
      y = cast(y, n.dtype, n.saturate);
      if (!std::isfinite(y)) {
        trace.fault = RuntimeFault{t, m.block_ids[n.block], FaultKind::NonFinite};
        return trace;
      }
      slot[static_cast<std::size_t>(n.out)] = y;
    }
    for (std::size_t s = 0; s < m.signal_slots.size(); ++s) {
      int sl = m.signal_slots[s];
      trace.values[s].push_back(sl == kUnconnected ? 0.0
                                                   : slot[static_cast<std::size_t>(sl)]);
    }
    for (const Node& n : m.nodes) {
      if (n.state == kUnconnected) continue;
      double& x = state[static_cast<std::size_t>(n.state)];
      x = n.type == BlockType::UnitDelay ? in(n, 0) : x + n.p1 * in(n, 0);
    }
  }
  return trace;
}

SignalTrace simulate(const ModelIR& model, const TestCase& test,
                     std::span<const Probe> probes) {
  return Simulator(model, probes).run(test);
}

std::optional<RuntimeFault> smoke_run(const ModelIR& model, std::size_t steps) {
  Simulator sim(model);
  TestCase tc;
  tc.id = "smoke";
  tc.duration_steps = steps;
  for (const auto& id : sim.inports()) tc.inputs[id] = SignalGenerator::constant(1.0);
  return sim.run(tc).fault;
}

}  // namespace slmut
