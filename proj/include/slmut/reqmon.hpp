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

// Bounded-trace requirement monitors.

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "slmut/sim.hpp"

namespace slmut {

enum class CmpOp { Lt, Le, Gt, Ge, Eq, Ne };

std::string_view to_string(CmpOp op);
std::optional<CmpOp> cmp_op_from_string(std::string_view op);

// signal <op> constant, or signal <op> other signal when `ref` is set.
struct Predicate {
  std::string signal;
  CmpOp op = CmpOp::Eq;
  double value = 0.0;
  std::optional<std::string> ref;
};

enum class PatternKind { Always, Never, ImpliesWithin };

struct Requirement {
  std::string id;
  PatternKind pattern = PatternKind::Always;
  Predicate pred;      // Always, Never
  Predicate trigger;   // ImpliesWithin
  Predicate response;  // ImpliesWithin
  std::size_t deadline = 0;
};

std::vector<std::string> referenced_signals(const Requirement& req);

struct Verdict {
  bool satisfied = true;
  std::optional<std::size_t> violation_step;
  // An obligation was still open when a complete trace ended.
  bool vacuous_tail = false;

  static Verdict ok(bool vacuous_tail = false) { return {true, std::nullopt, vacuous_tail}; }
  static Verdict violated(std::size_t step) { return {false, step, false}; }
};

// Throws UnknownSignal when the requirement names a signal the trace lacks.
//
// Always(p) fails at the first step where p is false, Never(p) at the first
// step where p holds. ImpliesWithin(a, b, d) fails when a holds at t and b
// holds nowhere in [t, t + d]; the violation is reported at t + d.
// On an aborted trace, Always and Never fail at the abort step and
// ImpliesWithin fails there if an obligation is still open.
Verdict check(const Requirement& req, const SignalTrace& trace);

struct RequirementSet {
  std::vector<Probe> probes;
  std::vector<Requirement> requirements;
};

// Accepts {"probes": [...], "requirements": [...]} or a bare requirement
// list. Predicates are objects {"signal", "op", "value" | "ref"} or strings
// such as "level >= 8". Throws ParseError or SchemaError.
RequirementSet requirements_from_json(std::string_view text);
std::string requirements_to_json(const RequirementSet& set);

}  // namespace slmut
