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

// Mutant generation: predictor-driven (mask and predict) and a rule-based
// operator baseline, plus classification into block-based fault patterns.

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "slmut/masking.hpp"
#include "slmut/model_ir.hpp"
#include "slmut/predictor.hpp"

namespace slmut {

enum class Pattern {
  SignalDataTypes,
  GotoFrom,
  SaturateOnIntegerOverflow,
  ConstantAndGain,
  MathRelationalLogical,
  InitialConditionAndSampleTime,
  StateflowTransitionConditions,
  StateflowVariableNames,
  StateflowActions,
  StateflowKeywords,
  Unclassified,
};

// The ten block-based patterns, without Unclassified.
std::span<const Pattern> known_patterns();
// Human-readable label, e.g. "Mutate GoTo/From blocks".
std::string_view pattern_label(Pattern p);
// Stable snake_case key used in reports.
std::string_view pattern_key(Pattern p);

Pattern classify(BlockType type, const MaskSite& site);

struct Provenance {
  enum class Kind { Mlm, Operator };
  Kind kind = Kind::Mlm;
  std::size_t rank = 0;  // 1-based position in the prediction list
  double score = 0.0;
  std::string op;        // operator name
};

struct Mutant {
  std::string id;
  std::string base_model;
  BlockType block_type = BlockType::StateflowStub;
  MaskSite site;
  PropertyValue replacement;
  Provenance provenance;
  Pattern pattern = Pattern::Unclassified;
};

Pattern classify(const Mutant& mutant);

struct MutantStats {
  std::size_t generated = 0;
  std::size_t discarded_identical = 0;
  std::size_t discarded_duplicate = 0;
  std::size_t discarded_uncompilable = 0;

  // |mutants| / (generated - discarded_identical); nullopt when undefined.
  std::optional<double> compilable_fraction(std::size_t kept) const;
};

struct MutantSet {
  std::string base_model;
  std::string approach;  // "mlm" or "operators"
  std::vector<Mutant> mutants;
  MutantStats stats;
  // Generation stopped early because the predictor became unreachable.
  bool partial = false;
};

// Thrown by generate_mlm when the predictor fails mid-run; carries what was
// produced before the failure.
class PartialMutantSet : public PredictorUnavailable {
 public:
  PartialMutantSet(const std::string& what, MutantSet partial)
      : PredictorUnavailable(what), partial_(std::move(partial)) {}
  const MutantSet& partial() const { return partial_; }

 private:
  MutantSet partial_;
};

struct CompileResult {
  bool ok = true;
  std::string reason;
};

// validate() plus a 10-step smoke run with every Inport held at 1.0.
CompileResult compile_check(const ModelIR& model);

ModelIR materialize(const ModelIR& base, const Mutant& mutant);

struct MlmOptions {
  std::size_t k = 3;
  std::size_t context_window = kDefaultContextWindow;
  bool mask_names = false;
  std::size_t jobs = 1;
};

// For every mask site, keeps the first k predictions (of k + 1 requested)
// that differ from the original value, then drops uncompilable ones.
// Precondition: validate(model).ok. Throws PartialMutantSet.
MutantSet generate_mlm(const ModelIR& model, const Predictor& predictor,
                       const MlmOptions& options = {});

// Rule-based catalog; see operator_names().
MutantSet generate_operators(const ModelIR& model, std::size_t jobs = 1);

std::span<const std::string_view> operator_names();

// Report: per-mutant records, stats and per-pattern counts.
std::string mutant_set_to_json(const MutantSet& set);

// Text substitutions used on stateflow expression strings, exposed for tests.
// Each result replaces exactly one occurrence.
std::vector<std::string> keyword_substitutions(std::string_view text);
std::vector<std::string> operator_substitutions(std::string_view text);

}  // namespace slmut
