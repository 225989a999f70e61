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

// Command-line front end and the experiment pipeline behind it.

#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "slmut/harness.hpp"
#include "slmut/predictor.hpp"

namespace slmut {

enum ExitCode { kExitOk = 0, kExitUserError = 1, kExitEnvironment = 2 };

// Runs one command line (args[0] is the program name).
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

// "offline" builds a FrequencyPredictor trained on `train`; anything else is
// taken as an HTTP endpoint.
std::unique_ptr<Predictor> make_predictor(const std::string& spec,
                                          const std::vector<ModelIR>& train);

// Mutant report reader, the inverse of mutant_set_to_json.
MutantSet mutant_set_from_json(std::string_view text);
KillMatrix kill_matrix_from_csv(std::string_view classical_csv,
                                std::string_view req_aware_csv = {});

struct ExperimentModel {
  std::string model;         // path as written in the config
  std::string requirements;  // optional
  std::string inputs;        // optional
};

struct ExperimentConfig {
  std::vector<ExperimentModel> models;
  std::string predictor = "offline";
  std::vector<std::string> train;  // offline training models; empty: the bench
  std::size_t k = 3;
  std::size_t context_window = 256;
  bool mask_names = false;
  std::size_t suite_size = 50;
  std::size_t candidates_per_pick = 10;
  double tolerance = 1e-6;
  std::uint64_t seed = 1;
  std::size_t repetitions = 5;
  // Relative paths resolve against this directory. Not echoed.
  std::filesystem::path base_dir;
};

ExperimentConfig experiment_config_from_json(std::string_view text,
                                             const std::filesystem::path& base_dir);
std::string experiment_config_to_json(const ExperimentConfig& config);

struct ModelRun {
  ModelIR model;
  RequirementSet requirements;
  std::vector<TestCase> suite;
  MutantSet mlm;
  MutantSet operators;
  KillMatrix mlm_matrix;
  KillMatrix operator_matrix;
};

struct ExperimentResult {
  ExperimentConfig config;
  std::vector<ModelRun> runs;
  ComparisonReport report;
};

ExperimentResult run_experiment(const ExperimentConfig& config, std::size_t jobs);

// Writes config.json, report.json, report.txt and per-model artifacts.
void write_experiment(const ExperimentResult& result,
                      const std::filesystem::path& out_dir);

}  // namespace slmut
