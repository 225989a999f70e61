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

// Reference suites, kill matrices, test selection and approach comparison.

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "slmut/model_ir.hpp"
#include "slmut/mutgen.hpp"
#include "slmut/reqmon.hpp"
#include "slmut/sim.hpp"

namespace slmut {

// ---------------------------------------------------------------------------
// Input space and adaptive random testing

using Point = std::vector<double>;

// Generator family and value range for one Inport. Parameters are drawn in
// [0, 1] and scaled:
//   constant  [v]
//   step      [t0 / duration, v0, v1]
//   ramp      [slope]            (range applies to the slope)
//   piecewise [v_1 .. v_segments] at equal breakpoints
struct InputDomain {
  BlockId inport;
  GeneratorKind kind = GeneratorKind::Constant;
  double lo = 0.0;
  double hi = 1.0;
  std::size_t segments = 4;

  std::size_t dimension() const;
};

struct InputSpace {
  std::size_t duration_steps = 100;
  std::vector<InputDomain> inputs;  // Inport id order

  std::size_t dimension() const;
  TestCase make_test(std::string id, std::span<const double> point) const;
};

// Inports missing from `text` default to a constant in [0, 1]. Keys may be
// Inport ids or names. Throws ParseError or SchemaError.
InputSpace input_space_from_json(std::string_view text, const ModelIR& model);
InputSpace default_input_space(const ModelIR& model);

double distance(std::span<const double> a, std::span<const double> b);
// Smallest distance between any two points; +inf for fewer than two.
double min_pairwise_distance(std::span<const Point> points);

// Index of the candidate farthest from its nearest selected point; the lowest
// index wins ties. With no selected points, returns 0.
std::size_t art_pick(std::span<const Point> selected,
                     std::span<const Point> candidates);

std::vector<Point> random_points(std::size_t dimension, std::size_t count,
                                 std::uint64_t seed);
std::vector<Point> art_points(std::size_t dimension, std::size_t count,
                              std::size_t candidates_per_pick, std::uint64_t seed);

std::vector<TestCase> generate_reference_suite(const InputSpace& space,
                                               std::size_t size,
                                               std::size_t candidates_per_pick,
                                               std::uint64_t seed);

// ---------------------------------------------------------------------------
// Kill matrices

class BoolMatrix {
 public:
  BoolMatrix() = default;
  BoolMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, 0) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool at(std::size_t r, std::size_t c) const { return data_[r * cols_ + c] != 0; }
  void set(std::size_t r, std::size_t c, bool v) { data_[r * cols_ + c] = v; }

  // Columns with at least one true cell.
  std::vector<bool> any_per_column() const;
  std::size_t count_columns_killed() const;

  friend bool operator==(const BoolMatrix&, const BoolMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<unsigned char> data_;
};

enum class Notion { Classical, ReqAware };

std::string_view to_string(Notion n);

struct KillMatrix {
  std::vector<std::string> tests;
  std::vector<std::string> mutants;
  BoolMatrix classical;
  BoolMatrix req_aware;
  // (requirement, test) pairs the original violates, skipped for req_aware.
  std::vector<std::pair<std::string, std::string>> excluded;

  const BoolMatrix& matrix(Notion n) const {
    return n == Notion::Classical ? classical : req_aware;
  }
};

// Throws SimulationError if the original faults on a suite test.
KillMatrix compute_kill_matrix(const ModelIR& original, const MutantSet& mutants,
                               std::span<const TestCase> suite,
                               const RequirementSet& reqs, double tolerance,
                               std::size_t jobs = 1);

// Rows are tests, columns mutants, cells 0/1. Header row lists mutant ids.
std::string kill_matrix_to_csv(const KillMatrix& m, Notion n);

// Greedy set cover: repeatedly picks the row killing the most uncovered
// columns; ties go to the row earliest in `priority` (row index order when
// empty). Stops when no row adds coverage. Returns row indices in pick order.
std::vector<std::size_t> select_minimal_tests(
    const BoolMatrix& m, std::span<const std::size_t> priority = {});

// killed / killable, or nullopt when killable is 0.
std::optional<double> mutation_score(std::size_t killed, std::size_t killable);

// ---------------------------------------------------------------------------
// Comparison of two approaches on the same suites

struct ModelMatrices {
  std::string model;
  KillMatrix a;
  KillMatrix b;  // same tests as `a`
};

struct NotionResult {
  std::size_t selected_a = 0;
  std::size_t selected_b = 0;
  std::size_t only_a = 0;  // tests selected for A only
  std::size_t only_b = 0;
  std::size_t both = 0;
  std::size_t killable_a = 0;          // under this notion
  std::size_t killable_classical_a = 0;
  std::size_t killed_a = 0;            // by A's own selection
  std::size_t killable_b = 0;
  std::size_t killable_classical_b = 0;
  std::size_t killed_b = 0;
  std::size_t a_not_killed_by_b = 0;   // killable A mutants B's tests miss
  std::size_t b_not_killed_by_a = 0;
};

struct RepetitionResult {
  std::uint64_t seed = 0;
  NotionResult classical;
  NotionResult req_aware;
};

struct ComparisonReport {
  std::string approach_a;
  std::string approach_b;
  std::vector<std::string> models;
  std::vector<RepetitionResult> repetitions;
};

// Each repetition shuffles the greedy tie-break order with its own seed; A and
// B share the order within a repetition.
ComparisonReport compare_approaches(std::span<const ModelMatrices> models,
                                    std::size_t repetitions, std::uint64_t seed,
                                    std::string approach_a = "mlm",
                                    std::string approach_b = "operators");

// Mean of `field` over the repetitions for one notion.
double average(const ComparisonReport& r, Notion n,
               std::size_t NotionResult::*field);

std::string comparison_to_json(const ComparisonReport& r);
std::string comparison_to_text(const ComparisonReport& r);

}  // namespace slmut
