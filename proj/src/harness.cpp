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

#include "slmut/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>

#include <nlohmann/json.hpp>

#include "slmut/support.hpp"

namespace slmut {

namespace {

using nlohmann::json;

GeneratorKind generator_kind_from_string(const std::string& s) {
  if (s == "constant") return GeneratorKind::Constant;
  if (s == "step") return GeneratorKind::Step;
  if (s == "ramp") return GeneratorKind::Ramp;
  if (s == "piecewise") return GeneratorKind::Piecewise;
  throw SchemaError("unknown generator kind: " + s);
}

double scale(double u, double lo, double hi) { return lo + u * (hi - lo); }

}  // namespace

// ---------------------------------------------------------------------------
// Input space

std::size_t InputDomain::dimension() const {
  switch (kind) {
    case GeneratorKind::Constant:
    case GeneratorKind::Ramp:
      return 1;
    case GeneratorKind::Step:
      return 3;
    case GeneratorKind::Piecewise:
      return segments;
  }
  return 1;
}

std::size_t InputSpace::dimension() const {
  std::size_t d = 0;
  for (const auto& in : inputs) d += in.dimension();
  return d;
}

TestCase InputSpace::make_test(std::string id, std::span<const double> point) const {
  TestCase tc;
  tc.id = std::move(id);
  tc.duration_steps = duration_steps;
  std::size_t k = 0;
  for (const auto& in : inputs) {
    auto p = point.subspan(k, in.dimension());
    k += in.dimension();
    switch (in.kind) {
      case GeneratorKind::Constant:
        tc.inputs[in.inport] = SignalGenerator::constant(scale(p[0], in.lo, in.hi));
        break;
      case GeneratorKind::Ramp:
        tc.inputs[in.inport] = SignalGenerator::ramp(scale(p[0], in.lo, in.hi));
        break;
      case GeneratorKind::Step: {
        auto t0 = static_cast<std::size_t>(
            std::floor(p[0] * static_cast<double>(duration_steps)));
        tc.inputs[in.inport] = SignalGenerator::step(
            std::min(t0, duration_steps - 1), scale(p[1], in.lo, in.hi),
            scale(p[2], in.lo, in.hi));
        break;
      }
      case GeneratorKind::Piecewise: {
        std::vector<std::pair<std::size_t, double>> bps;
        for (std::size_t s = 0; s < in.segments; ++s)
          bps.emplace_back(s * duration_steps / in.segments, scale(p[s], in.lo, in.hi));
        tc.inputs[in.inport] = SignalGenerator::piecewise(std::move(bps));
        break;
      }
    }
  }
  return tc;
}

InputSpace default_input_space(const ModelIR& model) {
  InputSpace space;
  for (const Block* b : blocks_in_id_order(model))
    if (b->type == BlockType::Inport) space.inputs.push_back({b->id});
  return space;
}

InputSpace input_space_from_json(std::string_view text, const ModelIR& model) {
  json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded()) throw ParseError(0, "input space is not valid JSON");
  if (!doc.is_object()) throw SchemaError("input space must be an object");
  InputSpace space = default_input_space(model);
  if (doc.contains("duration_steps")) {
    if (!doc["duration_steps"].is_number_unsigned() ||
        doc["duration_steps"].get<std::size_t>() == 0)
      throw SchemaError("duration_steps must be a positive integer");
    space.duration_steps = doc["duration_steps"].get<std::size_t>();
  }
  if (!doc.contains("inputs")) return space;
  if (!doc["inputs"].is_object()) throw SchemaError("inputs must be an object");
  for (const auto& [key, spec] : doc["inputs"].items()) {
    auto it = std::find_if(space.inputs.begin(), space.inputs.end(),
                           [&](const InputDomain& d) {
                             return d.inport == key ||
                                    model.find_block(d.inport)->name == key;
                           });
    if (it == space.inputs.end()) throw SchemaError("no Inport named " + key);
    if (!spec.is_object() || !spec.contains("kind") || !spec["kind"].is_string())
      throw SchemaError("input " + key + " needs a kind");
    it->kind = generator_kind_from_string(spec["kind"].get<std::string>());
    if (spec.contains("range")) {
      const json& r = spec["range"];
      if (!r.is_array() || r.size() != 2 || !r[0].is_number() || !r[1].is_number() ||
          r[0].get<double>() > r[1].get<double>())
        throw SchemaError("input " + key + ": range must be [lo, hi]");
      it->lo = r[0].get<double>();
      it->hi = r[1].get<double>();
    }
    if (spec.contains("segments")) {
      if (!spec["segments"].is_number_unsigned() || spec["segments"].get<std::size_t>() == 0)
        throw SchemaError("input " + key + ": segments must be positive");
      it->segments = spec["segments"].get<std::size_t>();
    }
  }
  return space;
}

// ---------------------------------------------------------------------------
// ART

double distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

double min_pairwise_distance(std::span<const Point> points) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < points.size(); ++i)
    for (std::size_t j = i + 1; j < points.size(); ++j)
      best = std::min(best, distance(points[i], points[j]));
  return best;
}

std::size_t art_pick(std::span<const Point> selected,
                     std::span<const Point> candidates) {
  if (selected.empty()) return 0;
  std::size_t best = 0;
  double best_d = -1.0;
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    double d = std::numeric_limits<double>::infinity();
    for (const auto& s : selected) d = std::min(d, distance(candidates[c], s));
    if (d > best_d) {
      best_d = d;
      best = c;
    }
  }
  return best;
}

namespace {

Point draw(Rng& rng, std::size_t dimension) {
  Point p(dimension);
  for (auto& x : p) x = rng.uniform();
  return p;
}

}  // namespace

std::vector<Point> random_points(std::size_t dimension, std::size_t count,
                                 std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Point> out;
  for (std::size_t i = 0; i < count; ++i) out.push_back(draw(rng, dimension));
  return out;
}

std::vector<Point> art_points(std::size_t dimension, std::size_t count,
                              std::size_t candidates_per_pick, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Point> out;
  if (count == 0) return out;
  out.push_back(draw(rng, dimension));
  candidates_per_pick = std::max<std::size_t>(1, candidates_per_pick);
  while (out.size() < count) {
    std::vector<Point> cands;
    for (std::size_t c = 0; c < candidates_per_pick; ++c) cands.push_back(draw(rng, dimension));
    out.push_back(std::move(cands[art_pick(out, cands)]));
  }
  return out;
}

std::vector<TestCase> generate_reference_suite(const InputSpace& space,
                                               std::size_t size,
                                               std::size_t candidates_per_pick,
                                               std::uint64_t seed) {
  auto points = art_points(space.dimension(), size, candidates_per_pick, seed);
  std::vector<TestCase> suite;
  for (std::size_t i = 0; i < points.size(); ++i) {
    char id[16];
    std::snprintf(id, sizeof id, "t%03zu", i + 1);
    suite.push_back(space.make_test(id, points[i]));
  }
  return suite;
}

// ---------------------------------------------------------------------------
// Kill matrices

std::vector<bool> BoolMatrix::any_per_column() const {
  std::vector<bool> out(cols_, false);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c)
      if (at(r, c)) out[c] = true;
  return out;
}

std::size_t BoolMatrix::count_columns_killed() const {
  auto any = any_per_column();
  return static_cast<std::size_t>(std::count(any.begin(), any.end(), true));
}

std::string_view to_string(Notion n) {
  return n == Notion::Classical ? "classical" : "req_aware";
}

KillMatrix compute_kill_matrix(const ModelIR& original, const MutantSet& mutants,
                               std::span<const TestCase> suite,
                               const RequirementSet& reqs, double tolerance,
                               std::size_t jobs) {
  KillMatrix km;
  for (const auto& t : suite) km.tests.push_back(t.id);
  for (const auto& m : mutants.mutants) km.mutants.push_back(m.id);
  km.classical = BoolMatrix(suite.size(), mutants.mutants.size());
  km.req_aware = BoolMatrix(suite.size(), mutants.mutants.size());

  Simulator orig_sim(original, reqs.probes);
  std::vector<SignalTrace> orig(suite.size());
  // Requirements the original satisfies, per test.
  std::vector<std::vector<const Requirement*>> live(suite.size());
  for (std::size_t t = 0; t < suite.size(); ++t) {
    orig[t] = orig_sim.run(suite[t]);
    if (orig[t].aborted())
      throw SimulationError("original model faults on test " + suite[t].id + " (" +
                            std::string(to_string(orig[t].fault->kind)) + " at " +
                            orig[t].fault->block + ")");
    for (const auto& r : reqs.requirements) {
      if (check(r, orig[t]).satisfied)
        live[t].push_back(&r);
      else
        km.excluded.emplace_back(r.id, suite[t].id);
    }
  }

  parallel_for(mutants.mutants.size(), jobs, [&](std::size_t j) {
    ModelIR mutant = materialize(original, mutants.mutants[j]);
    Simulator sim(mutant, reqs.probes);
    for (std::size_t t = 0; t < suite.size(); ++t) {
      SignalTrace tr = sim.run(suite[t]);
      // Renamed outputs keep their position; compare by the original's names.
      tr.signals = orig[t].signals;
      bool classical = tr.aborted();
      for (std::size_t s = 0; s < tr.values.size() && !classical; ++s)
        for (std::size_t k = 0; k < tr.values[s].size(); ++k)
          if (std::abs(tr.values[s][k] - orig[t].values[s][k]) > tolerance) {
            classical = true;
            break;
          }
      bool req = false;
      for (const Requirement* r : live[t])
        if (!check(*r, tr).satisfied) {
          req = true;
          break;
        }
      km.classical.set(t, j, classical);
      km.req_aware.set(t, j, req);
    }
  });
  return km;
}

std::string kill_matrix_to_csv(const KillMatrix& m, Notion n) {
  const BoolMatrix& b = m.matrix(n);
  std::string out = "test";
  for (const auto& id : m.mutants) out += "," + id;
  out += '\n';
  for (std::size_t r = 0; r < b.rows(); ++r) {
    out += m.tests[r];
    for (std::size_t c = 0; c < b.cols(); ++c) out += b.at(r, c) ? ",1" : ",0";
    out += '\n';
  }
  return out;
}

std::vector<std::size_t> select_minimal_tests(const BoolMatrix& m,
                                              std::span<const std::size_t> priority) {
  std::vector<std::size_t> order;
  if (priority.empty()) {
    for (std::size_t r = 0; r < m.rows(); ++r) order.push_back(r);
  } else {
    order.assign(priority.begin(), priority.end());
  }
  std::vector<bool> covered(m.cols(), false);
  std::vector<bool> used(m.rows(), false);
  std::vector<std::size_t> picked;
  while (true) {
    std::size_t best_gain = 0;
    std::size_t best = 0;
    for (std::size_t r : order) {
      if (used[r]) continue;
      std::size_t gain = 0;
      for (std::size_t c = 0; c < m.cols(); ++c) gain += !covered[c] && m.at(r, c);
      if (gain > best_gain) {
        best_gain = gain;
        best = r;
      }
    }
    if (best_gain == 0) break;
    used[best] = true;
    picked.push_back(best);
    for (std::size_t c = 0; c < m.cols(); ++c)
      if (m.at(best, c)) covered[c] = true;
  }
  return picked;
}

std::optional<double> mutation_score(std::size_t killed, std::size_t killable) {
  if (killable == 0) return std::nullopt;
  return static_cast<double>(killed) / static_cast<double>(killable);
}

// ---------------------------------------------------------------------------
// Comparison

namespace {

std::size_t killed_by(const BoolMatrix& m, const std::vector<std::size_t>& rows,
                      const std::vector<bool>* only = nullptr) {
  std::size_t n = 0;
  for (std::size_t c = 0; c < m.cols(); ++c) {
    if (only && !(*only)[c]) continue;
    for (std::size_t r : rows)
      if (m.at(r, c)) {
        ++n;
        break;
      }
  }
  return n;
}

void accumulate(NotionResult& out, const ModelMatrices& mm, Notion n,
                std::span<const std::size_t> priority) {
  const BoolMatrix& a = mm.a.matrix(n);
  const BoolMatrix& b = mm.b.matrix(n);
  auto sel_a = select_minimal_tests(a, priority);
  auto sel_b = select_minimal_tests(b, priority);
  std::set<std::size_t> sa(sel_a.begin(), sel_a.end());
  std::set<std::size_t> sb(sel_b.begin(), sel_b.end());
  out.selected_a += sa.size();
  out.selected_b += sb.size();
  for (std::size_t r : sa) (sb.count(r) ? out.both : out.only_a) += 1;
  for (std::size_t r : sb)
    if (!sa.count(r)) ++out.only_b;

  auto killable_a = a.any_per_column();
  auto killable_b = b.any_per_column();
  out.killable_a += a.count_columns_killed();
  out.killable_b += b.count_columns_killed();
  out.killable_classical_a += mm.a.classical.count_columns_killed();
  out.killable_classical_b += mm.b.classical.count_columns_killed();
  out.killed_a += killed_by(a, sel_a);
  out.killed_b += killed_by(b, sel_b);
  const std::size_t ka = a.count_columns_killed();
  const std::size_t kb = b.count_columns_killed();
  out.a_not_killed_by_b += ka - killed_by(a, sel_b, &killable_a);
  out.b_not_killed_by_a += kb - killed_by(b, sel_a, &killable_b);
}

json notion_to_json(const NotionResult& n) {
  auto score = [](std::size_t k, std::size_t d) {
    auto s = mutation_score(k, d);
    return s ? json(*s) : json("n/a");
  };
  return {{"selected_a", n.selected_a},
          {"selected_b", n.selected_b},
          {"overlap", {{"only_a", n.only_a}, {"only_b", n.only_b}, {"both", n.both}}},
          {"killable_a", n.killable_a},
          {"killable_b", n.killable_b},
          {"killable_classical_a", n.killable_classical_a},
          {"killable_classical_b", n.killable_classical_b},
          {"killed_a", n.killed_a},
          {"killed_b", n.killed_b},
          {"score_a", score(n.killed_a, n.killable_classical_a)},
          {"score_b", score(n.killed_b, n.killable_classical_b)},
          {"a_not_killed_by_b", n.a_not_killed_by_b},
          {"b_not_killed_by_a", n.b_not_killed_by_a}};
}

constexpr std::pair<const char*, std::size_t NotionResult::*> kFields[] = {
    {"selected_a", &NotionResult::selected_a},
    {"selected_b", &NotionResult::selected_b},
    {"only_a", &NotionResult::only_a},
    {"only_b", &NotionResult::only_b},
    {"both", &NotionResult::both},
    {"killable_a", &NotionResult::killable_a},
    {"killable_b", &NotionResult::killable_b},
    {"killable_classical_a", &NotionResult::killable_classical_a},
    {"killable_classical_b", &NotionResult::killable_classical_b},
    {"killed_a", &NotionResult::killed_a},
    {"killed_b", &NotionResult::killed_b},
    {"a_not_killed_by_b", &NotionResult::a_not_killed_by_b},
    {"b_not_killed_by_a", &NotionResult::b_not_killed_by_a},
};

const NotionResult& pick(const RepetitionResult& r, Notion n) {
  return n == Notion::Classical ? r.classical : r.req_aware;
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string pct(std::optional<double> v) {
  return v ? fmt("%.0f%%", *v * 100.0) : "n/a";
}

}  // namespace

ComparisonReport compare_approaches(std::span<const ModelMatrices> models,
                                    std::size_t repetitions, std::uint64_t seed,
                                    std::string approach_a, std::string approach_b) {
  ComparisonReport report;
  report.approach_a = std::move(approach_a);
  report.approach_b = std::move(approach_b);
  for (const auto& m : models) report.models.push_back(m.model);
  for (std::size_t rep = 0; rep < std::max<std::size_t>(1, repetitions); ++rep) {
    RepetitionResult rr;
    rr.seed = mix_seed(seed, rep);
    for (std::size_t mi = 0; mi < models.size(); ++mi) {
      const ModelMatrices& mm = models[mi];
      if (mm.a.tests != mm.b.tests)
        throw Error("approaches were evaluated on different suites for " + mm.model);
      std::vector<std::size_t> priority(mm.a.tests.size());
      for (std::size_t i = 0; i < priority.size(); ++i) priority[i] = i;
      Rng rng(mix_seed(rr.seed, mi));
      rng.shuffle(priority);
      accumulate(rr.classical, mm, Notion::Classical, priority);
      accumulate(rr.req_aware, mm, Notion::ReqAware, priority);
    }
    report.repetitions.push_back(rr);
  }
  return report;
}

double average(const ComparisonReport& r, Notion n, std::size_t NotionResult::*field) {
  if (r.repetitions.empty()) return 0.0;
  double s = 0.0;
  for (const auto& rep : r.repetitions) s += static_cast<double>(pick(rep, n).*field);
  return s / static_cast<double>(r.repetitions.size());
}

std::string comparison_to_json(const ComparisonReport& r) {
  json reps = json::array();
  for (const auto& rep : r.repetitions)
    reps.push_back({{"seed", rep.seed},
                    {"classical", notion_to_json(rep.classical)},
                    {"req_aware", notion_to_json(rep.req_aware)}});
  json avgs = json::object();
  for (Notion n : {Notion::Classical, Notion::ReqAware}) {
    json a = json::object();
    for (const auto& [name, field] : kFields) a[name] = average(r, n, field);
    // Mean of the per-repetition scores.
    for (const char* side : {"a", "b"}) {
      double s = 0.0;
      std::size_t defined = 0;
      for (const auto& rep : r.repetitions) {
        const NotionResult& nr = pick(rep, n);
        auto v = side[0] == 'a' ? mutation_score(nr.killed_a, nr.killable_classical_a)
                                : mutation_score(nr.killed_b, nr.killable_classical_b);
        if (v) {
          s += *v;
          ++defined;
        }
      }
      a[std::string("score_") + side] =
          defined == r.repetitions.size() && defined > 0 ? json(s / defined) : json("n/a");
    }
    avgs[std::string(to_string(n))] = a;
  }
  json doc{{"approach_a", r.approach_a},
           {"approach_b", r.approach_b},
           {"models", r.models},
           {"repetitions", reps},
           {"averages", avgs}};
  return doc.dump(2) + "\n";
}

std::string comparison_to_text(const ComparisonReport& r) {
  const std::string& A = r.approach_a;
  const std::string& B = r.approach_b;
  std::string out;
  out += "Approach comparison: " + A + " vs " + B + ", " +
         std::to_string(r.repetitions.size()) + " repetition(s)\nModels:";
  for (const auto& m : r.models) out += " " + m;
  out += "\n\n";
  auto cell = [](const std::string& s) {
    std::string c = s;
    c.append(c.size() < 21 ? 21 - c.size() : 1, ' ');
    return c;
  };
  auto label = [](const std::string& s) {
    std::string c = s;
    if (c.size() < 30) c.append(30 - c.size(), ' ');
    return c;
  };
  out += label("") + cell("classical") + cell("") + cell("req-aware") + "\n";
  out += label("") + cell(A) + cell(B) + cell(A) + cell(B) + "\n";
  auto avg = [&](Notion n, std::size_t NotionResult::*f) {
    return fmt("%.2f", average(r, n, f));
  };
  auto row = [&](const std::string& name, auto make) {
    out += label(name);
    for (Notion n : {Notion::Classical, Notion::ReqAware}) {
      out += cell(make(n, true));
      out += cell(make(n, false));
    }
    out += "\n";
  };
  row("selected tests", [&](Notion n, bool a) {
    return avg(n, a ? &NotionResult::selected_a : &NotionResult::selected_b);
  });
  row("killed / killable", [&](Notion n, bool a) {
    double k = average(r, n, a ? &NotionResult::killed_a : &NotionResult::killed_b);
    double d = average(r, n, a ? &NotionResult::killable_classical_a
                               : &NotionResult::killable_classical_b);
    return fmt("%.2f", k) + "/" + fmt("%.2f", d) + " " +
           pct(d > 0 ? std::optional<double>(k / d) : std::nullopt);
  });
  row("not killed by other's tests", [&](Notion n, bool a) {
    return avg(n, a ? &NotionResult::a_not_killed_by_b : &NotionResult::b_not_killed_by_a);
  });
  out += "\nSelected-test overlap (average counts)\n";
  for (Notion n : {Notion::Classical, Notion::ReqAware}) {
    out += label(std::string(to_string(n)));
    out += "only " + A + ": " + avg(n, &NotionResult::only_a) + "  both: " +
           avg(n, &NotionResult::both) + "  only " + B + ": " +
           avg(n, &NotionResult::only_b) + "\n";
  }
  out += "\nScores use the classically killable mutants as denominator.\n";
  return out;
}

}  // namespace slmut
