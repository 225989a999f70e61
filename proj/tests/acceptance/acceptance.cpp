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

// Acceptance checks. One PASS/FAIL line per criterion; exit status 1 if any
// criterion fails.

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "slmut/cli.hpp"
#include "slmut/harness.hpp"
#include "slmut/ingest.hpp"
#include "slmut/masking.hpp"
#include "slmut/mutgen.hpp"
#include "slmut/predictor.hpp"
#include "slmut/sim.hpp"
#include "slmut/support.hpp"

namespace {

using namespace slmut;
namespace fs = std::filesystem;
using nlohmann::json;

const std::string kFixtures = SLMUT_FIXTURES;
const std::string kBench = kFixtures + "/bench";
const std::vector<std::string> kBenchModels{"two_tank", "integrator", "autopilot"};

struct Outcome {
  bool pass = false;
  std::string detail;
};

ModelIR bench(const std::string& name) { return load_model(kBench + "/" + name + ".json"); }

std::vector<ModelIR> bench_models() {
  std::vector<ModelIR> out;
  for (const auto& n : kBenchModels) out.push_back(bench(n));
  return out;
}

fs::path scratch(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("slmut_acceptance_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

int cli(std::vector<std::string> args, std::string* out = nullptr) {
  args.insert(args.begin(), "slmut");
  std::ostringstream o, e;
  int code = run_cli(args, o, e);
  if (out) *out = o.str();
  if (code != 0) std::cerr << e.str();
  return code;
}

std::string mismatch(const std::string& what) { return "mismatch: " + what; }

// ---------------------------------------------------------------------------
// 1. Round-trip integrity

std::string random_text(std::mt19937_64& rng) {
  static const std::vector<std::string> pieces{
      "a", "Z", "_", "0", "9", " ", "\"", "\\", "/", "\n", "\t", "\xc3\xbc", "<", "{", "x y", "SL_Input"};
  std::string s;
  std::size_t n = 1 + rng() % 6;
  for (std::size_t i = 0; i < n; ++i) s += pieces[rng() % pieces.size()];
  return s;
}

double random_number(std::mt19937_64& rng) {
  switch (rng() % 6) {
    case 0: return static_cast<double>(static_cast<int>(rng() % 2001) - 1000);
    case 1: return std::uniform_real_distribution<double>(-1e3, 1e3)(rng);
    case 2: return std::ldexp(std::uniform_real_distribution<double>(0.5, 1)(rng),
                              static_cast<int>(rng() % 200) - 100);
    case 3: return 0.1 * static_cast<double>(rng() % 50);
    case 4: return -0.0;
    default: return 1e21;
  }
}

std::string random_pattern(std::mt19937_64& rng, char a, char b) {
  std::string s(1 + rng() % 4, a);
  for (char& c : s) c = rng() % 2 ? a : b;
  return s;
}

ModelIR random_model(std::mt19937_64& rng, std::size_t index) {
  ModelIR m;
  m.name = "random_" + std::to_string(index);
  const double steps[] = {1.0, 0.1, 0.01, 0.5, 2.0};
  m.sample_time = steps[rng() % 5];
  const auto types = all_block_types();
  std::size_t n = rng() % 16;
  std::vector<std::size_t> ids(n);
  for (std::size_t i = 0; i < n; ++i) ids[i] = i + 1;
  std::shuffle(ids.begin(), ids.end(), rng);
  for (std::size_t i = 0; i < n; ++i) {
    Block b;
    b.id = std::to_string(ids[i]);
    b.name = random_text(rng);
    b.type = types[rng() % types.size()];
    for (const PropertySpec& spec : property_specs(b.type)) {
      if (!spec.required && rng() % 2) continue;
      const std::string key(spec.key);
      if (spec.kind == ValueKind::Number) {
        b.set(key, PropertyValue::number(random_number(rng)));
      } else if (spec.kind == ValueKind::Text) {
        b.set(key, PropertyValue::text(random_text(rng)));
      } else if (auto vocab = enum_vocabulary(b.type, key); !vocab.empty()) {
        b.set(key, PropertyValue::enumeration(std::string(vocab[rng() % vocab.size()])));
      } else if (key == "Signs") {
        b.set(key, PropertyValue::enumeration(random_pattern(rng, '+', '-')));
      } else {
        b.set(key, PropertyValue::enumeration(random_pattern(rng, '*', '/')));
      }
    }
    if (b.type == BlockType::StateflowStub) {
      const char* keys[] = {"Condition", "Action1", "Keyword", "Variable2"};
      for (const char* k : keys)
        if (rng() % 2) b.set(k, PropertyValue::text(random_text(rng)));
    }
    m.blocks.push_back(std::move(b));
  }
  std::set<std::pair<std::string, std::size_t>> used;
  std::size_t wires = n ? rng() % (2 * n + 1) : 0;
  for (std::size_t w = 0; w < wires; ++w) {
    const Block& src = m.blocks[rng() % n];
    const Block& dst = m.blocks[rng() % n];
    std::size_t port = rng() % 3;
    if (!used.emplace(dst.id, port).second) continue;
    m.connections.push_back({src.id, 0, dst.id, port});
  }
  return m;
}

Outcome round_trip() {
  std::mt19937_64 rng(2026);
  std::size_t blocks = 0;
  for (std::size_t i = 0; i < 50; ++i) {
    ModelIR m = random_model(rng, i);
    blocks += m.blocks.size();
    const std::string ir = render_ir_json(m);
    const std::string text = render_text(m);
    if (render_ir_json(m) != ir || render_text(m) != text)
      return {false, mismatch("repeated render of " + m.name)};
    ModelIR back = parse_model(ir, ModelFormat::Json);
    if (!same_content(m, back)) return {false, mismatch("parse(render) of " + m.name)};
    if (render_ir_json(back) != ir || render_text(back) != text)
      return {false, mismatch("render after parse of " + m.name)};
  }
  return {true, "50 models, " + std::to_string(blocks) + " blocks"};
}

// ---------------------------------------------------------------------------
// 2. Simulator oracles

TestCase single_input(const std::string& inport, SignalGenerator g, std::size_t steps) {
  TestCase tc;
  tc.id = "oracle";
  tc.duration_steps = steps;
  tc.inputs[inport] = std::move(g);
  return tc;
}

Outcome sim_oracles() {
  constexpr std::size_t kSteps = 100;
  constexpr double kTol = 1e-12;
  double worst = 0.0;
  auto track = [&](double got, double want) { worst = std::max(worst, std::abs(got - want)); };

  // y = 0.7 * (-1.3 * (c + u)), c = 2.5, u ramp with slope 0.25
  ModelIR chain = parse_model(R"({"name": "chain", "blocks": [
    {"id": "1", "name": "u", "type": "Inport"},
    {"id": "2", "name": "c", "type": "Constant", "properties": {"Value": 2.5}},
    {"id": "3", "name": "s", "type": "Sum", "properties": {"Signs": "++"}},
    {"id": "4", "name": "g1", "type": "Gain", "properties": {"Gain": -1.3}},
    {"id": "5", "name": "g2", "type": "Gain", "properties": {"Gain": 0.7}},
    {"id": "6", "name": "y", "type": "Outport"}],
    "connections": [{"src": "2", "src_port": 0, "dst": "3", "dst_port": 0},
                    {"src": "1", "src_port": 0, "dst": "3", "dst_port": 1},
                    {"src": "3", "src_port": 0, "dst": "4", "dst_port": 0},
                    {"src": "4", "src_port": 0, "dst": "5", "dst_port": 0},
                    {"src": "5", "src_port": 0, "dst": "6", "dst_port": 0}]})",
                              ModelFormat::Json);
  SignalTrace tr = simulate(chain, single_input("1", SignalGenerator::ramp(0.25), kSteps));
  for (std::size_t t = 0; t < kSteps; ++t)
    track((*tr.find("y"))[t], 0.7 * (-1.3 * (2.5 + 0.25 * static_cast<double>(t))));

  // x[0] = 1, x[t+1] = x[t] + 0.1 * u[t], u a step from 0.5 to -2 at t = 30
  ModelIR euler = parse_model(R"({"name": "euler", "sample_time": 0.1, "blocks": [
    {"id": "1", "name": "u", "type": "Inport"},
    {"id": "2", "name": "x", "type": "DiscreteIntegrator", "properties": {"InitialCondition": 1}},
    {"id": "3", "name": "y", "type": "Outport"}],
    "connections": [{"src": "1", "src_port": 0, "dst": "2", "dst_port": 0},
                    {"src": "2", "src_port": 0, "dst": "3", "dst_port": 0}]})",
                              ModelFormat::Json);
  tr = simulate(euler, single_input("1", SignalGenerator::step(30, 0.5, -2.0), kSteps));
  double x = 1.0;
  for (std::size_t t = 0; t < kSteps; ++t) {
    track((*tr.find("y"))[t], x);
    x += 0.1 * (t < 30 ? 0.5 : -2.0);
  }

  // y[t] = u[t - 3], initial conditions 4, 5, 6 from the last delay back
  ModelIR delays = parse_model(R"({"name": "delays", "blocks": [
    {"id": "1", "name": "u", "type": "Inport"},
    {"id": "2", "name": "d1", "type": "UnitDelay", "properties": {"InitialCondition": 6}},
    {"id": "3", "name": "d2", "type": "UnitDelay", "properties": {"InitialCondition": 5}},
    {"id": "4", "name": "d3", "type": "UnitDelay", "properties": {"InitialCondition": 4}},
    {"id": "5", "name": "y", "type": "Outport"}],
    "connections": [{"src": "1", "src_port": 0, "dst": "2", "dst_port": 0},
                    {"src": "2", "src_port": 0, "dst": "3", "dst_port": 0},
                    {"src": "3", "src_port": 0, "dst": "4", "dst_port": 0},
                    {"src": "4", "src_port": 0, "dst": "5", "dst_port": 0}]})",
                               ModelFormat::Json);
  tr = simulate(delays, single_input("1", SignalGenerator::ramp(1.0), kSteps));
  const double head[] = {4, 5, 6};
  for (std::size_t t = 0; t < kSteps; ++t)
    track((*tr.find("y"))[t], t < 3 ? head[t] : static_cast<double>(t - 3));

  std::ostringstream d;
  d << "3 models x " << kSteps << " steps, max error " << worst;
  return {worst <= kTol, d.str()};
}

// ---------------------------------------------------------------------------
// 3. Goto/From tag swaps end to end

bool column_has_kill(const KillMatrix& km, const BoolMatrix& m, const std::string& id) {
  auto it = std::find(km.mutants.begin(), km.mutants.end(), id);
  if (it == km.mutants.end()) return false;
  std::size_t c = static_cast<std::size_t>(it - km.mutants.begin());
  for (std::size_t r = 0; r < m.rows(); ++r)
    if (m.at(r, c)) return true;
  return false;
}

Outcome tag_swaps() {
  const fs::path dir = scratch("tag_swaps");
  const std::string model = kBench + "/two_tank.json";
  std::vector<std::string> args{"mutate", model, "--mode", "mlm", "-o", (dir / "mutate").string()};
  for (const auto& n : kBenchModels) {
    args.push_back("--train");
    args.push_back(kBench + "/" + n + ".json");
  }
  if (cli(args) != 0) return {false, "mutate failed"};
  MutantSet direct = mutant_set_from_json(read_file(dir / "mutate" / "mlm_mutants.json"));

  auto swaps_of = [](const MutantSet& set) {
    std::map<std::pair<std::string, std::string>, std::string> out;
    for (const Mutant& m : set.mutants)
      if (m.block_type == BlockType::From && m.site.property_key == "GotoTag")
        out[{m.site.original.as_string(), m.replacement.as_string()}] = m.id;
    return out;
  };
  const std::pair<std::string, std::string> sl_sh{"SL_Input", "SH_Input"};
  const std::pair<std::string, std::string> sh_sl{"SH_Input", "SL_Input"};
  if (!swaps_of(direct).count(sl_sh)) return {false, "mutate: no SL_Input -> SH_Input mutant"};

  if (cli({"experiment", "--config", kBench + "/bench.json", "-o", (dir / "exp").string()}) != 0)
    return {false, "experiment failed"};
  const fs::path run = dir / "exp" / "two_tank";
  MutantSet set = mutant_set_from_json(read_file(run / "mlm_mutants.json"));
  KillMatrix km = kill_matrix_from_csv(read_file(run / "mlm_classical.csv"),
                                       read_file(run / "mlm_req_aware.csv"));
  auto swaps = swaps_of(set);
  std::ostringstream d;
  bool pass = swaps.count(sl_sh) && swaps.count(sh_sl);
  std::size_t both = 0;
  for (const auto& [pair, id] : swaps) {
    bool c = column_has_kill(km, km.classical, id);
    bool r = column_has_kill(km, km.req_aware, id);
    both += c && r;
    d << pair.first << "->" << pair.second << " (" << id << ") classical=" << c
      << " req_aware=" << r << "; ";
    if ((pair == sl_sh || pair == sh_sl) && !(c && r)) pass = false;
  }
  d << both << "/" << swaps.size() << " tag swaps killed under both notions";
  return {pass, d.str()};
}

// ---------------------------------------------------------------------------
// 4. Kill-notion subset law

ExperimentConfig bench_config() {
  return experiment_config_from_json(read_file(kBench + "/bench.json"), kBench);
}

std::size_t jobs() { return std::max(1u, std::thread::hardware_concurrency()); }

Outcome subset_law() {
  ExperimentConfig cfg = bench_config();
  ExperimentResult res = run_experiment(cfg, jobs());
  std::size_t mutants = 0, req_cells = 0, classical_only = 0, violations = 0;
  for (const ModelRun& run : res.runs) {
    if (run.suite.size() != 50) return {false, "suite of " + std::to_string(run.suite.size())};
    for (const KillMatrix* km : {&run.mlm_matrix, &run.operator_matrix}) {
      mutants += km->mutants.size();
      for (std::size_t t = 0; t < km->tests.size(); ++t)
        for (std::size_t j = 0; j < km->mutants.size(); ++j) {
          bool c = km->classical.at(t, j), r = km->req_aware.at(t, j);
          req_cells += r;
          violations += r && !c;
          classical_only += c && !r;
        }
    }
  }
  std::ostringstream d;
  d << mutants << " mutants, " << res.runs.size() << " models, 50 tests; " << req_cells
    << " req-aware cells, " << violations << " outside classical, " << classical_only
    << " classical-only";
  return {mutants >= 100 && res.runs.size() >= 3 && violations == 0 && classical_only > 0, d.str()};
}

// ---------------------------------------------------------------------------
// 5. Set-cover oracle

std::vector<bool> cover(const BoolMatrix& m, std::uint32_t rows) {
  std::vector<bool> out(m.cols(), false);
  for (std::size_t r = 0; r < m.rows(); ++r)
    if (rows & (1u << r))
      for (std::size_t c = 0; c < m.cols(); ++c) out[c] = out[c] || m.at(r, c);
  return out;
}

Outcome set_cover() {
  std::mt19937_64 rng(77);
  std::size_t greedy_total = 0, optimum_total = 0, strictly_larger = 0;
  for (int i = 0; i < 200; ++i) {
    std::size_t rows = 1 + rng() % 12, cols = 1 + rng() % 20;
    double density = std::uniform_real_distribution<double>(0.05, 0.6)(rng);
    BoolMatrix m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t c = 0; c < cols; ++c)
        m.set(r, c, std::uniform_real_distribution<double>(0, 1)(rng) < density);
    const std::vector<bool> killable = m.any_per_column();

    std::uint32_t picked = 0;
    auto order = select_minimal_tests(m);
    for (std::size_t r : order) picked |= 1u << r;
    if (cover(m, picked) != killable)
      return {false, "matrix " + std::to_string(i) + ": greedy misses a killable mutant"};

    std::size_t best = rows + 1;
    for (std::uint32_t s = 0; s < (1u << rows); ++s) {
      std::size_t size = std::popcount(s);
      if (size < best && cover(m, s) == killable) best = size;
    }
    if (order.size() < best)
      return {false, "matrix " + std::to_string(i) + ": greedy below optimum"};
    greedy_total += order.size();
    optimum_total += best;
    strictly_larger += order.size() > best;
  }
  std::ostringstream d;
  d << "200 matrices, greedy " << greedy_total << " tests vs optimum " << optimum_total
    << ", greedy larger on " << strictly_larger;
  return {true, d.str()};
}

// ---------------------------------------------------------------------------
// 6. Pattern coverage

FrequencyPredictor bench_predictor() {
  FrequencyPredictor p;
  for (const auto& m : bench_models()) p.train(m);
  return p;
}

Outcome pattern_coverage() {
  std::map<Pattern, std::size_t> seeded;
  for (const ModelIR& m : bench_models())
    for (const Mutant& x : generate_operators(m).mutants)
      if (classify(x) == x.pattern) ++seeded[x.pattern];
  std::vector<std::string> missing;
  for (Pattern p : known_patterns())
    if (!seeded.count(p)) missing.emplace_back(pattern_key(p));

  FrequencyPredictor predictor = bench_predictor();
  std::set<Pattern> mlm;
  std::size_t unclassified = 0, total = 0;
  for (const ModelIR& m : bench_models())
    for (const Mutant& x : generate_mlm(m, predictor).mutants) {
      ++total;
      if (x.pattern == Pattern::Unclassified)
        ++unclassified;
      else
        mlm.insert(x.pattern);
    }
  std::ostringstream d;
  d << "seeded " << (10 - missing.size()) << "/10";
  for (const auto& k : missing) d << " missing " << k;
  d << "; mlm " << mlm.size() << "/10 patterns over " << total << " mutants, " << unclassified
    << " unclassified";
  return {missing.empty() && mlm.size() >= 6 && unclassified == 0, d.str()};
}

// ---------------------------------------------------------------------------
// 7. Mutant validity

Outcome validity() {
  FrequencyPredictor predictor = bench_predictor();
  std::size_t checked = 0;
  for (const ModelIR& m : bench_models()) {
    const std::string base = render_text(m);
    for (const MutantSet& set : {generate_mlm(m, predictor), generate_operators(m)}) {
      const MutantStats& s = set.stats;
      if (s.generated != set.mutants.size() + s.discarded_identical + s.discarded_duplicate +
                             s.discarded_uncompilable)
        return {false, m.name + "/" + set.approach + ": stats do not add up"};
      json report = json::parse(mutant_set_to_json(set));
      const json& frac = report["stats"]["compilable_fraction"];
      const std::size_t denom = s.generated - s.discarded_identical;
      if (denom == 0 ? frac != "n/a"
                     : std::abs(frac.get<double>() - double(set.mutants.size()) / double(denom)) >
                           1e-12)
        return {false, m.name + "/" + set.approach + ": reported compilable fraction"};
      for (const Mutant& x : set.mutants) {
        ModelIR mutated = materialize(m, x);
        if (!validate(mutated).ok || !compile_check(mutated).ok)
          return {false, x.id + " does not compile"};
        if (count_token_differences(base, render_text(mutated)) != 1 ||
            mutated.connections != m.connections)
          return {false, x.id + " is not a single-value change"};
        ++checked;
      }
    }
  }
  return {true, std::to_string(checked) + " mutants compile and differ in one value"};
}

// ---------------------------------------------------------------------------
// 8. Determinism under parallelism

std::map<std::string, std::string> tree(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root))
    if (e.is_regular_file()) out[fs::relative(e.path(), root).string()] = read_file(e.path());
  return out;
}

Outcome determinism() {
  const fs::path dir = scratch("determinism");
  const std::string cfg = kBench + "/bench.json";
  if (cli({"--jobs", "1", "experiment", "--config", cfg, "-o", (dir / "j1").string()}) != 0 ||
      cli({"--jobs", "8", "experiment", "--config", cfg, "-o", (dir / "j8").string()}) != 0)
    return {false, "experiment failed"};
  auto a = tree(dir / "j1");
  auto b = tree(dir / "j8");
  if (a.size() != b.size()) return {false, "different file sets"};
  for (const auto& [name, content] : a) {
    auto it = b.find(name);
    if (it == b.end() || it->second != content) return {false, name + " differs"};
  }
  return {true, std::to_string(a.size()) + " files byte-identical for --jobs 1 and 8"};
}

// ---------------------------------------------------------------------------
// 9. ART spread

Outcome art_spread() {
  constexpr std::size_t kSize = 50, kCandidates = 10;
  std::ostringstream d;
  bool pass = true;
  for (std::size_t dim : {1u, 3u}) {
    double art = 0, rnd = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      art += min_pairwise_distance(art_points(dim, kSize, kCandidates, seed));
      rnd += min_pairwise_distance(random_points(dim, kSize, seed));
    }
    art /= 20;
    rnd /= 20;
    pass = pass && art > rnd;
    d << dim << "-D art " << art << " vs random " << rnd << "; ";
  }
  d << "20 seeds, " << kSize << " points";
  return {pass, d.str()};
}

struct Criterion {
  int number;
  const char* name;
  double limit_seconds;  // 0: no limit
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "round-trip integrity", 5, round_trip},
      {2, "simulator oracle equivalence", 1, sim_oracles},
      {3, "goto/from tag swaps end to end", 30, tag_swaps},
      {4, "kill-notion subset law", 0, subset_law},
      {5, "set-cover oracle", 60, set_cover},
      {6, "pattern coverage", 0, pattern_coverage},
      {7, "mutant validity", 0, validity},
      {8, "determinism under parallelism", 0, determinism},
      {9, "ART spread", 10, art_spread},
  };
  int failed = 0;
  for (const Criterion& c : criteria) {
    auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.limit_seconds > 0 && secs > c.limit_seconds) {
      o.pass = false;
      o.detail += "; over the " + format_number(c.limit_seconds) + " s limit";
    }
    failed += !o.pass;
    std::printf("criterion %d %s: %s (%s; %.2f s)\n", c.number, c.name, o.pass ? "PASS" : "FAIL",
                o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria pass\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed ? 1 : 0;
}
