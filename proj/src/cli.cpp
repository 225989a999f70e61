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

#include "slmut/cli.hpp"

#include <algorithm>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "slmut/ingest.hpp"
#include "slmut/masking.hpp"
#include "slmut/protocol_server.hpp"
#include "slmut/support.hpp"

namespace slmut {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path resolve(const fs::path& base, const std::string& p) {
  fs::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

ModelIR load_checked(const fs::path& path, std::ostream& err) {
  std::vector<Diagnostic> warnings;
  ModelIR m = load_model(path, &warnings);
  for (const auto& w : warnings)
    err << path.string() << ": warning: " << w.location << ": " << w.message << "\n";
  return m;
}

std::vector<ModelIR> load_all(const std::vector<std::string>& paths,
                              const fs::path& base, std::ostream& err) {
  std::vector<ModelIR> out;
  for (const auto& p : paths) out.push_back(load_checked(resolve(base, p), err));
  return out;
}

void require_valid(const ModelIR& model) {
  ValidityReport r = validate(model);
  if (r.ok) return;
  std::string msg = "model " + model.name + " is invalid:";
  for (const auto& d : r.diagnostics)
    if (d.severity == Severity::Error) msg += "\n  " + d.location + ": " + d.message;
  throw Error(msg);
}

PropertyValue value_from_report(const json& v, BlockType type, const std::string& key,
                                bool is_name) {
  if (v.is_number()) return PropertyValue::number(v.get<double>());
  if (!v.is_string()) throw SchemaError("mutant values must be numbers or strings");
  if (is_name) return PropertyValue::text(v.get<std::string>());
  return value_from_token(type, key, v.get<std::string>());
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

BoolMatrix matrix_from_csv(std::string_view text, std::vector<std::string>& tests,
                           std::vector<std::string>& mutants) {
  std::stringstream ss{std::string(text)};
  std::string line;
  if (!std::getline(ss, line)) throw ParseError(1, "empty kill matrix");
  auto header = split_csv_line(line);
  if (header.empty() || header[0] != "test")
    throw ParseError(1, "kill matrix header must start with 'test'");
  mutants.assign(header.begin() + 1, header.end());
  std::vector<std::vector<std::string>> rows;
  std::size_t lineno = 1;
  while (std::getline(ss, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto cells = split_csv_line(line);
    if (cells.size() != header.size())
      throw ParseError(lineno, "row has " + std::to_string(cells.size()) + " cells");
    rows.push_back(std::move(cells));
  }
  tests.clear();
  BoolMatrix m(rows.size(), mutants.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    tests.push_back(rows[r][0]);
    for (std::size_t c = 0; c < mutants.size(); ++c) {
      const std::string& v = rows[r][c + 1];
      if (v != "0" && v != "1") throw ParseError(r + 2, "cells must be 0 or 1");
      m.set(r, c, v == "1");
    }
  }
  return m;
}

}  // namespace

std::unique_ptr<Predictor> make_predictor(const std::string& spec,
                                          const std::vector<ModelIR>& train) {
  if (spec == "offline") {
    auto p = std::make_unique<FrequencyPredictor>();
    for (const auto& m : train) p->train(m);
    return p;
  }
  return std::make_unique<HttpPredictor>(spec);
}

MutantSet mutant_set_from_json(std::string_view text) {
  json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded() || !doc.is_object())
    throw ParseError(0, "mutant report is not a JSON object");
  try {
    MutantSet set;
    set.base_model = doc.at("base_model").get<std::string>();
    set.approach = doc.at("approach").get<std::string>();
    set.partial = doc.value("partial", false);
    const json& s = doc.at("stats");
    set.stats.generated = s.at("generated").get<std::size_t>();
    set.stats.discarded_identical = s.at("discarded_identical").get<std::size_t>();
    set.stats.discarded_duplicate = s.value("discarded_duplicate", std::size_t{0});
    set.stats.discarded_uncompilable = s.at("discarded_uncompilable").get<std::size_t>();
    for (const json& j : doc.at("mutants")) {
      Mutant m;
      m.id = j.at("id").get<std::string>();
      m.base_model = set.base_model;
      const json& site = j.at("site");
      auto type = block_type_from_string(site.at("block_type").get<std::string>());
      if (!type) throw SchemaError("unknown block type in mutant " + m.id);
      m.block_type = *type;
      m.site.block_id = site.at("block_id").get<std::string>();
      const bool is_name = site.at("kind").get<std::string>() == "name";
      m.site.kind = is_name ? SiteKind::BlockName : SiteKind::Property;
      m.site.property_key = site.at("key").get<std::string>();
      if (site.contains("span"))
        m.site.text_span = {site["span"].at(0).get<std::size_t>(),
                            site["span"].at(1).get<std::size_t>()};
      m.site.original =
          value_from_report(j.at("original"), m.block_type, m.site.property_key, is_name);
      m.replacement = value_from_report(j.at("replacement"), m.block_type,
                                        m.site.property_key, is_name);
      const json& prov = j.at("provenance");
      if (prov.at("kind").get<std::string>() == "mlm") {
        m.provenance.kind = Provenance::Kind::Mlm;
        m.provenance.rank = prov.at("rank").get<std::size_t>();
        m.provenance.score = prov.at("score").get<double>();
      } else {
        m.provenance.kind = Provenance::Kind::Operator;
        m.provenance.op = prov.at("operator").get<std::string>();
      }
      m.pattern = classify(m);
      set.mutants.push_back(std::move(m));
    }
    return set;
  } catch (const json::exception& e) {
    throw SchemaError(std::string("malformed mutant report: ") + e.what());
  }
}

KillMatrix kill_matrix_from_csv(std::string_view classical_csv,
                                std::string_view req_aware_csv) {
  KillMatrix km;
  km.classical = matrix_from_csv(classical_csv, km.tests, km.mutants);
  if (req_aware_csv.empty()) {
    km.req_aware = BoolMatrix(km.tests.size(), km.mutants.size());
  } else {
    std::vector<std::string> tests, mutants;
    km.req_aware = matrix_from_csv(req_aware_csv, tests, mutants);
    if (tests != km.tests || mutants != km.mutants)
      throw SchemaError("classical and req-aware matrices disagree on labels");
  }
  return km;
}

// ---------------------------------------------------------------------------
// Experiment

ExperimentConfig experiment_config_from_json(std::string_view text,
                                             const fs::path& base_dir) {
  json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded() || !doc.is_object())
    throw ParseError(0, "experiment config is not a JSON object");
  ExperimentConfig c;
  c.base_dir = base_dir;
  try {
    for (const json& m : doc.at("models")) {
      ExperimentModel em;
      if (m.is_string()) {
        em.model = m.get<std::string>();
      } else {
        em.model = m.at("model").get<std::string>();
        em.requirements = m.value("requirements", "");
        em.inputs = m.value("inputs", "");
      }
      c.models.push_back(std::move(em));
    }
    c.predictor = doc.value("predictor", c.predictor);
    c.train = doc.value("train", c.train);
    c.k = doc.value("k", c.k);
    c.context_window = doc.value("context_window", c.context_window);
    c.mask_names = doc.value("mask_names", c.mask_names);
    c.suite_size = doc.value("suite_size", c.suite_size);
    c.candidates_per_pick = doc.value("candidates_per_pick", c.candidates_per_pick);
    c.tolerance = doc.value("tolerance", c.tolerance);
    c.seed = doc.value("seed", c.seed);
    c.repetitions = doc.value("repetitions", c.repetitions);
  } catch (const json::exception& e) {
    throw SchemaError(std::string("malformed experiment config: ") + e.what());
  }
  if (c.models.empty()) throw SchemaError("experiment needs at least one model");
  if (c.k == 0) throw SchemaError("k must be positive");
  if (c.suite_size == 0) throw SchemaError("suite_size must be positive");
  if (c.repetitions == 0) throw SchemaError("repetitions must be positive");
  return c;
}

std::string experiment_config_to_json(const ExperimentConfig& c) {
  json models = json::array();
  for (const auto& m : c.models)
    models.push_back(
        {{"model", m.model}, {"requirements", m.requirements}, {"inputs", m.inputs}});
  json doc{{"models", models},
           {"predictor", c.predictor},
           {"train", c.train},
           {"k", c.k},
           {"context_window", c.context_window},
           {"mask_names", c.mask_names},
           {"suite_size", c.suite_size},
           {"candidates_per_pick", c.candidates_per_pick},
           {"tolerance", c.tolerance},
           {"seed", c.seed},
           {"repetitions", c.repetitions}};
  return doc.dump(2) + "\n";
}

ExperimentResult run_experiment(const ExperimentConfig& config, std::size_t jobs) {
  ExperimentResult result;
  result.config = config;
  std::ostringstream quiet;
  std::vector<ModelIR> models;
  for (const auto& m : config.models)
    models.push_back(load_checked(resolve(config.base_dir, m.model), quiet));
  for (const auto& m : models) require_valid(m);

  std::vector<ModelIR> train = config.train.empty()
                                   ? models
                                   : load_all(config.train, config.base_dir, quiet);
  auto predictor = make_predictor(config.predictor, train);

  MlmOptions mopts;
  mopts.k = config.k;
  mopts.context_window = config.context_window;
  mopts.mask_names = config.mask_names;
  mopts.jobs = jobs;

  std::vector<ModelMatrices> matrices;
  for (std::size_t i = 0; i < models.size(); ++i) {
    const ExperimentModel& em = config.models[i];
    ModelRun run;
    run.model = models[i];
    if (!em.requirements.empty())
      run.requirements =
          requirements_from_json(read_file(resolve(config.base_dir, em.requirements)));
    InputSpace space =
        em.inputs.empty()
            ? default_input_space(run.model)
            : input_space_from_json(read_file(resolve(config.base_dir, em.inputs)),
                                    run.model);
    run.suite = generate_reference_suite(space, config.suite_size,
                                         config.candidates_per_pick,
                                         mix_seed(config.seed, 1000 + i));
    run.mlm = generate_mlm(run.model, *predictor, mopts);
    run.operators = generate_operators(run.model, jobs);
    run.mlm_matrix = compute_kill_matrix(run.model, run.mlm, run.suite,
                                         run.requirements, config.tolerance, jobs);
    run.operator_matrix = compute_kill_matrix(run.model, run.operators, run.suite,
                                              run.requirements, config.tolerance, jobs);
    matrices.push_back({run.model.name, run.mlm_matrix, run.operator_matrix});
    result.runs.push_back(std::move(run));
  }
  result.report = compare_approaches(matrices, config.repetitions, config.seed);
  return result;
}

void write_experiment(const ExperimentResult& result, const fs::path& out_dir) {
  write_file(out_dir / "config.json", experiment_config_to_json(result.config));
  write_file(out_dir / "report.json", comparison_to_json(result.report));
  write_file(out_dir / "report.txt", comparison_to_text(result.report));
  for (const ModelRun& run : result.runs) {
    fs::path dir = out_dir / run.model.name;
    write_file(dir / "suite.json", suite_to_json(run.suite));
    write_file(dir / "mlm_mutants.json", mutant_set_to_json(run.mlm));
    write_file(dir / "operators_mutants.json", mutant_set_to_json(run.operators));
    for (Notion n : {Notion::Classical, Notion::ReqAware}) {
      std::string suffix = std::string(to_string(n)) + ".csv";
      write_file(dir / ("mlm_" + suffix), kill_matrix_to_csv(run.mlm_matrix, n));
      write_file(dir / ("operators_" + suffix),
                 kill_matrix_to_csv(run.operator_matrix, n));
    }
  }
}

// ---------------------------------------------------------------------------
// Command line

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Mutation testing for block-diagram models", "slmut"};
  app.require_subcommand(1);
  app.fallthrough();
  std::size_t jobs = 1;
  app.add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);

  // convert
  auto* convert = app.add_subcommand("convert", "Convert an XML or JSON model to IR JSON");
  std::string conv_in, conv_out, conv_format;
  convert->add_option("input", conv_in, "Model file")->required();
  convert->add_option("-o,--output", conv_out, "Output file (stdout if omitted)");
  convert->add_option("--format", conv_format, "Input format")
      ->check(CLI::IsMember({"xml", "json"}));

  // corpus
  auto* corpus = app.add_subcommand("corpus", "Build a masked JSONL training corpus");
  std::vector<std::string> corpus_in;
  std::string corpus_out;
  double mask_rate = 0.15;
  std::uint64_t corpus_seed = 0;
  corpus->add_option("inputs", corpus_in, "Model files or directories")->required();
  corpus->add_option("--mask-rate", mask_rate, "Fraction of maskable tokens")
      ->check(CLI::Range(0.0, 1.0));
  corpus->add_option("--seed", corpus_seed, "Sampling seed");
  corpus->add_option("-o,--output", corpus_out, "Output file (stdout if omitted)");

  // mask
  auto* maskc = app.add_subcommand("mask", "Print a masked sequence for one site");
  std::string mask_model, mask_block, mask_key, mask_token(kDefaultMaskToken);
  std::size_t mask_window = kDefaultContextWindow;
  bool mask_list = false;
  maskc->add_option("model", mask_model, "Model file")->required();
  maskc->add_option("--block", mask_block, "Block id");
  maskc->add_option("--key", mask_key, "Property key, or 'name'");
  maskc->add_option("--context-window", mask_window, "Tokens kept per side");
  maskc->add_option("--mask-token", mask_token, "Placeholder literal");
  maskc->add_flag("--list", mask_list, "List mask sites instead");

  // mutate
  auto* mutate = app.add_subcommand("mutate", "Generate mutants");
  std::string mut_model, mut_predictor = "offline", mut_mode = "both", mut_out;
  std::vector<std::string> mut_train;
  long long mut_k = 3;
  std::size_t mut_window = kDefaultContextWindow;
  bool mut_names = false;
  mutate->add_option("model", mut_model, "Model file")->required();
  mutate->add_option("--predictor", mut_predictor, "'offline' or an http:// endpoint");
  mutate->add_option("--train", mut_train, "Training models for the offline predictor");
  mutate->add_option("-k", mut_k, "Predictions kept per site");
  mutate->add_option("--mode", mut_mode, "mlm, operators or both")
      ->check(CLI::IsMember({"mlm", "operators", "both"}));
  mutate->add_option("--context-window", mut_window, "Tokens kept per side");
  mutate->add_flag("--mask-names", mut_names, "Also mask block names");
  mutate->add_option("-o,--output", mut_out, "Output directory")->required();

  // simulate
  auto* simc = app.add_subcommand("simulate", "Run a test suite and export traces");
  std::string sim_model, sim_tests, sim_reqs, sim_out;
  simc->add_option("model", sim_model, "Model file")->required();
  simc->add_option("--tests", sim_tests, "Test suite JSON")->required();
  simc->add_option("--requirements", sim_reqs, "Requirements JSON (probes, verdicts)");
  simc->add_option("-o,--output", sim_out, "Directory for per-test CSV traces");

  // kill-matrix
  auto* km = app.add_subcommand("kill-matrix", "Compute kill matrices for a mutant report");
  std::string km_model, km_mutants, km_tests, km_reqs, km_out;
  double km_tol = 1e-6;
  km->add_option("model", km_model, "Original model")->required();
  km->add_option("--mutants", km_mutants, "Mutant report JSON")->required();
  km->add_option("--tests", km_tests, "Test suite JSON")->required();
  km->add_option("--requirements", km_reqs, "Requirements JSON");
  km->add_option("--tolerance", km_tol, "Absolute output tolerance");
  km->add_option("-o,--output", km_out, "Output directory")->required();

  // select-tests
  auto* sel = app.add_subcommand("select-tests", "Greedy minimal killing subset");
  std::string sel_matrix;
  sel->add_option("matrix", sel_matrix, "Kill matrix CSV")->required();

  // experiment
  auto* exp = app.add_subcommand("experiment", "Compare predictor and operator mutants");
  std::string exp_config, exp_out, exp_predictor;
  long long exp_k = 0;
  std::size_t exp_suite = 0, exp_reps = 0, exp_window = 0, exp_cands = 0;
  std::uint64_t exp_seed = 0;
  double exp_tol = 0;
  bool exp_names = false;
  exp->add_option("--config", exp_config, "Experiment config JSON")->required();
  exp->add_option("-o,--output", exp_out, "Output directory")->required();
  auto* o_pred = exp->add_option("--predictor", exp_predictor, "Predictor override");
  auto* o_k = exp->add_option("-k", exp_k, "Predictions kept per site");
  auto* o_suite = exp->add_option("--suite-size", exp_suite, "Reference suite size");
  auto* o_reps = exp->add_option("--repetitions", exp_reps, "Selection repetitions");
  auto* o_window = exp->add_option("--context-window", exp_window, "Tokens kept per side");
  auto* o_cands = exp->add_option("--candidates-per-pick", exp_cands, "ART candidates");
  auto* o_seed = exp->add_option("--seed", exp_seed, "Seed");
  auto* o_tol = exp->add_option("--tolerance", exp_tol, "Absolute output tolerance");
  auto* o_names = exp->add_flag("--mask-names", exp_names, "Also mask block names");

  // classify
  auto* cls = app.add_subcommand("classify", "Count mutants per fault pattern");
  std::string cls_mutants;
  cls->add_option("mutants", cls_mutants, "Mutant report JSON")->required();

  // serve
  auto* serve = app.add_subcommand("serve", "Serve the offline predictor over HTTP");
  std::vector<std::string> serve_train;
  std::string serve_host = "127.0.0.1";
  int serve_port = 8080;
  serve->add_option("--train", serve_train, "Training models")->required();
  serve->add_option("--host", serve_host, "Bind address");
  serve->add_option("--port", serve_port, "Port");

  try {
    std::vector<std::string> rest(args.rbegin(), args.rend());
    if (!rest.empty()) rest.pop_back();
    app.parse(rest);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUserError;
  }

  try {
    if (convert->parsed()) {
      ModelFormat fmt = conv_format.empty() ? format_from_path(conv_in)
                        : conv_format == "xml" ? ModelFormat::Xml
                                               : ModelFormat::Json;
      std::vector<Diagnostic> warnings;
      ModelIR m = parse_model(read_file(conv_in), fmt, &warnings);
      for (const auto& w : warnings) err << "warning: " << w.location << ": " << w.message << "\n";
      std::string text = render_ir_json(m);
      if (conv_out.empty())
        out << text;
      else
        write_file(conv_out, text);
      return kExitOk;
    }

    if (corpus->parsed()) {
      std::vector<std::string> files;
      for (const auto& p : corpus_in) {
        if (fs::is_directory(p)) {
          std::vector<std::string> found;
          for (const auto& e : fs::directory_iterator(p)) {
            auto ext = e.path().extension();
            if (ext == ".json" || ext == ".xml") found.push_back(e.path().string());
          }
          std::sort(found.begin(), found.end());
          files.insert(files.end(), found.begin(), found.end());
        } else {
          files.push_back(p);
        }
      }
      auto models = load_all(files, {}, err);
      CorpusOptions opts;
      opts.mask_rate = mask_rate;
      opts.seed = corpus_seed;
      opts.jobs = jobs;
      std::string text = corpus_to_jsonl(build_corpus(models, opts));
      if (corpus_out.empty())
        out << text;
      else
        write_file(corpus_out, text);
      return kExitOk;
    }

    if (maskc->parsed()) {
      ModelIR m = load_checked(mask_model, err);
      auto sites = enumerate_sites(m, true);
      if (mask_list) {
        for (const auto& s : sites)
          out << s.block_id << "\t" << s.property_key << "\t" << s.original.canonical()
              << "\n";
        return kExitOk;
      }
      auto it = std::find_if(sites.begin(), sites.end(), [&](const MaskSite& s) {
        return s.block_id == mask_block && s.property_key == mask_key;
      });
      if (it == sites.end())
        throw UnknownSite("no maskable value at " + mask_block + "/" + mask_key);
      out << mask(m, *it, MaskOptions{mask_token, mask_window}).text << "\n";
      return kExitOk;
    }

    if (mutate->parsed()) {
      if (mut_k <= 0) throw Error("-k must be a positive integer");
      ModelIR m = load_checked(mut_model, err);
      require_valid(m);
      fs::path dir(mut_out);
      auto emit = [&](const MutantSet& set) {
        write_file(dir / (set.approach + "_mutants.json"), mutant_set_to_json(set));
        for (const auto& mu : set.mutants)
          write_file(dir / "mutants" / (mu.id + ".json"), render_ir_json(materialize(m, mu)));
        out << set.approach << ": " << set.mutants.size() << " mutants ("
            << set.stats.generated << " generated, " << set.stats.discarded_identical
            << " identical, " << set.stats.discarded_duplicate << " duplicate, "
            << set.stats.discarded_uncompilable << " uncompilable)\n";
      };
      if (mut_mode != "operators") {
        std::vector<ModelIR> train = mut_train.empty() ? std::vector<ModelIR>{m}
                                                       : load_all(mut_train, {}, err);
        auto predictor = make_predictor(mut_predictor, train);
        MlmOptions o;
        o.k = static_cast<std::size_t>(mut_k);
        o.context_window = mut_window;
        o.mask_names = mut_names;
        o.jobs = jobs;
        try {
          emit(generate_mlm(m, *predictor, o));
        } catch (const PartialMutantSet& e) {
          emit(e.partial());
          throw;
        }
      }
      if (mut_mode != "mlm") emit(generate_operators(m, jobs));
      return kExitOk;
    }

    if (simc->parsed()) {
      ModelIR m = load_checked(sim_model, err);
      require_valid(m);
      RequirementSet reqs;
      if (!sim_reqs.empty()) reqs = requirements_from_json(read_file(sim_reqs));
      auto suite = suite_from_json(read_file(sim_tests));
      Simulator sim(m, reqs.probes);
      for (const auto& tc : suite) {
        SignalTrace tr = sim.run(tc);
        if (sim_out.empty())
          out << "# " << tc.id << "\n" << trace_to_csv(tr);
        else
          write_file(fs::path(sim_out) / (tc.id + ".csv"), trace_to_csv(tr));
        if (tr.fault)
          out << tc.id << ": fault " << to_string(tr.fault->kind) << " at step "
              << tr.fault->step << " in " << tr.fault->block << "\n";
        for (const auto& r : reqs.requirements) {
          Verdict v = check(r, tr);
          out << tc.id << " " << r.id << " "
              << (v.satisfied ? "satisfied" : "violated@" + std::to_string(*v.violation_step))
              << (v.vacuous_tail ? " (vacuous tail)" : "") << "\n";
        }
      }
      return kExitOk;
    }

    if (km->parsed()) {
      ModelIR m = load_checked(km_model, err);
      require_valid(m);
      RequirementSet reqs;
      if (!km_reqs.empty()) reqs = requirements_from_json(read_file(km_reqs));
      MutantSet set = mutant_set_from_json(read_file(km_mutants));
      auto suite = suite_from_json(read_file(km_tests));
      KillMatrix matrix = compute_kill_matrix(m, set, suite, reqs, km_tol, jobs);
      for (Notion n : {Notion::Classical, Notion::ReqAware}) {
        write_file(fs::path(km_out) / (std::string(to_string(n)) + ".csv"),
                   kill_matrix_to_csv(matrix, n));
        const BoolMatrix& b = matrix.matrix(n);
        out << to_string(n) << ": " << b.count_columns_killed() << "/" << b.cols()
            << " mutants killed\n";
      }
      for (const auto& [req, test] : matrix.excluded)
        err << "warning: original violates " << req << " on " << test
            << "; pair excluded from req-aware killing\n";
      return kExitOk;
    }

    if (sel->parsed()) {
      KillMatrix matrix = kill_matrix_from_csv(read_file(sel_matrix));
      auto picked = select_minimal_tests(matrix.classical);
      for (std::size_t r : picked) out << matrix.tests[r] << "\n";
      err << picked.size() << " tests kill " << matrix.classical.count_columns_killed()
          << " of " << matrix.mutants.size() << " mutants\n";
      return kExitOk;
    }

    if (exp->parsed()) {
      fs::path cfg_path(exp_config);
      ExperimentConfig c =
          experiment_config_from_json(read_file(cfg_path), cfg_path.parent_path());
      if (o_pred->count()) c.predictor = exp_predictor;
      if (o_k->count()) {
        if (exp_k <= 0) throw Error("-k must be a positive integer");
        c.k = static_cast<std::size_t>(exp_k);
      }
      if (o_suite->count()) c.suite_size = exp_suite;
      if (o_reps->count()) c.repetitions = exp_reps;
      if (o_window->count()) c.context_window = exp_window;
      if (o_cands->count()) c.candidates_per_pick = exp_cands;
      if (o_seed->count()) c.seed = exp_seed;
      if (o_tol->count()) c.tolerance = exp_tol;
      if (o_names->count()) c.mask_names = exp_names;
      if (c.suite_size == 0 || c.repetitions == 0)
        throw Error("suite size and repetitions must be positive");
      ExperimentResult r = run_experiment(c, jobs);
      write_experiment(r, exp_out);
      out << comparison_to_text(r.report);
      return kExitOk;
    }

    if (cls->parsed()) {
      MutantSet set = mutant_set_from_json(read_file(cls_mutants));
      std::map<Pattern, std::size_t> counts;
      for (const auto& m : set.mutants) ++counts[classify(m)];
      for (Pattern p : known_patterns())
        out << pattern_key(p) << "\t" << counts[p] << "\n";
      out << pattern_key(Pattern::Unclassified) << "\t" << counts[Pattern::Unclassified]
          << "\n";
      return kExitOk;
    }

    if (serve->parsed()) {
      auto models = load_all(serve_train, {}, err);
      FrequencyPredictor predictor;
      for (const auto& m : models) predictor.train(m);
      ProtocolServer server(&predictor);
      err << "serving on " << serve_host << ":" << serve_port << "\n";
      server.listen(serve_host, serve_port);
      return kExitOk;
    }
  } catch (const PredictorUnavailable& e) {
    err << "error: predictor unavailable: " << e.what() << "\n";
    return kExitEnvironment;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUserError;
  }
  return kExitUserError;
}

}  // namespace slmut
