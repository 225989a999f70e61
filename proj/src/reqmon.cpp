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

#include "slmut/reqmon.hpp"

#include <algorithm>
#include <array>
#include <cctype>

#include <nlohmann/json.hpp>

namespace slmut {

namespace {

using nlohmann::json;

constexpr std::array<std::pair<CmpOp, std::string_view>, 7> kOps{{
    {CmpOp::Le, "<="},
    {CmpOp::Ge, ">="},
    {CmpOp::Eq, "=="},
    {CmpOp::Ne, "~="},
    {CmpOp::Ne, "!="},
    {CmpOp::Lt, "<"},
    {CmpOp::Gt, ">"},
}};

// Resolved predicate over trace columns.
struct Bound {
  const std::vector<double>* lhs;
  const std::vector<double>* rhs;
  double value;
  CmpOp op;

  bool at(std::size_t t) const {
    double a = (*lhs)[t];
    double b = rhs ? (*rhs)[t] : value;
    switch (op) {
      case CmpOp::Lt: return a < b;
      case CmpOp::Le: return a <= b;
      case CmpOp::Gt: return a > b;
      case CmpOp::Ge: return a >= b;
      case CmpOp::Eq: return a == b;
      case CmpOp::Ne: return a != b;
    }
    return false;
  }
};

const std::vector<double>& column(const SignalTrace& trace,
                                  const std::string& signal) {
  const auto* c = trace.find(signal);
  if (!c) throw UnknownSignal("unknown signal: " + signal);
  return *c;
}

Bound bind(const Predicate& p, const SignalTrace& trace) {
  return {&column(trace, p.signal), p.ref ? &column(trace, *p.ref) : nullptr,
          p.value, p.op};
}

bool is_signal_name(const std::string& s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.';
  });
}

Predicate predicate_from_string(const std::string& text) {
  for (const auto& [op, sym] : kOps) {
    auto pos = text.find(sym);
    if (pos == std::string::npos) continue;
    auto trim = [](std::string s) {
      s.erase(0, s.find_first_not_of(" \t"));
      s.erase(s.find_last_not_of(" \t") + 1);
      return s;
    };
    Predicate p;
    p.signal = trim(text.substr(0, pos));
    p.op = op;
    std::string rhs = trim(text.substr(pos + sym.size()));
    if (p.signal.empty() || rhs.empty())
      throw SchemaError("malformed predicate: " + text);
    if (auto v = parse_number(rhs))
      p.value = *v;
    else
      p.ref = rhs;
    if (!is_signal_name(p.signal) || (p.ref && !is_signal_name(*p.ref)))
      throw SchemaError("malformed predicate: " + text);
    return p;
  }
  throw SchemaError("predicate has no comparison operator: " + text);
}

Predicate predicate_from_json(const json& j) {
  if (j.is_string()) return predicate_from_string(j.get<std::string>());
  if (!j.is_object() || !j.contains("signal") || !j["signal"].is_string() ||
      !j.contains("op") || !j["op"].is_string())
    throw SchemaError("predicate needs signal and op");
  Predicate p;
  p.signal = j["signal"].get<std::string>();
  auto op = cmp_op_from_string(j["op"].get<std::string>());
  if (!op) throw SchemaError("unknown comparison: " + j["op"].get<std::string>());
  p.op = *op;
  if (j.contains("ref") && j["ref"].is_string()) {
    p.ref = j["ref"].get<std::string>();
  } else if (j.contains("value") && j["value"].is_number()) {
    p.value = j["value"].get<double>();
  } else {
    throw SchemaError("predicate needs a numeric value or a ref");
  }
  return p;
}

json predicate_to_json(const Predicate& p) {
  json j{{"signal", p.signal}, {"op", to_string(p.op)}};
  if (p.ref)
    j["ref"] = *p.ref;
  else
    j["value"] = p.value;
  return j;
}

}  // namespace

std::string_view to_string(CmpOp op) {
  switch (op) {
    case CmpOp::Lt: return "<";
    case CmpOp::Le: return "<=";
    case CmpOp::Gt: return ">";
    case CmpOp::Ge: return ">=";
    case CmpOp::Eq: return "==";
    case CmpOp::Ne: return "~=";
  }
  return "==";
}

std::optional<CmpOp> cmp_op_from_string(std::string_view op) {
  for (const auto& [k, sym] : kOps)
    if (sym == op) return k;
  return std::nullopt;
}

std::vector<std::string> referenced_signals(const Requirement& req) {
  std::vector<std::string> out;
  auto add = [&](const Predicate& p) {
    out.push_back(p.signal);
    if (p.ref) out.push_back(*p.ref);
  };
  if (req.pattern == PatternKind::ImpliesWithin) {
    add(req.trigger);
    add(req.response);
  } else {
    add(req.pred);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

Verdict check(const Requirement& req, const SignalTrace& trace) {
  const std::size_t n = trace.length();
  const bool aborted = trace.aborted();
  switch (req.pattern) {
    case PatternKind::Always:
    case PatternKind::Never: {
      Bound p = bind(req.pred, trace);
      const bool want = req.pattern == PatternKind::Always;
      for (std::size_t t = 0; t < n; ++t)
        if (p.at(t) != want) return Verdict::violated(t);
      return aborted ? Verdict::violated(n) : Verdict::ok();
    }
    case PatternKind::ImpliesWithin: {
      Bound trig = bind(req.trigger, trace);
      Bound resp = bind(req.response, trace);
      // Earliest open obligation's deadline; triggers are scanned in order,
      // so the first window to close unanswered is the first violation.
      constexpr std::size_t kNone = static_cast<std::size_t>(-1);
      std::size_t open_since = kNone;
      for (std::size_t t = 0; t < n; ++t) {
        if (resp.at(t)) {
          open_since = kNone;
          continue;
        }
        if (trig.at(t) && open_since == kNone) open_since = t;
        if (open_since != kNone && t >= open_since + req.deadline)
          return Verdict::violated(open_since + req.deadline);
      }
      if (open_since == kNone) return Verdict::ok();
      return aborted ? Verdict::violated(n) : Verdict::ok(true);
    }
  }
  return Verdict::ok();
}

RequirementSet requirements_from_json(std::string_view text) {
  json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded()) throw ParseError(0, "requirements file is not valid JSON");
  RequirementSet set;
  const json* reqs = &doc;
  if (doc.is_object()) {
    if (doc.contains("probes")) {
      if (!doc["probes"].is_array()) throw SchemaError("probes must be a list");
      for (const json& p : doc["probes"]) {
        if (!p.is_object() || !p.contains("name") || !p["name"].is_string() ||
            !p.contains("block") || !p["block"].is_string())
          throw SchemaError("probe needs name and block");
        Probe probe{p["name"].get<std::string>(), p["block"].get<std::string>(),
                    p.value("port", std::size_t{0})};
        set.probes.push_back(std::move(probe));
      }
    }
    if (!doc.contains("requirements")) throw SchemaError("missing requirements list");
    reqs = &doc["requirements"];
  }
  if (!reqs->is_array()) throw SchemaError("requirements must be a list");
  for (const json& r : *reqs) {
    if (!r.is_object() || !r.contains("id") || !r["id"].is_string() ||
        !r.contains("pattern") || !r["pattern"].is_string() || !r.contains("args") ||
        !r["args"].is_object())
      throw SchemaError("requirement needs id, pattern and args");
    Requirement req;
    req.id = r["id"].get<std::string>();
    const std::string pattern = r["pattern"].get<std::string>();
    const json& args = r["args"];
    auto need = [&](const char* key) -> const json& {
      if (!args.contains(key))
        throw SchemaError("requirement " + req.id + " lacks " + key);
      return args[key];
    };
    if (pattern == "always" || pattern == "never") {
      req.pattern = pattern == "always" ? PatternKind::Always : PatternKind::Never;
      req.pred = predicate_from_json(need("pred"));
    } else if (pattern == "implies_within") {
      req.pattern = PatternKind::ImpliesWithin;
      req.trigger = predicate_from_json(need("trigger"));
      req.response = predicate_from_json(need("response"));
      const json& d = need("deadline");
      if (!d.is_number_unsigned())
        throw SchemaError("requirement " + req.id + ": deadline must be a step count");
      req.deadline = d.get<std::size_t>();
    } else {
      throw SchemaError("unknown pattern: " + pattern);
    }
    set.requirements.push_back(std::move(req));
  }
  return set;
}

std::string requirements_to_json(const RequirementSet& set) {
  json probes = json::array();
  for (const Probe& p : set.probes)
    probes.push_back({{"name", p.name}, {"block", p.block}, {"port", p.port}});
  json reqs = json::array();
  for (const Requirement& r : set.requirements) {
    json args;
    std::string pattern;
    switch (r.pattern) {
      case PatternKind::Always:
      case PatternKind::Never:
        pattern = r.pattern == PatternKind::Always ? "always" : "never";
        args = {{"pred", predicate_to_json(r.pred)}};
        break;
      case PatternKind::ImpliesWithin:
        pattern = "implies_within";
        args = {{"trigger", predicate_to_json(r.trigger)},
                {"response", predicate_to_json(r.response)},
                {"deadline", r.deadline}};
        break;
    }
    reqs.push_back({{"id", r.id}, {"pattern", pattern}, {"args", args}});
  }
  return json{{"probes", probes}, {"requirements", reqs}}.dump(2) + "\n";
}

}  // namespace slmut
