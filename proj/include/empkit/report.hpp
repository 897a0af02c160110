// Copyright 2026 The empkit Authors.
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

// Reports for the command-line front end.
//
// Every command first builds one ordered JSON document; the table format is
// rendered from that document, so both formats carry the same facts.

#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "empkit/emp.hpp"
#include "empkit/graph.hpp"
#include "empkit/io.hpp"
#include "empkit/synthesis.hpp"
#include "empkit/verify.hpp"

namespace empkit {

using ReportJson = nlohmann::ordered_json;

enum class OutputFormat { Table, Json };

struct RunConfig {
  std::uint64_t seed = 42;
  int trials = 3;
  Strategy strategy = Strategy::ColumnLTR;
  OutputFormat format = OutputFormat::Table;
  int node_limit = 10;
  unsigned jobs = 1;  // enumeration workers; never changes results
};

struct Report {
  ReportJson doc;
  int exit_code = 0;  // 0 ok or valid, 1 invalid EMP
};

namespace detail {

inline std::string node_name(const Dag& dag, int v) {
  const std::string& label = dag.label(v);
  return label == std::to_string(v) ? label : label + "(" + std::to_string(v) + ")";
}

inline ReportJson node_names(const Dag& dag, const std::vector<int>& nodes) {
  ReportJson out = ReportJson::array();
  for (int v : nodes) out.push_back(node_name(dag, v));
  return out;
}

inline ReportJson node_names(const Dag& dag, const std::set<int>& nodes) {
  return node_names(dag, std::vector<int>(nodes.begin(), nodes.end()));
}

// "G53" for graphs with at most 9 nodes, "G[10,3]" beyond.
inline std::string compact_entry(char symbol, const Entry& e, int n) {
  if (n <= 9) return symbol + std::to_string(e.row) + std::to_string(e.col);
  return symbol + std::string("[") + std::to_string(e.row) + "," + std::to_string(e.col) + "]";
}

// Additions of one stage: "M23", "E3", "E3,M4", or "--".
inline std::string format_added(const Emp& added, int n) {
  std::string out;
  auto part = [&](char tag, const std::set<int>& nodes) {
    if (nodes.empty()) return;
    if (!out.empty()) out += ",";
    out += tag + format_node_set(nodes, n <= 9);
  };
  part('E', added.excited);
  part('M', added.measured);
  return out.empty() ? "--" : out;
}

inline ReportJson bounds_json(const Dag& dag) {
  const auto b = cardinality_bounds(dag);
  return {{"lower", b.lower}, {"upper", b.upper}, {"isolated", b.isolated}};
}

inline ReportJson emp_json(const Dag& dag, const Emp& emp) {
  return {{"text", format_emp(emp, dag.size())},
          {"excited", node_names(dag, emp.excited)},
          {"measured", node_names(dag, emp.measured)},
          {"cardinality", emp.cardinality()}};
}

inline ReportJson necessity_json(const Dag& dag, const NecessityReport& r) {
  ReportJson violations = ReportJson::array();
  for (const auto& v : r.violations) {
    violations.push_back({{"node", node_name(dag, v.node)}, {"requirement", v.requirement}, {"reason", v.reason}});
  }
  return {{"passed", r.passed()},
          {"checks",
           {{"coverage", r.coverage_ok},
            {"nonempty", r.nonempty_ok},
            {"sources", r.sources_ok},
            {"sinks", r.sinks_ok},
            {"dources", r.dources_ok},
            {"dinks", r.dinks_ok}}},
          {"violations", violations}};
}

inline ReportJson verdict_json(const Dag& dag, const OracleVerdict& v) {
  ReportJson out = {{"method", v.method_name()},
                    {"valid", v.valid},
                    {"seed", v.seed},
                    {"trials", v.trials},
                    {"redrawn", v.redrawn},
                    {"required", v.required}};
  if (v.method == OracleVerdict::Method::JacobianRank) {
    out["ranks"] = v.ranks;
  } else {
    ReportJson missing = ReportJson::array();
    for (const Entry& e : v.unrecovered) missing.push_back(compact_entry('G', e, dag.size()));
    out["unrecovered"] = missing;
  }
  return out;
}

inline ReportJson header(const std::string& name, const std::string& graph_path, const Dag& dag,
                         const RunConfig& config, const std::optional<std::string>& emp_text) {
  ReportJson command = {{"name", name}, {"graph", graph_path}};
  if (emp_text) command["emp"] = *emp_text;
  command["seed"] = config.seed;
  command["trials"] = config.trials;
  command["strategy"] = to_string(config.strategy);
  command["node_limit"] = config.node_limit;
  return {{"command", command},
          {"input", {{"digest", graph_digest(dag)}, {"nodes", dag.size()}, {"edges", dag.edge_count()}}}};
}

inline ReportJson stage_json(const Dag& dag, const StageRecord& s) {
  const int n = dag.size();
  ReportJson known_g = ReportJson::array();
  for (const auto& k : s.known_g) {
    ReportJson from = ReportJson::array();
    if (k.borrowed()) {
      for (const Entry& e : k.sources) from.push_back(compact_entry('S', e, n));
    }
    known_g.push_back({{"entry", compact_entry('G', k.entry, n)}, {"from", from}});
  }
  ReportJson known_t = ReportJson::array();
  for (const auto& k : s.known_t) {
    known_t.push_back({{"entry", compact_entry('T', k.entry, n)},
                       {"how", k.measured ? "measured" : "derived"},
                       {"in_scope", k.in_scope}});
  }
  return {{"stage", s.unit},
          {"added", format_added(s.added, n)},
          {"emp", format_emp(s.emp, n)},
          {"known_G", known_g},
          {"known_T", known_t}};
}

}  // namespace detail

inline Report classify_report(const std::string& graph_path, const Dag& dag, const RunConfig& config) {
  const auto cls = classify(dag);
  Report r;
  r.doc = detail::header("classify", graph_path, dag, config, std::nullopt);
  r.doc["classification"] = {{"sources", detail::node_names(dag, cls.sources)},
                             {"sinks", detail::node_names(dag, cls.sinks)},
                             {"internal", detail::node_names(dag, cls.internal)},
                             {"dources", detail::node_names(dag, cls.dources)},
                             {"dinks", detail::node_names(dag, cls.dinks)},
                             {"isolated", detail::node_names(dag, cls.isolated)}};
  ReportJson neighbors = ReportJson::array();
  for (int v = 1; v <= dag.size(); ++v) {
    neighbors.push_back({{"node", detail::node_name(dag, v)},
                         {"in", detail::node_names(dag, dag.in_neighbors(v))},
                         {"out", detail::node_names(dag, dag.out_neighbors(v))}});
  }
  r.doc["neighbors"] = neighbors;
  r.doc["bounds"] = detail::bounds_json(dag);
  return r;
}

inline Report synthesize_report(const std::string& graph_path, const Dag& dag, const RunConfig& config) {
  const auto result = synthesize(dag, config.strategy, {config.seed, config.trials, true});
  Report r;
  r.doc = detail::header("synthesize", graph_path, dag, config, std::nullopt);
  ReportJson trace = ReportJson::array();
  for (const auto& s : result.trace.stages) trace.push_back(detail::stage_json(dag, s));
  r.doc["synthesis"] = {{"strategy", to_string(config.strategy)}, {"trace", trace}};
  r.doc["emp"] = detail::emp_json(dag, result.emp);
  r.doc["bounds"] = detail::bounds_json(dag);
  r.doc["necessity"] = detail::necessity_json(dag, result.necessity);
  ReportJson verdicts = ReportJson::array();
  if (result.jacobian) verdicts.push_back(detail::verdict_json(dag, *result.jacobian));
  if (result.reconstruction) verdicts.push_back(detail::verdict_json(dag, *result.reconstruction));
  r.doc["verdicts"] = verdicts;
  return r;
}

/// Necessity first; the oracles run only when it passes. Exit code 0 iff
/// the Jacobian oracle accepts.
inline Report verify_report(const std::string& graph_path, const Dag& dag, const std::string& emp_text,
                            const RunConfig& config) {
  const Emp emp = parse_emp(emp_text, dag.size());
  const auto necessity = check_necessary(dag, emp);
  Report r;
  r.doc = detail::header("verify", graph_path, dag, config, emp_text);
  r.doc["emp"] = detail::emp_json(dag, emp);
  r.doc["bounds"] = detail::bounds_json(dag);
  r.doc["necessity"] = detail::necessity_json(dag, necessity);
  ReportJson verdicts = ReportJson::array();
  bool valid = false;
  if (necessity.passed()) {
    const auto jac = jacobian_oracle(dag, emp, config.trials, config.seed);
    const auto rec = reconstruction_oracle(dag, emp, config.trials, config.seed);
    verdicts.push_back(detail::verdict_json(dag, jac));
    verdicts.push_back(detail::verdict_json(dag, rec));
    valid = jac.valid;
  }
  r.doc["oracles_skipped"] = !necessity.passed();
  r.doc["verdicts"] = verdicts;
  r.doc["valid"] = valid;
  r.exit_code = valid ? 0 : 1;
  return r;
}

inline Report minimal_report(const std::string& graph_path, const Dag& dag, const RunConfig& config) {
  const auto found = enumerate_minimal(dag, {config.node_limit, config.seed, config.trials, config.jobs});
  Report r;
  r.doc = detail::header("minimal", graph_path, dag, config, std::nullopt);
  ReportJson emps = ReportJson::array();
  for (const Emp& e : found.emps) emps.push_back(format_emp(e, dag.size()));
  r.doc["minimal"] = {{"cardinality", found.cardinality},
                      {"emps", emps},
                      {"candidates", found.candidates},
                      {"tested", found.tested}};
  r.doc["bounds"] = detail::bounds_json(dag);
  return r;
}

namespace detail {

inline std::string join(const ReportJson& items, const std::string& sep, const std::string& empty = "-") {
  if (items.empty()) return empty;
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += sep;
    out += items[i].get<std::string>();
  }
  return out;
}

inline std::string aligned(const std::vector<std::vector<std::string>>& rows, const std::string& sep) {
  std::vector<std::size_t> width;
  auto length = [](const std::string& s) {
    // Display width: count UTF-8 lead bytes only.
    return static_cast<std::size_t>(std::count_if(s.begin(), s.end(), [](char c) {
      return (static_cast<unsigned char>(c) & 0xC0) != 0x80;
    }));
  };
  for (const auto& row : rows) {
    if (width.size() < row.size()) width.resize(row.size(), 0);
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], length(row[c]));
  }
  std::string out;
  for (const auto& row : rows) {
    std::string line;
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) line += sep;
      line += row[c];
      if (c + 1 < row.size()) line += std::string(width[c] - length(row[c]), ' ');
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out += line + "\n";
  }
  return out;
}

inline std::string bounds_text(const ReportJson& b) {
  return std::to_string(b["lower"].get<int>()) + ".." + std::to_string(b["upper"].get<int>());
}

inline std::string verdict_text(const ReportJson& v) {
  std::string out = v["method"].get<std::string>() + ": " + (v["valid"].get<bool>() ? "valid" : "invalid");
  std::string detail;
  if (v.contains("ranks")) {
    detail = "rank";
    for (const auto& rank : v["ranks"]) detail += " " + std::to_string(rank.get<int>());
    detail += " of " + std::to_string(v["required"].get<int>());
  } else if (!v["unrecovered"].empty()) {
    detail = "unrecovered " + join(v["unrecovered"], ", ");
  } else {
    detail = "all " + std::to_string(v["required"].get<int>()) + " edges recovered";
  }
  detail += "; " + std::to_string(v["trials"].get<int>()) + " trials, seed " +
            std::to_string(v["seed"].get<std::uint64_t>());
  if (v["redrawn"].get<bool>()) detail += ", re-drawn";
  return out + " (" + detail + ")";
}

inline std::string necessity_text(const ReportJson& n) {
  std::string out = std::string("necessary conditions: ") + (n["passed"].get<bool>() ? "passed" : "failed") + "\n";
  for (const auto& v : n["violations"]) {
    out += "  node " + v["node"].get<std::string>() + ": " + v["requirement"].get<std::string>() + " (" +
           v["reason"].get<std::string>() + ")\n";
  }
  return out;
}

inline std::string trace_text(const ReportJson& trace) {
  std::vector<std::vector<std::string>> rows = {{"stage", "added", "EMP update", "known G", "known T"}};
  for (const auto& s : trace) {
    std::string g;
    for (const auto& k : s["known_G"]) {
      if (!g.empty()) g += ", ";
      g += k["entry"].get<std::string>();
      if (!k["from"].empty()) g += " from " + join(k["from"], "+");
    }
    ReportJson listed = ReportJson::array();
    ReportJson scoped = ReportJson::array();
    for (const auto& k : s["known_T"]) (k["in_scope"].get<bool>() ? scoped : listed).push_back(k["entry"]);
    std::string t = join(listed, ", ", "--");
    if (s["stage"].get<int>() > 0 && !listed.empty()) t = "+ " + t;
    if (!scoped.empty()) t += " (in scope: " + join(scoped, ", ") + ")";
    rows.push_back({std::to_string(s["stage"].get<int>()), s["added"].get<std::string>(),
                    s["emp"].get<std::string>(), g.empty() ? "--" : g, t});
  }
  return aligned(rows, " | ");
}

}  // namespace detail

/// Human-readable rendering of a report document.
inline std::string render_table(const ReportJson& doc) {
  const auto& cmd = doc["command"];
  const std::string name = cmd["name"].get<std::string>();
  std::string out = "empkit " + name + " " + cmd["graph"].get<std::string>();
  if (cmd.contains("emp")) out += " --emp " + cmd["emp"].get<std::string>();
  out += "\n";
  out += "config: seed " + std::to_string(cmd["seed"].get<std::uint64_t>()) + ", trials " +
         std::to_string(cmd["trials"].get<int>()) + ", strategy " + cmd["strategy"].get<std::string>() +
         ", node limit " + std::to_string(cmd["node_limit"].get<int>()) + "\n";
  const auto& in = doc["input"];
  out += "graph: " + std::to_string(in["nodes"].get<int>()) + " nodes, " + std::to_string(in["edges"].get<int>()) +
         " edges, digest " + in["digest"].get<std::string>() + "\n\n";

  if (name == "classify") {
    const auto& c = doc["classification"];
    out += "sources: " + detail::join(c["sources"], " ") + " | sinks: " + detail::join(c["sinks"], " ") +
           " | dources: " + detail::join(c["dources"], " ") + " | dinks: " + detail::join(c["dinks"], " ") + "\n";
    out += "internal: " + detail::join(c["internal"], " ") + " | isolated: " + detail::join(c["isolated"], " ") + "\n";
    out += "bounds: " + detail::bounds_text(doc["bounds"]) + "\n\n";
    std::vector<std::vector<std::string>> rows = {{"node", "in-neighbours", "out-neighbours"}};
    for (const auto& n : doc["neighbors"]) {
      rows.push_back({n["node"].get<std::string>(), detail::join(n["in"], " "), detail::join(n["out"], " ")});
    }
    out += detail::aligned(rows, "  ");
    return out;
  }
  if (name == "synthesize") {
    out += "strategy: " + doc["synthesis"]["strategy"].get<std::string>() + "\n";
    if (!doc["synthesis"]["trace"].empty()) out += detail::trace_text(doc["synthesis"]["trace"]);
    out += "\n" + detail::necessity_text(doc["necessity"]);
    for (const auto& v : doc["verdicts"]) out += detail::verdict_text(v) + "\n";
    out += "EMP: " + doc["emp"]["text"].get<std::string>() + " (ν = " +
           std::to_string(doc["emp"]["cardinality"].get<int>()) + "; bounds " +
           detail::bounds_text(doc["bounds"]) + ")\n";
    return out;
  }
  if (name == "verify") {
    out += "EMP: " + doc["emp"]["text"].get<std::string>() + " (ν = " +
           std::to_string(doc["emp"]["cardinality"].get<int>()) + "; bounds " +
           detail::bounds_text(doc["bounds"]) + ")\n";
    out += detail::necessity_text(doc["necessity"]);
    if (doc["oracles_skipped"].get<bool>()) out += "oracles: skipped (necessary conditions fail)\n";
    for (const auto& v : doc["verdicts"]) out += detail::verdict_text(v) + "\n";
    out += std::string("verdict: ") + (doc["valid"].get<bool>() ? "valid" : "invalid") + "\n";
    return out;
  }
  if (name == "minimal") {
    const auto& m = doc["minimal"];
    out += "bounds: " + detail::bounds_text(doc["bounds"]) + "\n";
    out += "candidates passing necessary conditions: " + std::to_string(m["candidates"].get<std::size_t>()) +
           ", tested: " + std::to_string(m["tested"].get<std::size_t>()) + "\n";
    out += "ν* = " + std::to_string(m["cardinality"].get<int>()) + ": " + detail::join(m["emps"], "; ") + "\n";
    return out;
  }
  return out;
}

inline std::string render(const Report& report, OutputFormat format) {
  return format == OutputFormat::Json ? report.doc.dump(2) + "\n" : render_table(report.doc);
}

}  // namespace empkit
