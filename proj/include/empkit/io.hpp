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

// File formats: graph JSON in and out, input digest, DOT export and the
// edge extraction used to check DOT round trips.
//
// Graph JSON: {"nodes": ["<label>", ...], "edges": [["<tail>", "<head>"], ...]}

#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <regex>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "empkit/emp.hpp"
#include "empkit/error.hpp"
#include "empkit/graph.hpp"

namespace empkit {

namespace detail {

inline std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t byte) {
  std::size_t line = 1, column = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

}  // namespace detail

/// Parses the graph JSON contract. Syntax errors carry line and column;
/// shape errors name the offending element.
inline RawGraph parse_graph_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    // `byte` is the 1-based index of the last character read.
    const auto [line, column] = detail::line_column(text, e.byte == 0 ? 0 : e.byte - 1);
    std::string what = e.what();
    if (auto pos = what.find(": "); pos != std::string::npos) what = what.substr(pos + 2);
    throw ParseError("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what);
  }
  if (!doc.is_object()) throw ParseError("graph file must hold a JSON object");
  for (const auto& [key, value] : doc.items()) {
    if (key != "nodes" && key != "edges") throw ParseError("unexpected key \"" + key + "\"");
  }
  if (!doc.contains("nodes") || !doc["nodes"].is_array()) throw ParseError("\"nodes\" must be an array");
  RawGraph raw;
  for (std::size_t i = 0; i < doc["nodes"].size(); ++i) {
    const auto& node = doc["nodes"][i];
    if (!node.is_string()) throw ParseError("nodes[" + std::to_string(i) + "] must be a string");
    raw.nodes.push_back(node.get<std::string>());
  }
  if (raw.nodes.empty()) throw ParseError("\"nodes\" is empty; at least one node is required");
  if (doc.contains("edges")) {
    if (!doc["edges"].is_array()) throw ParseError("\"edges\" must be an array");
    for (std::size_t i = 0; i < doc["edges"].size(); ++i) {
      const auto& edge = doc["edges"][i];
      if (!edge.is_array() || edge.size() != 2 || !edge[0].is_string() || !edge[1].is_string()) {
        throw ParseError("edges[" + std::to_string(i) + "] must be a [\"tail\", \"head\"] pair of strings");
      }
      raw.edges.emplace_back(edge[0].get<std::string>(), edge[1].get<std::string>());
    }
  }
  return raw;
}

inline Dag load_graph(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open graph file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return validate_dag(parse_graph_json(buffer.str()));
}

/// Canonical JSON of a validated graph: nodes in topological order, edges
/// column-major. Equal graphs give equal text.
inline std::string graph_to_json(const Dag& dag) {
  nlohmann::ordered_json doc;
  doc["nodes"] = dag.labels();
  doc["edges"] = nlohmann::ordered_json::array();
  for (const Entry& e : dag.edges()) doc["edges"].push_back({dag.label(e.col), dag.label(e.row)});
  return doc.dump();
}

/// FNV-1a 64 of the canonical JSON, as 16 hex digits.
inline std::string graph_digest(const Dag& dag) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : graph_to_json(dag)) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char out[17];
  std::snprintf(out, sizeof out, "%016llx", static_cast<unsigned long long>(h));
  return out;
}

namespace detail {

inline std::string dot_quote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

}  // namespace detail

/// DOT text. Excited nodes get a double border, measured nodes are filled.
inline std::string export_dot(const Dag& dag, const std::optional<Emp>& emp = std::nullopt) {
  if (emp) check_emp_nodes(dag, *emp);
  std::string out = "digraph network {\n  rankdir=LR;\n  node [shape=circle];\n";
  for (int v = 1; v <= dag.size(); ++v) {
    out += "  " + detail::dot_quote(dag.label(v));
    std::vector<std::string> attrs;
    if (emp && emp->is_excited(v)) attrs.push_back("peripheries=2");
    if (emp && emp->is_measured(v)) attrs.push_back("style=filled, fillcolor=lightgray");
    if (!attrs.empty()) {
      out += " [";
      for (std::size_t i = 0; i < attrs.size(); ++i) out += (i ? ", " : "") + attrs[i];
      out += "]";
    }
    out += ";\n";
  }
  for (const Entry& e : dag.edges()) {
    out += "  " + detail::dot_quote(dag.label(e.col)) + " -> " + detail::dot_quote(dag.label(e.row)) + ";\n";
  }
  return out + "}\n";
}

/// (tail, head) label pairs of every edge statement in DOT text written by
/// export_dot.
inline std::vector<std::pair<std::string, std::string>> parse_dot_edges(const std::string& dot) {
  static const std::regex edge(R"re("((?:[^"\\]|\\.)*)"\s*->\s*"((?:[^"\\]|\\.)*)")re");
  auto unquote = [](std::string s) {
    std::string out;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] == '\\' && i + 1 < s.size()) ++i;
      out += s[i];
    }
    return out;
  };
  std::vector<std::pair<std::string, std::string>> out;
  for (auto it = std::sregex_iterator(dot.begin(), dot.end(), edge); it != std::sregex_iterator(); ++it) {
    out.emplace_back(unquote((*it)[1].str()), unquote((*it)[2].str()));
  }
  return out;
}

}  // namespace empkit
