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

// Excitation and measurement patterns: representation, compact text form,
// necessary conditions and cardinality bounds.

#pragma once

#include <algorithm>
#include <cctype>
#include <compare>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "empkit/error.hpp"
#include "empkit/graph.hpp"

namespace empkit {

/// Excited node set B and measured node set C (topological indices).
struct Emp {
  std::set<int> excited;
  std::set<int> measured;

  int cardinality() const { return static_cast<int>(excited.size() + measured.size()); }
  bool is_excited(int v) const { return excited.count(v) != 0; }
  bool is_measured(int v) const { return measured.count(v) != 0; }

  friend auto operator<=>(const Emp&, const Emp&) = default;
  friend bool operator==(const Emp&, const Emp&) = default;
};

/// Componentwise inclusion: every excitation and measurement of `a` is in `b`.
inline bool emp_subset(const Emp& a, const Emp& b) {
  auto inc = [](const std::set<int>& x, const std::set<int>& y) {
    return std::includes(y.begin(), y.end(), x.begin(), x.end());
  };
  return inc(a.excited, b.excited) && inc(a.measured, b.measured);
}

namespace detail {

inline std::string format_node_set(const std::set<int>& nodes, bool digits) {
  std::string out;
  if (digits) {
    for (int v : nodes) out += std::to_string(v);
    return out;
  }
  out = "[";
  bool first = true;
  for (int v : nodes) {
    if (!first) out += ",";
    out += std::to_string(v);
    first = false;
  }
  return out + "]";
}

}  // namespace detail

/// Compact text: "E125,M23467" when n <= 9, "E[1,2,5],M[2,3,4,6,7]" otherwise.
inline std::string format_emp(const Emp& emp, int n) {
  const bool digits = n <= 9;
  return "E" + detail::format_node_set(emp.excited, digits) + ",M" +
         detail::format_node_set(emp.measured, digits);
}

/// Parses the compact text form. Digit runs are accepted only when n <= 9;
/// the bracket form is always accepted. "/" may replace the comma.
inline Emp parse_emp(std::string_view text, int n) {
  std::size_t pos = 0;
  auto fail = [&](const std::string& why) -> EmpParseError {
    return EmpParseError("cannot parse EMP '" + std::string(text) + "' at position " +
                         std::to_string(pos) + ": " + why);
  };
  auto skip_space = [&] {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  };
  auto add = [&](std::set<int>& into, long value) {
    if (value < 1 || value > n) throw fail("node index " + std::to_string(value) + " out of range 1.." + std::to_string(n));
    if (!into.insert(static_cast<int>(value)).second) throw fail("node " + std::to_string(value) + " listed twice");
  };
  auto parse_set = [&](char tag, std::set<int>& into) {
    skip_space();
    if (pos >= text.size() || text[pos] != tag) throw fail(std::string("expected '") + tag + "'");
    ++pos;
    if (pos < text.size() && text[pos] == '[') {
      ++pos;
      skip_space();
      if (pos < text.size() && text[pos] == ']') {
        ++pos;
        return;
      }
      while (true) {
        skip_space();
        const std::size_t start = pos;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
        if (start == pos) throw fail("expected node index");
        if (pos - start > 9) throw fail("node index too long");
        add(into, std::stol(std::string(text.substr(start, pos - start))));
        skip_space();
        if (pos < text.size() && text[pos] == ',') {
          ++pos;
          continue;
        }
        if (pos < text.size() && text[pos] == ']') {
          ++pos;
          return;
        }
        throw fail("expected ',' or ']'");
      }
    }
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
      if (n > 9) throw fail("digit form is ambiguous for more than 9 nodes; use E[...],M[...]");
      add(into, text[pos] - '0');
      ++pos;
    }
  };

  Emp emp;
  parse_set('E', emp.excited);
  skip_space();
  if (pos >= text.size() || (text[pos] != ',' && text[pos] != '/')) throw fail("expected ',' between E and M parts");
  ++pos;
  parse_set('M', emp.measured);
  skip_space();
  if (pos != text.size()) throw fail("trailing characters");
  return emp;
}

/// Outcome of the necessary conditions; carries no validity verdict.
struct NecessityReport {
  struct Violation {
    int node = 0;
    std::string requirement;  // "must-excite", "must-measure", "must-excite-or-measure"
    std::string reason;       // "source", "sink", "dource", "dink", "uncovered"

    friend bool operator==(const Violation&, const Violation&) = default;
  };

  bool coverage_ok = true;
  bool nonempty_ok = true;
  bool sources_ok = true;
  bool sinks_ok = true;
  bool dources_ok = true;
  bool dinks_ok = true;
  std::vector<Violation> violations;

  bool passed() const {
    return coverage_ok && nonempty_ok && sources_ok && sinks_ok && dources_ok && dinks_ok;
  }
};

inline void check_emp_nodes(const Dag& dag, const Emp& emp) {
  for (const auto* set : {&emp.excited, &emp.measured}) {
    for (int v : *set) {
      if (v < 1 || v > dag.size()) {
        throw UnknownNode("EMP references node index " + std::to_string(v) +
                          " outside 1.." + std::to_string(dag.size()));
      }
    }
  }
}

inline NecessityReport check_necessary(const Dag& dag, const NodeClassification& cls, const Emp& emp) {
  check_emp_nodes(dag, emp);
  NecessityReport r;
  r.nonempty_ok = !emp.excited.empty() && !emp.measured.empty();
  for (int v = 1; v <= dag.size(); ++v) {
    const bool e = emp.is_excited(v);
    const bool m = emp.is_measured(v);
    if (!e && !m) {
      r.coverage_ok = false;
      r.violations.push_back({v, "must-excite-or-measure", "uncovered"});
    }
    if (cls.is_source(v) && !e) {
      r.sources_ok = false;
      r.violations.push_back({v, "must-excite", "source"});
    }
    if (cls.is_sink(v) && !m) {
      r.sinks_ok = false;
      r.violations.push_back({v, "must-measure", "sink"});
    }
    if (cls.is_dource(v) && !e) {
      r.dources_ok = false;
      r.violations.push_back({v, "must-excite", "dource"});
    }
    if (cls.is_dink(v) && !m) {
      r.dinks_ok = false;
      r.violations.push_back({v, "must-measure", "dink"});
    }
  }
  return r;
}

inline NecessityReport check_necessary(const Dag& dag, const Emp& emp) {
  return check_necessary(dag, classify(dag), emp);
}

/// Cardinality range of a valid EMP: lower = n, upper = 2n - f - s, plus
/// 2 per isolated node (such a node is both a source and a sink, so it must
/// be both excited and measured).
struct CardinalityBounds {
  int lower = 0;
  int upper = 0;
  int isolated = 0;
};

inline CardinalityBounds cardinality_bounds(const Dag& dag) {
  const auto cls = classify(dag);
  const int n = dag.size();
  const int f = static_cast<int>(cls.sources.size());
  const int s = static_cast<int>(cls.sinks.size());
  const int iso = static_cast<int>(cls.isolated.size());
  return {n, 2 * n - f - s + 2 * iso, iso};
}

/// The EMP attaining the upper bound: excite every node that is not a pure
/// sink, measure every node that is not a pure source.
inline Emp upper_bound_emp(const Dag& dag) {
  const auto cls = classify(dag);
  Emp emp;
  for (int v = 1; v <= dag.size(); ++v) {
    const bool source = cls.is_source(v);
    const bool sink = cls.is_sink(v);
    if (!sink || source) emp.excited.insert(v);
    if (!source || sink) emp.measured.insert(v);
  }
  return emp;
}

}  // namespace empkit
