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

// DAG representation, validation, topological relabeling and structural
// node classification.
//
// Nodes carry user-facing string labels and dense 1-based indices. After
// validation the indices are a topological order, so every edge j -> l has
// j < l and the network matrix G is strictly lower triangular: edge j -> l
// is the entry G(l, j).

#pragma once

#include <algorithm>
#include <cctype>
#include <compare>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "empkit/error.hpp"

namespace empkit {

/// Matrix position (row, col), 1-based. For G, (l, j) is the edge j -> l.
struct Entry {
  int row = 0;
  int col = 0;

  friend auto operator<=>(const Entry&, const Entry&) = default;
  friend bool operator==(const Entry&, const Entry&) = default;
};

/// Graph as read from a file: labels plus (tail, head) label pairs.
struct RawGraph {
  std::vector<std::string> nodes;
  std::vector<std::pair<std::string, std::string>> edges;
};

/// Label order used to break ties in the topological sort: labels that are
/// plain non-negative integers compare numerically and precede all others;
/// the rest compare lexicographically.
inline bool natural_label_less(std::string_view a, std::string_view b) {
  auto numeric = [](std::string_view s) {
    return !s.empty() && s.size() < 19 &&
           std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); });
  };
  const bool na = numeric(a);
  const bool nb = numeric(b);
  if (na != nb) return na;
  if (na) {
    const auto va = std::stoll(std::string(a));
    const auto vb = std::stoll(std::string(b));
    if (va != vb) return va < vb;
  }
  return a < b;
}

class Dag;
Dag validate_dag(const RawGraph& raw);

/// Validated, topologically indexed directed acyclic graph.
class Dag {
 public:
  int size() const { return n_; }
  int edge_count() const { return static_cast<int>(edges_.size()); }

  const std::string& label(int index) const { return labels_.at(index - 1); }
  const std::vector<std::string>& labels() const { return labels_; }

  std::optional<int> index_of(std::string_view label) const {
    auto it = index_.find(std::string(label));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  /// Edges as G entries (head, tail), sorted column-major: by tail, then head.
  const std::vector<Entry>& edges() const { return edges_; }

  /// True iff j -> l is an edge, i.e. G(l, j) is structurally nonzero.
  bool has_edge(int l, int j) const { return edge_id(l, j) >= 0; }

  /// Position of G(l, j) in edges(), or -1 for a structural zero.
  int edge_id(int l, int j) const {
    if (l < 1 || j < 1 || l > n_ || j > n_) return -1;
    return edge_ids_[static_cast<std::size_t>((l - 1) * n_ + (j - 1))];
  }

  /// In-neighbours of v in increasing index order.
  const std::vector<int>& in_neighbors(int v) const { return in_.at(v - 1); }
  const std::vector<int>& out_neighbors(int v) const { return out_.at(v - 1); }

  /// True iff a directed path from -> to exists (including from == to).
  /// Equivalently, T(to, from) is not structurally zero.
  bool reaches(int from, int to) const {
    return reach_[static_cast<std::size_t>((from - 1) * n_ + (to - 1))] != 0;
  }

  /// Back-conversion to the file-level representation.
  RawGraph raw() const {
    RawGraph g;
    g.nodes = labels_;
    for (const Entry& e : edges_) g.edges.emplace_back(label(e.col), label(e.row));
    return g;
  }

 private:
  friend Dag validate_dag(const RawGraph& raw);

  Dag(std::vector<std::string> labels, const std::vector<std::pair<int, int>>& arcs)
      : n_(static_cast<int>(labels.size())), labels_(std::move(labels)) {
    for (int i = 0; i < n_; ++i) index_.emplace(labels_[static_cast<std::size_t>(i)], i + 1);
    edge_ids_.assign(static_cast<std::size_t>(n_ * n_), -1);
    in_.resize(static_cast<std::size_t>(n_));
    out_.resize(static_cast<std::size_t>(n_));
    for (auto [tail, head] : arcs) edges_.push_back(Entry{head, tail});
    std::sort(edges_.begin(), edges_.end(), [](const Entry& a, const Entry& b) {
      return std::pair(a.col, a.row) < std::pair(b.col, b.row);
    });
    for (std::size_t k = 0; k < edges_.size(); ++k) {
      const Entry& e = edges_[k];
      edge_ids_[static_cast<std::size_t>((e.row - 1) * n_ + (e.col - 1))] = static_cast<int>(k);
      out_[static_cast<std::size_t>(e.col - 1)].push_back(e.row);
      in_[static_cast<std::size_t>(e.row - 1)].push_back(e.col);
    }
    for (auto& v : in_) std::sort(v.begin(), v.end());
    for (auto& v : out_) std::sort(v.begin(), v.end());
    // Indices are topological, so reachability fills from the highest node down.
    reach_.assign(static_cast<std::size_t>(n_ * n_), 0);
    for (int v = n_; v >= 1; --v) {
      auto row = reach_.begin() + (v - 1) * n_;
      row[v - 1] = 1;
      for (int w : out_[static_cast<std::size_t>(v - 1)]) {
        auto other = reach_.begin() + (w - 1) * n_;
        for (int k = 0; k < n_; ++k) row[k] = static_cast<char>(row[k] | other[k]);
      }
    }
  }

  int n_ = 0;
  std::vector<std::string> labels_;
  std::map<std::string, int> index_;
  std::vector<Entry> edges_;
  std::vector<int> edge_ids_;
  std::vector<std::vector<int>> in_;
  std::vector<std::vector<int>> out_;
  std::vector<char> reach_;
};

namespace detail {

// One directed cycle among `remaining` nodes (all of which have nonzero
// residual in-degree after Kahn's algorithm stalls).
inline std::vector<int> find_cycle(const std::vector<std::vector<int>>& out,
                                   const std::vector<char>& remaining) {
  const auto n = out.size();
  std::vector<int> state(n, 0);  // 0 new, 1 on stack, 2 done
  std::vector<int> stack;
  std::vector<int> cycle;
  auto dfs = [&](auto&& self, int v) -> bool {
    state[static_cast<std::size_t>(v)] = 1;
    stack.push_back(v);
    for (int w : out[static_cast<std::size_t>(v)]) {
      if (!remaining[static_cast<std::size_t>(w)]) continue;
      if (state[static_cast<std::size_t>(w)] == 1) {
        auto it = std::find(stack.begin(), stack.end(), w);
        cycle.assign(it, stack.end());
        cycle.push_back(w);
        return true;
      }
      if (state[static_cast<std::size_t>(w)] == 0 && self(self, w)) return true;
    }
    stack.pop_back();
    state[static_cast<std::size_t>(v)] = 2;
    return false;
  };
  for (std::size_t v = 0; v < n; ++v) {
    if (remaining[v] && state[v] == 0 && dfs(dfs, static_cast<int>(v))) break;
  }
  return cycle;
}

}  // namespace detail

/// Validates a raw graph and assigns topological indices (Kahn's algorithm,
/// smallest label first among ready nodes).
inline Dag validate_dag(const RawGraph& raw) {
  const auto n = raw.nodes.size();
  if (n == 0) throw InvalidGraph("graph has no nodes");
  std::map<std::string, int> position;
  for (std::size_t i = 0; i < n; ++i) {
    if (!position.emplace(raw.nodes[i], static_cast<int>(i)).second) {
      throw InvalidGraph("duplicate node label '" + raw.nodes[i] + "'");
    }
  }
  std::vector<std::vector<int>> out(n);
  std::vector<int> indegree(n, 0);
  std::set<std::pair<int, int>> seen;
  for (const auto& [tail, head] : raw.edges) {
    auto t = position.find(tail);
    if (t == position.end()) throw UnknownNodeLabel("edge references unknown node '" + tail + "'");
    auto h = position.find(head);
    if (h == position.end()) throw UnknownNodeLabel("edge references unknown node '" + head + "'");
    if (t->second == h->second) throw SelfLoop("self-loop on node '" + tail + "'");
    if (!seen.emplace(t->second, h->second).second) {
      throw DuplicateEdge("duplicate edge '" + tail + "' -> '" + head + "'");
    }
    out[static_cast<std::size_t>(t->second)].push_back(h->second);
    ++indegree[static_cast<std::size_t>(h->second)];
  }

  auto later = [&](int a, int b) {
    return natural_label_less(raw.nodes[static_cast<std::size_t>(b)],
                              raw.nodes[static_cast<std::size_t>(a)]);
  };
  std::priority_queue<int, std::vector<int>, decltype(later)> ready(later);
  for (std::size_t v = 0; v < n; ++v) {
    if (indegree[v] == 0) ready.push(static_cast<int>(v));
  }
  std::vector<int> order;
  order.reserve(n);
  while (!ready.empty()) {
    const int v = ready.top();
    ready.pop();
    order.push_back(v);
    for (int w : out[static_cast<std::size_t>(v)]) {
      if (--indegree[static_cast<std::size_t>(w)] == 0) ready.push(w);
    }
  }
  if (order.size() != n) {
    std::vector<char> remaining(n, 0);
    for (std::size_t v = 0; v < n; ++v) remaining[v] = indegree[v] > 0;
    std::vector<std::string> cycle;
    std::string listing;
    for (int v : detail::find_cycle(out, remaining)) {
      cycle.push_back(raw.nodes[static_cast<std::size_t>(v)]);
      listing += (listing.empty() ? "" : " -> ") + cycle.back();
    }
    throw CycleDetected("graph contains a directed cycle: " + listing, std::move(cycle));
  }

  std::vector<int> rank(n);
  std::vector<std::string> labels;
  for (std::size_t k = 0; k < n; ++k) {
    rank[static_cast<std::size_t>(order[k])] = static_cast<int>(k) + 1;
    labels.push_back(raw.nodes[static_cast<std::size_t>(order[k])]);
  }
  std::vector<std::pair<int, int>> arcs;
  for (std::size_t v = 0; v < n; ++v) {
    for (int w : out[v]) arcs.emplace_back(rank[v], rank[static_cast<std::size_t>(w)]);
  }
  return Dag(std::move(labels), arcs);
}

/// Recomputes the topological indices of an already valid DAG. Idempotent.
inline Dag topological_relabel(const Dag& dag) { return validate_dag(dag.raw()); }

/// Structural partition of the nodes.
///
/// Dources and dinks are restricted to internal nodes: applied to a source
/// the dource test would hold vacuously.
struct NodeClassification {
  std::vector<int> sources;
  std::vector<int> sinks;
  std::vector<int> internal;
  std::vector<int> dources;
  std::vector<int> dinks;
  std::vector<int> isolated;  // nodes that are both a source and a sink
  std::vector<std::vector<int>> in_neighbors;   // [v - 1]
  std::vector<std::vector<int>> out_neighbors;  // [v - 1]

  bool is_source(int v) const { return std::binary_search(sources.begin(), sources.end(), v); }
  bool is_sink(int v) const { return std::binary_search(sinks.begin(), sinks.end(), v); }
  bool is_dource(int v) const { return std::binary_search(dources.begin(), dources.end(), v); }
  bool is_dink(int v) const { return std::binary_search(dinks.begin(), dinks.end(), v); }
};

inline NodeClassification classify(const Dag& dag) {
  NodeClassification c;
  const int n = dag.size();
  auto subset = [](const std::vector<int>& a, const std::vector<int>& b) {
    return std::includes(b.begin(), b.end(), a.begin(), a.end());
  };
  for (int v = 1; v <= n; ++v) {
    const auto& in = dag.in_neighbors(v);
    const auto& out = dag.out_neighbors(v);
    c.in_neighbors.push_back(in);
    c.out_neighbors.push_back(out);
    if (in.empty()) c.sources.push_back(v);
    if (out.empty()) c.sinks.push_back(v);
    if (in.empty() && out.empty()) c.isolated.push_back(v);
    if (in.empty() || out.empty()) continue;
    c.internal.push_back(v);
    // dource: some out-neighbour l with N-(v) contained in N-(l)
    if (std::any_of(out.begin(), out.end(),
                    [&](int l) { return subset(in, dag.in_neighbors(l)); })) {
      c.dources.push_back(v);
    }
    // dink: some in-neighbour k with N+(v) contained in N+(k)
    if (std::any_of(in.begin(), in.end(),
                    [&](int k) { return subset(out, dag.out_neighbors(k)); })) {
      c.dinks.push_back(v);
    }
  }
  return c;
}

}  // namespace empkit
