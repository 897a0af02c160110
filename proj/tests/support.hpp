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

// Shared fixtures and test-side oracles. Nothing here calls the library
// routine it is meant to check.

#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "empkit/empkit.hpp"

namespace empkit::testing {

/// Network of the worked example: 7 nodes, 11 edges.
inline Dag example7() {
  RawGraph raw;
  for (int v = 1; v <= 7; ++v) raw.nodes.push_back(std::to_string(v));
  const std::vector<std::pair<int, int>> arcs = {{1, 2}, {1, 3}, {2, 3}, {2, 4}, {3, 4}, {3, 5},
                                                 {4, 5}, {3, 7}, {4, 7}, {5, 6}, {5, 7}};
  for (auto [t, h] : arcs) raw.edges.emplace_back(std::to_string(t), std::to_string(h));
  return validate_dag(raw);
}

/// DAG on labels 1..n with arcs (tail, head).
inline Dag make_dag(int n, const std::vector<std::pair<int, int>>& arcs) {
  RawGraph raw;
  for (int v = 1; v <= n; ++v) raw.nodes.push_back(std::to_string(v));
  for (auto [t, h] : arcs) raw.edges.emplace_back(std::to_string(t), std::to_string(h));
  return validate_dag(raw);
}

/// Strictly-lower pairs (head, tail) of an n-node graph in a fixed order.
inline std::vector<std::pair<int, int>> lower_pairs(int n) {
  std::vector<std::pair<int, int>> pairs;
  for (int l = 2; l <= n; ++l) {
    for (int j = 1; j < l; ++j) pairs.emplace_back(l, j);
  }
  return pairs;
}

/// The DAG whose edge set is encoded by `mask` over lower_pairs(n).
inline Dag dag_from_mask(int n, std::uint64_t mask) {
  std::vector<std::pair<int, int>> arcs;
  const auto pairs = lower_pairs(n);
  for (std::size_t b = 0; b < pairs.size(); ++b) {
    if (mask >> b & 1U) arcs.emplace_back(pairs[b].second, pairs[b].first);
  }
  return make_dag(n, arcs);
}

inline std::uint64_t structure_count(int n) { return std::uint64_t{1} << (n * (n - 1) / 2); }

/// Every edge i -> l with i < l.
inline Dag full_dag(int n) { return dag_from_mask(n, structure_count(n) - 1); }

/// Every EMP over n nodes, 4^n of them.
inline std::vector<Emp> all_emps(int n) {
  std::vector<Emp> out;
  for (std::uint64_t code = 0; code < (std::uint64_t{1} << (2 * n)); ++code) {
    Emp e;
    for (int v = 1; v <= n; ++v) {
      if (code >> (v - 1) & 1U) e.excited.insert(v);
      if (code >> (n + v - 1) & 1U) e.measured.insert(v);
    }
    out.push_back(std::move(e));
  }
  return out;
}

/// Dource/dink straight from the definitions: node j is internal and some
/// out-neighbour l of j has every in-neighbour of j as an in-neighbour
/// (dource); some in-neighbour k of j has every out-neighbour of j as an
/// out-neighbour (dink). Works on the raw edge relation.
struct BruteClass {
  std::vector<int> sources, sinks, dources, dinks;
};

inline BruteClass brute_classify(const Dag& dag) {
  const int n = dag.size();
  auto edge = [&](int from, int to) { return dag.has_edge(to, from); };
  BruteClass c;
  for (int j = 1; j <= n; ++j) {
    bool has_in = false, has_out = false;
    for (int k = 1; k <= n; ++k) {
      has_in = has_in || edge(k, j);
      has_out = has_out || edge(j, k);
    }
    if (!has_in) c.sources.push_back(j);
    if (!has_out) c.sinks.push_back(j);
    if (!has_in || !has_out) continue;
    bool dource = false, dink = false;
    for (int w = 1; w <= n; ++w) {
      if (edge(j, w)) {
        bool all = true;
        for (int k = 1; k <= n; ++k) all = all && (!edge(k, j) || edge(k, w));
        dource = dource || all;
      }
      if (edge(w, j)) {
        bool all = true;
        for (int k = 1; k <= n; ++k) all = all && (!edge(j, k) || edge(w, k));
        dink = dink || all;
      }
    }
    if (dource) c.dources.push_back(j);
    if (dink) c.dinks.push_back(j);
  }
  return c;
}

/// Plain dense matrix helpers over Scalar for product checks.
using Dense = std::vector<std::vector<Scalar>>;

inline Dense identity(int n) {
  Dense m(static_cast<std::size_t>(n), std::vector<Scalar>(static_cast<std::size_t>(n), Scalar(0)));
  for (int i = 0; i < n; ++i) m[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = 1;
  return m;
}

inline Dense multiply(const Dense& a, const Dense& b) {
  const std::size_t n = a.size();
  Dense c(n, std::vector<Scalar>(n, Scalar(0)));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < n; ++k) {
      if (a[i][k] == 0) continue;
      for (std::size_t j = 0; j < n; ++j) c[i][j] += a[i][k] * b[k][j];
    }
  }
  return c;
}

inline Dense dense(const LowerMatrix& m) {
  const int n = m.size();
  Dense d(static_cast<std::size_t>(n), std::vector<Scalar>(static_cast<std::size_t>(n), Scalar(0)));
  for (int i = 1; i <= n; ++i) {
    for (int j = 1; j <= n; ++j) d[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(j - 1)] = m.at(i, j);
  }
  return d;
}

inline Dense i_minus_g(const GMatrix& g) {
  Dense d = identity(g.size());
  for (const Entry& e : g.edges()) {
    d[static_cast<std::size_t>(e.row - 1)][static_cast<std::size_t>(e.col - 1)] = -g.at(e.row, e.col);
  }
  return d;
}

/// Value plus first-order perturbation: a + b eps with eps^2 = 0.
struct Dual {
  Scalar a = 0;
  Scalar b = 0;
};

/// Rank with full pivoting; independent of the library's elimination.
inline int full_pivot_rank(std::vector<std::vector<Scalar>> m) {
  const std::size_t rows = m.size();
  if (rows == 0) return 0;
  const std::size_t cols = m[0].size();
  std::vector<char> row_used(rows, 0), col_used(cols, 0);
  int rank = 0;
  while (true) {
    std::size_t pr = rows, pc = cols;
    for (std::size_t r = 0; r < rows && pr == rows; ++r) {
      if (row_used[r]) continue;
      for (std::size_t c = 0; c < cols; ++c) {
        if (!col_used[c] && m[r][c] != 0) {
          pr = r;
          pc = c;
          break;
        }
      }
    }
    if (pr == rows) return rank;
    row_used[pr] = 1;
    col_used[pc] = 1;
    ++rank;
    for (std::size_t r = 0; r < rows; ++r) {
      if (row_used[r] || m[r][pc] == 0) continue;
      const Scalar f = m[r][pc] / m[pr][pc];
      for (std::size_t c = 0; c < cols; ++c) m[r][c] -= f * m[pr][c];
    }
  }
}

/// Jacobian of M by forward-mode differentiation: T is solved from
/// (I - G) T = I over dual numbers once per edge direction.
inline int dual_jacobian_rank(const Dag& dag, const Emp& emp, const GMatrix& g) {
  const int n = dag.size();
  const auto& edges = dag.edges();
  std::vector<std::vector<Scalar>> jac;
  std::vector<std::pair<int, int>> rows;
  for (int i : emp.measured) {
    for (int j : emp.excited) {
      if (i != j) rows.emplace_back(i, j);
    }
  }
  jac.assign(rows.size(), std::vector<Scalar>(edges.size(), Scalar(0)));
  for (std::size_t d = 0; d < edges.size(); ++d) {
    // Column-by-column forward substitution of (I - G) T = I.
    std::vector<std::vector<Dual>> t(static_cast<std::size_t>(n + 1), std::vector<Dual>(static_cast<std::size_t>(n + 1)));
    for (int j = 1; j <= n; ++j) {
      for (int l = 1; l <= n; ++l) {
        Dual v;
        v.a = l == j ? 1 : 0;
        for (int i = 1; i < l; ++i) {
          Dual gli;
          gli.a = g.at(l, i);
          gli.b = (edges[d] == Entry{l, i}) ? 1 : 0;
          const Dual& tij = t[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
          v.a += gli.a * tij.a;
          v.b += gli.a * tij.b + gli.b * tij.a;
        }
        t[static_cast<std::size_t>(l)][static_cast<std::size_t>(j)] = v;
      }
    }
    for (std::size_t r = 0; r < rows.size(); ++r) {
      jac[r][d] = t[static_cast<std::size_t>(rows[r].first)][static_cast<std::size_t>(rows[r].second)].b;
    }
  }
  return full_pivot_rank(std::move(jac));
}

/// Independent generic-validity oracle: full rank at `trials` random points
/// drawn from a seed stream unrelated to the library's.
inline bool dual_valid(const Dag& dag, const Emp& emp, int trials, std::uint64_t seed) {
  RationalSampler sampler(seed ^ 0x5eed5eed5eedULL);
  for (int k = 0; k < trials; ++k) {
    const GMatrix g = sample_network(dag, sampler);
    if (dual_jacobian_rank(dag, emp, g) != dag.edge_count()) return false;
  }
  return true;
}

}  // namespace empkit::testing
