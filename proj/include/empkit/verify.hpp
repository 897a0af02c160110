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

// Independent validity oracles for an EMP and the exhaustive minimal-EMP
// search.
//
// The Jacobian oracle certifies generic local identifiability: the map from
// edge values to M = C T B has full rank at random exact points. The
// reconstruction oracle hides a random instance, reveals only M, and runs
// knowledge saturation on the numbers; it certifies constructive recovery.

#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <string>
#include <thread>
#include <vector>

#include "empkit/algebra.hpp"
#include "empkit/emp.hpp"
#include "empkit/error.hpp"
#include "empkit/graph.hpp"
#include "empkit/knowledge.hpp"
#include "empkit/rational.hpp"

namespace empkit {

struct OracleVerdict {
  enum class Method { JacobianRank, Reconstruction };

  Method method = Method::JacobianRank;
  bool valid = false;
  std::uint64_t seed = 0;
  int trials = 0;             // instantiations evaluated, re-draws included
  bool redrawn = false;       // the first round of trials disagreed
  int required = 0;           // number of edges
  std::vector<int> ranks;     // Jacobian rank per trial
  std::vector<Entry> unrecovered;  // reconstruction: edges left unknown (first failing trial)

  std::string method_name() const {
    return method == Method::JacobianRank ? "jacobian-rank" : "reconstruction";
  }
};

inline const char* to_string(OracleVerdict::Method m) {
  return m == OracleVerdict::Method::JacobianRank ? "jacobian-rank" : "reconstruction";
}

/// Exact rank by Gaussian elimination; `a` is row-major and gets destroyed.
inline int exact_rank(std::vector<Scalar>& a, std::size_t rows, std::size_t cols) {
  std::size_t rank = 0;
  for (std::size_t c = 0; c < cols && rank < rows; ++c) {
    std::size_t p = rank;
    while (p < rows && a[p * cols + c] == 0) ++p;
    if (p == rows) continue;
    if (p != rank) {
      for (std::size_t k = c; k < cols; ++k) std::swap(a[p * cols + k], a[rank * cols + k]);
    }
    for (std::size_t r = rank + 1; r < rows; ++r) {
      if (a[r * cols + c] == 0) continue;
      const Scalar factor = a[r * cols + c] / a[rank * cols + c];
      for (std::size_t k = c; k < cols; ++k) {
        if (a[rank * cols + k] != 0) a[r * cols + k] -= factor * a[rank * cols + k];
      }
    }
    ++rank;
  }
  return static_cast<int>(rank);
}

/// Jacobian of M = C T B with respect to the edge values, at instance `g`.
/// Row (i, j) for measured i > excited j, column per edge (a, b):
/// dT(i,j)/dG(a,b) = T(i,a) T(b,j).
inline int jacobian_rank(const Dag& dag, const Emp& emp, const GMatrix& g) {
  const TMatrix t = compute_T(g);
  const auto& edges = dag.edges();
  const std::size_t cols = edges.size();
  if (cols == 0) return 0;
  std::vector<Scalar> a;
  std::size_t rows = 0;
  for (int i : emp.measured) {
    for (int j : emp.excited) {
      if (i <= j || !dag.reaches(j, i)) continue;
      for (const Entry& e : edges) {
        if (dag.reaches(e.row, i) && dag.reaches(j, e.col)) {
          a.push_back(t.at(i, e.row) * t.at(e.col, j));
        } else {
          a.emplace_back(0);
        }
      }
      ++rows;
    }
  }
  return exact_rank(a, rows, cols);
}

namespace detail {

inline void require_selection(const Dag& dag, const Emp& emp) {
  check_emp_nodes(dag, emp);
  if (emp.excited.empty() || emp.measured.empty()) {
    throw EmptySelection("an oracle needs at least one excited and one measured node");
  }
}

inline bool has_zero_edge(const GMatrix& g) {
  for (const Scalar& v : g.edge_values()) {
    if (v == 0) return true;
  }
  return false;
}

// Draws an instance, rejecting degenerate ones (a zero edge value).
inline GMatrix draw_instance(const Dag& dag, std::uint64_t seed) {
  RationalSampler sampler(seed);
  GMatrix g = sample_network(dag, sampler);
  while (has_zero_edge(g)) g = sample_network(dag, sampler);
  return g;
}

// Runs `trials` instantiations; on disagreement runs one more round, and
// gives up if that round disagrees as well.
template <typename TrialFn>
bool agreed_outcome(std::uint64_t seed, int trials, OracleVerdict& verdict, TrialFn&& trial) {
  if (trials < 1) throw InputError("trials must be at least 1");
  for (int round = 0; round < 2; ++round) {
    std::vector<char> outcomes;
    for (int k = 0; k < trials; ++k) {
      const auto index = static_cast<std::uint64_t>(round * trials + k);
      outcomes.push_back(trial(mix_seed(seed, index)) ? 1 : 0);
      ++verdict.trials;
    }
    const bool all_same = std::adjacent_find(outcomes.begin(), outcomes.end(),
                                             std::not_equal_to<>()) == outcomes.end();
    if (all_same) return outcomes.front() != 0;
    verdict.redrawn = true;
  }
  throw OracleDisagreement("oracle trials disagree after one re-draw (seed " + std::to_string(seed) + ")");
}

}  // namespace detail

inline OracleVerdict jacobian_oracle(const Dag& dag, const Emp& emp, int trials, std::uint64_t seed) {
  detail::require_selection(dag, emp);
  OracleVerdict verdict;
  verdict.method = OracleVerdict::Method::JacobianRank;
  verdict.seed = seed;
  verdict.required = dag.edge_count();
  verdict.valid = detail::agreed_outcome(seed, trials, verdict, [&](std::uint64_t s) {
    const int rank = jacobian_rank(dag, emp, detail::draw_instance(dag, s));
    verdict.ranks.push_back(rank);
    return rank == verdict.required;
  });
  return verdict;
}

/// Result of reconstructing one hidden instance.
struct Reconstruction {
  enum class Status { Recovered, Incomplete, Degenerate };
  Status status = Status::Incomplete;
  std::vector<Entry> unrecovered;
};

/// Reveals M for the hidden instance `hidden`, saturates, and compares every
/// recovered edge with the truth. A zero edge value is a degenerate
/// instantiation and is reported as such without running.
inline Reconstruction reconstruct_once(const Dag& dag, const EquationSystem& system,
                                       const Emp& emp, const GMatrix& hidden) {
  if (detail::has_zero_edge(hidden)) return {Reconstruction::Status::Degenerate, {}};
  const TMatrix t = compute_T(hidden);
  KnowledgeState state(system);
  reveal(system, state, emp, t);
  saturate(system, state);
  Reconstruction r;
  for (const Entry& e : dag.edges()) {
    const int v = system.g_var(e.row, e.col);
    if (!state.is_known(v)) {
      r.unrecovered.push_back(e);
    } else if (state.value[static_cast<std::size_t>(v)] != hidden.at(e.row, e.col)) {
      throw InternalError("reconstruction produced a wrong value for G[" + std::to_string(e.row) +
                          "," + std::to_string(e.col) + "]");
    }
  }
  r.status = r.unrecovered.empty() ? Reconstruction::Status::Recovered
                                   : Reconstruction::Status::Incomplete;
  return r;
}

inline OracleVerdict reconstruction_oracle(const Dag& dag, const EquationSystem& system,
                                           const Emp& emp, int trials, std::uint64_t seed) {
  detail::require_selection(dag, emp);
  OracleVerdict verdict;
  verdict.method = OracleVerdict::Method::Reconstruction;
  verdict.seed = seed;
  verdict.required = dag.edge_count();
  verdict.valid = detail::agreed_outcome(seed, trials, verdict, [&](std::uint64_t s) {
    Reconstruction r = reconstruct_once(dag, system, emp, detail::draw_instance(dag, s));
    if (r.status != Reconstruction::Status::Recovered && verdict.unrecovered.empty()) {
      verdict.unrecovered = r.unrecovered;
    }
    return r.status == Reconstruction::Status::Recovered;
  });
  if (verdict.valid) verdict.unrecovered.clear();
  return verdict;
}

inline OracleVerdict reconstruction_oracle(const Dag& dag, const Emp& emp, int trials, std::uint64_t seed) {
  return reconstruction_oracle(dag, EquationSystem(dag), emp, trials, seed);
}

struct MinimalSearchOptions {
  int node_limit = 10;
  std::uint64_t seed = 42;
  int trials = 3;
  unsigned jobs = 1;
};

struct MinimalEmps {
  int cardinality = 0;
  std::vector<Emp> emps;       // sorted
  std::size_t candidates = 0;  // EMPs that passed the necessary conditions
  std::size_t tested = 0;      // EMPs checked by the Jacobian oracle
};

/// Runs `work(i)` for i in [0, count) on `jobs` threads.
template <typename Fn>
void parallel_for(std::size_t count, unsigned jobs, Fn&& work) {
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(count)));
  if (jobs <= 1) {
    for (std::size_t i = 0; i < count; ++i) work(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(jobs);
  for (unsigned w = 0; w < jobs; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < count; i += jobs) work(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

/// All valid EMPs of minimum cardinality. Every assignment node -> {excited,
/// measured, both} is considered; assignments forced by the necessary
/// conditions are fixed up front, survivors are tested by the Jacobian oracle
/// in order of increasing cardinality. Each candidate's seed derives from its
/// base-3 assignment code, so results do not depend on `jobs`.
inline MinimalEmps enumerate_minimal(const Dag& dag, const MinimalSearchOptions& options = {}) {
  const int n = dag.size();
  if (n > options.node_limit) {
    throw TooLarge("graph has " + std::to_string(n) + " nodes, above the enumeration limit of " +
                   std::to_string(options.node_limit) + "; raise --node-limit explicitly");
  }
  const auto cls = classify(dag);
  // State codes: 0 excited only, 1 measured only, 2 both.
  std::vector<std::vector<int>> allowed(static_cast<std::size_t>(n));
  for (int v = 1; v <= n; ++v) {
    const bool must_e = cls.is_source(v) || cls.is_dource(v);
    const bool must_m = cls.is_sink(v) || cls.is_dink(v);
    auto& a = allowed[static_cast<std::size_t>(v - 1)];
    if (!must_m) a.push_back(0);
    if (!must_e) a.push_back(1);
    a.push_back(2);
  }

  struct Candidate {
    Emp emp;
    std::uint64_t code = 0;
  };
  std::vector<std::vector<Candidate>> by_cardinality(static_cast<std::size_t>(2 * n + 1));
  std::vector<int> choice(static_cast<std::size_t>(n), 0);
  MinimalEmps result;
  while (true) {
    Candidate c;
    std::uint64_t weight = 1;
    for (int v = 1; v <= n; ++v) {
      const int state = allowed[static_cast<std::size_t>(v - 1)][static_cast<std::size_t>(choice[static_cast<std::size_t>(v - 1)])];
      if (state != 1) c.emp.excited.insert(v);
      if (state != 0) c.emp.measured.insert(v);
      c.code += static_cast<std::uint64_t>(state) * weight;
      weight *= 3;
    }
    if (check_necessary(dag, cls, c.emp).passed()) {
      by_cardinality[static_cast<std::size_t>(c.emp.cardinality())].push_back(std::move(c));
      ++result.candidates;
    }
    int v = 0;
    while (v < n) {
      auto& k = choice[static_cast<std::size_t>(v)];
      if (++k < static_cast<int>(allowed[static_cast<std::size_t>(v)].size())) break;
      k = 0;
      ++v;
    }
    if (v == n) break;
  }

  for (std::size_t card = 0; card < by_cardinality.size(); ++card) {
    auto& level = by_cardinality[card];
    if (level.empty()) continue;
    std::vector<char> valid(level.size(), 0);
    parallel_for(level.size(), options.jobs, [&](std::size_t i) {
      valid[i] = jacobian_oracle(dag, level[i].emp, options.trials,
                                 mix_seed(options.seed, level[i].code)).valid;
    });
    result.tested += level.size();
    for (std::size_t i = 0; i < level.size(); ++i) {
      if (valid[i]) result.emps.push_back(level[i].emp);
    }
    if (!result.emps.empty()) {
      result.cardinality = static_cast<int>(card);
      std::sort(result.emps.begin(), result.emps.end());
      return result;
    }
  }
  throw InternalError("no valid EMP found; the upper-bound EMP should always be valid");
}

}  // namespace empkit
