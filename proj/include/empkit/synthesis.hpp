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

// EMP construction: the explicit chain-expansion EMP and the stagewise
// procedure that walks the columns (or rows) of S, adding excitations and
// measurements until each one's edges are determined.
//
// Stage semantics. Stage 0 is the forced EMP and only lists what it reveals.
// Each later stage handles one column (or row) that contains edges; its
// scope is every column (row) visited so far, in strategy order. A stage
// alternates two steps until neither makes progress:
//
//   * saturation over the relations of the scope (column strategies use the
//     column and chain forms, row strategies the row and chain forms);
//   * propagation: an edge relation of the strategy's own form (column or
//     row), anywhere in the graph, whose only unknown is its own G and that
//     uses a T derived during this stage is solved right away.
//
// If the stage leaves an edge of its column unknown, candidate additions
// are tried in ranked order until one resolves it.

#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "empkit/algebra.hpp"
#include "empkit/emp.hpp"
#include "empkit/error.hpp"
#include "empkit/graph.hpp"
#include "empkit/knowledge.hpp"
#include "empkit/rational.hpp"
#include "empkit/verify.hpp"

namespace empkit {

enum class Strategy { ColumnLTR, ColumnRTL, RowTTB, Explicit };

inline const char* to_string(Strategy s) {
  switch (s) {
    case Strategy::ColumnLTR: return "col-ltr";
    case Strategy::ColumnRTL: return "col-rtl";
    case Strategy::RowTTB: return "row-ttb";
    case Strategy::Explicit: return "explicit";
  }
  return "?";
}

inline Strategy parse_strategy(std::string_view text) {
  for (Strategy s : {Strategy::ColumnLTR, Strategy::ColumnRTL, Strategy::RowTTB, Strategy::Explicit}) {
    if (text == to_string(s)) return s;
  }
  throw InputError("unknown strategy '" + std::string(text) +
                   "' (expected col-ltr, col-rtl, row-ttb or explicit)");
}

inline bool is_row_strategy(Strategy s) { return s == Strategy::RowTTB; }

/// Forced EMP: sources and dources excited, sinks and dinks measured.
inline Emp initial_emp(const Dag& dag) {
  const auto cls = classify(dag);
  Emp emp;
  emp.excited.insert(cls.sources.begin(), cls.sources.end());
  emp.excited.insert(cls.dources.begin(), cls.dources.end());
  emp.measured.insert(cls.sinks.begin(), cls.sinks.end());
  emp.measured.insert(cls.dinks.begin(), cls.dinks.end());
  return emp;
}

/// Every node appearing in the chain expansion of some edge: columns are
/// excited, rows measured. Isolated nodes appear in no expansion and are
/// added to both sets, as they must be.
inline Emp explicit_emp(const Dag& dag) {
  Emp emp;
  for (const Entry& e : dag.edges()) {
    for (const Monomial& m : chain_expand(dag, e).monomials) {
      for (const Entry& f : m.factors) {
        emp.excited.insert(f.col);
        emp.measured.insert(f.row);
      }
    }
  }
  for (int v : classify(dag).isolated) {
    emp.excited.insert(v);
    emp.measured.insert(v);
  }
  return emp;
}

/// One entry that became known during a stage.
struct KnownEntry {
  Entry entry;
  bool measured = false;        // T only: revealed directly by the EMP
  bool in_scope = false;        // T only: lies in a column/row already handled
  std::vector<Entry> sources;   // S entries of the relations used

  /// Relations other than the entry's own pair were needed.
  bool borrowed() const {
    return std::any_of(sources.begin(), sources.end(), [&](const Entry& s) { return s != entry; });
  }

  friend bool operator==(const KnownEntry&, const KnownEntry&) = default;
};

struct StageRecord {
  int unit = 0;  // column or row index; 0 for the forced EMP
  Emp added;
  Emp emp;
  std::vector<KnownEntry> known_g;
  std::vector<KnownEntry> known_t;

  friend bool operator==(const StageRecord&, const StageRecord&) = default;
};

struct SynthesisTrace {
  Strategy strategy = Strategy::ColumnLTR;
  std::vector<StageRecord> stages;

  friend bool operator==(const SynthesisTrace&, const SynthesisTrace&) = default;
};

struct SynthesisOptions {
  std::uint64_t seed = 42;
  int trials = 3;
  bool verify = true;  // run both oracles on the result
};

struct SynthesisResult {
  Emp emp;
  SynthesisTrace trace;
  NecessityReport necessity;
  std::optional<OracleVerdict> jacobian;
  std::optional<OracleVerdict> reconstruction;
};

namespace detail {

// Equations are evaluated at one generic point; a separate stream from the
// oracle seeds keeps design and verification independent.
constexpr std::uint64_t kDesignStream = 0x64657369676eULL;

class StageRunner {
 public:
  StageRunner(const Dag& dag, const EquationSystem& system, Strategy strategy, const TMatrix& point)
      : dag_(dag), system_(system), strategy_(strategy), point_(point) {}

  // Units of the strategy in visiting order, with a flag for whether they
  // hold edges.
  std::vector<int> order() const {
    std::vector<int> units;
    const int n = dag_.size();
    for (int k = 1; k <= n; ++k) units.push_back(strategy_ == Strategy::ColumnRTL ? n + 1 - k : k);
    return units;
  }

  bool has_edges(int unit) const {
    return is_row_strategy(strategy_) ? !dag_.in_neighbors(unit).empty()
                                      : !dag_.out_neighbors(unit).empty();
  }

  std::vector<Entry> unit_edges(int unit) const {
    std::vector<Entry> out;
    if (is_row_strategy(strategy_)) {
      for (int i : dag_.in_neighbors(unit)) out.push_back({unit, i});
    } else {
      for (int i : dag_.out_neighbors(unit)) out.push_back({i, unit});
    }
    return out;
  }

  bool allowed(const Equation& eq) const {
    if (eq.form == EquationForm::Chain) return true;
    return is_row_strategy(strategy_) ? eq.form == EquationForm::Row : eq.form == EquationForm::Column;
  }

  std::vector<int> unit_equations(int unit) const {
    std::vector<int> out;
    for (int e : is_row_strategy(strategy_) ? system_.row(unit) : system_.column(unit)) {
      if (allowed(system_.equation(e))) out.push_back(e);
    }
    return out;
  }

  bool resolved(const KnowledgeState& state, int unit) const {
    for (const Entry& e : unit_edges(unit)) {
      if (!state.is_known(system_.g_var(e.row, e.col))) return false;
    }
    return true;
  }

  // Reveals `added` and runs the stage loop. Returns all derivations, with
  // the revealed T entries first (empty equation list).
  std::vector<Derivation> run(KnowledgeState& state, const Emp& added, const std::vector<int>& scope) const {
    std::vector<Derivation> log;
    for (int v : reveal(system_, state, added, point_)) log.push_back({v, {}});
    std::set<int> derived_t;
    while (true) {
      auto step = saturate(system_, state, scope, {.track_sources = true, .shuffle = nullptr});
      for (const auto& d : step) {
        if (system_.var(d.var).kind == Variable::Kind::T) derived_t.insert(d.var);
      }
      log.insert(log.end(), step.begin(), step.end());
      if (!propagate(state, derived_t, log)) break;
    }
    return log;
  }

  // Unknown T's in the unit's relations: their rows may be measured and
  // their columns excited.
  Emp candidate_pool(const KnowledgeState& state, int unit) const {
    Emp pool;
    for (int e : unit_equations(unit)) {
      for (int v : system_.variables_of(e)) {
        const Variable& var = system_.var(v);
        if (var.kind != Variable::Kind::T || state.is_known(v)) continue;
        if (!state.emp.is_measured(var.entry.row)) pool.measured.insert(var.entry.row);
        if (!state.emp.is_excited(var.entry.col)) pool.excited.insert(var.entry.col);
      }
    }
    return pool;
  }

 private:
  bool propagate(KnowledgeState& state, const std::set<int>& derived_t, std::vector<Derivation>& log) const {
    bool progress = false;
    for (int t : derived_t) {
      for (int e : system_.containing(t)) {
        const Equation& eq = system_.equation(e);
        if (!eq.edge || eq.form == EquationForm::Chain || !allowed(eq) || state.is_known(eq.own_var)) continue;
        auto view = linearize(eq, state);
        if (!view || view->coefficients.size() != 1 || view->coefficients.front().first != eq.own_var) continue;
        state.set(eq.own_var, -view->constant / view->coefficients.front().second);
        log.push_back({eq.own_var, {e}});
        progress = true;
      }
    }
    return progress;
  }

  const Dag& dag_;
  const EquationSystem& system_;
  Strategy strategy_;
  const TMatrix& point_;
};

inline std::vector<std::vector<int>> combinations(const std::vector<int>& items, std::size_t k) {
  std::vector<std::vector<int>> out;
  if (k > items.size()) return out;
  std::vector<std::size_t> idx(k);
  for (std::size_t i = 0; i < k; ++i) idx[i] = i;
  while (true) {
    std::vector<int> c;
    for (std::size_t i : idx) c.push_back(items[i]);
    out.push_back(std::move(c));
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == items.size() - k + i - 1) --i;
    if (i == 0) break;
    ++idx[i - 1];
    for (std::size_t r = i; r < k; ++r) idx[r] = idx[r - 1] + 1;
  }
  return out;
}

// Non-empty subsets of the pool ranked by (additions of the non-preferred
// kind, total additions, EMP order). Generated one bucket at a time.
template <typename Visit>
bool for_each_candidate(const Emp& pool, bool prefer_measure, Visit&& visit) {
  const std::vector<int> measure(pool.measured.begin(), pool.measured.end());
  const std::vector<int> excite(pool.excited.begin(), pool.excited.end());
  const auto& preferred = prefer_measure ? measure : excite;
  const auto& other = prefer_measure ? excite : measure;
  for (std::size_t k = 0; k <= other.size(); ++k) {
    const auto others = combinations(other, k);
    for (std::size_t size = std::max<std::size_t>(k, 1); size <= k + preferred.size(); ++size) {
      const auto prefs = combinations(preferred, size - k);
      std::vector<Emp> bucket;
      for (const auto& o : others) {
        for (const auto& p : prefs) {
          Emp c;
          auto& pset = prefer_measure ? c.measured : c.excited;
          auto& oset = prefer_measure ? c.excited : c.measured;
          pset.insert(p.begin(), p.end());
          oset.insert(o.begin(), o.end());
          bucket.push_back(std::move(c));
        }
      }
      std::sort(bucket.begin(), bucket.end());
      for (const Emp& c : bucket) {
        if (visit(c)) return true;
      }
    }
  }
  return false;
}

inline StageRecord make_record(const EquationSystem& system, const KnowledgeState& state, int unit,
                               const Emp& added, const std::vector<Derivation>& log,
                               const std::vector<int>& handled, bool rows) {
  StageRecord rec;
  rec.unit = unit;
  rec.added = added;
  rec.emp = state.emp;
  for (const auto& d : log) {
    const Variable& var = system.var(d.var);
    KnownEntry k;
    k.entry = var.entry;
    k.measured = d.equations.empty();
    for (int e : d.equations) {
      const Entry pair = system.equation(e).pair;
      if (std::find(k.sources.begin(), k.sources.end(), pair) == k.sources.end()) k.sources.push_back(pair);
    }
    std::sort(k.sources.begin(), k.sources.end());
    if (var.kind == Variable::Kind::G) {
      rec.known_g.push_back(std::move(k));
    } else {
      const int pos = rows ? k.entry.row : k.entry.col;
      k.in_scope = std::find(handled.begin(), handled.end(), pos) != handled.end();
      rec.known_t.push_back(std::move(k));
    }
  }
  std::sort(rec.known_g.begin(), rec.known_g.end(), [](const KnownEntry& a, const KnownEntry& b) {
    return std::pair(a.entry.col, a.entry.row) < std::pair(b.entry.col, b.entry.row);
  });
  std::sort(rec.known_t.begin(), rec.known_t.end(),
            [](const KnownEntry& a, const KnownEntry& b) { return a.entry < b.entry; });
  return rec;
}

inline TMatrix design_point(const Dag& dag, std::uint64_t seed) {
  return compute_T(draw_instance(dag, mix_seed(seed, kDesignStream)));
}

struct Walk {
  KnowledgeState state;
  SynthesisTrace trace;
};

// Runs the stage loop. With `additions` set, replays those additions
// instead of searching.
inline Walk walk(const Dag& dag, const EquationSystem& system, Strategy strategy, std::uint64_t seed,
                 const std::vector<Emp>* additions) {
  const TMatrix point = design_point(dag, seed);
  StageRunner runner(dag, system, strategy, point);
  const bool rows = is_row_strategy(strategy);
  Walk w{KnowledgeState(system), {strategy, {}}};

  const Emp emp0 = initial_emp(dag);
  std::vector<Derivation> log0;
  for (int v : reveal(system, w.state, emp0, point)) log0.push_back({v, {}});
  w.trace.stages.push_back(make_record(system, w.state, 0, emp0, log0, {}, rows));

  std::vector<int> handled;
  std::vector<int> scope;
  std::size_t stage_index = 0;
  for (int unit : runner.order()) {
    handled.push_back(unit);
    const auto eqs = runner.unit_equations(unit);
    scope.insert(scope.end(), eqs.begin(), eqs.end());
    if (!runner.has_edges(unit)) continue;
    ++stage_index;

    Emp added;
    if (additions) {
      if (stage_index >= additions->size()) throw InputError("trace has fewer stages than the strategy visits");
      added = (*additions)[stage_index];
    }
    KnowledgeState attempt = w.state;
    auto log = runner.run(attempt, added, scope);
    if (!additions && !runner.resolved(attempt, unit)) {
      const Emp pool = runner.candidate_pool(attempt, unit);
      std::optional<std::pair<KnowledgeState, std::vector<Derivation>>> found;
      for_each_candidate(pool, !rows, [&](const Emp& candidate) {
        KnowledgeState trial = w.state;
        auto trial_log = runner.run(trial, candidate, scope);
        if (!runner.resolved(trial, unit)) return false;
        added = candidate;
        found.emplace(std::move(trial), std::move(trial_log));
        return true;
      });
      if (!found) {
        throw SynthesisFailed("no addition resolves " + std::string(rows ? "row " : "column ") +
                              std::to_string(unit));
      }
      attempt = std::move(found->first);
      log = std::move(found->second);
    }
    w.state = std::move(attempt);
    w.trace.stages.push_back(make_record(system, w.state, unit, added, log, handled, rows));
  }
  if (additions && stage_index + 1 != additions->size()) {
    throw InputError("trace has more stages than the strategy visits");
  }
  return w;
}

}  // namespace detail

/// Stagewise construction of a valid EMP with the given traversal.
inline SynthesisResult synthesize(const Dag& dag, Strategy strategy, const SynthesisOptions& options = {}) {
  SynthesisResult result;
  const EquationSystem system(dag);
  if (strategy == Strategy::Explicit) {
    result.emp = explicit_emp(dag);
    result.trace.strategy = strategy;
  } else {
    auto w = detail::walk(dag, system, strategy, options.seed, nullptr);
    if (!w.state.all_edges_known(system)) throw SynthesisFailed("edges left unknown after the last stage");
    result.emp = w.state.emp;
    result.trace = std::move(w.trace);
  }
  result.necessity = check_necessary(dag, result.emp);
  if (!result.necessity.passed()) throw SynthesisFailed("synthesized EMP fails a necessary condition");
  if (options.verify && dag.edge_count() > 0) {
    result.jacobian = jacobian_oracle(dag, result.emp, options.trials, options.seed);
    result.reconstruction = reconstruction_oracle(dag, system, result.emp, options.trials, options.seed);
    if (!result.jacobian->valid || !result.reconstruction->valid) {
      throw SynthesisFailed("synthesized EMP " + format_emp(result.emp, dag.size()) +
                            " is rejected by an oracle");
    }
  }
  return result;
}

/// Re-runs a trace's additions from the forced EMP without searching.
/// Returns the resulting trace; it equals the input when the trace is
/// faithful.
inline SynthesisTrace replay(const Dag& dag, const SynthesisTrace& trace, std::uint64_t seed) {
  if (trace.strategy == Strategy::Explicit) return trace;
  std::vector<Emp> additions;
  for (const auto& s : trace.stages) additions.push_back(s.added);
  const EquationSystem system(dag);
  return detail::walk(dag, system, trace.strategy, seed, &additions).trace;
}

}  // namespace empkit
