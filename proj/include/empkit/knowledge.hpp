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

// Knowledge saturation: which T and G entries follow from the entries that
// an EMP reveals.
//
// Every relation S = T^-1 = I - G imposes is kept as a multilinear
// polynomial over T and G unknowns, one per strictly-lower entry (l, j) and
// per form:
//
//   column form  G(l,j) = T(l,j) - sum_i T(l,i) G(i,j)   (i out-neighbour of j)
//   row form     G(l,j) = T(l,j) - sum_i G(l,i) T(i,j)   (i in-neighbour of l)
//   chain form   G(l,j) = chain expansion in T only
//
// with G(l,j) = 0 for structural zeros. Saturation evaluates the relations
// at a point (a hidden instance for reconstruction, a random generic one for
// design) and repeatedly solves whatever has become linear in the remaining
// unknowns. Values are computed only from known values, so a run on a hidden
// instance is a genuine reconstruction.

#pragma once

#include <algorithm>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "empkit/algebra.hpp"
#include "empkit/emp.hpp"
#include "empkit/graph.hpp"
#include "empkit/rational.hpp"

namespace empkit {

enum class EquationForm { Column, Row, Chain };

struct Variable {
  enum class Kind { T, G } kind = Kind::T;
  Entry entry;
};

/// Polynomial relation sum_k sign_k * prod(vars_k) = 0.
struct Equation {
  struct Term {
    int sign = 1;
    std::vector<int> vars;
  };

  EquationForm form = EquationForm::Column;
  Entry pair;         // the S entry the relation belongs to
  bool edge = false;  // pair is an edge (G(l,j) appears as an unknown)
  int own_var = -1;   // variable of G(l,j) when edge
  std::vector<Term> terms;
};

/// All relations of one DAG, indexed by variable and by S column / row.
class EquationSystem {
 public:
  explicit EquationSystem(const Dag& dag) : n_(dag.size()) {
    t_ids_.assign(static_cast<std::size_t>(n_ * n_), -1);
    g_ids_.assign(static_cast<std::size_t>(n_ * n_), -1);
    for (int j = 1; j <= n_; ++j) {
      for (int l = j + 1; l <= n_; ++l) {
        if (dag.reaches(j, l)) {
          t_ids_[idx(l, j)] = static_cast<int>(vars_.size());
          vars_.push_back({Variable::Kind::T, {l, j}});
        }
      }
    }
    for (const Entry& e : dag.edges()) {
      g_ids_[idx(e.row, e.col)] = static_cast<int>(vars_.size());
      vars_.push_back({Variable::Kind::G, e});
    }
    by_column_.resize(static_cast<std::size_t>(n_ + 1));
    by_row_.resize(static_cast<std::size_t>(n_ + 1));
    for (int j = 1; j <= n_; ++j) {
      for (int l = j + 1; l <= n_; ++l) {
        add(column_form(dag, l, j));
        add(row_form(dag, l, j));
        add(chain_form(dag, l, j));
      }
    }
    containing_.resize(vars_.size());
    for (std::size_t e = 0; e < equations_.size(); ++e) {
      for (int v : variables_of(static_cast<int>(e))) containing_[static_cast<std::size_t>(v)].push_back(static_cast<int>(e));
    }
  }

  int size() const { return n_; }
  int var_count() const { return static_cast<int>(vars_.size()); }
  const Variable& var(int id) const { return vars_[static_cast<std::size_t>(id)]; }
  const std::vector<Equation>& equations() const { return equations_; }
  const Equation& equation(int id) const { return equations_[static_cast<std::size_t>(id)]; }

  /// Variable of T(l,j), or -1 when T(l,j) is a constant (diagonal, upper
  /// triangle, or no path from j to l).
  int t_var(int l, int j) const { return l > j ? t_ids_[idx(l, j)] : -1; }
  int g_var(int l, int j) const { return l > j ? g_ids_[idx(l, j)] : -1; }

  /// Relations whose pair lies in S column j / row l.
  const std::vector<int>& column(int j) const { return by_column_[static_cast<std::size_t>(j)]; }
  const std::vector<int>& row(int l) const { return by_row_[static_cast<std::size_t>(l)]; }
  const std::vector<int>& containing(int var) const { return containing_[static_cast<std::size_t>(var)]; }

  std::vector<int> all() const {
    std::vector<int> ids(equations_.size());
    std::iota(ids.begin(), ids.end(), 0);
    return ids;
  }

  std::vector<int> variables_of(int eq) const {
    std::vector<int> vs;
    for (const auto& term : equation(eq).terms) vs.insert(vs.end(), term.vars.begin(), term.vars.end());
    std::sort(vs.begin(), vs.end());
    vs.erase(std::unique(vs.begin(), vs.end()), vs.end());
    return vs;
  }

 private:
  std::size_t idx(int l, int j) const { return static_cast<std::size_t>((l - 1) * n_ + (j - 1)); }

  void add(Equation eq) {
    if (eq.terms.empty()) return;
    const int id = static_cast<int>(equations_.size());
    by_column_[static_cast<std::size_t>(eq.pair.col)].push_back(id);
    by_row_[static_cast<std::size_t>(eq.pair.row)].push_back(id);
    equations_.push_back(std::move(eq));
  }

  Equation head(EquationForm form, const Dag& dag, int l, int j) const {
    Equation eq;
    eq.form = form;
    eq.pair = {l, j};
    eq.edge = dag.has_edge(l, j);
    if (eq.edge) {
      eq.own_var = g_var(l, j);
      eq.terms.push_back({1, {eq.own_var}});
    }
    return eq;
  }

  Equation column_form(const Dag& dag, int l, int j) const {
    Equation eq = head(EquationForm::Column, dag, l, j);
    if (t_var(l, j) >= 0) eq.terms.push_back({-1, {t_var(l, j)}});
    for (int i : dag.out_neighbors(j)) {
      if (i <= j || i >= l || t_var(l, i) < 0) continue;
      eq.terms.push_back({1, {t_var(l, i), g_var(i, j)}});
    }
    return eq;
  }

  Equation row_form(const Dag& dag, int l, int j) const {
    Equation eq = head(EquationForm::Row, dag, l, j);
    if (t_var(l, j) >= 0) eq.terms.push_back({-1, {t_var(l, j)}});
    for (int i : dag.in_neighbors(l)) {
      if (i <= j || i >= l || t_var(i, j) < 0) continue;
      eq.terms.push_back({1, {g_var(l, i), t_var(i, j)}});
    }
    return eq;
  }

  Equation chain_form(const Dag& dag, int l, int j) const {
    Equation eq = head(EquationForm::Chain, dag, l, j);
    for (const Monomial& m : chain_expand(dag, {l, j}).monomials) {
      Equation::Term term{-m.sign, {}};
      for (const Entry& f : m.factors) term.vars.push_back(t_var(f.row, f.col));
      eq.terms.push_back(std::move(term));
    }
    return eq;
  }

  int n_;
  std::vector<Variable> vars_;
  std::vector<int> t_ids_;
  std::vector<int> g_ids_;
  std::vector<Equation> equations_;
  std::vector<std::vector<int>> by_column_;
  std::vector<std::vector<int>> by_row_;
  std::vector<std::vector<int>> containing_;
};

/// What is currently determined, with values.
struct KnowledgeState {
  Emp emp;
  std::vector<char> known;    // per variable
  std::vector<Scalar> value;  // meaningful where known

  explicit KnowledgeState(const EquationSystem& system)
      : known(static_cast<std::size_t>(system.var_count()), 0),
        value(static_cast<std::size_t>(system.var_count())) {}

  bool is_known(int var) const { return known[static_cast<std::size_t>(var)] != 0; }

  void set(int var, Scalar v) {
    known[static_cast<std::size_t>(var)] = 1;
    value[static_cast<std::size_t>(var)] = std::move(v);
  }

  std::vector<Entry> known_entries(const EquationSystem& system, Variable::Kind kind) const {
    std::vector<Entry> out;
    for (int v = 0; v < system.var_count(); ++v) {
      if (is_known(v) && system.var(v).kind == kind) out.push_back(system.var(v).entry);
    }
    std::sort(out.begin(), out.end(), [](const Entry& a, const Entry& b) {
      return std::pair(a.col, a.row) < std::pair(b.col, b.row);
    });
    return out;
  }

  bool all_edges_known(const EquationSystem& system) const {
    for (int v = 0; v < system.var_count(); ++v) {
      if (system.var(v).kind == Variable::Kind::G && !is_known(v)) return false;
    }
    return true;
  }

  /// Structural zeros whose relations still involve an unknown.
  std::vector<Entry> pending_zero_constraints(const EquationSystem& system) const {
    std::vector<Entry> out;
    for (int e = 0; e < static_cast<int>(system.equations().size()); ++e) {
      const Equation& eq = system.equation(e);
      if (eq.edge) continue;
      const auto vs = system.variables_of(e);
      if (std::any_of(vs.begin(), vs.end(), [&](int v) { return !is_known(v); }) &&
          std::find(out.begin(), out.end(), eq.pair) == out.end()) {
        out.push_back(eq.pair);
      }
    }
    std::sort(out.begin(), out.end());
    return out;
  }
};

/// Marks the T entries revealed by `emp` (measured row, excited column) as
/// known, reading their values from `t`. Returns the newly revealed variables.
inline std::vector<int> reveal(const EquationSystem& system, KnowledgeState& state,
                               const Emp& emp, const TMatrix& t) {
  std::vector<int> fresh;
  state.emp.excited.insert(emp.excited.begin(), emp.excited.end());
  state.emp.measured.insert(emp.measured.begin(), emp.measured.end());
  for (int i : state.emp.measured) {
    for (int j : state.emp.excited) {
      const int v = system.t_var(i, j);
      if (v >= 0 && !state.is_known(v)) {
        state.set(v, t.lower(i, j));
        fresh.push_back(v);
      }
    }
  }
  return fresh;
}

/// One newly determined variable and the relations that determined it.
struct Derivation {
  int var = -1;
  std::vector<int> equations;
};

struct SaturationOptions {
  /// Record which relations each derivation used (costs an extra tableau).
  bool track_sources = false;
  /// When set, relations and rules are visited in a random order.
  std::mt19937_64* shuffle = nullptr;
};

namespace detail {

// Linear view of one relation given the current knowledge: coefficient per
// unknown and the constant. Empty optional when some term multiplies two
// unknowns.
struct LinearView {
  std::vector<std::pair<int, Scalar>> coefficients;  // (unknown var, coefficient)
  Scalar constant;
};

inline std::optional<LinearView> linearize(const Equation& eq, const KnowledgeState& state) {
  LinearView view;
  view.constant = 0;
  for (const auto& term : eq.terms) {
    int unknown = -1;
    Scalar product = term.sign;
    for (int v : term.vars) {
      if (state.is_known(v)) {
        product *= state.value[static_cast<std::size_t>(v)];
      } else {
        if (unknown >= 0) return std::nullopt;
        unknown = v;
      }
    }
    if (unknown < 0) {
      view.constant += product;
      continue;
    }
    auto it = std::find_if(view.coefficients.begin(), view.coefficients.end(),
                           [&](const auto& c) { return c.first == unknown; });
    if (it == view.coefficients.end()) {
      view.coefficients.emplace_back(unknown, product);
    } else {
      it->second += product;
    }
  }
  std::erase_if(view.coefficients, [](const auto& c) { return c.second == 0; });
  return view;
}

// Single-relation rule: a linear relation with exactly one unknown.
inline bool solve_single(const EquationSystem& system, KnowledgeState& state, int eq,
                         std::vector<Derivation>& out) {
  auto view = linearize(system.equation(eq), state);
  if (!view || view->coefficients.size() != 1) return false;
  const auto& [var, coefficient] = view->coefficients.front();
  state.set(var, -view->constant / coefficient);
  out.push_back({var, {eq}});
  return true;
}

// Joint rule: every linear relation in scope forms one system; each unknown
// whose unit vector lies in the row space is determined.
inline bool solve_system(const EquationSystem& system, KnowledgeState& state,
                         const std::vector<int>& scope, bool track, std::vector<Derivation>& out) {
  std::vector<int> rows_eq;
  std::vector<LinearView> views;
  std::vector<int> unknowns;
  for (int eq : scope) {
    auto view = linearize(system.equation(eq), state);
    if (!view || view->coefficients.empty()) continue;
    for (const auto& c : view->coefficients) unknowns.push_back(c.first);
    rows_eq.push_back(eq);
    views.push_back(std::move(*view));
  }
  if (views.size() < 2) return false;
  std::sort(unknowns.begin(), unknowns.end());
  unknowns.erase(std::unique(unknowns.begin(), unknowns.end()), unknowns.end());

  const std::size_t rows = views.size();
  const std::size_t cols = unknowns.size();
  const std::size_t extra = track ? rows : 0;
  const std::size_t width = cols + 1 + extra;
  std::vector<Scalar> a(rows * width);
  for (std::size_t r = 0; r < rows; ++r) {
    for (const auto& [var, coefficient] : views[r].coefficients) {
      const auto c = static_cast<std::size_t>(
          std::lower_bound(unknowns.begin(), unknowns.end(), var) - unknowns.begin());
      a[r * width + c] = coefficient;
    }
    a[r * width + cols] = -views[r].constant;
    if (track) a[r * width + cols + 1 + r] = 1;
  }

  // Reduced row echelon form.
  std::vector<std::size_t> pivot_col;
  std::size_t rank = 0;
  for (std::size_t c = 0; c < cols && rank < rows; ++c) {
    std::size_t p = rank;
    while (p < rows && a[p * width + c] == 0) ++p;
    if (p == rows) continue;
    if (p != rank) {
      for (std::size_t k = 0; k < width; ++k) std::swap(a[p * width + k], a[rank * width + k]);
    }
    const Scalar inv = 1 / a[rank * width + c];
    for (std::size_t k = c; k < width; ++k) a[rank * width + k] *= inv;
    for (std::size_t r = 0; r < rows; ++r) {
      if (r == rank || a[r * width + c] == 0) continue;
      const Scalar factor = a[r * width + c];
      for (std::size_t k = c; k < width; ++k) {
        if (a[rank * width + k] != 0) a[r * width + k] -= factor * a[rank * width + k];
      }
    }
    pivot_col.push_back(c);
    ++rank;
  }

  bool progress = false;
  for (std::size_t r = 0; r < rank; ++r) {
    const std::size_t c = pivot_col[r];
    bool alone = true;
    for (std::size_t k = 0; k < cols && alone; ++k) {
      if (k != c && a[r * width + k] != 0) alone = false;
    }
    if (!alone) continue;
    const int var = unknowns[c];
    state.set(var, a[r * width + cols]);
    Derivation d{var, {}};
    if (track) {
      for (std::size_t k = 0; k < rows; ++k) {
        if (a[r * width + cols + 1 + k] != 0) d.equations.push_back(rows_eq[k]);
      }
      std::sort(d.equations.begin(), d.equations.end());
    }
    out.push_back(std::move(d));
    progress = true;
  }
  return progress;
}

}  // namespace detail

/// Applies the single-relation and joint-linear rules over `scope` until no
/// rule fires. Returns the derivations in the order they were made.
inline std::vector<Derivation> saturate(const EquationSystem& system, KnowledgeState& state,
                                        std::vector<int> scope, SaturationOptions options = {}) {
  std::vector<Derivation> out;
  bool progress = true;
  while (progress) {
    progress = false;
    if (options.shuffle) std::shuffle(scope.begin(), scope.end(), *options.shuffle);
    const bool system_first =
        options.shuffle && std::uniform_int_distribution<int>(0, 3)(*options.shuffle) == 0;
    if (system_first && detail::solve_system(system, state, scope, options.track_sources, out)) {
      progress = true;
      continue;
    }
    for (int eq : scope) {
      if (detail::solve_single(system, state, eq, out)) progress = true;
    }
    if (progress) continue;
    progress = detail::solve_system(system, state, scope, options.track_sources, out);
  }
  return out;
}

/// Saturation over every relation of the system.
inline std::vector<Derivation> saturate(const EquationSystem& system, KnowledgeState& state,
                                        SaturationOptions options = {}) {
  return saturate(system, state, system.all(), options);
}

}  // namespace empkit
