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

// Exact arithmetic on the lower triangular network matrix G, the I/O matrix
// T = (I - G)^-1 and its inverse S, plus the explicit expansion of every
// G entry as a signed sum of products of T entries.
//
// The network is evaluated at a single generic point: each transfer function
// is replaced by one exact rational number.

#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "empkit/emp.hpp"
#include "empkit/error.hpp"
#include "empkit/graph.hpp"
#include "empkit/rational.hpp"

namespace empkit {

/// Dense n x n lower triangular matrix with a constant diagonal (0 or 1).
/// Entries above the diagonal are zero and read-only.
class LowerMatrix {
 public:
  LowerMatrix() = default;
  LowerMatrix(int n, int diagonal)
      : n_(n), diagonal_(diagonal), data_(static_cast<std::size_t>(n * (n - 1) / 2)) {}

  int size() const { return n_; }
  int diagonal() const { return diagonal_; }

  /// Any entry, 1-based.
  Scalar at(int l, int j) const {
    if (l == j) return diagonal_;
    if (j > l) return 0;
    return data_[offset(l, j)];
  }

  /// Mutable strictly-lower entry (l > j).
  Scalar& lower(int l, int j) { return data_[offset(l, j)]; }
  const Scalar& lower(int l, int j) const { return data_[offset(l, j)]; }

  friend bool operator==(const LowerMatrix&, const LowerMatrix&) = default;

 private:
  static std::size_t offset(int l, int j) {
    return static_cast<std::size_t>((l - 1) * (l - 2) / 2 + (j - 1));
  }

  int n_ = 0;
  int diagonal_ = 0;
  std::vector<Scalar> data_;
};

/// Unit lower triangular matrices: T and S.
using TMatrix = LowerMatrix;

/// Network matrix instance: strictly lower triangular, nonzero only on edges.
class GMatrix {
 public:
  /// `values` follows dag.edges() order.
  GMatrix(const Dag& dag, const std::vector<Scalar>& values) : matrix_(dag.size(), 0) {
    if (values.size() != dag.edges().size()) {
      throw InputError("GMatrix needs one value per edge");
    }
    for (std::size_t k = 0; k < values.size(); ++k) {
      const Entry& e = dag.edges()[k];
      matrix_.lower(e.row, e.col) = values[k];
      edges_.push_back(e);
    }
  }

  int size() const { return matrix_.size(); }
  Scalar at(int l, int j) const { return matrix_.at(l, j); }
  const LowerMatrix& matrix() const { return matrix_; }
  const std::vector<Entry>& edges() const { return edges_; }

  /// Edge values in dag.edges() order.
  std::vector<Scalar> edge_values() const {
    std::vector<Scalar> v;
    for (const Entry& e : edges_) v.push_back(matrix_.lower(e.row, e.col));
    return v;
  }

 private:
  LowerMatrix matrix_;
  std::vector<Entry> edges_;
};

/// Random instance: one nonzero random rational per edge.
inline GMatrix sample_network(const Dag& dag, RationalSampler& sampler) {
  std::vector<Scalar> values;
  values.reserve(dag.edges().size());
  for (std::size_t k = 0; k < dag.edges().size(); ++k) values.push_back(sampler.nonzero());
  return GMatrix(dag, values);
}

/// T = (I - G)^-1 by the row recursion T(l,j) = sum_{i=j}^{l-1} G(l,i) T(i,j).
inline TMatrix compute_T(const GMatrix& g) {
  const int n = g.size();
  TMatrix t(n, 1);
  const LowerMatrix& gm = g.matrix();
  for (int l = 2; l <= n; ++l) {
    for (int j = 1; j < l; ++j) {
      Scalar sum = gm.lower(l, j);  // i = j term, T(j,j) = 1
      for (int i = j + 1; i < l; ++i) {
        const Scalar& gli = gm.lower(l, i);
        if (gli != 0) sum += gli * t.lower(i, j);
      }
      t.lower(l, j) = sum;
    }
  }
  return t;
}

/// Same matrix by the column recursion T(l,j) = sum_{i=j+1}^{l} T(l,i) G(i,j).
inline TMatrix compute_T_by_columns(const GMatrix& g) {
  const int n = g.size();
  TMatrix t(n, 1);
  const LowerMatrix& gm = g.matrix();
  for (int l = 2; l <= n; ++l) {
    for (int j = l - 1; j >= 1; --j) {
      Scalar sum = gm.lower(l, j);  // i = l term, T(l,l) = 1
      for (int i = j + 1; i < l; ++i) {
        const Scalar& gij = gm.lower(i, j);
        if (gij != 0) sum += t.lower(l, i) * gij;
      }
      t.lower(l, j) = sum;
    }
  }
  return t;
}

/// S = T^-1 for unit lower triangular T (forward substitution).
inline TMatrix compute_S(const TMatrix& t) {
  const int n = t.size();
  TMatrix s(n, 1);
  for (int l = 2; l <= n; ++l) {
    for (int j = 1; j < l; ++j) {
      Scalar sum = t.lower(l, j);  // S(j,j) = 1
      for (int i = j + 1; i < l; ++i) sum += t.lower(l, i) * s.lower(i, j);
      s.lower(l, j) = -sum;
    }
  }
  return s;
}

/// Signed product of T entries. Factors run down the chain:
/// T(l,i_k) T(i_k,i_{k-1}) ... T(i_1,j).
struct Monomial {
  int sign = 1;
  std::vector<Entry> factors;

  friend bool operator==(const Monomial&, const Monomial&) = default;
};

/// G(l, j) written as a signed sum of products of T entries.
///
/// One monomial per increasing chain j < i_1 < ... < i_k < l whose
/// intermediate nodes are out-neighbours of j (the expansion obtained by
/// substituting G(l,j) = T(l,j) - sum_i T(l,i) G(i,j) into itself); a chain
/// with k intermediate nodes contributes (-1)^k. Monomials with a
/// structurally zero factor are omitted. For a structural zero the sum
/// evaluates to 0.
struct ChainExpansion {
  Entry target;
  bool structural_zero = false;
  std::vector<Monomial> monomials;  // sorted by chain read from l down to j
};

namespace detail {

inline std::string entry_text(char symbol, const Entry& e) {
  return std::string(1, symbol) + "[" + std::to_string(e.row) + "," + std::to_string(e.col) + "]";
}

inline std::string monomials_text(const std::vector<Monomial>& monomials) {
  if (monomials.empty()) return "0";
  std::string out;
  for (const Monomial& m : monomials) {
    if (!out.empty()) out += " ";
    out += m.sign > 0 ? "+" : "-";
    for (const Entry& f : m.factors) out += entry_text('T', f);
  }
  return out;
}

}  // namespace detail

inline ChainExpansion chain_expand(const Dag& dag, Entry target) {
  const int l = target.row;
  const int j = target.col;
  if (l > dag.size() || j < 1 || l <= j) {
    throw InputError("chain expansion needs a strictly lower entry, got " + detail::entry_text('G', target));
  }
  ChainExpansion out;
  out.target = target;
  out.structural_zero = !dag.has_edge(l, j);

  std::vector<int> candidates;
  for (int i : dag.out_neighbors(j)) {
    if (i > j && i < l && dag.reaches(i, l)) candidates.push_back(i);
  }
  // Chains as vertex lists read from l down to j.
  std::vector<std::vector<int>> chains;
  std::vector<int> chosen;  // increasing
  auto emit = [&] {
    std::vector<int> chain{l};
    for (auto it = chosen.rbegin(); it != chosen.rend(); ++it) chain.push_back(*it);
    chain.push_back(j);
    for (std::size_t k = 0; k + 1 < chain.size(); ++k) {
      if (!dag.reaches(chain[k + 1], chain[k])) return;
    }
    chains.push_back(std::move(chain));
  };
  auto walk = [&](auto&& self, std::size_t from) -> void {
    emit();
    for (std::size_t k = from; k < candidates.size(); ++k) {
      chosen.push_back(candidates[k]);
      self(self, k + 1);
      chosen.pop_back();
    }
  };
  walk(walk, 0);
  std::sort(chains.begin(), chains.end());
  for (const auto& chain : chains) {
    Monomial m;
    const auto factors = chain.size() - 1;
    m.sign = factors % 2 == 1 ? 1 : -1;
    for (std::size_t k = 0; k + 1 < chain.size(); ++k) m.factors.push_back({chain[k], chain[k + 1]});
    out.monomials.push_back(std::move(m));
  }
  return out;
}

inline Scalar evaluate(const std::vector<Monomial>& monomials, const TMatrix& t) {
  Scalar sum = 0;
  for (const Monomial& m : monomials) {
    Scalar product = m.sign;
    for (const Entry& f : m.factors) product *= t.at(f.row, f.col);
    sum += product;
  }
  return sum;
}

inline Scalar evaluate(const ChainExpansion& expansion, const TMatrix& t) {
  return evaluate(expansion.monomials, t);
}

/// "G[7,3] = +T[7,3] -T[7,4]T[4,3] -T[7,5]T[5,3] +T[7,5]T[5,4]T[4,3]"
inline std::string format_expansion(const ChainExpansion& expansion) {
  return detail::entry_text('G', expansion.target) + " = " + detail::monomials_text(expansion.monomials);
}

/// Structural zero G(l,j) = 0 rearranged as T(l,j) = sum of the remaining
/// monomials with flipped signs. An empty right-hand side means no chain
/// connects j to l and T(l,j) vanishes identically.
struct ZeroConstraint {
  Entry target;
  std::vector<Monomial> rhs;

  bool identically_zero() const { return rhs.empty(); }
};

inline ZeroConstraint zero_constraint(const Dag& dag, Entry target) {
  if (target.row <= target.col || target.row > dag.size() || target.col < 1) {
    throw NotAStructuralZero(detail::entry_text('G', target) + " is not a strictly lower entry");
  }
  if (dag.has_edge(target.row, target.col)) {
    throw NotAStructuralZero(detail::entry_text('G', target) + " is an edge, not a structural zero");
  }
  ZeroConstraint out;
  out.target = target;
  for (Monomial& m : chain_expand(dag, target).monomials) {
    if (m.factors.size() == 1) continue;  // the lone T(l,j) term
    m.sign = -m.sign;
    out.rhs.push_back(std::move(m));
  }
  return out;
}

/// "T[5,2] = +T[5,3]T[3,2] +T[5,4]T[4,2] -T[5,4]T[4,3]T[3,2]"
inline std::string format_constraint(const ZeroConstraint& c) {
  return detail::entry_text('T', c.target) + " = " + detail::monomials_text(c.rhs);
}

/// Dense rational matrix with row/column node labels.
struct SelectionMatrix {
  std::vector<int> rows;  // measured nodes, increasing
  std::vector<int> cols;  // excited nodes, increasing
  std::vector<Scalar> values;

  const Scalar& at(std::size_t r, std::size_t c) const { return values[r * cols.size() + c]; }
};

/// M = C T B: rows are the measured nodes, columns the excited nodes.
inline SelectionMatrix compute_M(const TMatrix& t, const Emp& emp) {
  if (emp.excited.empty() || emp.measured.empty()) {
    throw EmptySelection("M = C T B needs at least one excited and one measured node");
  }
  SelectionMatrix m;
  m.rows.assign(emp.measured.begin(), emp.measured.end());
  m.cols.assign(emp.excited.begin(), emp.excited.end());
  for (int v : m.rows) {
    if (v < 1 || v > t.size()) throw UnknownNode("measured node " + std::to_string(v) + " out of range");
  }
  for (int v : m.cols) {
    if (v < 1 || v > t.size()) throw UnknownNode("excited node " + std::to_string(v) + " out of range");
  }
  for (int i : m.rows) {
    for (int j : m.cols) m.values.push_back(t.at(i, j));
  }
  return m;
}

}  // namespace empkit
