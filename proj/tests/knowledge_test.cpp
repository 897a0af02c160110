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

#include <random>

#include <gtest/gtest.h>

#include "support.hpp"

namespace empkit {
namespace {

using testing::example7;

KnowledgeState saturated(const Dag& dag, const EquationSystem& system, const Emp& emp, const TMatrix& t,
                         std::mt19937_64* shuffle = nullptr) {
  KnowledgeState state(system);
  reveal(system, state, emp, t);
  saturate(system, state, {.track_sources = false, .shuffle = shuffle});
  (void)dag;
  return state;
}

TEST(EquationSystem, Example7Shape) {
  const Dag dag = example7();
  const EquationSystem system(dag);
  int t_vars = 0, g_vars = 0;
  for (int v = 0; v < system.var_count(); ++v) {
    (system.var(v).kind == Variable::Kind::T ? t_vars : g_vars)++;
  }
  EXPECT_EQ(g_vars, 11);
  // Reachable strictly-lower pairs: every pair except (7,6).
  EXPECT_EQ(t_vars, 20);
  EXPECT_EQ(system.t_var(7, 6), -1);
  EXPECT_EQ(system.g_var(5, 2), -1);
  EXPECT_GE(system.g_var(7, 3), 0);
}

TEST(EquationSystem, RelationsHoldAtEveryPoint) {
  for (int n = 2; n <= 5; ++n) {
    for (std::uint64_t mask = 0; mask < testing::structure_count(n); mask += 3) {
      const Dag dag = testing::dag_from_mask(n, mask);
      const EquationSystem system(dag);
      RationalSampler sampler(mask + 17);
      const GMatrix g = sample_network(dag, sampler);
      const TMatrix t = compute_T(g);
      for (const Equation& eq : system.equations()) {
        Scalar sum = 0;
        for (const auto& term : eq.terms) {
          Scalar p = term.sign;
          for (int v : term.vars) {
            const Variable& var = system.var(v);
            p *= var.kind == Variable::Kind::T ? t.at(var.entry.row, var.entry.col) : g.at(var.entry.row, var.entry.col);
          }
          sum += p;
        }
        ASSERT_EQ(sum, 0);
      }
    }
  }
}

TEST(Saturate, FullInformationRecoversEverything) {
  const Dag dag = example7();
  const EquationSystem system(dag);
  RationalSampler sampler(8);
  const GMatrix g = sample_network(dag, sampler);
  Emp all;
  for (int v = 1; v <= 7; ++v) {
    all.excited.insert(v);
    all.measured.insert(v);
  }
  const auto state = saturated(dag, system, all, compute_T(g));
  EXPECT_TRUE(state.all_edges_known(system));
  for (const Entry& e : dag.edges()) {
    EXPECT_EQ(state.value[static_cast<std::size_t>(system.g_var(e.row, e.col))], g.at(e.row, e.col));
  }
}

TEST(Saturate, EmptySelectionAddsNothing) {
  const Dag dag = example7();
  const EquationSystem system(dag);
  RationalSampler sampler(8);
  const auto state = saturated(dag, system, Emp{{1, 2, 3}, {}}, compute_T(sample_network(dag, sampler)));
  EXPECT_TRUE(state.known_entries(system, Variable::Kind::T).empty());
  EXPECT_TRUE(state.known_entries(system, Variable::Kind::G).empty());
}

TEST(Saturate, IdempotentAndMonotone) {
  const Dag dag = example7();
  const EquationSystem system(dag);
  RationalSampler sampler(12);
  const TMatrix t = compute_T(sample_network(dag, sampler));
  const Emp small = parse_emp("E125,M467", 7);
  const Emp large = parse_emp("E125,M23467", 7);
  auto a = saturated(dag, system, small, t);
  const auto before = a.known;
  saturate(system, a);
  EXPECT_EQ(a.known, before);
  const auto b = saturated(dag, system, large, t);
  for (std::size_t v = 0; v < before.size(); ++v) {
    if (before[v]) {
      EXPECT_TRUE(b.known[v]);
    }
  }
  EXPECT_TRUE(b.all_edges_known(system));
  EXPECT_FALSE(a.all_edges_known(system));
}

TEST(Saturate, ConfluentUnderRandomRuleOrder) {
  std::mt19937_64 rng(2024);
  auto check = [&](const Dag& dag, const Emp& emp) {
    if (emp.excited.empty() || emp.measured.empty()) return;
    const EquationSystem system(dag);
    RationalSampler sampler(mix_seed(dag.edge_count(), emp.cardinality()));
    const TMatrix t = compute_T(sample_network(dag, sampler));
    const auto reference = saturated(dag, system, emp, t);
    for (int k = 0; k < 3; ++k) {
      const auto shuffled = saturated(dag, system, emp, t, &rng);
      ASSERT_EQ(shuffled.known, reference.known) << format_emp(emp, dag.size());
      for (std::size_t v = 0; v < reference.known.size(); ++v) {
        if (reference.known[v]) {
          ASSERT_EQ(shuffled.value[v], reference.value[v]);
        }
      }
    }
  };
  const Dag fig = example7();
  for (const Emp& e : testing::all_emps(7)) {
    if (check_necessary(fig, e).passed()) check(fig, e);
  }
  for (int n = 2; n <= 5; ++n) {
    for (std::uint64_t mask = 0; mask < testing::structure_count(n); ++mask) {
      const Dag dag = testing::dag_from_mask(n, mask);
      check(dag, initial_emp(dag));
      check(dag, upper_bound_emp(dag));
      check(dag, explicit_emp(dag));
    }
  }
}

TEST(Saturate, PendingZeroConstraintsShrink) {
  const Dag dag = example7();
  const EquationSystem system(dag);
  RationalSampler sampler(4);
  const TMatrix t = compute_T(sample_network(dag, sampler));
  const auto a = saturated(dag, system, parse_emp("E125,M467", 7), t);
  const auto b = saturated(dag, system, parse_emp("E125,M23467", 7), t);
  EXPECT_GT(a.pending_zero_constraints(system).size(), b.pending_zero_constraints(system).size());
}

}  // namespace
}  // namespace empkit
