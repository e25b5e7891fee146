// Copyright 2026 The hubplan Authors
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

#include "hubplan/optimizer.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <random>

namespace hubplan {
namespace {

PlacementProblem make_problem(const std::vector<std::pair<MetroId, std::int64_t>>& metros,
                              const std::vector<LatencyEntry>& entries, std::vector<PopId> pops = {}) {
  std::set<PopId> ids(pops.begin(), pops.end());
  for (const auto& e : entries) ids.insert(e.pop);
  std::vector<PopSite> sites;
  double x = 0.0;
  for (const auto& id : ids) sites.push_back({id, {x, x}}), x += 1.0;
  std::vector<BranchOffice> offices;
  for (const auto& [m, c] : metros) offices.push_back({m, c});
  return PlacementProblem(PopCatalog(sites), EnterpriseTopology(offices), LatencyMatrix::from_entries(entries));
}

// Exact integer objective of a solution, recomputed from its assignments.
double exact_objective(const PlacementSolution& s, const PlacementProblem& p) {
  double sum = 0.0;
  for (std::size_t j = 0; j < s.assignments.size(); ++j)
    sum += static_cast<double>(p.connections(j)) * s.assignments[j].latency_ms;
  return sum;
}

TEST(Solve, SingleMetroArgmin) {
  auto p = make_problem({{"j", 1}}, {{"j", "p1", 10}, {"j", "p2", 20}});
  auto s = std::get<PlacementSolution>(solve(p));
  EXPECT_EQ(*s.pop_for("j"), "p1");
  EXPECT_EQ(s.weighted_latency, 10.0);
  EXPECT_EQ(s.k, 1u);
}

TEST(Solve, CardinalityCapExample) {
  auto p = make_problem({{"a", 1}, {"b", 1}, {"c", 1}}, {{"a", "p1", 10},
                                                         {"a", "p2", 50},
                                                         {"b", "p1", 50},
                                                         {"b", "p2", 10},
                                                         {"c", "p1", 40},
                                                         {"c", "p2", 11}});
  auto s = std::get<PlacementSolution>(solve(p, {1, std::nullopt}));
  EXPECT_EQ(s.open_pops, std::vector<PopId>{"p2"});
  EXPECT_EQ(exact_objective(s, p), 71.0);
}

TEST(Solve, KCapBelowKMinIsInfeasible) {
  auto p = make_problem({{"a", 1}, {"b", 1}}, {{"a", "x", 1}, {"b", "y", 1}});
  auto r = solve(p, {1, std::nullopt});
  ASSERT_FALSE(is_feasible(r));
  EXPECT_EQ(std::get<Infeasible>(r).cause, Infeasible::Cause::k_cap);
}

TEST(Solve, SloBelowBestLatencyNamesMetro) {
  auto p = make_problem({{"a", 1}, {"b", 1}}, {{"a", "x", 10}, {"b", "x", 20}, {"b", "y", 15}});
  auto r = solve(p, {std::nullopt, SloMap{{"b", 12.0}}});
  ASSERT_FALSE(is_feasible(r));
  const auto& inf = std::get<Infeasible>(r);
  EXPECT_EQ(inf.cause, Infeasible::Cause::slo);
  EXPECT_EQ(inf.witnesses, std::vector<MetroId>{"b"});
}

TEST(Solve, SloForUnknownMetroRejected) {
  auto p = make_problem({{"a", 1}}, {{"a", "x", 10}});
  EXPECT_THROW(solve(p, {std::nullopt, SloMap{{"zz", 5.0}}}), ValidationError);
}

// Property: solve() equals exhaustive enumeration on feasibility, objective
// and the documented tie-break, for every cap and with random SLOs.
TEST(Solve, MatchesBruteForceOracle) {
  std::mt19937_64 rng(20240601);
  std::size_t checked = 0;
  for (int trial = 0; trial < 250; ++trial) {
    auto inst = oracle::random_instance(rng, 7, 5);
    auto problem = inst.problem();
    std::vector<std::optional<SloMap>> slos{std::nullopt, oracle::random_slo(inst, rng)};
    for (const auto& slo : slos) {
      for (std::size_t cap = 1; cap <= inst.pops.size(); ++cap) {
        auto expect = oracle::brute_force(inst, cap, slo);
        auto got = solve(problem, {cap, slo});
        ASSERT_EQ(is_feasible(got), expect.feasible) << "trial " << trial << " cap " << cap;
        ++checked;
        if (!expect.feasible) continue;
        const auto& s = std::get<PlacementSolution>(got);
        ASSERT_EQ(exact_objective(s, problem), expect.objective) << "trial " << trial << " cap " << cap;
        std::vector<std::size_t> idx;
        for (const auto& a : s.assignments) idx.push_back(*problem.pop_index(a.pop));
        EXPECT_EQ(idx, expect.assignment) << "tie-break, trial " << trial << " cap " << cap;
      }
    }
  }
  EXPECT_GE(checked, 200u);
}

TEST(FindKMin, Examples) {
  auto full = make_problem({{"a", 1}, {"b", 1}}, {{"a", "x", 1}, {"a", "y", 2}, {"b", "x", 3}, {"b", "y", 4}});
  EXPECT_EQ(std::get<std::size_t>(find_k_min(full)), 1u);

  auto disjoint = make_problem({{"a", 1}, {"b", 1}}, {{"a", "x", 1}, {"b", "y", 1}});
  EXPECT_EQ(std::get<std::size_t>(find_k_min(disjoint)), 2u);

  auto cover = make_problem({{"a", 1}, {"b", 1}, {"c", 1}}, {{"a", "p1", 1},
                                                             {"a", "p2", 1},
                                                             {"b", "p2", 1},
                                                             {"b", "p3", 1},
                                                             {"c", "p2", 1}});
  EXPECT_EQ(std::get<std::size_t>(find_k_min(cover)), 1u);
}

TEST(FindKMin, MatchesExhaustiveCover) {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 100; ++trial) {
    auto inst = oracle::random_instance(rng, 20, 12, 0.25);
    auto k = find_k_min(inst.problem());
    EXPECT_EQ(std::get<std::size_t>(k), *oracle::exhaustive_cover(inst)) << trial;
  }
}

TEST(LOptimal, DistinctArgminsGiveKMaxM) {
  auto p = make_problem({{"a", 1}, {"b", 1}}, {{"a", "x", 1}, {"a", "y", 5}, {"b", "x", 5}, {"b", "y", 1}});
  auto r = std::get<ModeResult>(l_optimal(p));
  EXPECT_EQ(*r.k_max, 2u);
}

TEST(LOptimal, TiePrefersAlreadyOpenPop) {
  // b ties between "a1" (fresh, lexicographically first) and "z" (open for a).
  auto p = make_problem({{"a", 1}, {"b", 1}}, {{"a", "z", 5}, {"b", "a1", 7}, {"b", "z", 7}});
  auto r = std::get<ModeResult>(l_optimal(p));
  EXPECT_EQ(*r.solution.pop_for("b"), "z");
  EXPECT_EQ(*r.k_max, 1u);
}

TEST(KOptimal, SingleCoveringPopOfLeastLatency) {
  auto p = make_problem({{"a", 1}, {"b", 3}}, {{"a", "x", 10}, {"a", "y", 20}, {"b", "x", 30}, {"b", "y", 20}});
  auto r = std::get<ModeResult>(k_optimal(p));
  // x: (10 + 90)/4 = 25 ; y: (20 + 60)/4 = 20
  EXPECT_EQ(r.solution.open_pops, std::vector<PopId>{"y"});
  EXPECT_EQ(*r.k_min, 1u);
}

TEST(KOptimal, OneMetroEqualsLOptimal) {
  auto p = make_problem({{"a", 4}}, {{"a", "x", 10}, {"a", "y", 8}});
  EXPECT_EQ(std::get<ModeResult>(k_optimal(p)).solution, std::get<ModeResult>(l_optimal(p)).solution);
}

TEST(MeanK, Rounding) {
  EXPECT_EQ(mean_k_of(2, 6), 4u);
  EXPECT_EQ(mean_k_of(3, 4), 4u);
  EXPECT_EQ(mean_k_of(5, 5), 5u);
}

TEST(MeanK, EqualEndpointsMatchBothModes) {
  auto p = make_problem({{"a", 1}, {"b", 1}}, {{"a", "x", 1}, {"b", "y", 1}});
  auto m = std::get<ModeResult>(mean_k(p));
  EXPECT_EQ(m.solution, std::get<ModeResult>(l_optimal(p)).solution);
  EXPECT_EQ(m.solution, std::get<ModeResult>(k_optimal(p)).solution);
}

TEST(SloOptimal, InfiniteSloEqualsKOptimal) {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 30; ++t) {
    auto inst = oracle::random_instance(rng, 6, 5);
    auto p = inst.problem();
    SloMap slo;
    for (const auto& m : inst.metros) slo[m] = std::numeric_limits<double>::infinity();
    EXPECT_EQ(std::get<ModeResult>(slo_optimal(p, slo)).solution, std::get<ModeResult>(k_optimal(p)).solution);
  }
}

TEST(SloOptimal, RespectsCapsAndMinimizesK) {
  auto p = make_problem({{"a", 1}, {"b", 1}}, {{"a", "x", 10}, {"a", "y", 30}, {"b", "x", 30}, {"b", "y", 10}});
  auto r = std::get<ModeResult>(slo_optimal(p, {{"a", 15.0}}));
  EXPECT_EQ(*r.solution.pop_for("a"), "x");
  EXPECT_EQ(r.solution.k, 1u);
}

TEST(Pareto, InvariantsOnRandomInstances) {
  std::mt19937_64 rng(314);
  for (int t = 0; t < 100; ++t) {
    auto inst = oracle::random_instance(rng, 7, 5);
    auto p = inst.problem();
    auto f = std::get<ParetoFrontier>(pareto_sweep(p));
    ASSERT_EQ(f.points.size(), f.k_max - f.k_min + 1);
    EXPECT_EQ(f.k_min, *oracle::exhaustive_cover(inst));
    for (std::size_t i = 1; i < f.points.size(); ++i)
      EXPECT_LE(f.points[i].solution.weighted_latency, f.points[i - 1].solution.weighted_latency);
    EXPECT_EQ(f.points.back().solution.weighted_latency,
              std::get<ModeResult>(l_optimal(p)).solution.weighted_latency);
  }
}

TEST(Baselines, HubExamples) {
  auto p = make_problem({{"a", 600}, {"b", 600}}, {{"a", "x", 1}, {"b", "x", 1}});
  auto h = baseline_hub_counts(p, {{"a", "x"}, {"b", "x"}});
  EXPECT_EQ(h.baseline1, 2);
  EXPECT_EQ(h.baseline2, 2);
  EXPECT_EQ(h.baseline3, 2);

  auto q = make_problem({{"a", 400}, {"b", 400}}, {{"a", "x", 1}, {"b", "x", 1}});
  auto g = baseline_hub_counts(q, {{"a", "x"}, {"b", "x"}});
  EXPECT_EQ(g.baseline1, 2);
  EXPECT_EQ(g.baseline2, 1);
  EXPECT_EQ(g.baseline3, 1);
}

TEST(Baselines, OrderedAndBracketSolverHubs) {
  std::mt19937_64 rng(77);
  std::uniform_int_distribution<std::int64_t> conn(1, 3000);
  for (int t = 0; t < 50; ++t) {
    auto inst = oracle::random_instance(rng, 7, 5);
    for (auto& c : inst.connections) c = conn(rng);
    auto p = inst.problem();
    for (auto mode : {Mode::l_optimal, Mode::k_optimal}) {
      auto r = std::get<ModeResult>(mode == Mode::l_optimal ? l_optimal(p) : k_optimal(p));
      auto h = baseline_hub_counts(p, r.solution.assignment());
      EXPECT_LE(h.baseline3, h.baseline2);
      EXPECT_LE(h.baseline2, h.baseline1);
      EXPECT_GE(r.solution.total_hubs, h.baseline3);
      EXPECT_LE(r.solution.total_hubs, h.baseline1);
    }
  }
}

TEST(Baselines, GeoFallsBackWhenDefaultUnmeasured) {
  auto p = make_problem({{"a", 1}, {"b", 1}}, {{"a", "x", 10}, {"a", "y", 5}, {"b", "y", 3}}, {"x", "y", "z"});
  DefaultsTable d{{"a", {"x", "x"}}, {"b", {"z", "z"}}};
  auto r = baseline_placement(p, d, BaselineKind::geo);
  EXPECT_EQ(*r.solution.pop_for("a"), "x");
  EXPECT_EQ(*r.solution.pop_for("b"), "y");
  EXPECT_EQ(r.fallback_metros, std::vector<MetroId>{"b"});
}

TEST(Baselines, DefaultsAtArgminMatchLOptimal) {
  auto p = make_problem({{"a", 825}, {"b", 3}}, {{"a", "dal", 31}, {"a", "x", 40}, {"b", "x", 9}});
  DefaultsTable d{{"a", {"dal", "dal"}}, {"b", {"x", "x"}}};
  EXPECT_EQ(baseline_placement(p, d, BaselineKind::geo).solution.weighted_latency,
            std::get<ModeResult>(l_optimal(p)).solution.weighted_latency);
}

TEST(Linking, LiteralFormForbidsSharing) {
  auto p = make_problem({{"a", 1}, {"b", 1}}, {{"a", "x", 1}, {"b", "x", 1}, {"b", "y", 9}});
  auto linked = std::get<PlacementSolution>(solve(p));
  EXPECT_EQ(linked.k, 1u);
  auto literal = std::get<PlacementSolution>(solve(p, {std::nullopt, std::nullopt, LinkingForm::literal}));
  EXPECT_EQ(literal.k, 2u);
  EXPECT_EQ(*literal.pop_for("b"), "y");

  auto crowded = make_problem({{"a", 1}, {"b", 1}}, {{"a", "x", 1}, {"b", "x", 1}});
  auto r = solve(crowded, {std::nullopt, std::nullopt, LinkingForm::literal});
  ASSERT_FALSE(is_feasible(r));
  EXPECT_EQ(std::get<Infeasible>(r).cause, Infeasible::Cause::linking);
}

TEST(Linking, LiteralFormMatchesInjectiveOracle) {
  std::mt19937_64 rng(4242);
  for (int trial = 0; trial < 150; ++trial) {
    auto inst = oracle::random_instance(rng, 5, 5, 0.8);
    auto problem = inst.problem();
    auto expect = oracle::brute_force(inst, std::nullopt, std::nullopt, true);
    auto got = solve(problem, {std::nullopt, std::nullopt, LinkingForm::literal});
    ASSERT_EQ(is_feasible(got), expect.feasible) << trial;
    if (expect.feasible) EXPECT_EQ(exact_objective(std::get<PlacementSolution>(got), problem), expect.objective);
  }
}

TEST(Missing, BigMAllowsUnmeasuredPairs) {
  std::vector<PopSite> sites{{"x", {0, 0}}, {"y", {1, 1}}};
  PlacementProblem p(PopCatalog(sites), EnterpriseTopology({{"a", 1}, {"b", 1}}),
                     LatencyMatrix::from_entries({{"a", "x", 10}, {"b", "y", 10}}), 1000,
                     MissingPolicy::big_m_value(100));
  EXPECT_EQ(std::get<std::size_t>(find_k_min(p)), 1u);
  auto s = std::get<PlacementSolution>(solve(p, {1, std::nullopt}));
  EXPECT_EQ(s.weighted_latency, 55.0);
}

TEST(Solve, Deterministic) {
  std::mt19937_64 rng(11);
  auto inst = oracle::random_instance(rng, 7, 5);
  auto p = inst.problem();
  EXPECT_EQ(std::get<PlacementSolution>(solve(p, {2, std::nullopt})),
            std::get<PlacementSolution>(solve(p, {2, std::nullopt})));
}

}  // namespace
}  // namespace hubplan
