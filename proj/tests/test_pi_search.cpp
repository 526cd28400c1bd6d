#include <algorithm>
#include <map>
#include <random>

#include <gtest/gtest.h>

#include "piex/classifier.h"
#include "piex/io.h"
#include "piex/pi_search.h"
#include "support.h"

namespace piex {
namespace {

using testing::SmallGraph;

LabeledGraph labeled(std::size_t n, std::vector<Edge> edges) {
  return testing::to_labeled(SmallGraph{n, std::move(edges)});
}

std::vector<NodeSet> sets_of(const ExtensionDag &dag,
                             const std::vector<std::size_t> &idx) {
  std::vector<NodeSet> out;
  for (std::size_t i : idx)
    out.push_back(dag.node(i));
  return out;
}

// Decision table over DAG node indices, looked up by node set.
NodeDecision table_decision(const ExtensionDag &dag, std::vector<bool> table) {
  return [&dag, table = std::move(table)](const NodeSet &s) {
    return table.at(*dag.find(s));
  };
}

void expect_consistent(const ExtensionDag &dag, const PiSearchResult &r) {
  std::size_t decided = 0, removed = 0;
  for (NodeStatus s : r.status) {
    ASSERT_NE(s, NodeStatus::kUnvisited);
    decided += s == NodeStatus::kPositive || s == NodeStatus::kNegative;
    removed += s == NodeStatus::kNegative || s == NodeStatus::kPruned;
  }
  EXPECT_EQ(r.classifier_calls, decided);
  EXPECT_EQ(r.dag_nodes_pruned, removed);
  EXPECT_LE(r.classifier_calls, dag.node_count());
  EXPECT_EQ(r.dag_nodes_total, dag.node_count());
}

TEST(PiSearchTest, ChainKeepsLastPositive) {
  const auto dag = build_extension_dag(labeled(3, {{0, 1}, {1, 2}}), 0);
  const auto r = compute_pi_explanations(dag, [](const NodeSet &s) {
    return s.size() >= 2;
  });
  EXPECT_EQ(sets_of(dag, r.explanation_nodes), (std::vector<NodeSet>{{0, 1}}));
  EXPECT_EQ(r.classifier_calls, 3u);
  EXPECT_EQ(r.dag_nodes_pruned, 1u);
}

TEST(PiSearchTest, AlwaysPositiveYieldsRoot) {
  const auto dag = build_extension_dag(labeled(4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}}), 0);
  const auto r = compute_pi_explanations(dag, [](const NodeSet &) { return true; });
  EXPECT_EQ(sets_of(dag, r.explanation_nodes), (std::vector<NodeSet>{{0}}));
  EXPECT_EQ(r.classifier_calls, dag.node_count());
  EXPECT_EQ(r.dag_nodes_pruned, 0u);
  expect_consistent(dag, r);
}

TEST(PiSearchTest, StarWithRequiredLeaf) {
  const auto dag = build_extension_dag(labeled(4, {{0, 1}, {0, 2}, {0, 3}}), 0);
  const auto r = compute_pi_explanations(dag, [](const NodeSet &s) {
    return s.contains(2);
  });
  EXPECT_EQ(sets_of(dag, r.explanation_nodes), (std::vector<NodeSet>{{0, 2}}));
  std::vector<NodeSet> removed;
  for (std::size_t i = 0; i < dag.node_count(); ++i)
    if (r.status[i] == NodeStatus::kNegative || r.status[i] == NodeStatus::kPruned)
      removed.push_back(dag.node(i));
  std::sort(removed.begin(), removed.end());
  EXPECT_EQ(removed, (std::vector<NodeSet>{{0}, {0, 1}, {0, 1, 3}, {0, 3}}));
  EXPECT_EQ(r.dag_nodes_pruned, 4u);
  EXPECT_EQ(r.classifier_calls, 5u);
  EXPECT_EQ(brute_force_pi(dag, [](const NodeSet &s) { return s.contains(2); }),
            r.explanation_nodes);
  expect_consistent(dag, r);
}

TEST(PiSearchTest, NegativeSourceIsAnError) {
  const auto dag = build_extension_dag(labeled(2, {{0, 1}}), 0);
  EXPECT_THROW(compute_pi_explanations(dag, [](const NodeSet &) { return false; }),
               DomainError);
}

TEST(PiSearchTest, ExhaustiveTablesOnSmallBases) {
  std::mt19937_64 rng(5);
  std::size_t tables = 0;
  for (std::size_t n = 1; n <= 5; ++n)
    for (const SmallGraph &sg : testing::connected_graphs(n)) {
      const LabeledGraph g = testing::to_labeled(sg);
      const auto dag = build_extension_dag(g, 0);
      const std::size_t m = dag.node_count();
      const bool exhaustive = m <= 12;
      const std::uint64_t count = exhaustive ? (std::uint64_t{1} << (m - 1)) : 500;
      for (std::uint64_t k = 0; k < count; ++k) {
        std::vector<bool> table(m);
        for (std::size_t i = 0; i < m; ++i)
          table[i] = exhaustive ? (k >> i & 1) : (rng() & 1);
        table[m - 1] = true;  // the source must decide 1
        const NodeDecision d = table_decision(dag, table);
        const auto r = compute_pi_explanations(dag, d);
        ASSERT_EQ(r.explanation_nodes, brute_force_pi(dag, d));
        expect_consistent(dag, r);
        ++tables;
      }
    }
  EXPECT_GT(tables, 1000u);
}

TEST(PiSearchTest, RandomNonMonotoneDecisionsOnLargerBases) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + trial % 11;
    const LabeledGraph g = testing::to_labeled(testing::random_connected(rng, n, 4, 0.3));
    const auto dag = build_extension_dag(g, 0);
    const double p = std::uniform_real_distribution<>(0.5, 0.98)(rng);
    std::bernoulli_distribution coin(p);
    std::vector<bool> table(dag.node_count());
    for (std::size_t i = 0; i < table.size(); ++i)
      table[i] = coin(rng);
    table.back() = true;
    const NodeDecision d = table_decision(dag, table);
    const auto r = compute_pi_explanations(dag, d);
    ASSERT_EQ(r.explanation_nodes, brute_force_pi(dag, d)) << "trial " << trial;
  }
}

TEST(PiSearchTest, MonotoneDecisionGivesMinimalElementsOfUpSet) {
  // decide(S) = 1 iff S contains one of a few random generator sets
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 3 + trial % 6;
    const LabeledGraph g = testing::to_labeled(testing::random_connected(rng, n, 4, 0.4));
    const auto dag = build_extension_dag(g, 0);
    std::vector<NodeSet> gens;
    for (int k = 0; k < 3; ++k)
      gens.push_back(dag.node(rng() % dag.node_count()));
    auto d = [&](const NodeSet &s) {
      return std::any_of(gens.begin(), gens.end(),
                         [&](const NodeSet &x) { return s.includes(x); });
    };
    // minimal DAG nodes containing some generator
    std::vector<std::size_t> expected;
    for (std::size_t i = 0; i < dag.node_count(); ++i) {
      if (!d(dag.node(i)))
        continue;
      bool minimal = true;
      for (std::size_t j = 0; j < dag.node_count(); ++j)
        if (j != i && d(dag.node(j)) && dag.node(i).includes(dag.node(j)))
          minimal = false;
      if (minimal)
        expected.push_back(i);
    }
    EXPECT_EQ(compute_pi_explanations(dag, d).explanation_nodes, expected);
  }
}

TEST(PiSearchTest, BatchSizeDoesNotChangeResults) {
  std::mt19937_64 rng(33);
  for (int trial = 0; trial < 50; ++trial) {
    const LabeledGraph g = testing::to_labeled(testing::random_connected(rng, 9, 4, 0.4));
    const auto dag = build_extension_dag(g, 0);
    std::vector<bool> table(dag.node_count());
    for (std::size_t i = 0; i < table.size(); ++i)
      table[i] = rng() % 5 != 0;
    table.back() = true;
    const NodeDecision d = table_decision(dag, table);
    const auto single = compute_pi_explanations(dag, d);
    for (std::size_t batch : {1, 2, 7, 1024}) {
      std::size_t largest = 0;
      const auto r = compute_pi_explanations_batched(
          dag,
          [&](std::span<const NodeSet> nodes) {
            largest = std::max(largest, nodes.size());
            std::vector<bool> out;
            for (const NodeSet &s : nodes)
              out.push_back(d(s));
            return out;
          },
          {batch});
      EXPECT_LE(largest, batch);
      EXPECT_EQ(r.explanation_nodes, single.explanation_nodes);
      EXPECT_EQ(r.status, single.status);
      EXPECT_EQ(r.classifier_calls, single.classifier_calls);
      EXPECT_EQ(r.rounds, single.rounds);
    }
  }
}

TEST(PiSearchTest, ExplanationsAreMinimalUnderCoverRelation) {
  std::mt19937_64 rng(44);
  for (int trial = 0; trial < 100; ++trial) {
    const LabeledGraph g = testing::to_labeled(testing::random_connected(rng, 7, 4, 0.4));
    const auto dag = build_extension_dag(g, 0);
    std::vector<bool> table(dag.node_count());
    for (std::size_t i = 0; i < table.size(); ++i)
      table[i] = rng() % 4 != 0;
    table.back() = true;
    const auto r = compute_pi_explanations(dag, table_decision(dag, table));
    for (std::size_t z : r.explanation_nodes) {
      EXPECT_TRUE(table[z]);
      for (std::uint32_t child : dag.children(z))
        EXPECT_NE(r.status[child], NodeStatus::kPositive);
      // every DAG node containing z decides 1
      for (std::size_t w = 0; w < dag.node_count(); ++w)
        if (dag.node(w).includes(dag.node(z)))
          EXPECT_TRUE(table[w]);
    }
  }
}

TEST(PiSearchTest, BruteForceOnHandBuiltDag) {
  // a DAG that is not built from a graph: {0} < {0,1} < {0,1,2}, {0} < {0,2}
  // < {0,1,2}
  const std::vector<NodeId> ids{0, 1, 2};
  const ExtensionDag dag(0, ids, {0b001, 0b011, 0b101, 0b111},
                         {{0b111, 0b011}, {0b111, 0b101}, {0b011, 0b001}, {0b101, 0b001}});
  auto d = [](const NodeSet &s) { return s != NodeSet{0} && s != NodeSet{0, 2}; };
  EXPECT_EQ(sets_of(dag, brute_force_pi(dag, d)), (std::vector<NodeSet>{{0, 1}}));
  EXPECT_EQ(compute_pi_explanations(dag, d).explanation_nodes, brute_force_pi(dag, d));
}

//
// End-to-end
//

ItsGraph fixture() {
  return parse_its(read_text_file(std::string(PIEX_DATA_DIR) + "/ester_ammonolysis.json"));
}

DecisionFunction clf(const std::string &spec, double threshold = 0.5) {
  return DecisionFunction(make_scorer(spec), threshold);
}

TEST(ExplainTest, AcceptEverythingGivesCenter) {
  const ItsGraph its = fixture();
  const SearchReport r = explain_instance(its, clf("size:0"));
  ASSERT_EQ(r.explanations.size(), 1u);
  EXPECT_EQ(r.explanations[0].its_edges, reaction_center(its));
  EXPECT_EQ(r.classifier_calls, r.dag_nodes_total);
  EXPECT_EQ(r.dag_nodes_total, 8u);
  EXPECT_EQ(r.cache_hits, 1u);  // the full instance is scored once
  EXPECT_TRUE(r.label);
}

TEST(ExplainTest, InstanceOnlyPositiveGivesWholeInstance) {
  const ItsGraph its = fixture();
  const SearchReport r =
      explain_instance(its, clf("size:" + std::to_string(its.edge_count())));
  ASSERT_EQ(r.explanations.size(), 1u);
  EXPECT_EQ(r.explanations[0].its_edges, its.graph().edge_set());
}

TEST(ExplainTest, CarbonylPatternForcesTheCarbonylBond) {
  const ItsGraph its = fixture();
  const DecisionFunction f = clf("pattern:O[2,2]C[0,1]N");
  const SearchReport r = explain_instance(its, f);
  ASSERT_FALSE(r.explanations.empty());
  auto label_of = [&](const LabeledGraph &g) { return decide(f, g); };
  for (const Explanation &e : r.explanations) {
    EXPECT_TRUE(e.its_edges.contains(Edge(2, 3)));
    EXPECT_TRUE(testing::audit_explanation(its, e.its_edges, label_of).ok());
  }
}

TEST(ExplainTest, NegativePredictionsAreExplainedToo) {
  const ItsGraph its = fixture();
  // the instance lacks S, so it is predicted infeasible; nothing can flip it
  const SearchReport r = explain_instance(its, clf("pattern:S-C"));
  EXPECT_FALSE(r.label);
  ASSERT_EQ(r.explanations.size(), 1u);
  EXPECT_FALSE(r.explanations[0].label);
  EXPECT_EQ(r.explanations[0].its_edges, reaction_center(its));
}

TEST(ExplainTest, MatchesLatticeReferenceOnRandomInstances) {
  std::mt19937_64 rng(1234);
  const std::vector<std::string> specs = {"pattern:N-C", "pattern:O-C-C",
                                          "pattern:C[1,1]C", "size:3"};
  for (int trial = 0; trial < 60; ++trial) {
    const ItsGraph its = testing::random_its(rng, 4 + trial % 5, 3, 1 + trial % 2);
    const DecisionFunction f = clf(specs[trial % specs.size()]);
    const SearchReport r = explain_instance(its, f);
    auto label_of = [&](const LabeledGraph &g) { return decide(f, g); };
    std::vector<std::uint64_t> got;
    for (const Explanation &e : r.explanations)
      got.push_back(testing::edge_mask(its.graph(), e.its_edges));
    std::sort(got.begin(), got.end());
    EXPECT_EQ(got, testing::reference_explanations(its, label_of)) << "trial " << trial;
  }
}

TEST(ExplainTest, ParallelChunksGiveTheSameReport) {
  std::mt19937_64 rng(4321);
  const ItsGraph its = testing::random_its(rng, 10, 4, 2);
  const DecisionFunction f = clf("pattern:C-C-C");
  const SearchReport a = explain_instance(its, f);
  const SearchReport b = explain_instance(its, f, {.max_batch = 3, .jobs = 4});
  ASSERT_EQ(a.explanations.size(), b.explanations.size());
  for (std::size_t k = 0; k < a.explanations.size(); ++k)
    EXPECT_EQ(a.explanations[k].its_edges, b.explanations[k].its_edges);
  EXPECT_EQ(a.classifier_calls, b.classifier_calls);
  EXPECT_EQ(a.dag_nodes_pruned, b.dag_nodes_pruned);
}

TEST(ExplainTest, ExplanationsAreSortedBySizeThenEdges) {
  std::mt19937_64 rng(555);
  for (int trial = 0; trial < 30; ++trial) {
    const ItsGraph its = testing::random_its(rng, 8, 4, 1);
    const SearchReport r = explain_instance(its, clf("pattern:C-C"));
    for (std::size_t k = 1; k < r.explanations.size(); ++k) {
      const auto &x = r.explanations[k - 1].its_edges, &y = r.explanations[k].its_edges;
      EXPECT_TRUE(x.size() < y.size() || (x.size() == y.size() && x < y));
    }
  }
}

TEST(ExplainTest, DagCapIsEnforced) {
  EXPECT_THROW(explain_instance(fixture(), clf("size:0"), {.max_dag_nodes = 4}),
               ResourceCapError);
}

}  // namespace
}  // namespace piex
