#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "piex/classifier.h"
#include "piex/extension_dag.h"
#include "piex/reaction.h"

namespace piex {

enum class NodeStatus : std::uint8_t {
  kUnvisited,
  kPositive,  // decided 1, survives
  kNegative,  // decided 0, removed
  kPruned,    // removed as a descendant without being decided
};

struct PiSearchResult {
  /// DAG node indices of the explanations, ascending.
  std::vector<std::size_t> explanation_nodes;
  std::vector<NodeStatus> status;
  std::size_t classifier_calls = 0;
  std::size_t dag_nodes_total = 0;
  /// Nodes removed from the DAG, whether decided 0 or removed undecided.
  std::size_t dag_nodes_pruned = 0;
  std::size_t rounds = 0;
};

using NodeDecision = std::function<bool(const NodeSet &)>;
/// Decides a whole frontier chunk; must return one entry per input.
using BatchDecision =
    std::function<std::vector<bool>(std::span<const NodeSet>)>;

struct PiSearchOptions {
  std::size_t max_batch = 1024;
};

/// Pruned top-down traversal: starting from the source, nodes deciding 1
/// hand their children to the next frontier; a node deciding 0 is removed
/// together with everything below it. Explanations are the sinks of what
/// remains. Each node is decided at most once.
/// Throws DomainError if the source decides 0.
PiSearchResult compute_pi_explanations(const ExtensionDag &dag,
                                       const NodeDecision &decide);

/// Same traversal, deciding one frontier (level) at a time in chunks of at
/// most `max_batch` nodes. Results do not depend on the chunk size.
PiSearchResult compute_pi_explanations_batched(const ExtensionDag &dag,
                                               const BatchDecision &decide,
                                               const PiSearchOptions &options =
                                                   {});

/// Brute-force reference: Z qualifies iff every DAG node containing Z
/// decides 1; the result is the qualifying nodes with no qualifying proper
/// subset. Quadratic in the DAG size.
std::vector<std::size_t> brute_force_pi(const ExtensionDag &dag,
                                        const NodeDecision &decide);

struct Explanation {
  EdgeSet its_edges;
  NodeSet dag_node;
  bool label = true;
};

struct SearchReport {
  std::vector<Explanation> explanations;
  bool label = true;
  double instance_score = 0.0;
  std::size_t classifier_calls = 0;
  std::size_t dag_nodes_total = 0;
  std::size_t dag_nodes_pruned = 0;
  std::size_t rounds = 0;
  std::size_t cache_hits = 0;
};

struct ExplainOptions {
  std::size_t max_batch = 1024;
  std::size_t max_dag_nodes = std::numeric_limits<std::size_t>::max();
  /// Chunks of one frontier scored concurrently.
  std::size_t jobs = 1;
};

/// End-to-end explanation of one ITS graph. Search-space node sets are
/// expanded to ITS edge sets and scored; a node decides 1 iff its
/// prediction equals the prediction for the whole instance, so both
/// feasible and infeasible predictions are explained. Scores are cached by
/// ITS edge set for the duration of the call. Explanations are
/// sorted by (edge count, edge list).
SearchReport explain_instance(const ItsGraph &its, const DecisionFunction &clf,
                              const ExplainOptions &options = {});

}  // namespace piex
