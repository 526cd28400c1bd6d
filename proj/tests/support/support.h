#pragma once

// Generators and independent reference computations shared by the unit
// tests and the acceptance runner.

#include <cstdint>
#include <functional>
#include <random>
#include <set>
#include <span>
#include <vector>

#include "piex/chem.h"
#include "piex/extension_dag.h"
#include "piex/reaction.h"

namespace piex::testing {

/// Unlabeled simple graph on nodes 0..n-1 as an edge list; u < v.
struct SmallGraph {
  std::size_t n = 0;
  std::vector<Edge> edges;
};

/// All connected graphs with exactly n nodes, one per isomorphism class
/// (n <= 8). Built by attaching a new vertex to every connected graph on
/// n-1 nodes in every possible way and keeping one graph per canonical form.
std::vector<SmallGraph> connected_graphs(std::size_t n);

/// Canonical adjacency code: the smallest upper-triangle bit string over all
/// node orders that sort nodes by non-increasing degree.
std::uint64_t canonical_code(const SmallGraph &g);

/// Random connected graph: random spanning tree respecting `max_degree`,
/// then extra random edges (also respecting it) with probability `density`
/// each.
SmallGraph random_connected(std::mt19937_64 &rng, std::size_t n,
                            std::size_t max_degree, double density);

/// Carbon graph with (1,1) edges; `changing` edges get (1,0) instead.
LabeledGraph to_labeled(const SmallGraph &g,
                        const std::set<Edge> &changing = {});

/// Random molecule-like ITS graph: random connected topology over C/N/O
/// atoms with a connected reaction center grown from a random edge.
ItsGraph random_its(std::mt19937_64 &rng, std::size_t n_nodes,
                    std::size_t max_degree, std::size_t center_edges);

/// Number of node subsets containing `root` that induce a connected
/// subgraph, by scanning all 2^(n-1) subsets.
std::uint64_t count_rooted_by_subsets(const SmallGraph &g, NodeId root);

/// Edge subsets (as masks over the graph's sorted edge list) that contain
/// every edge of `required` and whose edge subgraph is connected.
std::vector<std::uint64_t> connected_edge_supersets(const Topology &g,
                                                    std::uint64_t required);

/// Mask over the graph's sorted edge list.
std::uint64_t edge_mask(const Topology &g, const EdgeSet &edges);
EdgeSet edges_of_mask(const Topology &g, std::uint64_t mask);

/// Conditions of a PI reaction explanation checked directly over the ITS
/// edge lattice: Z contains the reaction center and is connected, every
/// connected Z' with Z <= Z' <= E(G) gets the instance label, and no
/// connected proper subset containing the center has that property.
struct AuditResult {
  bool contains_center = false;
  bool connected = false;
  bool sufficient = false;
  bool minimal = false;
  bool ok() const { return contains_center && connected && sufficient && minimal; }
};

/// `label_of` predicts the classifier label of an ITS edge subgraph.
AuditResult audit_explanation(
    const ItsGraph &its, const EdgeSet &z,
    const std::function<bool(const LabeledGraph &)> &label_of);

/// Same checks for several candidates against one lattice.
std::vector<AuditResult> audit_explanations(
    const ItsGraph &its, std::span<const EdgeSet> zs,
    const std::function<bool(const LabeledGraph &)> &label_of);

/// All PI explanations (as edge masks) by exhaustive lattice search; the
/// reference for end-to-end runs.
std::vector<std::uint64_t> reference_explanations(
    const ItsGraph &its,
    const std::function<bool(const LabeledGraph &)> &label_of);

}  // namespace piex::testing
