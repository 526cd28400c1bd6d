#pragma once

#include <cstddef>
#include <limits>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "piex/chem.h"
#include "piex/graph.h"

namespace piex {

/// Imaginary transition state graph: reactant and product graphs superposed
/// on one atom set. Always connected, never carries a (0,0) edge label.
class ItsGraph {
 public:
  /// Throws ValidationError listing every violated invariant.
  explicit ItsGraph(LabeledGraph graph);

  /// Invariant violations of `graph` as an ITS graph; empty when valid.
  static std::vector<std::string> violations(const LabeledGraph &graph);

  const LabeledGraph &graph() const { return graph_; }
  std::size_t node_count() const { return graph_.node_count(); }
  std::size_t edge_count() const { return graph_.edge_count(); }

  friend bool operator==(const ItsGraph &, const ItsGraph &) = default;

 private:
  LabeledGraph graph_;
};

/// Reactant atom id -> product atom id.
using AtomAtomMap = std::map<NodeId, NodeId>;

/// Superposes reactants `g` and products `h` along `alpha`. ITS node ids are
/// the reactant ids. Throws ValidationError when alpha is not a
/// label-preserving bijection or the superposition is not a valid ITS graph.
ItsGraph compose_its(const MolecularGraph &g, const MolecularGraph &h,
                     const AtomAtomMap &alpha);

/// Splits an ITS graph back into reactant and product graphs on the ITS
/// node set; edges with a zero bond order on a side are dropped there.
std::pair<MolecularGraph, MolecularGraph> decompose_its(const ItsGraph &its);

/// Edges whose reactant and product bond orders differ.
EdgeSet reaction_center(const LabeledGraph &graph);
inline EdgeSet reaction_center(const ItsGraph &its) {
  return reaction_center(its.graph());
}

/// Graph rewrite rule in ITS form: the left side L is the set of edges with
/// a nonzero reactant order, the right side R those with a nonzero product
/// order. Both share the rule's node ids.
class ReactionRule {
 public:
  /// Throws ValidationError unless the rule is connected, has no (0,0)
  /// edge, and changes at least one bond. "*" matches any element.
  explicit ReactionRule(LabeledGraph rule);

  const LabeledGraph &graph() const { return rule_; }
  MolecularGraph left() const;
  MolecularGraph right() const;
  /// The rule's reaction center as a subgraph.
  LabeledGraph changing_edges() const;

 private:
  LabeledGraph rule_;
};

struct ApplyOptions {
  bool deduplicate = true;
  std::size_t max_candidates = std::numeric_limits<std::size_t>::max();
  bool match_charge = true;
};

/// Candidate reactions: one ITS graph per monomorphism of the rule's left
/// side into `reactants` (exact reactant bond orders; pairs where the rule
/// forms a bond must be non-adjacent). Unmatched reactant bonds stay
/// unchanged. Molecules not touched by the match are dropped so that each
/// candidate is connected. Isomorphic candidates are merged unless disabled.
std::vector<ItsGraph> apply_rule(const ReactionRule &rule,
                                 const MolecularGraph &reactants,
                                 const ApplyOptions &options = {});

using SpaceNode = LineNode<Atom, BondPair>;
using SpaceGraph = Graph<SpaceNode, NodeId>;

/// Line graph of an ITS graph with all reaction-center nodes contracted
/// into a single root. Node-induced connected subgraphs of `base` that
/// contain `root` are exactly the edge-induced connected subgraphs of the
/// ITS graph that contain the reaction center.
struct RootedSearchSpace {
  SpaceGraph base;
  NodeId root = 0;
  EdgeSet center;
  /// node_to_edge: non-root base node -> ITS edge;
  /// node_to_nodes: root -> contracted line-graph nodes
  GraphMapping back_map;
};

/// Throws DomainError when the reaction center is empty or disconnected.
RootedSearchSpace build_search_space(const ItsGraph &its);

/// ITS edges represented by the search-space node set `s` (must contain the
/// root): the reaction center plus one edge per other member.
EdgeSet expand_explanation(const RootedSearchSpace &space, const NodeSet &s);

}  // namespace piex
