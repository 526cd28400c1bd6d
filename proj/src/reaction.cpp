#include "piex/reaction.h"

#include <algorithm>
#include <set>

#include "piex/matching.h"

namespace piex {

namespace {

std::string edge_name(Edge e) {
  return std::to_string(e.u) + "-" + std::to_string(e.v);
}

std::vector<std::string> pattern_violations(const LabeledGraph &graph,
                                            bool allow_wildcard) {
  std::vector<std::string> out;
  if (graph.empty())
    out.emplace_back("graph has no nodes");
  for (std::size_t i = 0; i < graph.node_count(); ++i) {
    const auto &el = graph.node_label(i).element;
    if (!(is_element_symbol(el) || (allow_wildcard && el == "*")))
      out.push_back("node " + std::to_string(graph.id(i)) +
                    " has unknown element '" + el + "'");
  }
  for (std::size_t i = 0; i < graph.edge_count(); ++i) {
    const auto &b = graph.edge_label(i);
    if (b.reactant.is_zero() && b.product.is_zero())
      out.push_back("edge " + edge_name(graph.edges()[i]) +
                    " has bond orders (0,0)");
  }
  if (!is_connected(graph))
    out.emplace_back("graph is not connected");
  return out;
}

}  // namespace

//
// ItsGraph
//

std::vector<std::string> ItsGraph::violations(const LabeledGraph &graph) {
  return pattern_violations(graph, false);
}

ItsGraph::ItsGraph(LabeledGraph graph) : graph_(std::move(graph)) {
  auto v = violations(graph_);
  if (!v.empty())
    throw ValidationError(std::move(v));
}

ItsGraph compose_its(const MolecularGraph &g, const MolecularGraph &h,
                     const AtomAtomMap &alpha) {
  std::vector<std::string> problems;
  std::set<NodeId> images;
  for (const auto &[from, to] : alpha) {
    if (!g.has_node(from)) {
      problems.push_back("atom map source " + std::to_string(from) +
                         " is not a reactant atom");
      continue;
    }
    if (!h.has_node(to)) {
      problems.push_back("atom map target " + std::to_string(to) +
                         " is not a product atom");
      continue;
    }
    if (!images.insert(to).second)
      problems.push_back("product atom " + std::to_string(to) +
                         " is mapped twice");
    if (g.label_of(from) != h.label_of(to))
      problems.push_back("atom map " + std::to_string(from) + "->" +
                         std::to_string(to) + " does not preserve the label");
  }
  for (NodeId id : g.node_ids())
    if (!alpha.contains(id))
      problems.push_back("reactant atom " + std::to_string(id) +
                         " is not mapped");
  if (g.node_count() != h.node_count())
    problems.emplace_back("reactant and product atom counts differ");
  for (const auto &side : {&g, &h})
    for (std::size_t i = 0; i < side->edge_count(); ++i)
      if (side->edge_label(i).is_zero())
        problems.push_back("molecular bond " + edge_name(side->edges()[i]) +
                           " has order 0");
  if (!problems.empty())
    throw ValidationError(std::move(problems));

  std::map<NodeId, NodeId> inverse;
  for (const auto &[from, to] : alpha)
    inverse[to] = from;

  std::map<Edge, BondPair> labels;
  for (std::size_t i = 0; i < g.edge_count(); ++i)
    labels[g.edges()[i]].reactant = g.edge_label(i);
  for (std::size_t i = 0; i < h.edge_count(); ++i) {
    const Edge &e = h.edges()[i];
    labels[Edge(inverse.at(e.u), inverse.at(e.v))].product = h.edge_label(i);
  }

  std::vector<std::tuple<NodeId, NodeId, BondPair>> edges;
  edges.reserve(labels.size());
  for (const auto &[e, b] : labels)
    edges.emplace_back(e.u, e.v, b);
  return ItsGraph(LabeledGraph(g.node_list(), std::move(edges)));
}

std::pair<MolecularGraph, MolecularGraph> decompose_its(const ItsGraph &its) {
  const auto &g = its.graph();
  std::vector<std::tuple<NodeId, NodeId, BondOrder>> reactant_edges;
  std::vector<std::tuple<NodeId, NodeId, BondOrder>> product_edges;
  for (std::size_t i = 0; i < g.edge_count(); ++i) {
    const Edge &e = g.edges()[i];
    const BondPair &b = g.edge_label(i);
    if (!b.reactant.is_zero())
      reactant_edges.emplace_back(e.u, e.v, b.reactant);
    if (!b.product.is_zero())
      product_edges.emplace_back(e.u, e.v, b.product);
  }
  return {MolecularGraph(g.node_list(), std::move(reactant_edges)),
          MolecularGraph(g.node_list(), std::move(product_edges))};
}

EdgeSet reaction_center(const LabeledGraph &graph) {
  std::vector<Edge> out;
  for (std::size_t i = 0; i < graph.edge_count(); ++i)
    if (graph.edge_label(i).is_changing())
      out.push_back(graph.edges()[i]);
  return EdgeSet::from_sorted_unique(std::move(out));
}

//
// Rules
//

ReactionRule::ReactionRule(LabeledGraph rule) : rule_(std::move(rule)) {
  auto problems = pattern_violations(rule_, true);
  if (reaction_center(rule_).empty())
    problems.emplace_back("rule changes no bond");
  if (!problems.empty())
    throw ValidationError(std::move(problems));
}

MolecularGraph ReactionRule::left() const {
  std::vector<std::tuple<NodeId, NodeId, BondOrder>> edges;
  for (std::size_t i = 0; i < rule_.edge_count(); ++i)
    if (!rule_.edge_label(i).reactant.is_zero())
      edges.emplace_back(rule_.edges()[i].u, rule_.edges()[i].v,
                         rule_.edge_label(i).reactant);
  return MolecularGraph(rule_.node_list(), std::move(edges));
}

MolecularGraph ReactionRule::right() const {
  std::vector<std::tuple<NodeId, NodeId, BondOrder>> edges;
  for (std::size_t i = 0; i < rule_.edge_count(); ++i)
    if (!rule_.edge_label(i).product.is_zero())
      edges.emplace_back(rule_.edges()[i].u, rule_.edges()[i].v,
                         rule_.edge_label(i).product);
  return MolecularGraph(rule_.node_list(), std::move(edges));
}

LabeledGraph ReactionRule::changing_edges() const {
  return edge_subgraph(rule_, reaction_center(rule_));
}

std::vector<ItsGraph> apply_rule(const ReactionRule &rule,
                                 const MolecularGraph &reactants,
                                 const ApplyOptions &options) {
  for (std::size_t i = 0; i < reactants.edge_count(); ++i)
    if (reactants.edge_label(i).is_zero())
      throw DomainError("reactant bond " + edge_name(reactants.edges()[i]) +
                        " has order 0");

  const MolecularGraph left = rule.left();
  const LabeledGraph &rg = rule.graph();
  const auto maps = find_subgraph_isomorphisms(
      left, reactants, AtomMatch{options.match_charge}, std::equal_to<>{});

  std::vector<ItsGraph> out;
  for (const NodeMap &m : maps) {
    auto host_of = [&](NodeId rule_id) { return m[*rg.index_of(rule_id)]; };

    bool forms_existing_bond = false;
    for (std::size_t i = 0; i < rg.edge_count(); ++i) {
      const Edge &e = rg.edges()[i];
      if (rg.edge_label(i).reactant.is_zero() &&
          reactants.has_edge(host_of(e.u), host_of(e.v)))
        forms_existing_bond = true;
    }
    if (forms_existing_bond)
      continue;

    std::map<Edge, BondPair> labels;
    for (std::size_t i = 0; i < reactants.edge_count(); ++i)
      labels[reactants.edges()[i]] =
          BondPair{reactants.edge_label(i), reactants.edge_label(i)};
    for (std::size_t i = 0; i < rg.edge_count(); ++i) {
      const Edge &e = rg.edges()[i];
      labels[Edge(host_of(e.u), host_of(e.v))] = rg.edge_label(i);
    }
    std::vector<std::tuple<NodeId, NodeId, BondPair>> edges;
    for (const auto &[e, b] : labels)
      edges.emplace_back(e.u, e.v, b);
    const LabeledGraph full(reactants.node_list(), std::move(edges));

    // keep the component holding the match; the rule is connected so the
    // whole match lies in one component
    const NodeId anchor = m.front();
    LabeledGraph candidate;
    for (const NodeSet &c : connected_components(full)) {
      if (c.contains(anchor)) {
        candidate = induced_subgraph(full, c);
        break;
      }
    }
    ItsGraph its(std::move(candidate));

    if (options.deduplicate) {
      const bool duplicate =
          std::any_of(out.begin(), out.end(), [&](const ItsGraph &other) {
            return are_isomorphic(other.graph(), its.graph());
          });
      if (duplicate)
        continue;
    }
    out.push_back(std::move(its));
    if (out.size() >= options.max_candidates)
      break;
  }
  return out;
}

//
// Search space
//

RootedSearchSpace build_search_space(const ItsGraph &its) {
  const LabeledGraph &g = its.graph();
  EdgeSet center = reaction_center(g);
  if (center.empty())
    throw DomainError("no reaction: the reaction center is empty");
  if (!is_connected(edge_subgraph(g, center)))
    throw DomainError(
        "the reaction center is disconnected; a single root is required");

  auto [line, line_map] = line_graph(g);
  std::vector<NodeId> center_nodes;
  center_nodes.reserve(center.size());
  for (const Edge &e : center)
    center_nodes.push_back(static_cast<NodeId>(*g.edge_index(e)));
  const NodeSet contracted(std::move(center_nodes));
  auto [base, contract_map] = contract(line, contracted);

  RootedSearchSpace space;
  space.root = base.node_ids().back();
  space.center = std::move(center);
  for (const auto &[node, members] : contract_map.node_to_nodes) {
    if (node == space.root)
      space.back_map.node_to_nodes[node] = members;
    else
      space.back_map.node_to_edge[node] = line_map.node_to_edge.at(members[0]);
  }
  space.back_map.edge_to_edge = std::move(contract_map.edge_to_edge);
  space.base = std::move(base);
  return space;
}

EdgeSet expand_explanation(const RootedSearchSpace &space, const NodeSet &s) {
  if (!s.contains(space.root))
    throw DomainError("search-space node set does not contain the root");
  std::vector<Edge> edges = space.center.values();
  for (NodeId x : s) {
    if (x == space.root)
      continue;
    auto it = space.back_map.node_to_edge.find(x);
    if (it == space.back_map.node_to_edge.end())
      throw DomainError("unknown search-space node " + std::to_string(x));
    edges.push_back(it->second);
  }
  return EdgeSet(std::move(edges));
}

}  // namespace piex
