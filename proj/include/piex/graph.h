#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "piex/error.h"

namespace piex {

using NodeId = std::int32_t;

/// Undirected edge key, always stored with u < v.
struct Edge {
  NodeId u = 0;
  NodeId v = 0;

  Edge() = default;
  Edge(NodeId a, NodeId b) : u(std::min(a, b)), v(std::max(a, b)) { }

  bool contains(NodeId x) const { return u == x || v == x; }

  friend auto operator<=>(const Edge &, const Edge &) = default;
};

/// Immutable sorted set of unique values.
template <class T>
class SortedSet {
 public:
  using value_type = T;
  using const_iterator = typename std::vector<T>::const_iterator;

  SortedSet() = default;
  SortedSet(std::initializer_list<T> items)
      : SortedSet(std::vector<T>(items)) { }
  explicit SortedSet(std::vector<T> items) : items_(std::move(items)) {
    std::sort(items_.begin(), items_.end());
    items_.erase(std::unique(items_.begin(), items_.end()), items_.end());
  }

  static SortedSet from_sorted_unique(std::vector<T> items) {
    SortedSet s;
    s.items_ = std::move(items);
    return s;
  }

  std::size_t size() const { return items_.size(); }
  bool empty() const { return items_.empty(); }
  const_iterator begin() const { return items_.begin(); }
  const_iterator end() const { return items_.end(); }
  const T &operator[](std::size_t i) const { return items_[i]; }
  const std::vector<T> &values() const { return items_; }

  bool contains(const T &x) const {
    return std::binary_search(items_.begin(), items_.end(), x);
  }
  bool includes(const SortedSet &other) const {
    return std::includes(items_.begin(), items_.end(), other.items_.begin(),
                         other.items_.end());
  }

  SortedSet with(const T &x) const {
    std::vector<T> out = items_;
    auto it = std::lower_bound(out.begin(), out.end(), x);
    if (it == out.end() || *it != x)
      out.insert(it, x);
    return from_sorted_unique(std::move(out));
  }

  friend SortedSet set_union(const SortedSet &a, const SortedSet &b) {
    std::vector<T> out;
    out.reserve(a.size() + b.size());
    std::set_union(a.begin(), a.end(), b.begin(), b.end(),
                   std::back_inserter(out));
    return from_sorted_unique(std::move(out));
  }

  friend auto operator<=>(const SortedSet &, const SortedSet &) = default;
  friend bool operator==(const SortedSet &, const SortedSet &) = default;

 private:
  std::vector<T> items_;
};

using NodeSet = SortedSet<NodeId>;
using EdgeSet = SortedSet<Edge>;

/// Correspondence between a derived graph (line graph, contraction) and the
/// graph it was built from.
struct GraphMapping {
  /// derived node -> source nodes it stands for (contraction)
  std::map<NodeId, std::vector<NodeId>> node_to_nodes;
  /// derived node -> source edge (line graph)
  std::map<NodeId, Edge> node_to_edge;
  /// derived edge -> source edge it was taken from (contraction)
  std::map<Edge, Edge> edge_to_edge;
};

/// Label-free structure of a simple undirected graph. Nodes are kept sorted
/// by id; "index" always refers to the position in that order.
class Topology {
 public:
  Topology() = default;

  std::size_t node_count() const { return ids_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  bool empty() const { return ids_.empty(); }

  const std::vector<NodeId> &node_ids() const { return ids_; }
  NodeId id(std::size_t index) const { return ids_[index]; }
  std::optional<std::size_t> index_of(NodeId id) const;
  bool has_node(NodeId id) const { return index_of(id).has_value(); }

  /// Neighbor indices of the node at `index`, ascending.
  std::span<const std::uint32_t> neighbors(std::size_t index) const {
    return adjacency_[index];
  }
  std::size_t degree(std::size_t index) const {
    return adjacency_[index].size();
  }

  /// Edges sorted by (u, v) with u < v, given as node ids.
  const std::vector<Edge> &edges() const { return edges_; }
  std::optional<std::size_t> edge_index(Edge e) const;
  bool has_edge(NodeId a, NodeId b) const {
    return a != b && edge_index(Edge(a, b)).has_value();
  }

  NodeSet node_set() const { return NodeSet::from_sorted_unique(ids_); }
  EdgeSet edge_set() const { return EdgeSet::from_sorted_unique(edges_); }

 protected:
  /// Validates and stores structure. Returns, for each input edge, its
  /// position in the sorted edge list.
  std::vector<std::size_t> assign(std::vector<NodeId> ids,
                                  const std::vector<Edge> &edges);

 private:
  std::vector<NodeId> ids_;
  std::vector<Edge> edges_;
  std::vector<std::vector<std::uint32_t>> adjacency_;
};

/// Simple undirected graph with node labels N and edge labels E.
/// Immutable once constructed.
template <class N, class E>
class Graph : public Topology {
 public:
  using NodeLabel = N;
  using EdgeLabel = E;

  Graph() = default;

  /// Throws DomainError on duplicate ids, dangling endpoints, self-loops or
  /// parallel edges.
  Graph(std::vector<std::pair<NodeId, N>> nodes,
        std::vector<std::tuple<NodeId, NodeId, E>> edges) {
    std::sort(nodes.begin(), nodes.end(),
              [](const auto &a, const auto &b) { return a.first < b.first; });
    std::vector<NodeId> ids;
    ids.reserve(nodes.size());
    node_labels_.reserve(nodes.size());
    for (auto &[id, label] : nodes) {
      ids.push_back(id);
      node_labels_.push_back(std::move(label));
    }
    std::vector<Edge> keys;
    keys.reserve(edges.size());
    for (const auto &[a, b, label] : edges) {
      if (a == b)
        throw DomainError("self-loop on node " + std::to_string(a));
      keys.emplace_back(a, b);
    }
    const auto pos = assign(std::move(ids), keys);
    edge_labels_.resize(keys.size());
    for (std::size_t i = 0; i < edges.size(); ++i)
      edge_labels_[pos[i]] = std::move(std::get<2>(edges[i]));
  }

  const N &node_label(std::size_t index) const { return node_labels_[index]; }
  const N &label_of(NodeId id) const {
    auto idx = index_of(id);
    if (!idx)
      throw DomainError("unknown node id " + std::to_string(id));
    return node_labels_[*idx];
  }
  const E &edge_label(std::size_t index) const { return edge_labels_[index]; }
  const E &label_of(Edge e) const {
    auto idx = edge_index(e);
    if (!idx)
      throw DomainError("unknown edge " + std::to_string(e.u) + "-" +
                        std::to_string(e.v));
    return edge_labels_[*idx];
  }

  std::vector<std::pair<NodeId, N>> node_list() const {
    std::vector<std::pair<NodeId, N>> out;
    out.reserve(node_count());
    for (std::size_t i = 0; i < node_count(); ++i)
      out.emplace_back(id(i), node_labels_[i]);
    return out;
  }
  std::vector<std::tuple<NodeId, NodeId, E>> edge_list() const {
    std::vector<std::tuple<NodeId, NodeId, E>> out;
    out.reserve(edge_count());
    for (std::size_t i = 0; i < edge_count(); ++i)
      out.emplace_back(edges()[i].u, edges()[i].v, edge_labels_[i]);
    return out;
  }

  /// Structural equality: same ids, labels and edges.
  friend bool operator==(const Graph &a, const Graph &b) {
    return a.node_ids() == b.node_ids() && a.edges() == b.edges() &&
           a.node_labels_ == b.node_labels_ && a.edge_labels_ == b.edge_labels_;
  }

 private:
  std::vector<N> node_labels_;
  std::vector<E> edge_labels_;
};

//
// Structural operations
//

/// True iff the graph has exactly one connected component. The empty graph
/// counts as connected.
bool is_connected(const Topology &g);

/// Connected components as node sets, ordered by smallest member.
std::vector<NodeSet> connected_components(const Topology &g);

/// Node-induced subgraph on `s`; ids and labels preserved.
template <class N, class E>
Graph<N, E> induced_subgraph(const Graph<N, E> &g, const NodeSet &s) {
  std::vector<std::pair<NodeId, N>> nodes;
  nodes.reserve(s.size());
  for (NodeId id : s)
    nodes.emplace_back(id, g.label_of(id));
  std::vector<std::tuple<NodeId, NodeId, E>> edges;
  for (std::size_t i = 0; i < g.edge_count(); ++i) {
    const Edge &e = g.edges()[i];
    if (s.contains(e.u) && s.contains(e.v))
      edges.emplace_back(e.u, e.v, g.edge_label(i));
  }
  return Graph<N, E>(std::move(nodes), std::move(edges));
}

/// Subgraph consisting of the edges in `s` and exactly their endpoints.
template <class N, class E>
Graph<N, E> edge_subgraph(const Graph<N, E> &g, const EdgeSet &s) {
  std::vector<NodeId> ids;
  std::vector<std::tuple<NodeId, NodeId, E>> edges;
  edges.reserve(s.size());
  for (const Edge &e : s) {
    edges.emplace_back(e.u, e.v, g.label_of(e));
    ids.push_back(e.u);
    ids.push_back(e.v);
  }
  std::vector<std::pair<NodeId, N>> nodes;
  for (NodeId id : NodeSet(std::move(ids)))
    nodes.emplace_back(id, g.label_of(id));
  return Graph<N, E>(std::move(nodes), std::move(edges));
}

/// Node label of a line graph: the source edge with its label and the labels
/// of both endpoints (first = label of source.u).
template <class N, class E>
struct LineNode {
  Edge source;
  E label{};
  N first{};
  N second{};

  friend bool operator==(const LineNode &, const LineNode &) = default;
};

/// Line graph L(g): node i stands for the i-th edge of g (sorted order); two
/// nodes are adjacent iff their edges share an endpoint. Line-graph edges are
/// labeled with the shared endpoint.
template <class N, class E>
std::pair<Graph<LineNode<N, E>, NodeId>, GraphMapping> line_graph(
    const Graph<N, E> &g) {
  using L = LineNode<N, E>;
  std::vector<std::pair<NodeId, L>> nodes;
  GraphMapping mapping;
  nodes.reserve(g.edge_count());
  for (std::size_t i = 0; i < g.edge_count(); ++i) {
    const Edge &e = g.edges()[i];
    nodes.emplace_back(static_cast<NodeId>(i),
                       L{e, g.edge_label(i), g.label_of(e.u), g.label_of(e.v)});
    mapping.node_to_edge.emplace(static_cast<NodeId>(i), e);
  }
  // incident edge indices per node of g
  std::vector<std::vector<NodeId>> incident(g.node_count());
  for (std::size_t i = 0; i < g.edge_count(); ++i) {
    const Edge &e = g.edges()[i];
    incident[*g.index_of(e.u)].push_back(static_cast<NodeId>(i));
    incident[*g.index_of(e.v)].push_back(static_cast<NodeId>(i));
  }
  std::vector<std::tuple<NodeId, NodeId, NodeId>> edges;
  for (std::size_t x = 0; x < g.node_count(); ++x) {
    const auto &inc = incident[x];
    for (std::size_t a = 0; a < inc.size(); ++a)
      for (std::size_t b = a + 1; b < inc.size(); ++b)
        edges.emplace_back(inc[a], inc[b], g.id(x));
  }
  return {Graph<L, NodeId>(std::move(nodes), std::move(edges)),
          std::move(mapping)};
}

/// Replaces the connected node set `s` by one fresh node (id = max id + 1,
/// label `fresh_label`). Edges leaving `s` are re-attached to the fresh node;
/// when several collapse onto the same pair only the one whose source edge
/// has the smallest endpoint pair is kept.
template <class N, class E>
std::pair<Graph<N, E>, GraphMapping> contract(const Graph<N, E> &g,
                                              const NodeSet &s,
                                              N fresh_label = N{}) {
  if (s.empty())
    throw DomainError("cannot contract an empty node set");
  for (NodeId id : s)
    if (!g.has_node(id))
      throw DomainError("unknown node id " + std::to_string(id));
  if (!is_connected(induced_subgraph(g, s)))
    throw DomainError("contracted node set must induce a connected subgraph");

  const NodeId fresh = g.node_ids().back() + 1;
  GraphMapping mapping;
  std::vector<std::pair<NodeId, N>> nodes;
  for (std::size_t i = 0; i < g.node_count(); ++i) {
    if (s.contains(g.id(i)))
      continue;
    nodes.emplace_back(g.id(i), g.node_label(i));
    mapping.node_to_nodes[g.id(i)] = {g.id(i)};
  }
  nodes.emplace_back(fresh, std::move(fresh_label));
  mapping.node_to_nodes[fresh] = s.values();

  // derived edge -> (source edge, label); edges are visited in sorted source
  // order so the first one kept per derived edge is the smallest.
  std::map<Edge, std::pair<Edge, E>> kept;
  for (std::size_t i = 0; i < g.edge_count(); ++i) {
    const Edge &e = g.edges()[i];
    const NodeId a = s.contains(e.u) ? fresh : e.u;
    const NodeId b = s.contains(e.v) ? fresh : e.v;
    if (a == b)
      continue;
    kept.try_emplace(Edge(a, b), e, g.edge_label(i));
  }
  std::vector<std::tuple<NodeId, NodeId, E>> edges;
  edges.reserve(kept.size());
  for (auto &[derived, source] : kept) {
    edges.emplace_back(derived.u, derived.v, source.second);
    mapping.edge_to_edge.emplace(derived, source.first);
  }
  return {Graph<N, E>(std::move(nodes), std::move(edges)), std::move(mapping)};
}

}  // namespace piex
