#include "piex/extension_dag.h"

#include <algorithm>
#include <bit>
#include <deque>
#include <sstream>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace piex {

namespace {

constexpr std::uint64_t bit(std::uint32_t i) { return std::uint64_t{1} << i; }

bool less_by_size_then_ids(const NodeSet &a, const NodeSet &b) {
  if (a.size() != b.size())
    return a.size() < b.size();
  return a < b;
}

}  // namespace

//
// ExtensionDag
//

ExtensionDag::ExtensionDag(
    NodeId root, std::span<const NodeId> index_to_id,
    std::vector<std::uint64_t> node_masks,
    std::vector<std::pair<std::uint64_t, std::uint64_t>> edges)
    : root_(root) {
  std::sort(node_masks.begin(), node_masks.end());
  node_masks.erase(std::unique(node_masks.begin(), node_masks.end()),
                   node_masks.end());

  std::vector<std::pair<NodeSet, std::uint64_t>> keyed;
  keyed.reserve(node_masks.size());
  for (std::uint64_t m : node_masks) {
    std::vector<NodeId> ids;
    ids.reserve(static_cast<std::size_t>(std::popcount(m)));
    for (std::uint64_t rest = m; rest; rest &= rest - 1)
      ids.push_back(index_to_id[static_cast<std::size_t>(std::countr_zero(rest))]);
    keyed.emplace_back(NodeSet(std::move(ids)), m);
  }
  std::sort(keyed.begin(), keyed.end(), [](const auto &a, const auto &b) {
    return less_by_size_then_ids(a.first, b.first);
  });

  std::unordered_map<std::uint64_t, std::uint32_t> position;
  position.reserve(keyed.size());
  nodes_.reserve(keyed.size());
  for (std::size_t i = 0; i < keyed.size(); ++i) {
    position.emplace(keyed[i].second, static_cast<std::uint32_t>(i));
    nodes_.push_back(std::move(keyed[i].first));
  }

  std::vector<std::pair<std::uint32_t, std::uint32_t>> indexed;
  indexed.reserve(edges.size());
  for (const auto &[super, sub] : edges) {
    auto a = position.find(super);
    auto b = position.find(sub);
    if (a == position.end() || b == position.end())
      throw std::logic_error("extension DAG edge references a missing node");
    indexed.emplace_back(a->second, b->second);
  }
  std::sort(indexed.begin(), indexed.end());
  indexed.erase(std::unique(indexed.begin(), indexed.end()), indexed.end());
  edge_count_ = indexed.size();

  children_.assign(nodes_.size(), {});
  parents_.assign(nodes_.size(), {});
  for (const auto &[a, b] : indexed) {
    children_[a].push_back(b);
    parents_[b].push_back(a);
  }
  for (auto &p : parents_)
    std::sort(p.begin(), p.end());
}

std::optional<std::size_t> ExtensionDag::find(const NodeSet &s) const {
  auto it = std::lower_bound(nodes_.begin(), nodes_.end(), s,
                             less_by_size_then_ids);
  if (it == nodes_.end() || *it != s)
    return std::nullopt;
  return static_cast<std::size_t>(it - nodes_.begin());
}

std::vector<std::size_t> ExtensionDag::sources() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < nodes_.size(); ++i)
    if (parents_[i].empty())
      out.push_back(i);
  return out;
}

std::vector<std::size_t> ExtensionDag::sinks() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < nodes_.size(); ++i)
    if (children_[i].empty())
      out.push_back(i);
  return out;
}

std::vector<std::pair<std::size_t, std::size_t>> ExtensionDag::edge_list()
    const {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  out.reserve(edge_count_);
  for (std::size_t a = 0; a < children_.size(); ++a)
    for (std::uint32_t b : children_[a])
      out.emplace_back(a, b);
  return out;
}

//
// Reverse search
//

bool is_existing_extension(const EnumState &state, std::uint32_t v) {
  const std::uint32_t last = state.chosen.back();
  return state.distance.at(v) != state.distance.at(last) || v <= last;
}

bool is_valid_extension(const EnumState &state, std::uint32_t v) {
  const std::uint32_t root = state.chosen.front();
  const std::uint32_t last = state.chosen.back();
  if (v < root)
    return false;
  if (v >= state.distance.size() || state.distance[v] < 0)
    throw std::logic_error("extension candidate has no root distance");
  if (state.distance[v] > state.distance[last])
    return true;
  return !is_existing_extension(state, v);
}

RootedIndex::RootedIndex(const Topology &base, NodeId root) {
  auto root_index = base.index_of(root);
  if (!root_index)
    throw DomainError("root " + std::to_string(root) +
                      " is not a node of the base graph");
  if (base.node_count() > kMaxBaseNodes)
    throw DomainError("base graph has " + std::to_string(base.node_count()) +
                      " nodes; at most " + std::to_string(kMaxBaseNodes) +
                      " are supported");

  // BFS from the root; neighbor lists are ascending by id, which breaks ties
  std::vector<std::int32_t> rank(base.node_count(), -1);
  std::deque<std::size_t> queue{*root_index};
  rank[*root_index] = 0;
  std::vector<std::size_t> by_rank;
  while (!queue.empty()) {
    const std::size_t x = queue.front();
    queue.pop_front();
    by_rank.push_back(x);
    for (std::uint32_t y : base.neighbors(x)) {
      if (rank[y] < 0) {
        rank[y] = static_cast<std::int32_t>(by_rank.size() + queue.size());
        queue.push_back(y);
      }
    }
  }
  if (by_rank.size() != base.node_count())
    throw DomainError("base graph is not connected");

  order_.reserve(by_rank.size());
  for (std::size_t x : by_rank)
    order_.push_back(base.id(x));
  adj_.assign(order_.size(), 0);
  for (std::size_t r = 0; r < by_rank.size(); ++r)
    for (std::uint32_t y : base.neighbors(by_rank[r]))
      adj_[r] |= bit(static_cast<std::uint32_t>(rank[y]));
}

NodeSet RootedIndex::to_node_set(std::uint64_t mask) const {
  std::vector<NodeId> ids;
  for (; mask; mask &= mask - 1)
    ids.push_back(order_[static_cast<std::size_t>(std::countr_zero(mask))]);
  return NodeSet(std::move(ids));
}

std::uint64_t RootedIndex::to_mask(const NodeSet &s) const {
  std::uint64_t m = 0;
  for (NodeId id : s) {
    auto it = std::find(order_.begin(), order_.end(), id);
    if (it == order_.end())
      throw DomainError("node " + std::to_string(id) + " is not in the base");
    m |= bit(static_cast<std::uint32_t>(it - order_.begin()));
  }
  return m;
}

ExtensionWalker::ExtensionWalker(const RootedIndex &index) : index_(index) { }

std::optional<ExtensionWalker::Event> ExtensionWalker::next() {
  const std::size_t n = index_.size();
  auto pending_of = [](std::uint64_t candidates, std::uint64_t chosen) {
    std::vector<std::uint32_t> out;
    for (std::uint64_t rest = candidates & ~chosen; rest; rest &= rest - 1)
      out.push_back(static_cast<std::uint32_t>(std::countr_zero(rest)));
    return out;
  };

  if (!started_) {
    started_ = true;
    Frame f;
    f.state.chosen = {0};
    f.state.candidates = index_.neighbors(0);
    f.state.distance.assign(n, -1);
    f.state.parent.assign(n, -1);
    f.state.distance[0] = 0;
    for (std::uint64_t rest = f.state.candidates; rest; rest &= rest - 1) {
      const auto c = static_cast<std::size_t>(std::countr_zero(rest));
      f.state.distance[c] = 1;
      f.state.parent[c] = 0;
    }
    f.chosen_mask = bit(0);
    f.pending = pending_of(f.state.candidates, f.chosen_mask);
    stack_.push_back(std::move(f));
    return Event{Kind::kRoot, bit(0), 0};
  }

  while (!stack_.empty()) {
    Frame &f = stack_.back();
    if (f.cursor == f.pending.size()) {
      stack_.pop_back();
      continue;
    }
    const std::uint32_t v = f.pending[f.cursor++];
    const std::uint64_t grown = f.chosen_mask | bit(v);
    if (is_valid_extension(f.state, v)) {
      const std::uint64_t fresh =
          index_.neighbors(v) & ~(f.state.candidates | f.chosen_mask);
      // branches work on their own copies of D and P
      Frame child;
      child.state.distance = f.state.distance;
      child.state.parent = f.state.parent;
      for (std::uint64_t rest = fresh; rest; rest &= rest - 1) {
        const auto u = static_cast<std::size_t>(std::countr_zero(rest));
        child.state.distance[u] = f.state.distance[v] + 1;
        child.state.parent[u] = static_cast<std::int32_t>(v);
      }
      child.state.chosen = f.state.chosen;
      child.state.chosen.push_back(v);
      child.state.candidates = f.state.candidates | fresh;
      child.chosen_mask = grown;
      child.pending = pending_of(child.state.candidates, grown);
      const Event ev{Kind::kNewExtension, grown, f.chosen_mask};
      stack_.push_back(std::move(child));
      return ev;
    }
    if (is_existing_extension(f.state, v))
      return Event{Kind::kExistingExtension, grown, f.chosen_mask};
  }
  return std::nullopt;
}

ExtensionDag build_extension_dag(const Topology &base, NodeId root,
                                 std::size_t max_nodes) {
  const RootedIndex index(base, root);
  ExtensionWalker walker(index);
  std::vector<std::uint64_t> nodes;
  std::vector<std::pair<std::uint64_t, std::uint64_t>> edges;
  while (auto ev = walker.next()) {
    if (ev->kind != ExtensionWalker::Kind::kExistingExtension) {
      if (nodes.size() == max_nodes)
        throw ResourceCapError("extension DAG exceeds " +
                               std::to_string(max_nodes) + " nodes");
      nodes.push_back(ev->super);
    }
    if (ev->kind != ExtensionWalker::Kind::kRoot)
      edges.emplace_back(ev->super, ev->sub);
  }
  return ExtensionDag(root, index.order(), std::move(nodes), std::move(edges));
}

RootedSubgraphStream::RootedSubgraphStream(const Topology &base, NodeId root)
    : index_(base, root), walker_(index_) { }

std::optional<std::uint64_t> RootedSubgraphStream::next_mask() {
  while (auto ev = walker_.next())
    if (ev->kind != ExtensionWalker::Kind::kExistingExtension)
      return ev->super;
  return std::nullopt;
}

std::optional<NodeSet> RootedSubgraphStream::next() {
  auto m = next_mask();
  if (!m)
    return std::nullopt;
  return index_.to_node_set(*m);
}

std::vector<NodeSet> enumerate_rooted_connected(const Topology &base,
                                                NodeId root) {
  RootedSubgraphStream stream(base, root);
  std::vector<NodeSet> out;
  while (auto s = stream.next())
    out.push_back(std::move(*s));
  return out;
}

CountResult count_rooted_connected(const Topology &base, NodeId root,
                                   std::uint64_t cap) {
  RootedSubgraphStream stream(base, root);
  CountResult r;
  while (stream.next_mask()) {
    if (r.count == cap) {
      r.truncated = true;
      break;
    }
    ++r.count;
  }
  return r;
}

//
// Brute force
//

ExtensionDag brute_force_dag(const Topology &base, NodeId root,
                             std::size_t node_cap) {
  const std::size_t n = base.node_count();
  if (n > node_cap)
    throw ResourceCapError("brute-force DAG refused: " + std::to_string(n) +
                           " nodes exceed the cap of " +
                           std::to_string(node_cap));
  auto root_index = base.index_of(root);
  if (!root_index)
    throw DomainError("root " + std::to_string(root) +
                      " is not a node of the base graph");

  std::vector<std::uint64_t> adj(n, 0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::uint32_t j : base.neighbors(i))
      adj[i] |= bit(j);

  auto connected = [&](std::uint64_t s) {
    std::uint64_t seen = s & (~s + 1);
    std::uint64_t frontier = seen;
    while (frontier) {
      std::uint64_t next = 0;
      for (std::uint64_t rest = frontier; rest; rest &= rest - 1)
        next |= adj[static_cast<std::size_t>(std::countr_zero(rest))];
      next &= s & ~seen;
      seen |= next;
      frontier = next;
    }
    return seen == s;
  };

  const std::uint64_t root_bit = bit(static_cast<std::uint32_t>(*root_index));
  std::vector<std::uint32_t> others;
  for (std::uint32_t i = 0; i < n; ++i)
    if (i != *root_index)
      others.push_back(i);

  std::vector<std::uint64_t> nodes;
  std::unordered_set<std::uint64_t> present;
  for (std::uint64_t pick = 0; pick < (std::uint64_t{1} << others.size());
       ++pick) {
    std::uint64_t s = root_bit;
    for (std::size_t k = 0; k < others.size(); ++k)
      if (pick & bit(static_cast<std::uint32_t>(k)))
        s |= bit(others[k]);
    if (connected(s)) {
      nodes.push_back(s);
      present.insert(s);
    }
  }

  std::vector<std::pair<std::uint64_t, std::uint64_t>> edges;
  for (std::uint64_t a : nodes)
    for (std::uint64_t rest = a & ~root_bit; rest; rest &= rest - 1) {
      const std::uint64_t b = a & ~(rest & (~rest + 1));
      if (present.contains(b))
        edges.emplace_back(a, b);
    }
  return ExtensionDag(root, base.node_ids(), std::move(nodes),
                      std::move(edges));
}

std::string dag_to_dot(const ExtensionDag &dag) {
  std::ostringstream out;
  out << "digraph extension_dag {\n  rankdir=BT;\n  node [shape=box];\n";
  const auto sources = dag.sources();
  const auto sinks = dag.sinks();
  for (std::size_t i = 0; i < dag.node_count(); ++i) {
    out << "  n" << i << " [label=\"{";
    bool first = true;
    for (NodeId id : dag.node(i)) {
      out << (first ? "" : ",") << id;
      first = false;
    }
    out << "}\"";
    if (std::find(sinks.begin(), sinks.end(), i) != sinks.end())
      out << ", style=filled, fillcolor=\"#9ecae1\"";
    else if (std::find(sources.begin(), sources.end(), i) != sources.end())
      out << ", style=filled, fillcolor=\"#fdae6b\"";
    out << "];\n";
  }
  for (const auto &[a, b] : dag.edge_list())
    out << "  n" << a << " -> n" << b << ";\n";
  out << "}\n";
  return out.str();
}

}  // namespace piex
