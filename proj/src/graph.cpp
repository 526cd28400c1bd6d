#include "piex/graph.h"

#include <numeric>

namespace piex {

std::optional<std::size_t> Topology::index_of(NodeId id) const {
  auto it = std::lower_bound(ids_.begin(), ids_.end(), id);
  if (it == ids_.end() || *it != id)
    return std::nullopt;
  return static_cast<std::size_t>(it - ids_.begin());
}

std::optional<std::size_t> Topology::edge_index(Edge e) const {
  auto it = std::lower_bound(edges_.begin(), edges_.end(), e);
  if (it == edges_.end() || *it != e)
    return std::nullopt;
  return static_cast<std::size_t>(it - edges_.begin());
}

std::vector<std::size_t> Topology::assign(std::vector<NodeId> ids,
                                          const std::vector<Edge> &edges) {
  for (std::size_t i = 1; i < ids.size(); ++i)
    if (ids[i] == ids[i - 1])
      throw DomainError("duplicate node id " + std::to_string(ids[i]));
  ids_ = std::move(ids);

  std::vector<std::size_t> perm(edges.size());
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::sort(perm.begin(), perm.end(),
            [&](std::size_t a, std::size_t b) { return edges[a] < edges[b]; });
  edges_.clear();
  edges_.reserve(edges.size());
  std::vector<std::size_t> position(edges.size());
  for (std::size_t k = 0; k < perm.size(); ++k) {
    const Edge &e = edges[perm[k]];
    if (!edges_.empty() && edges_.back() == e)
      throw DomainError("parallel edge " + std::to_string(e.u) + "-" +
                        std::to_string(e.v));
    if (e.u == e.v)
      throw DomainError("self-loop on node " + std::to_string(e.u));
    edges_.push_back(e);
    position[perm[k]] = k;
  }

  adjacency_.assign(ids_.size(), {});
  for (const Edge &e : edges_) {
    auto a = index_of(e.u);
    auto b = index_of(e.v);
    if (!a || !b)
      throw DomainError("edge " + std::to_string(e.u) + "-" +
                        std::to_string(e.v) + " has an unknown endpoint");
    adjacency_[*a].push_back(static_cast<std::uint32_t>(*b));
    adjacency_[*b].push_back(static_cast<std::uint32_t>(*a));
  }
  for (auto &adj : adjacency_)
    std::sort(adj.begin(), adj.end());
  return position;
}

std::vector<NodeSet> connected_components(const Topology &g) {
  std::vector<NodeSet> out;
  std::vector<bool> seen(g.node_count(), false);
  std::vector<std::size_t> stack;
  for (std::size_t start = 0; start < g.node_count(); ++start) {
    if (seen[start])
      continue;
    std::vector<NodeId> members;
    seen[start] = true;
    stack.push_back(start);
    while (!stack.empty()) {
      const std::size_t x = stack.back();
      stack.pop_back();
      members.push_back(g.id(x));
      for (std::uint32_t y : g.neighbors(x)) {
        if (!seen[y]) {
          seen[y] = true;
          stack.push_back(y);
        }
      }
    }
    out.emplace_back(std::move(members));
  }
  return out;
}

bool is_connected(const Topology &g) {
  return connected_components(g).size() <= 1;
}

}  // namespace piex
