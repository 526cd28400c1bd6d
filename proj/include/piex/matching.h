#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <limits>
#include <vector>

#include "piex/graph.h"

namespace piex {

/// Injective map from pattern nodes to host nodes: entry i is the host id of
/// the pattern node at index i (pattern nodes in ascending id order).
using NodeMap = std::vector<NodeId>;

namespace internal {

template <class PG, class HG, class NodePred, class EdgePred>
class Matcher {
 public:
  Matcher(const PG &pattern, const HG &host, NodePred node_ok,
          EdgePred edge_ok, std::size_t limit)
      : pattern_(pattern), host_(host), node_ok_(node_ok), edge_ok_(edge_ok),
        limit_(limit) { }

  std::vector<NodeMap> run() {
    const std::size_t n = pattern_.node_count();
    if (n > host_.node_count() || pattern_.edge_count() > host_.edge_count())
      return {};
    if (n == 0)
      return {NodeMap{}};
    plan();
    map_.assign(n, -1);
    used_.assign(host_.node_count(), false);
    extend(0);
    return std::move(found_);
  }

 private:
  struct Back {
    std::size_t position;    // earlier position in order_
    std::size_t edge_index;  // pattern edge between the two nodes
  };

  // Greedy connectivity-first ordering: each next node has the most
  // neighbors among already ordered ones.
  void plan() {
    const std::size_t n = pattern_.node_count();
    std::vector<int> placed(n, -1);
    std::vector<std::size_t> links(n, 0);
    order_.clear();
    back_.assign(n, {});
    for (std::size_t k = 0; k < n; ++k) {
      std::size_t best = n;
      for (std::size_t i = 0; i < n; ++i) {
        if (placed[i] >= 0)
          continue;
        if (best == n || links[i] > links[best] ||
            (links[i] == links[best] &&
             pattern_.degree(i) > pattern_.degree(best)))
          best = i;
      }
      placed[best] = static_cast<int>(k);
      order_.push_back(best);
      for (std::uint32_t nb : pattern_.neighbors(best)) {
        if (placed[nb] >= 0 && static_cast<std::size_t>(placed[nb]) < k) {
          const auto e = *pattern_.edge_index(
              Edge(pattern_.id(best), pattern_.id(nb)));
          back_[k].push_back({static_cast<std::size_t>(placed[nb]), e});
        } else {
          ++links[nb];
        }
      }
    }
  }

  bool feasible(std::size_t k, std::size_t host_index) const {
    const std::size_t p = order_[k];
    if (used_[host_index])
      return false;
    if (host_.degree(host_index) < pattern_.degree(p))
      return false;
    if (!node_ok_(pattern_.node_label(p), host_.node_label(host_index)))
      return false;
    for (const Back &b : back_[k]) {
      const std::size_t other = chosen_[b.position];
      auto he = host_.edge_index(Edge(host_.id(host_index), host_.id(other)));
      if (!he)
        return false;
      if (!edge_ok_(pattern_.edge_label(b.edge_index), host_.edge_label(*he)))
        return false;
    }
    return true;
  }

  void extend(std::size_t k) {
    if (found_.size() >= limit_)
      return;
    if (k == order_.size()) {
      found_.push_back(map_);
      return;
    }
    const std::size_t p = order_[k];
    auto try_host = [&](std::size_t h) {
      if (!feasible(k, h))
        return;
      used_[h] = true;
      map_[p] = host_.id(h);
      chosen_.push_back(h);
      extend(k + 1);
      chosen_.pop_back();
      map_[p] = -1;
      used_[h] = false;
    };
    if (!back_[k].empty()) {
      const std::size_t anchor = chosen_[back_[k].front().position];
      for (std::uint32_t h : host_.neighbors(anchor)) {
        try_host(h);
        if (found_.size() >= limit_)
          return;
      }
    } else {
      for (std::size_t h = 0; h < host_.node_count(); ++h) {
        try_host(h);
        if (found_.size() >= limit_)
          return;
      }
    }
  }

  const PG &pattern_;
  const HG &host_;
  NodePred node_ok_;
  EdgePred edge_ok_;
  std::size_t limit_;

  std::vector<std::size_t> order_;
  std::vector<std::vector<Back>> back_;
  NodeMap map_;
  std::vector<bool> used_;
  std::vector<std::size_t> chosen_;
  std::vector<NodeMap> found_;
};

}  // namespace internal

/// All injective, label-compatible maps from `pattern` into `host` that
/// preserve pattern adjacency (monomorphisms: extra host edges are allowed).
/// `node_ok(pattern_label, host_label)` and `edge_ok(pattern_edge_label,
/// host_edge_label)` decide label compatibility. Results are sorted
/// lexicographically unless `limit` cut the search short.
template <class PG, class HG, class NodePred, class EdgePred>
std::vector<NodeMap> find_subgraph_isomorphisms(
    const PG &pattern, const HG &host, NodePred node_ok, EdgePred edge_ok,
    std::size_t limit = std::numeric_limits<std::size_t>::max()) {
  internal::Matcher<PG, HG, NodePred, EdgePred> m(pattern, host, node_ok,
                                                  edge_ok, limit);
  auto maps = m.run();
  if (maps.size() < limit)
    std::sort(maps.begin(), maps.end());
  return maps;
}

template <class PG, class HG>
std::vector<NodeMap> find_subgraph_isomorphisms(const PG &pattern,
                                                const HG &host) {
  return find_subgraph_isomorphisms(pattern, host, std::equal_to<>{},
                                    std::equal_to<>{});
}

template <class PG, class HG, class NodePred, class EdgePred>
bool is_subgraph_isomorphic(const PG &pattern, const HG &host, NodePred node_ok,
                            EdgePred edge_ok) {
  return !find_subgraph_isomorphisms(pattern, host, node_ok, edge_ok, 1)
              .empty();
}

/// Label-preserving isomorphism test.
template <class G, class NodePred, class EdgePred>
bool are_isomorphic(const G &a, const G &b, NodePred node_eq,
                    EdgePred edge_eq) {
  if (a.node_count() != b.node_count() || a.edge_count() != b.edge_count())
    return false;
  auto degrees = [](const G &g) {
    std::vector<std::size_t> d(g.node_count());
    for (std::size_t i = 0; i < g.node_count(); ++i)
      d[i] = g.degree(i);
    std::sort(d.begin(), d.end());
    return d;
  };
  if (degrees(a) != degrees(b))
    return false;
  // equal edge counts make an injective adjacency-preserving bijection an
  // isomorphism
  return is_subgraph_isomorphic(a, b, node_eq, edge_eq);
}

template <class G>
bool are_isomorphic(const G &a, const G &b) {
  return are_isomorphic(a, b, std::equal_to<>{}, std::equal_to<>{});
}

}  // namespace piex
