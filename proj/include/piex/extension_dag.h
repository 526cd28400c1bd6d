#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "piex/graph.h"

namespace piex {

/// Base graphs handed to the extension machinery are limited to this many
/// nodes (node sets are packed into 64-bit masks).
inline constexpr std::size_t kMaxBaseNodes = 64;

/// Hasse diagram of the rooted connected node sets of a base graph ordered
/// by inclusion. An edge (a, b) means node set b is an immediate subgraph of
/// a (b = a minus one node). Nodes are stored sorted by (size, ids), so the
/// sink {root} is node 0 and the source (all nodes) is the last one.
class ExtensionDag {
 public:
  ExtensionDag() = default;

  /// Builds from node masks over `index_to_id` and (super, sub) mask pairs.
  /// Duplicate edges are merged.
  ExtensionDag(NodeId root, std::span<const NodeId> index_to_id,
               std::vector<std::uint64_t> node_masks,
               std::vector<std::pair<std::uint64_t, std::uint64_t>> edges);

  NodeId root() const { return root_; }
  std::size_t node_count() const { return nodes_.size(); }
  std::size_t edge_count() const { return edge_count_; }

  const NodeSet &node(std::size_t i) const { return nodes_[i]; }
  const std::vector<NodeSet> &nodes() const { return nodes_; }
  /// Immediate subgraphs of node i.
  std::span<const std::uint32_t> children(std::size_t i) const {
    return children_[i];
  }
  /// Immediate supergraphs of node i.
  std::span<const std::uint32_t> parents(std::size_t i) const {
    return parents_[i];
  }

  std::optional<std::size_t> find(const NodeSet &s) const;

  /// Indices of nodes without parents / without children.
  std::vector<std::size_t> sources() const;
  std::vector<std::size_t> sinks() const;

  /// All edges as (super, sub) index pairs, sorted.
  std::vector<std::pair<std::size_t, std::size_t>> edge_list() const;

  friend bool operator==(const ExtensionDag &a, const ExtensionDag &b) {
    return a.root_ == b.root_ && a.nodes_ == b.nodes_ &&
           a.children_ == b.children_;
  }

 private:
  NodeId root_ = 0;
  std::vector<NodeSet> nodes_;
  std::vector<std::vector<std::uint32_t>> children_;
  std::vector<std::vector<std::uint32_t>> parents_;
  std::size_t edge_count_ = 0;
};

/// Reverse-search state over the base graph's internal index space: indices
/// follow BFS order from the root (root = 0, ties by node id).
struct EnumState {
  std::vector<std::uint32_t> chosen;      // U, root first
  std::uint64_t candidates = 0;           // C as a mask
  std::vector<std::int32_t> distance;     // D, -1 where undefined
  std::vector<std::int32_t> parent;       // P, -1 where undefined
};

/// Three-branch validity rule of the reverse search: adding v is a new
/// extension iff v does not precede the root and v is deeper than the last
/// added node, or on the same layer with a larger index.
/// Throws std::logic_error if v has no distance.
bool is_valid_extension(const EnumState &state, std::uint32_t v);
bool is_existing_extension(const EnumState &state, std::uint32_t v);

/// The base graph reindexed in BFS order from a root.
class RootedIndex {
 public:
  /// Throws DomainError if the base is disconnected, too large, or lacks
  /// `root`.
  RootedIndex(const Topology &base, NodeId root);

  std::size_t size() const { return order_.size(); }
  NodeId root() const { return order_.front(); }
  const std::vector<NodeId> &order() const { return order_; }
  std::uint64_t neighbors(std::uint32_t index) const { return adj_[index]; }
  NodeSet to_node_set(std::uint64_t mask) const;
  std::uint64_t to_mask(const NodeSet &s) const;

 private:
  std::vector<NodeId> order_;
  std::vector<std::uint64_t> adj_;
};

/// Pull-based walk of the reverse search. Each step reports either a newly
/// generated node set (with the set it was extended from) or an additional
/// cover edge towards an already existing extension.
class ExtensionWalker {
 public:
  enum class Kind { kRoot, kNewExtension, kExistingExtension };
  struct Event {
    Kind kind;
    std::uint64_t super = 0;  // set(U) + v
    std::uint64_t sub = 0;    // set(U); 0 for the root event
  };

  explicit ExtensionWalker(const RootedIndex &index);

  /// Next event, or nullopt when the walk is exhausted.
  std::optional<Event> next();

 private:
  struct Frame {
    EnumState state;
    std::uint64_t chosen_mask = 0;
    std::vector<std::uint32_t> pending;  // C \ set(U), in index order
    std::size_t cursor = 0;
  };

  const RootedIndex &index_;
  std::vector<Frame> stack_;
  bool started_ = false;
};

/// Extension DAG of all connected node sets of `base` containing `root`,
/// built by reverse search. Throws DomainError on a disconnected base or
/// unknown root, and ResourceCapError once more than `max_nodes` DAG nodes
/// would be generated.
ExtensionDag build_extension_dag(
    const Topology &base, NodeId root,
    std::size_t max_nodes = std::numeric_limits<std::size_t>::max());

/// Linear-delay stream of the rooted connected node sets; {root} first.
class RootedSubgraphStream {
 public:
  RootedSubgraphStream(const Topology &base, NodeId root);
  RootedSubgraphStream(const RootedSubgraphStream &) = delete;
  RootedSubgraphStream &operator=(const RootedSubgraphStream &) = delete;

  std::optional<NodeSet> next();
  /// Same as next() without materializing the set.
  std::optional<std::uint64_t> next_mask();
  const RootedIndex &index() const { return index_; }

 private:
  RootedIndex index_;
  ExtensionWalker walker_;
};

std::vector<NodeSet> enumerate_rooted_connected(const Topology &base,
                                                NodeId root);

struct CountResult {
  std::uint64_t count = 0;
  bool truncated = false;
};

/// Counts rooted connected node sets, stopping once `cap` is reached.
CountResult count_rooted_connected(const Topology &base, NodeId root,
                                   std::uint64_t cap);

inline constexpr std::size_t kBruteForceNodeCap = 16;

/// Reference construction: every subset containing the root, filtered by
/// connectivity, with a cover edge for each one-node difference. Throws
/// ResourceCapError above `node_cap` base nodes.
ExtensionDag brute_force_dag(const Topology &base, NodeId root,
                             std::size_t node_cap = kBruteForceNodeCap);

/// Graphviz rendering with node labels listing the node set; the root sink
/// and the full-instance source are highlighted.
std::string dag_to_dot(const ExtensionDag &dag);

}  // namespace piex
