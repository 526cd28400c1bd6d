#include "support.h"

#include <algorithm>
#include <bit>
#include <map>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

namespace piex::testing {

namespace {

std::size_t pair_bit(std::size_t i, std::size_t j, std::size_t n) {
  // position of (i, j), i < j, in row-major upper-triangle order
  return i * n - i * (i + 1) / 2 + (j - i - 1);
}

bool mask_connected(std::uint64_t nodes, const std::vector<std::uint64_t> &adj) {
  if (nodes == 0)
    return true;
  std::uint64_t seen = nodes & (~nodes + 1);
  std::uint64_t frontier = seen;
  while (frontier) {
    std::uint64_t next = 0;
    for (std::uint64_t r = frontier; r; r &= r - 1)
      next |= adj[static_cast<std::size_t>(std::countr_zero(r))];
    next &= nodes & ~seen;
    seen |= next;
    frontier = next;
  }
  return seen == nodes;
}

// Union-find connectivity of the edge subgraph selected by `mask`.
bool edges_connected(const Topology &g, std::uint64_t mask) {
  if (mask == 0)
    return true;
  std::vector<std::size_t> parent(g.node_count());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x)
      x = parent[x] = parent[parent[x]];
    return x;
  };
  std::set<std::size_t> touched;
  for (std::uint64_t r = mask; r; r &= r - 1) {
    const Edge &e = g.edges()[static_cast<std::size_t>(std::countr_zero(r))];
    const std::size_t a = *g.index_of(e.u), b = *g.index_of(e.v);
    touched.insert(a);
    touched.insert(b);
    parent[find(a)] = find(b);
  }
  const std::size_t rep = find(*touched.begin());
  return std::all_of(touched.begin(), touched.end(),
                     [&](std::size_t x) { return find(x) == rep; });
}

}  // namespace

std::uint64_t canonical_code(const SmallGraph &g) {
  const std::size_t n = g.n;
  std::vector<std::size_t> degree(n, 0);
  for (const Edge &e : g.edges) {
    ++degree[static_cast<std::size_t>(e.u)];
    ++degree[static_cast<std::size_t>(e.v)];
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return degree[a] > degree[b];
  });
  std::vector<std::vector<std::size_t>> classes;
  for (std::size_t k = 0; k < n; ++k) {
    if (k == 0 || degree[order[k]] != degree[order[k - 1]])
      classes.emplace_back();
    classes.back().push_back(order[k]);
  }

  std::vector<std::size_t> label(n);
  std::uint64_t best = ~std::uint64_t{0};
  std::function<void(std::size_t, std::size_t)> assign = [&](std::size_t c,
                                                             std::size_t offset) {
    if (c == classes.size()) {
      std::uint64_t code = 0;
      for (const Edge &e : g.edges) {
        std::size_t a = label[static_cast<std::size_t>(e.u)];
        std::size_t b = label[static_cast<std::size_t>(e.v)];
        if (a > b)
          std::swap(a, b);
        code |= std::uint64_t{1} << pair_bit(a, b, n);
      }
      best = std::min(best, code);
      return;
    }
    std::vector<std::size_t> members = classes[c];
    std::sort(members.begin(), members.end());
    do {
      for (std::size_t k = 0; k < members.size(); ++k)
        label[members[k]] = offset + k;
      assign(c + 1, offset + members.size());
    } while (std::next_permutation(members.begin(), members.end()));
  };
  assign(0, 0);
  return best;
}

std::vector<SmallGraph> connected_graphs(std::size_t n) {
  if (n == 0 || n > 8)
    throw std::invalid_argument("connected_graphs supports 1..8 nodes");
  static std::map<std::size_t, std::vector<SmallGraph>> memo;
  if (auto it = memo.find(n); it != memo.end())
    return it->second;
  std::vector<SmallGraph> out;
  if (n == 1) {
    out.push_back({1, {}});
  } else {
    std::map<std::uint64_t, SmallGraph> unique;
    for (const SmallGraph &g : connected_graphs(n - 1))
      for (std::uint64_t nb = 1; nb < (std::uint64_t{1} << (n - 1)); ++nb) {
        SmallGraph h{n, g.edges};
        for (std::size_t v = 0; v + 1 < n; ++v)
          if (nb >> v & 1)
            h.edges.emplace_back(static_cast<NodeId>(v),
                                 static_cast<NodeId>(n - 1));
        unique.try_emplace(canonical_code(h), std::move(h));
      }
    for (auto &[code, g] : unique)
      out.push_back(std::move(g));
  }
  memo[n] = out;
  return out;
}

SmallGraph random_connected(std::mt19937_64 &rng, std::size_t n,
                            std::size_t max_degree, double density) {
  if (n > 1 && max_degree < 2 && n > 2)
    throw std::invalid_argument("max_degree < 2 cannot connect > 2 nodes");
  SmallGraph g{n, {}};
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<std::size_t> degree(n, 0);
  std::set<Edge> have;
  for (std::size_t i = 1; i < n; ++i) {
    std::vector<std::size_t> open;
    for (std::size_t k = 0; k < i; ++k)
      if (degree[order[k]] < max_degree)
        open.push_back(order[k]);
    const std::size_t parent =
        open[std::uniform_int_distribution<std::size_t>(0, open.size() - 1)(rng)];
    const Edge e(static_cast<NodeId>(parent), static_cast<NodeId>(order[i]));
    have.insert(e);
    ++degree[parent];
    ++degree[order[i]];
  }
  std::vector<Edge> absent;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b)
      if (!have.contains(Edge(static_cast<NodeId>(a), static_cast<NodeId>(b))))
        absent.emplace_back(static_cast<NodeId>(a), static_cast<NodeId>(b));
  std::shuffle(absent.begin(), absent.end(), rng);
  std::bernoulli_distribution coin(density);
  for (const Edge &e : absent) {
    const auto a = static_cast<std::size_t>(e.u), b = static_cast<std::size_t>(e.v);
    if (degree[a] < max_degree && degree[b] < max_degree && coin(rng)) {
      have.insert(e);
      ++degree[a];
      ++degree[b];
    }
  }
  g.edges.assign(have.begin(), have.end());
  return g;
}

LabeledGraph to_labeled(const SmallGraph &g, const std::set<Edge> &changing) {
  std::vector<std::pair<NodeId, Atom>> nodes;
  for (std::size_t i = 0; i < g.n; ++i)
    nodes.emplace_back(static_cast<NodeId>(i), Atom{"C", 0});
  std::vector<std::tuple<NodeId, NodeId, BondPair>> edges;
  for (const Edge &e : g.edges)
    edges.emplace_back(e.u, e.v,
                       changing.contains(e)
                           ? BondPair{BondOrder::single(), BondOrder::none()}
                           : BondPair{BondOrder::single(), BondOrder::single()});
  return LabeledGraph(std::move(nodes), std::move(edges));
}

ItsGraph random_its(std::mt19937_64 &rng, std::size_t n_nodes,
                    std::size_t max_degree, std::size_t center_edges) {
  const SmallGraph top = random_connected(rng, n_nodes, max_degree, 0.25);
  if (top.edges.empty())
    throw std::invalid_argument("random_its needs at least one edge");
  static const char *kElements[] = {"C", "C", "C", "N", "O"};
  std::uniform_int_distribution<std::size_t> pick_element(0, 4);
  std::vector<std::pair<NodeId, Atom>> nodes;
  for (std::size_t i = 0; i < n_nodes; ++i)
    nodes.emplace_back(static_cast<NodeId>(i), Atom{kElements[pick_element(rng)], 0});

  // grow a connected center from a random edge
  std::set<Edge> center;
  center.insert(top.edges[std::uniform_int_distribution<std::size_t>(
      0, top.edges.size() - 1)(rng)]);
  while (center.size() < center_edges) {
    std::vector<Edge> touching;
    for (const Edge &e : top.edges)
      if (!center.contains(e) &&
          std::any_of(center.begin(), center.end(), [&](const Edge &c) {
            return c.contains(e.u) || c.contains(e.v);
          }))
        touching.push_back(e);
    if (touching.empty())
      break;
    center.insert(touching[std::uniform_int_distribution<std::size_t>(
        0, touching.size() - 1)(rng)]);
  }

  const BondPair changes[] = {
      {BondOrder::single(), BondOrder::none()},
      {BondOrder::none(), BondOrder::single()},
      {BondOrder::double_bond(), BondOrder::single()},
      {BondOrder::single(), BondOrder::double_bond()}};
  std::uniform_int_distribution<std::size_t> pick_change(0, 3);
  std::bernoulli_distribution doubled(0.15);
  std::vector<std::tuple<NodeId, NodeId, BondPair>> edges;
  for (const Edge &e : top.edges) {
    BondPair b = center.contains(e) ? changes[pick_change(rng)]
                 : doubled(rng) ? BondPair{BondOrder::double_bond(), BondOrder::double_bond()}
                                : BondPair{BondOrder::single(), BondOrder::single()};
    edges.emplace_back(e.u, e.v, b);
  }
  return ItsGraph(LabeledGraph(std::move(nodes), std::move(edges)));
}

std::uint64_t count_rooted_by_subsets(const SmallGraph &g, NodeId root) {
  std::vector<std::uint64_t> adj(g.n, 0);
  for (const Edge &e : g.edges) {
    adj[static_cast<std::size_t>(e.u)] |= std::uint64_t{1} << e.v;
    adj[static_cast<std::size_t>(e.v)] |= std::uint64_t{1} << e.u;
  }
  const std::uint64_t root_bit = std::uint64_t{1} << root;
  std::uint64_t count = 0;
  for (std::uint64_t s = 0; s < (std::uint64_t{1} << g.n); ++s)
    if ((s & root_bit) && mask_connected(s, adj))
      ++count;
  return count;
}

std::uint64_t edge_mask(const Topology &g, const EdgeSet &edges) {
  std::uint64_t m = 0;
  for (const Edge &e : edges)
    m |= std::uint64_t{1} << *g.edge_index(e);
  return m;
}

EdgeSet edges_of_mask(const Topology &g, std::uint64_t mask) {
  std::vector<Edge> out;
  for (; mask; mask &= mask - 1)
    out.push_back(g.edges()[static_cast<std::size_t>(std::countr_zero(mask))]);
  return EdgeSet(std::move(out));
}

std::vector<std::uint64_t> connected_edge_supersets(const Topology &g,
                                                    std::uint64_t required) {
  const std::size_t m = g.edge_count();
  if (m > 24)
    throw std::invalid_argument("edge lattice too large for exhaustive search");
  std::vector<std::uint64_t> out;
  for (std::uint64_t s = 0; s < (std::uint64_t{1} << m); ++s)
    if ((s & required) == required && s != 0 && edges_connected(g, s))
      out.push_back(s);
  return out;
}

namespace {

// Connected edge sets containing the reaction center, with their labels.
// "Sufficient" (every connected superset agrees with the instance label) is
// up-closed, and any two nested members are linked by a chain of one-edge
// steps through members, so both sufficiency and minimality reduce to
// checks against the members one edge away.
struct Lattice {
  std::vector<std::uint64_t> members;
  std::unordered_map<std::uint64_t, std::size_t> index;
  std::vector<bool> sufficient;

  bool is_sufficient(std::uint64_t m) const {
    const auto it = index.find(m);
    return it != index.end() && sufficient[it->second];
  }
  bool is_minimal(std::uint64_t m) const {
    for (std::uint64_t rest = m; rest; rest &= rest - 1)
      if (is_sufficient(m & ~(rest & -rest)))
        return false;
    return true;
  }
};

Lattice build_lattice(const ItsGraph &its,
                      const std::function<bool(const LabeledGraph &)> &label_of) {
  const LabeledGraph &g = its.graph();
  const std::uint64_t center = edge_mask(g, reaction_center(its));
  const std::uint64_t all = g.edge_count() == 64 ? ~std::uint64_t{0}
                                                 : (std::uint64_t{1} << g.edge_count()) - 1;
  const bool h = label_of(g);
  Lattice lat;
  lat.members = connected_edge_supersets(g, center);
  std::sort(lat.members.begin(), lat.members.end(), [](std::uint64_t a, std::uint64_t b) {
    const int pa = std::popcount(a), pb = std::popcount(b);
    return pa != pb ? pa > pb : a < b;
  });
  for (std::size_t i = 0; i < lat.members.size(); ++i)
    lat.index.emplace(lat.members[i], i);
  lat.sufficient.assign(lat.members.size(), false);
  // largest first, so every one-edge extension is already decided
  for (std::size_t i = 0; i < lat.members.size(); ++i) {
    const std::uint64_t m = lat.members[i];
    bool ok = label_of(edge_subgraph(g, edges_of_mask(g, m))) == h;
    for (std::uint64_t rest = all & ~m; ok && rest; rest &= rest - 1) {
      const auto it = lat.index.find(m | (rest & -rest));
      if (it != lat.index.end() && !lat.sufficient[it->second])
        ok = false;
    }
    lat.sufficient[i] = ok;
  }
  return lat;
}

AuditResult audit_in(const Lattice &lat, const ItsGraph &its, const EdgeSet &z) {
  const LabeledGraph &g = its.graph();
  AuditResult a;
  const std::uint64_t zm = edge_mask(g, z);
  const std::uint64_t center = edge_mask(g, reaction_center(its));
  a.contains_center = (zm & center) == center;
  a.connected = zm != 0 && edges_connected(g, zm);
  if (!a.contains_center || !a.connected)
    return a;
  a.sufficient = lat.is_sufficient(zm);
  a.minimal = lat.is_minimal(zm);
  return a;
}

}  // namespace

AuditResult audit_explanation(
    const ItsGraph &its, const EdgeSet &z,
    const std::function<bool(const LabeledGraph &)> &label_of) {
  return audit_in(build_lattice(its, label_of), its, z);
}

std::vector<AuditResult> audit_explanations(
    const ItsGraph &its, std::span<const EdgeSet> zs,
    const std::function<bool(const LabeledGraph &)> &label_of) {
  const Lattice lat = build_lattice(its, label_of);
  std::vector<AuditResult> out;
  for (const EdgeSet &z : zs)
    out.push_back(audit_in(lat, its, z));
  return out;
}

std::vector<std::uint64_t> reference_explanations(
    const ItsGraph &its,
    const std::function<bool(const LabeledGraph &)> &label_of) {
  const Lattice lat = build_lattice(its, label_of);
  std::vector<std::uint64_t> out;
  for (std::size_t z = 0; z < lat.members.size(); ++z)
    if (lat.sufficient[z] && lat.is_minimal(lat.members[z]))
      out.push_back(lat.members[z]);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace piex::testing
