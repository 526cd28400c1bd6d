#include "piex/bench.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include "piex/extension_dag.h"
#include "piex/reaction.h"

namespace piex {

namespace {

LabeledGraph carbon_graph(std::size_t n, std::vector<Edge> edges) {
  std::vector<std::pair<NodeId, Atom>> nodes;
  for (std::size_t i = 0; i < n; ++i)
    nodes.emplace_back(static_cast<NodeId>(i), Atom{"C", 0});
  std::sort(edges.begin(), edges.end());
  NodeId first_neighbor = -1;
  for (const Edge &e : edges)
    if (e.u == 0) {
      first_neighbor = e.v;
      break;
    }
  const BondPair plain{BondOrder::single(), BondOrder::single()};
  const BondPair broken{BondOrder::single(), BondOrder::none()};
  std::vector<std::tuple<NodeId, NodeId, BondPair>> labeled;
  for (const Edge &e : edges)
    labeled.emplace_back(e.u, e.v,
                         e.u == 0 && e.v == first_neighbor ? broken : plain);
  return LabeledGraph(std::move(nodes), std::move(labeled));
}

}  // namespace

LabeledGraph random_connected_graph(std::size_t n, double mean_degree,
                                    std::uint64_t seed) {
  if (n == 0)
    throw DomainError("random graph needs at least one node");
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(n),
                    static_cast<std::uint32_t>(std::lround(mean_degree * 1000))};
  std::mt19937_64 rng(seq);

  std::vector<Edge> edges;
  if (n == 2) {
    edges.emplace_back(0, 1);
  } else if (n > 2) {
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    std::vector<std::size_t> code(n - 2);
    for (auto &c : code)
      c = pick(rng);
    std::vector<std::size_t> degree(n, 1);
    for (std::size_t c : code)
      ++degree[c];
    // Prüfer decoding with an ordered set of current leaves
    std::set<std::size_t> leaves;
    for (std::size_t i = 0; i < n; ++i)
      if (degree[i] == 1)
        leaves.insert(i);
    for (std::size_t c : code) {
      const std::size_t leaf = *leaves.begin();
      leaves.erase(leaves.begin());
      edges.emplace_back(static_cast<NodeId>(leaf), static_cast<NodeId>(c));
      if (--degree[c] == 1)
        leaves.insert(c);
    }
    edges.emplace_back(static_cast<NodeId>(*leaves.begin()),
                       static_cast<NodeId>(*std::next(leaves.begin())));
  }

  const std::size_t max_edges = n * (n - 1) / 2;
  const auto wanted = static_cast<std::size_t>(std::clamp<long long>(
      std::llround(mean_degree * static_cast<double>(n) / 2.0),
      static_cast<long long>(n - 1), static_cast<long long>(max_edges)));
  if (wanted > edges.size()) {
    std::set<Edge> have(edges.begin(), edges.end());
    std::vector<Edge> absent;
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = a + 1; b < n; ++b)
        if (!have.contains(Edge(static_cast<NodeId>(a), static_cast<NodeId>(b))))
          absent.emplace_back(static_cast<NodeId>(a), static_cast<NodeId>(b));
    std::shuffle(absent.begin(), absent.end(), rng);
    absent.resize(wanted - edges.size());
    edges.insert(edges.end(), absent.begin(), absent.end());
  }
  return carbon_graph(n, std::move(edges));
}

LabeledGraph path_graph(std::size_t n) {
  std::vector<Edge> edges;
  for (std::size_t i = 1; i < n; ++i)
    edges.emplace_back(static_cast<NodeId>(i - 1), static_cast<NodeId>(i));
  return carbon_graph(n, std::move(edges));
}

LabeledGraph complete_graph(std::size_t n) {
  std::vector<Edge> edges;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b)
      edges.emplace_back(static_cast<NodeId>(a), static_cast<NodeId>(b));
  return carbon_graph(n, std::move(edges));
}

std::vector<BenchRow> bench_extensions(const BenchConfig &config) {
  if (config.min_nodes == 0 || config.min_nodes > config.max_nodes)
    throw DomainError("node range must be nonempty and start at 1 or more");
  if (config.family == GraphFamily::kRandom &&
      (config.degrees.empty() || config.seeds == 0))
    throw DomainError("random family needs degree targets and seeds");

  const bool random = config.family == GraphFamily::kRandom;
  const std::vector<double> degrees = random ? config.degrees
                                             : std::vector<double>{0.0};
  const std::size_t seeds = random ? config.seeds : 1;

  std::vector<BenchRow> rows;
  for (std::size_t n = config.min_nodes; n <= config.max_nodes; ++n)
    for (double degree : degrees)
      for (std::size_t k = 0; k < seeds; ++k) {
        BenchRow row;
        row.family = config.family;
        row.mode = config.mode;
        row.n_nodes = n;
        row.target_degree = degree;
        row.seed = config.first_seed + k;
        const LabeledGraph g =
            random ? random_connected_graph(n, degree, row.seed)
            : config.family == GraphFamily::kPath ? path_graph(n)
                                                  : complete_graph(n);
        row.n_edges = g.edge_count();
        row.mean_degree = 2.0 * static_cast<double>(g.edge_count()) /
                          static_cast<double>(n);

        const auto start = std::chrono::steady_clock::now();
        CountResult count;
        if (config.mode == BenchMode::kNodes) {
          count = count_rooted_connected(g, 0, config.cap);
        } else {
          const ItsGraph its(g);
          const RootedSearchSpace space = build_search_space(its);
          row.center_edges = space.center.size();
          count = count_rooted_connected(space.base, space.root, config.cap);
        }
        row.wall_time = std::chrono::duration<double>(
                            std::chrono::steady_clock::now() - start)
                            .count();
        row.n_extensions = count.count;
        row.truncated = count.truncated;
        rows.push_back(row);
      }
  return rows;
}

std::string to_string(GraphFamily family) {
  switch (family) {
    case GraphFamily::kRandom:
      return "random";
    case GraphFamily::kPath:
      return "path";
    case GraphFamily::kComplete:
      return "complete";
  }
  return "?";
}

std::string to_string(BenchMode mode) {
  return mode == BenchMode::kNodes ? "nodes" : "its";
}

std::string bench_csv(std::span<const BenchRow> rows) {
  std::ostringstream out;
  out << "family,mode,n_nodes,n_edges,target_degree,mean_degree,seed,"
         "n_extensions,truncated,wall_time_s\n";
  for (const BenchRow &r : rows)
    out << to_string(r.family) << ',' << to_string(r.mode) << ',' << r.n_nodes
        << ',' << r.n_edges << ',' << r.target_degree << ',' << r.mean_degree
        << ',' << r.seed << ',' << r.n_extensions << ','
        << (r.truncated ? 1 : 0) << ',' << r.wall_time << '\n';
  return out.str();
}

double log2_slope(std::span<const BenchRow> rows) {
  if (rows.size() < 2)
    throw DomainError("slope needs at least two rows");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const BenchRow &r : rows) {
    const double x = static_cast<double>(r.n_nodes);
    const double y = std::log2(static_cast<double>(std::max<std::uint64_t>(
        r.n_extensions, 1)));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double n = static_cast<double>(rows.size());
  const double denom = n * sxx - sx * sx;
  if (denom == 0)
    throw DomainError("slope needs at least two distinct node counts");
  return (n * sxy - sx * sy) / denom;
}

}  // namespace piex
