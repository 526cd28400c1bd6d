#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "piex/chem.h"

namespace piex {

enum class GraphFamily { kRandom, kPath, kComplete };

/// kNodes counts rooted connected node sets of the graph itself (root 0);
/// kItsEdges treats the graph as an ITS with one changing edge and counts
/// the nodes of its search space (rooted connected edge sets containing
/// that edge).
enum class BenchMode { kNodes, kItsEdges };

/// Connected graph on nodes 0..n-1: a uniform random spanning tree (Prüfer
/// sequence) plus uniformly chosen extra edges until the edge count reaches
/// round(mean_degree * n / 2) (clamped to what n allows). All atoms are C;
/// the edge (0, smallest neighbor of 0) is labeled (1,0), all others (1,1).
LabeledGraph random_connected_graph(std::size_t n, double mean_degree,
                                    std::uint64_t seed);
LabeledGraph path_graph(std::size_t n);
LabeledGraph complete_graph(std::size_t n);

struct BenchConfig {
  std::size_t min_nodes = 10;
  std::size_t max_nodes = 18;
  std::vector<double> degrees{3.0};
  std::size_t seeds = 1;
  std::uint64_t first_seed = 0;
  std::uint64_t cap = 10'000'000;
  GraphFamily family = GraphFamily::kRandom;
  BenchMode mode = BenchMode::kNodes;
};

struct BenchRow {
  GraphFamily family = GraphFamily::kRandom;
  BenchMode mode = BenchMode::kNodes;
  std::size_t n_nodes = 0;
  std::size_t n_edges = 0;
  double target_degree = 0.0;
  double mean_degree = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t n_extensions = 0;
  bool truncated = false;
  double wall_time = 0.0;
  /// Changing edges of the instance (kItsEdges only).
  std::size_t center_edges = 0;
};

/// One row per (n, degree, seed); path and complete families ignore the
/// degree and seed. A row hitting the cap is marked truncated.
std::vector<BenchRow> bench_extensions(const BenchConfig &config);

std::string bench_csv(std::span<const BenchRow> rows);

/// Least-squares slope of log2(n_extensions) over n_nodes.
double log2_slope(std::span<const BenchRow> rows);

std::string to_string(GraphFamily family);
std::string to_string(BenchMode mode);

}  // namespace piex
