#include "piex/pi_search.h"

#include <algorithm>
#include <future>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>


namespace piex {

namespace {

std::size_t unique_source(const ExtensionDag &dag) {
  const auto sources = dag.sources();
  if (sources.size() != 1)
    throw DomainError("extension DAG must have exactly one source, found " +
                      std::to_string(sources.size()));
  return sources.front();
}

// Marks every node below `start` that is still undecided as pruned.
std::size_t remove_below(const ExtensionDag &dag, std::size_t start,
                         std::vector<NodeStatus> &status) {
  std::size_t removed = 0;
  std::vector<std::size_t> stack{start};
  while (!stack.empty()) {
    const std::size_t x = stack.back();
    stack.pop_back();
    for (std::uint32_t c : dag.children(x)) {
      switch (status[c]) {
        case NodeStatus::kUnvisited:
          status[c] = NodeStatus::kPruned;
          ++removed;
          stack.push_back(c);
          break;
        case NodeStatus::kPositive:
          throw std::logic_error("decided node below a node of its own level");
        default:
          break;  // already removed together with its subgraphs
      }
    }
  }
  return removed;
}

}  // namespace

PiSearchResult compute_pi_explanations_batched(const ExtensionDag &dag,
                                               const BatchDecision &decide,
                                               const PiSearchOptions &options) {
  if (options.max_batch == 0)
    throw DomainError("max_batch must be positive");
  const std::size_t source = unique_source(dag);

  PiSearchResult r;
  r.dag_nodes_total = dag.node_count();
  r.status.assign(dag.node_count(), NodeStatus::kUnvisited);

  std::vector<std::size_t> frontier{source};
  std::vector<NodeSet> chunk;
  while (!frontier.empty()) {
    ++r.rounds;
    std::vector<bool> decisions;
    decisions.reserve(frontier.size());
    for (std::size_t lo = 0; lo < frontier.size(); lo += options.max_batch) {
      const std::size_t hi = std::min(frontier.size(), lo + options.max_batch);
      chunk.clear();
      for (std::size_t k = lo; k < hi; ++k)
        chunk.push_back(dag.node(frontier[k]));
      const std::vector<bool> got = decide(chunk);
      if (got.size() != chunk.size())
        throw ScoringError("decision batch returned " +
                           std::to_string(got.size()) + " results for " +
                           std::to_string(chunk.size()) + " nodes");
      decisions.insert(decisions.end(), got.begin(), got.end());
    }
    r.classifier_calls += frontier.size();

    if (r.rounds == 1 && !decisions.front())
      throw DomainError("instance not explained: the full instance decides 0");

    // A frontier is one level of a graded DAG, so no member lies below
    // another and the order of removals does not matter.
    for (std::size_t k = 0; k < frontier.size(); ++k)
      r.status[frontier[k]] =
          decisions[k] ? NodeStatus::kPositive : NodeStatus::kNegative;
    for (std::size_t k = 0; k < frontier.size(); ++k)
      if (!decisions[k])
        r.dag_nodes_pruned += 1 + remove_below(dag, frontier[k], r.status);

    std::vector<std::size_t> next;
    for (std::size_t k = 0; k < frontier.size(); ++k) {
      if (!decisions[k])
        continue;
      for (std::uint32_t c : dag.children(frontier[k]))
        if (r.status[c] == NodeStatus::kUnvisited)
          next.push_back(c);
    }
    std::sort(next.begin(), next.end());
    next.erase(std::unique(next.begin(), next.end()), next.end());
    frontier = std::move(next);
  }

  for (std::size_t i = 0; i < dag.node_count(); ++i) {
    if (r.status[i] != NodeStatus::kPositive)
      continue;
    const auto kids = dag.children(i);
    const bool sink = std::none_of(kids.begin(), kids.end(), [&](auto c) {
      return r.status[c] == NodeStatus::kPositive;
    });
    if (sink)
      r.explanation_nodes.push_back(i);
  }
  return r;
}

PiSearchResult compute_pi_explanations(const ExtensionDag &dag,
                                       const NodeDecision &decide) {
  return compute_pi_explanations_batched(
      dag, [&](std::span<const NodeSet> nodes) {
        std::vector<bool> out;
        out.reserve(nodes.size());
        for (const NodeSet &s : nodes)
          out.push_back(decide(s));
        return out;
      });
}

std::vector<std::size_t> brute_force_pi(const ExtensionDag &dag,
                                        const NodeDecision &decide) {
  const std::size_t n = dag.node_count();
  std::vector<bool> value(n);
  for (std::size_t i = 0; i < n; ++i)
    value[i] = decide(dag.node(i));

  std::vector<bool> qualifies(n, true);
  for (std::size_t z = 0; z < n; ++z)
    for (std::size_t w = 0; w < n && qualifies[z]; ++w)
      if (!value[w] && dag.node(w).includes(dag.node(z)))
        qualifies[z] = false;

  std::vector<std::size_t> out;
  for (std::size_t z = 0; z < n; ++z) {
    if (!qualifies[z])
      continue;
    bool minimal = true;
    for (std::size_t w = 0; w < n && minimal; ++w)
      if (w != z && qualifies[w] && dag.node(z).includes(dag.node(w)))
        minimal = false;
    if (minimal)
      out.push_back(z);
  }
  return out;
}

SearchReport explain_instance(const ItsGraph &its, const DecisionFunction &clf,
                              const ExplainOptions &options) {
  if (options.max_batch == 0 || options.jobs == 0)
    throw DomainError("max_batch and jobs must be positive");
  const RootedSearchSpace space = build_search_space(its);
  const ExtensionDag dag =
      build_extension_dag(space.base, space.root, options.max_dag_nodes);

  SearchReport report;
  std::unordered_map<std::string, double> cache;

  // Scores graphs not yet cached, chunked by max_batch, with up to `jobs`
  // chunks in flight.
  auto score_misses = [&](const std::vector<std::string> &keys,
                          const std::vector<LabeledGraph> &graphs) {
    std::vector<std::pair<std::size_t, std::size_t>> chunks;
    for (std::size_t lo = 0; lo < graphs.size(); lo += options.max_batch)
      chunks.emplace_back(lo, std::min(graphs.size(), lo + options.max_batch));
    std::vector<std::vector<double>> scores(chunks.size());
    for (std::size_t wave = 0; wave < chunks.size(); wave += options.jobs) {
      const std::size_t end = std::min(chunks.size(), wave + options.jobs);
      if (end - wave == 1) {
        const auto [lo, hi] = chunks[wave];
        scores[wave] = classify_batch(
            clf, std::span(graphs).subspan(lo, hi - lo));
        continue;
      }
      std::vector<std::future<std::vector<double>>> running;
      for (std::size_t c = wave; c < end; ++c) {
        const auto [lo, hi] = chunks[c];
        running.push_back(std::async(std::launch::async, [&, lo, hi] {
          return classify_batch(clf, std::span(graphs).subspan(lo, hi - lo));
        }));
      }
      for (std::size_t c = wave; c < end; ++c)
        scores[c] = running[c - wave].get();
    }
    for (std::size_t c = 0; c < chunks.size(); ++c)
      for (std::size_t k = chunks[c].first; k < chunks[c].second; ++k)
        cache.emplace(keys[k], scores[c][k - chunks[c].first]);
    report.classifier_calls += graphs.size();
  };

  // every scored graph is an edge subgraph of the instance, so its edge
  // index list identifies it as well as a full serialization would
  auto key_of = [&](const EdgeSet &edges) {
    std::string key;
    key.reserve(edges.size() * sizeof(std::uint32_t));
    for (const Edge &e : edges) {
      const auto i = static_cast<std::uint32_t>(*its.graph().edge_index(e));
      key.append(reinterpret_cast<const char *>(&i), sizeof i);
    }
    return key;
  };
  const std::string instance_key = key_of(its.graph().edge_set());
  score_misses({instance_key}, {its.graph()});
  report.instance_score = cache.at(instance_key);
  report.label = is_positive(report.instance_score, clf.threshold());

  BatchDecision decide = [&](std::span<const NodeSet> nodes) {
    std::vector<std::string> keys;
    keys.reserve(nodes.size());
    std::vector<std::string> miss_keys;
    std::unordered_set<std::string> pending;
    std::vector<LabeledGraph> misses;
    for (const NodeSet &s : nodes) {
      const EdgeSet edges = expand_explanation(space, s);
      keys.push_back(key_of(edges));
      if (cache.contains(keys.back()) || !pending.insert(keys.back()).second) {
        ++report.cache_hits;
        continue;
      }
      miss_keys.push_back(keys.back());
      misses.push_back(edge_subgraph(its.graph(), edges));
    }
    score_misses(miss_keys, misses);
    std::vector<bool> out;
    out.reserve(nodes.size());
    for (const std::string &k : keys)
      out.push_back(is_positive(cache.at(k), clf.threshold()) == report.label);
    return out;
  };

  // whole frontiers go to `decide`, which does its own chunking
  const PiSearchResult r = compute_pi_explanations_batched(
      dag, decide, {std::numeric_limits<std::size_t>::max()});

  report.dag_nodes_total = r.dag_nodes_total;
  report.dag_nodes_pruned = r.dag_nodes_pruned;
  report.rounds = r.rounds;
  for (std::size_t i : r.explanation_nodes)
    report.explanations.push_back(
        {expand_explanation(space, dag.node(i)), dag.node(i), report.label});
  std::sort(report.explanations.begin(), report.explanations.end(),
            [](const Explanation &a, const Explanation &b) {
              if (a.its_edges.size() != b.its_edges.size())
                return a.its_edges.size() < b.its_edges.size();
              return a.its_edges < b.its_edges;
            });
  for (std::size_t k = 1; k < report.explanations.size(); ++k)
    if (report.explanations[k].its_edges ==
        report.explanations[k - 1].its_edges)
      throw std::logic_error("two DAG sinks map to the same ITS edge set");
  return report;
}

}  // namespace piex
