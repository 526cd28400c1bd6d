#include "piex/evaluation.h"

#include <algorithm>
#include <bit>
#include <map>
#include <sstream>

namespace piex {

namespace {

bool same_element(const Atom &a, const Atom &b) { return a.element == b.element; }

std::map<std::string, std::size_t> element_counts(const LabeledGraph &g) {
  std::map<std::string, std::size_t> out;
  for (std::size_t i = 0; i < g.node_count(); ++i)
    ++out[g.node_label(i).element];
  return out;
}

}  // namespace

int rating_category(bool isomorphic, std::size_t extra_carbons,
                    std::size_t extra_heteroatoms) {
  if (isomorphic)
    return 1;
  if (extra_carbons <= 3 && extra_heteroatoms == 0)
    return 2;
  if (extra_carbons <= 5 && extra_heteroatoms <= 1)
    return 3;
  if (extra_carbons <= 8 && extra_heteroatoms <= 2)
    return 4;
  return 5;
}

Rating rate_explanation(const LabeledGraph &obtained,
                        const LabeledGraph &expected) {
  Rating r;
  // Elements match exactly, so every embedding leaves the same multiset of
  // unmatched obtained atoms; the first one found is as good as any.
  auto maps = find_subgraph_isomorphisms(expected, obtained, same_element,
                                         std::equal_to<BondPair>{}, 1);
  if (maps.empty())
    return r;
  const auto have = element_counts(obtained);
  const auto want = element_counts(expected);
  for (const auto &[element, n] : have) {
    auto it = want.find(element);
    const std::size_t extra = n - (it == want.end() ? 0 : it->second);
    (element == "C" ? r.extra_carbons : r.extra_heteroatoms) += extra;
  }
  const bool isomorphic = obtained.node_count() == expected.node_count() &&
                          obtained.edge_count() == expected.edge_count();
  r.value = rating_category(isomorphic, r.extra_carbons, r.extra_heteroatoms);
  r.witness = std::move(maps.front());
  return r;
}

BestRating best_rating(std::span<const LabeledGraph> explanations,
                       const LabeledGraph &expected) {
  if (explanations.empty())
    throw DomainError("best_rating needs at least one explanation");
  BestRating best{rate_explanation(explanations[0], expected), 0};
  for (std::size_t i = 1; i < explanations.size(); ++i) {
    Rating r = rate_explanation(explanations[i], expected);
    const LabeledGraph &cur = explanations[best.index];
    const LabeledGraph &cand = explanations[i];
    const bool better =
        r.value != best.rating.value ? r.value < best.rating.value
        : cand.edge_count() != cur.edge_count()
            ? cand.edge_count() < cur.edge_count()
            : cand.edges() < cur.edges();
    if (better)
      best = {std::move(r), i};
  }
  return best;
}

std::size_t Distribution::bin_of(std::size_t value) {
  return static_cast<std::size_t>(std::bit_width(value));
}

std::pair<std::size_t, std::size_t> Distribution::bin_range(std::size_t bin) {
  if (bin == 0)
    return {0, 0};
  const std::size_t lo = std::size_t{1} << (bin - 1);
  return {lo, 2 * lo - 1};
}

Distribution distribution_of(std::vector<std::size_t> values) {
  Distribution d;
  d.samples = values.size();
  if (values.empty())
    return d;
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  d.median = values.size() % 2 == 1
                 ? static_cast<double>(values[mid])
                 : (static_cast<double>(values[mid - 1]) + values[mid]) / 2.0;
  d.max = values.back();
  d.histogram.assign(Distribution::bin_of(d.max) + 1, 0);
  for (std::size_t v : values)
    ++d.histogram[Distribution::bin_of(v)];
  return d;
}

StatsSummary summarize(std::span<const InstanceResult> results) {
  std::vector<std::size_t> counts, sizes, calls;
  for (const InstanceResult &r : results) {
    counts.push_back(r.explanations);
    calls.push_back(r.classifier_calls);
    if (r.top_rated_edges)
      sizes.push_back(*r.top_rated_edges);
  }
  return {distribution_of(std::move(counts)), distribution_of(std::move(sizes)),
          distribution_of(std::move(calls))};
}

namespace {

std::string csv_field(const std::string &s) {
  if (s.find_first_of(",\"\n") == std::string::npos)
    return s;
  std::string out = "\"";
  for (char c : s)
    out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + '"';
}

}  // namespace

std::string ratings_csv(std::span<const InstanceResult> results) {
  std::ostringstream out;
  out << "instance,explanations,classifier_calls,dag_nodes,best_rating,"
         "extra_carbons,extra_heteroatoms,top_rated_edges\n";
  for (const InstanceResult &r : results) {
    out << csv_field(r.name) << ',' << r.explanations << ',' << r.classifier_calls << ','
        << r.dag_nodes << ',';
    if (r.best)
      out << r.best->value << ',' << r.best->extra_carbons << ','
          << r.best->extra_heteroatoms;
    else
      out << ",,";
    out << ',';
    if (r.top_rated_edges)
      out << *r.top_rated_edges;
    out << '\n';
  }
  return out.str();
}

std::string summary_csv(const StatsSummary &summary) {
  std::ostringstream out;
  out << "# histogram bins: 0, then [2^(k-1), 2^k - 1] for k >= 1\n";
  out << "metric,samples,median,max,histogram\n";
  auto row = [&](const char *name, const Distribution &d) {
    out << name << ',' << d.samples << ',' << d.median << ',' << d.max << ',';
    for (std::size_t b = 0; b < d.histogram.size(); ++b) {
      const auto [lo, hi] = Distribution::bin_range(b);
      out << (b ? ";" : "") << lo << '-' << hi << ':' << d.histogram[b];
    }
    out << '\n';
  };
  row("explanations_per_instance", summary.explanations_per_instance);
  row("top_rated_size", summary.top_rated_size);
  row("classifier_calls", summary.classifier_calls);
  return out.str();
}

}  // namespace piex
