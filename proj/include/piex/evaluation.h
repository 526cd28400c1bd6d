#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "piex/chem.h"
#include "piex/matching.h"

namespace piex {

/// Rating categories, best to worst:
///   1  obtained is isomorphic to expected
///   2  expected embeds; at most 3 extra C and no other extra atoms
///   3  expected embeds; at most 5 extra C and at most 1 other extra atom
///   4  expected embeds; at most 8 extra C and at most 2 other extra atoms
///   5  expected embeds; anything larger
///   6  expected does not embed into obtained
/// "Other" covers N, O and every other non-carbon element. Atoms match by
/// element (charges ignored), bonds by the exact bond-order pair.
struct Rating {
  int value = 6;
  std::size_t extra_carbons = 0;
  std::size_t extra_heteroatoms = 0;
  /// Embedding of expected into obtained (pattern index -> obtained id).
  std::optional<NodeMap> witness;

  friend bool operator==(const Rating &, const Rating &) = default;
};

/// Category from the extra-atom counts of an existing embedding.
int rating_category(bool isomorphic, std::size_t extra_carbons,
                    std::size_t extra_heteroatoms);

Rating rate_explanation(const LabeledGraph &obtained,
                        const LabeledGraph &expected);

struct BestRating {
  Rating rating;
  std::size_t index = 0;  // into the explanation list
};

/// Lowest rating value; ties go to fewer edges, then the smaller edge list.
/// Throws DomainError on an empty list.
BestRating best_rating(std::span<const LabeledGraph> explanations,
                       const LabeledGraph &expected);

/// Sample statistics with power-of-two bins: bin 0 holds the value 0 and
/// bin k >= 1 holds [2^(k-1), 2^k - 1].
struct Distribution {
  std::size_t samples = 0;
  double median = 0.0;
  std::size_t max = 0;
  std::vector<std::size_t> histogram;

  static std::pair<std::size_t, std::size_t> bin_range(std::size_t bin);
  static std::size_t bin_of(std::size_t value);
};

Distribution distribution_of(std::vector<std::size_t> values);

/// Per-instance outcome fed into the summary and the ratings CSV.
struct InstanceResult {
  std::string name;
  std::size_t explanations = 0;
  std::size_t classifier_calls = 0;
  std::size_t dag_nodes = 0;
  std::optional<Rating> best;
  std::optional<std::size_t> top_rated_edges;
};

struct StatsSummary {
  Distribution explanations_per_instance;
  Distribution top_rated_size;
  Distribution classifier_calls;
};

StatsSummary summarize(std::span<const InstanceResult> results);

/// instance,explanations,classifier_calls,dag_nodes,best_rating,
/// extra_carbons,extra_heteroatoms,top_rated_edges
std::string ratings_csv(std::span<const InstanceResult> results);

/// metric,samples,median,max,histogram -- histogram cells are "lo-hi:count"
/// joined by ';', preceded by a comment line describing the binning.
std::string summary_csv(const StatsSummary &summary);

}  // namespace piex
