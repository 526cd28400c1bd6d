#pragma once

#include <chrono>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "piex/chem.h"

namespace piex {

enum class ScorerKind { kPattern, kSize, kTable, kExternal, kCustom };

/// Batch scorer: maps graphs to scores in [0, 1], order-aligned.
class Scorer {
 public:
  virtual ~Scorer() = default;
  virtual std::vector<double> score(std::span<const LabeledGraph> graphs) = 0;
  virtual ScorerKind kind() const = 0;
  virtual std::string describe() const = 0;
};

/// Pattern graph: edges either require an exact bond pair or accept any.
using PatternGraph = Graph<Atom, std::optional<BondPair>>;

/// Scores `positive` when the pattern has a monomorphism into the graph,
/// `negative` otherwise. Charges are ignored; "*" matches any element.
class PatternScorer final : public Scorer {
 public:
  explicit PatternScorer(PatternGraph pattern, double negative = 0.0,
                         double positive = 1.0);

  /// Chain syntax: ATOM (BOND ATOM)* [@NEG/POS] where BOND is "-" (any bond)
  /// or "[bR,bP]" (exact pair), e.g. "N-C", "O[2,2]C[0,1]N@0.1/0.9".
  static PatternScorer parse(std::string_view spec);

  bool matches(const LabeledGraph &g) const;
  const PatternGraph &pattern() const { return pattern_; }

  std::vector<double> score(std::span<const LabeledGraph> graphs) override;
  ScorerKind kind() const override { return ScorerKind::kPattern; }
  std::string describe() const override;

 private:
  PatternGraph pattern_;
  double negative_;
  double positive_;
  std::string spec_;
};

/// 1.0 for graphs with at least `min_edges` edges, else 0.0.
class SizeScorer final : public Scorer {
 public:
  explicit SizeScorer(std::size_t min_edges) : min_edges_(min_edges) { }

  std::vector<double> score(std::span<const LabeledGraph> graphs) override;
  ScorerKind kind() const override { return ScorerKind::kSize; }
  std::string describe() const override;

 private:
  std::size_t min_edges_;
};

/// Lookup table keyed by the graph's edge list ("u-v,u-v,..." sorted);
/// unknown keys get `default_score`.
class TableScorer final : public Scorer {
 public:
  explicit TableScorer(std::map<std::string, double> table,
                       double default_score = 0.0);

  /// {"default": 0.0, "scores": {"0-1,1-2": 0.9, ...}}
  static TableScorer from_json(std::string_view text);
  static std::string key(const LabeledGraph &g);

  std::vector<double> score(std::span<const LabeledGraph> graphs) override;
  ScorerKind kind() const override { return ScorerKind::kTable; }
  std::string describe() const override;

 private:
  std::map<std::string, double> table_;
  double default_;
};

inline constexpr std::string_view kProtocolVersion = "pi-explain/1";

/// Child-process scorer speaking the line protocol: the plugin first writes
/// {"protocol": "pi-explain/1"}, then answers each {"id", "graph"} request
/// line with one {"id", "score"} line. Requests of one batch are written
/// while responses are read, so large batches cannot deadlock on pipes.
class ExternalScorer final : public Scorer {
 public:
  /// Starts `command` through /bin/sh and waits for the handshake.
  /// Throws ScoringError on spawn failure, timeout, or a bad handshake.
  explicit ExternalScorer(std::string command,
                          std::chrono::milliseconds timeout =
                              std::chrono::seconds(30));
  ~ExternalScorer() override;
  ExternalScorer(const ExternalScorer &) = delete;
  ExternalScorer &operator=(const ExternalScorer &) = delete;

  std::vector<double> score(std::span<const LabeledGraph> graphs) override;
  ScorerKind kind() const override { return ScorerKind::kExternal; }
  std::string describe() const override { return "external:" + command_; }

 private:
  std::string read_line(std::chrono::steady_clock::time_point deadline);
  void shutdown() noexcept;

  std::string command_;
  std::chrono::milliseconds timeout_;
  int pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  std::string buffer_;
  std::uint64_t next_id_ = 0;
  std::mutex mutex_;
};

/// Scorer plus the positive threshold. Positive iff score >= threshold.
class DecisionFunction {
 public:
  /// Throws DomainError unless threshold lies in (0, 1).
  DecisionFunction(std::shared_ptr<Scorer> scorer, double threshold = 0.5);

  Scorer &scorer() const { return *scorer_; }
  double threshold() const { return threshold_; }
  DecisionFunction with_threshold(double threshold) const {
    return DecisionFunction(scorer_, threshold);
  }

 private:
  std::shared_ptr<Scorer> scorer_;
  double threshold_;
};

inline bool is_positive(double score, double threshold) {
  return score >= threshold;
}

/// Scores every graph; throws ScoringError on a count mismatch or a score
/// outside [0, 1].
std::vector<double> classify_batch(const DecisionFunction &clf,
                                   std::span<const LabeledGraph> graphs);

bool decide(const DecisionFunction &clf, const LabeledGraph &graph);

/// "pattern:SPEC", "size:N", "table:FILE" or "external:CMD".
std::shared_ptr<Scorer> make_scorer(std::string_view spec);

}  // namespace piex
