#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "piex/chem.h"
#include "piex/reaction.h"

namespace piex {

/// Optional document metadata carried next to the graph.
struct DocumentMeta {
  std::optional<std::string> name;
  std::optional<std::string> source;
};

enum class JsonStyle { kPretty, kCompact };

/// ITS-JSON:
///   {"name": ..., "source": ..., "nodes": [{"id", "element", "charge"}],
///    "edges": [{"u", "v", "order": [b_R, b_P]}]}
/// Parsing reports every violation at once through ValidationError.
ItsGraph parse_its(std::string_view text, DocumentMeta *meta = nullptr);

/// Same document format without the ITS-level checks (connectivity,
/// element table); used for explanations and expected explanations.
LabeledGraph parse_labeled_graph(std::string_view text,
                                 DocumentMeta *meta = nullptr);

/// Canonical form: nodes by id, edges by (min, max), fixed key order. Whole
/// bond orders are written as integers.
std::string serialize_its(const LabeledGraph &graph,
                          const DocumentMeta &meta = {},
                          JsonStyle style = JsonStyle::kPretty);
inline std::string serialize_its(const ItsGraph &its,
                                 const DocumentMeta &meta = {},
                                 JsonStyle style = JsonStyle::kPretty) {
  return serialize_its(its.graph(), meta, style);
}

/// Rule document: ITS-JSON whose elements may be "*".
ReactionRule parse_rule(std::string_view text);

/// Molecule document: like ITS-JSON but "order" is a single number.
MolecularGraph parse_molecule(std::string_view text);
std::string serialize_molecule(const MolecularGraph &graph);

/// Plain graph for enumeration: nodes need only "id"; "element" defaults to
/// "*" and edge orders are optional.
LabeledGraph parse_plain_graph(std::string_view text);

/// Graphviz rendering of an ITS (sub)graph: dotted edges for breaking bonds,
/// dashed for forming bonds.
std::string its_to_dot(const LabeledGraph &graph, std::string_view name = "its");

std::string read_text_file(const std::filesystem::path &path);
/// Writes through a temporary file in the same directory and renames it.
void write_text_file_atomic(const std::filesystem::path &path,
                            std::string_view content);

}  // namespace piex
