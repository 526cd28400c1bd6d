#include "piex/io.h"

#include <fstream>
#include <set>
#include <sstream>

#include <unistd.h>

#include <nlohmann/json.hpp>

namespace piex {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

enum class DocKind { kIts, kLabeled, kRule, kMolecule, kPlain };

struct Collector {
  std::vector<std::string> problems;
  void add(std::string s) { problems.push_back(std::move(s)); }
};

std::optional<BondOrder> order_of(const json &v) {
  if (!v.is_number())
    return std::nullopt;
  return BondOrder::try_from_double(v.get<double>());
}

std::optional<BondPair> pair_of(const json &v) {
  if (!v.is_array() || v.size() != 2)
    return std::nullopt;
  auto r = order_of(v[0]);
  auto p = order_of(v[1]);
  if (!r || !p)
    return std::nullopt;
  return BondPair{*r, *p};
}

json bond_json(BondOrder b) {
  if (b.half_units() % 2 == 0)
    return b.half_units() / 2;
  return b.value();
}

LabeledGraph parse_document(std::string_view text, DocKind kind,
                            DocumentMeta *meta) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error &e) {
    throw ValidationError({std::string("malformed JSON: ") + e.what()});
  }
  if (!doc.is_object() || !doc.contains("nodes") || !doc["nodes"].is_array())
    throw ValidationError({"document must be an object with a \"nodes\" array"});
  if (doc.contains("edges") && !doc["edges"].is_array())
    throw ValidationError({"\"edges\" must be an array"});

  if (meta) {
    if (doc.contains("name") && doc["name"].is_string())
      meta->name = doc["name"].get<std::string>();
    if (doc.contains("source") && doc["source"].is_string())
      meta->source = doc["source"].get<std::string>();
  }

  Collector c;
  std::vector<std::pair<NodeId, Atom>> nodes;
  std::set<NodeId> ids;
  std::size_t position = 0;
  for (const json &n : doc["nodes"]) {
    const std::string where = "node #" + std::to_string(position++);
    if (!n.is_object() || !n.contains("id") || !n["id"].is_number_integer()) {
      c.add(where + " needs an integer \"id\"");
      continue;
    }
    const auto raw = n["id"].get<std::int64_t>();
    if (raw < 0 || raw > 1'000'000'000) {
      c.add(where + " has an out-of-range id " + std::to_string(raw));
      continue;
    }
    const auto id = static_cast<NodeId>(raw);
    Atom atom;
    if (n.contains("element")) {
      if (!n["element"].is_string()) {
        c.add("node " + std::to_string(id) + " has a non-string element");
        continue;
      }
      atom.element = n["element"].get<std::string>();
    } else if (kind == DocKind::kPlain) {
      atom.element = "*";
    } else {
      c.add("node " + std::to_string(id) + " has no element");
      continue;
    }
    const bool wildcard_ok = kind == DocKind::kRule || kind == DocKind::kPlain;
    if (kind == DocKind::kPlain ? atom.element.empty()
                                : !(is_element_symbol(atom.element) ||
                                    (wildcard_ok && atom.element == "*")))
      c.add("node " + std::to_string(id) + " has unknown element '" +
            atom.element + "'");
    if (n.contains("charge")) {
      if (!n["charge"].is_number_integer())
        c.add("node " + std::to_string(id) + " has a non-integer charge");
      else
        atom.charge = n["charge"].get<int>();
    }
    if (!ids.insert(id).second) {
      c.add("duplicate node id " + std::to_string(id));
      continue;
    }
    nodes.emplace_back(id, std::move(atom));
  }

  std::vector<std::tuple<NodeId, NodeId, BondPair>> edges;
  std::set<Edge> seen;
  position = 0;
  const json no_edges = json::array();
  for (const json &e : doc.contains("edges") ? doc["edges"] : no_edges) {
    const std::string where = "edge #" + std::to_string(position++);
    if (!e.is_object() || !e.contains("u") || !e.contains("v") ||
        !e["u"].is_number_integer() || !e["v"].is_number_integer()) {
      c.add(where + " needs integer \"u\" and \"v\"");
      continue;
    }
    const auto u = e["u"].get<NodeId>();
    const auto v = e["v"].get<NodeId>();
    const std::string name = "edge " + std::to_string(u) + "-" +
                             std::to_string(v);
    bool ok = true;
    if (u == v) {
      c.add(name + " is a self-loop");
      ok = false;
    }
    for (NodeId x : {u, v})
      if (!ids.contains(x)) {
        c.add(name + " has dangling endpoint " + std::to_string(x));
        ok = false;
      }

    BondPair label{BondOrder::single(), BondOrder::single()};
    const bool has_order = e.contains("order");
    if (kind == DocKind::kMolecule) {
      auto b = has_order ? order_of(e["order"]) : std::nullopt;
      if (!b || b->is_zero()) {
        c.add(name + " needs a bond order from {1, 1.5, 2, 3}");
        ok = false;
      } else {
        label = {*b, *b};
      }
    } else if (kind == DocKind::kPlain && !has_order) {
      // topology only
    } else if (kind == DocKind::kPlain && order_of(e["order"])) {
      label = {*order_of(e["order"]), *order_of(e["order"])};
    } else {
      auto b = has_order ? pair_of(e["order"]) : std::nullopt;
      if (!b) {
        c.add(name + " needs \"order\": [b_R, b_P] with orders from "
                     "{0, 1, 1.5, 2, 3}");
        ok = false;
      } else if (b->reactant.is_zero() && b->product.is_zero()) {
        c.add(name + " has bond orders (0,0)");
        ok = false;
      } else {
        label = *b;
      }
    }
    if (ok && !seen.insert(Edge(u, v)).second) {
      c.add("duplicate " + name);
      ok = false;
    }
    if (ok)
      edges.emplace_back(u, v, label);
  }

  LabeledGraph graph(std::move(nodes), std::move(edges));
  if (kind == DocKind::kIts) {
    if (graph.empty())
      c.add("graph has no nodes");
    else if (!is_connected(graph))
      c.add("graph is not connected");
  }
  if (!c.problems.empty())
    throw ValidationError(std::move(c.problems));
  return graph;
}

}  // namespace

ItsGraph parse_its(std::string_view text, DocumentMeta *meta) {
  return ItsGraph(parse_document(text, DocKind::kIts, meta));
}

LabeledGraph parse_labeled_graph(std::string_view text, DocumentMeta *meta) {
  return parse_document(text, DocKind::kLabeled, meta);
}

ReactionRule parse_rule(std::string_view text) {
  return ReactionRule(parse_document(text, DocKind::kRule, nullptr));
}

MolecularGraph parse_molecule(std::string_view text) {
  const LabeledGraph g = parse_document(text, DocKind::kMolecule, nullptr);
  std::vector<std::tuple<NodeId, NodeId, BondOrder>> edges;
  for (const auto &[u, v, b] : g.edge_list())
    edges.emplace_back(u, v, b.reactant);
  return MolecularGraph(g.node_list(), std::move(edges));
}

LabeledGraph parse_plain_graph(std::string_view text) {
  return parse_document(text, DocKind::kPlain, nullptr);
}

std::string serialize_its(const LabeledGraph &graph, const DocumentMeta &meta,
                          JsonStyle style) {
  ordered_json doc;
  if (meta.name)
    doc["name"] = *meta.name;
  if (meta.source)
    doc["source"] = *meta.source;
  ordered_json nodes = ordered_json::array();
  for (std::size_t i = 0; i < graph.node_count(); ++i) {
    ordered_json n;
    n["id"] = graph.id(i);
    n["element"] = graph.node_label(i).element;
    n["charge"] = graph.node_label(i).charge;
    nodes.push_back(std::move(n));
  }
  ordered_json edges = ordered_json::array();
  for (std::size_t i = 0; i < graph.edge_count(); ++i) {
    ordered_json e;
    e["u"] = graph.edges()[i].u;
    e["v"] = graph.edges()[i].v;
    e["order"] = ordered_json::array({bond_json(graph.edge_label(i).reactant),
                                      bond_json(graph.edge_label(i).product)});
    edges.push_back(std::move(e));
  }
  doc["nodes"] = std::move(nodes);
  doc["edges"] = std::move(edges);
  return style == JsonStyle::kPretty ? doc.dump(2) + "\n" : doc.dump();
}

std::string serialize_molecule(const MolecularGraph &graph) {
  ordered_json doc;
  ordered_json nodes = ordered_json::array();
  for (std::size_t i = 0; i < graph.node_count(); ++i)
    nodes.push_back({{"id", graph.id(i)},
                     {"element", graph.node_label(i).element},
                     {"charge", graph.node_label(i).charge}});
  ordered_json edges = ordered_json::array();
  for (std::size_t i = 0; i < graph.edge_count(); ++i)
    edges.push_back({{"u", graph.edges()[i].u},
                     {"v", graph.edges()[i].v},
                     {"order", bond_json(graph.edge_label(i))}});
  doc["nodes"] = std::move(nodes);
  doc["edges"] = std::move(edges);
  return doc.dump(2) + "\n";
}

std::string its_to_dot(const LabeledGraph &graph, std::string_view name) {
  std::ostringstream out;
  out << "graph \"" << name << "\" {\n  node [shape=circle];\n";
  for (std::size_t i = 0; i < graph.node_count(); ++i) {
    const Atom &a = graph.node_label(i);
    out << "  a" << graph.id(i) << " [label=\"" << a.element;
    if (a.charge > 0)
      out << "+" << (a.charge > 1 ? std::to_string(a.charge) : "");
    else if (a.charge < 0)
      out << "-" << (a.charge < -1 ? std::to_string(-a.charge) : "");
    out << "\\n" << graph.id(i) << "\"];\n";
  }
  for (std::size_t i = 0; i < graph.edge_count(); ++i) {
    const Edge &e = graph.edges()[i];
    const BondPair &b = graph.edge_label(i);
    out << "  a" << e.u << " -- a" << e.v << " [label=\""
        << b.reactant.to_string() << "," << b.product.to_string() << "\"";
    if (b.is_breaking())
      out << ", style=dotted";
    else if (b.is_forming())
      out << ", style=dashed";
    out << "];\n";
  }
  out << "}\n";
  return out.str();
}

std::string read_text_file(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw ValidationError({"cannot read " + path.string()});
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file_atomic(const std::filesystem::path &path,
                            std::string_view content) {
  auto tmp = path;
  tmp += ".tmp" + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out)
      throw Error("cannot write " + tmp.string());
    out << content;
    if (!out.flush())
      throw Error("cannot write " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace piex
