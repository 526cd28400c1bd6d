#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "piex/graph.h"

namespace piex {

/// Atom label. `element` is a periodic-table symbol, or "*" in patterns.
struct Atom {
  std::string element;
  int charge = 0;

  friend auto operator<=>(const Atom &, const Atom &) = default;
};

bool is_element_symbol(std::string_view symbol);

/// Bond order from the alphabet {0, 1, 1.5, 2, 3}; 1.5 is aromatic.
/// Stored in half units so comparisons are exact.
class BondOrder {
 public:
  constexpr BondOrder() = default;

  /// Throws DomainError for values outside the alphabet.
  static BondOrder from_double(double order);
  static std::optional<BondOrder> try_from_double(double order);
  static constexpr BondOrder none() { return BondOrder(0); }
  static constexpr BondOrder single() { return BondOrder(2); }
  static constexpr BondOrder aromatic() { return BondOrder(3); }
  static constexpr BondOrder double_bond() { return BondOrder(4); }
  static constexpr BondOrder triple() { return BondOrder(6); }

  constexpr double value() const { return half_units_ / 2.0; }
  constexpr int half_units() const { return half_units_; }
  constexpr bool is_zero() const { return half_units_ == 0; }
  std::string to_string() const;

  friend constexpr auto operator<=>(BondOrder, BondOrder) = default;

 private:
  constexpr explicit BondOrder(std::uint8_t half) : half_units_(half) { }
  std::uint8_t half_units_ = 0;
};

/// ITS edge label: bond order in the reactants and in the products.
struct BondPair {
  BondOrder reactant;
  BondOrder product;

  bool is_changing() const { return reactant != product; }
  /// Bond broken (reactant > product) or formed (product > reactant).
  bool is_breaking() const { return reactant > product; }
  bool is_forming() const { return product > reactant; }
  std::string to_string() const;

  friend auto operator<=>(const BondPair &, const BondPair &) = default;
};

/// Molecular graph: atoms with plain bond orders.
using MolecularGraph = Graph<Atom, BondOrder>;

/// Graph whose edges carry bond-order pairs: ITS graphs and every subgraph
/// of one that is handed to a classifier or rated.
using LabeledGraph = Graph<Atom, BondPair>;

/// Element matching with the "*" wildcard on the pattern side.
struct AtomMatch {
  bool match_charge = true;

  bool operator()(const Atom &pattern, const Atom &host) const {
    if (pattern.element != "*" && pattern.element != host.element)
      return false;
    return !match_charge || pattern.charge == host.charge;
  }
};

}  // namespace piex
