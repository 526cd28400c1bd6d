#include "piex/chem.h"

#include <array>
#include <cmath>

namespace piex {

namespace {

constexpr std::array<std::string_view, 118> kElements = {
    "H",  "He", "Li", "Be", "B",  "C",  "N",  "O",  "F",  "Ne", "Na", "Mg",
    "Al", "Si", "P",  "S",  "Cl", "Ar", "K",  "Ca", "Sc", "Ti", "V",  "Cr",
    "Mn", "Fe", "Co", "Ni", "Cu", "Zn", "Ga", "Ge", "As", "Se", "Br", "Kr",
    "Rb", "Sr", "Y",  "Zr", "Nb", "Mo", "Tc", "Ru", "Rh", "Pd", "Ag", "Cd",
    "In", "Sn", "Sb", "Te", "I",  "Xe", "Cs", "Ba", "La", "Ce", "Pr", "Nd",
    "Pm", "Sm", "Eu", "Gd", "Tb", "Dy", "Ho", "Er", "Tm", "Yb", "Lu", "Hf",
    "Ta", "W",  "Re", "Os", "Ir", "Pt", "Au", "Hg", "Tl", "Pb", "Bi", "Po",
    "At", "Rn", "Fr", "Ra", "Ac", "Th", "Pa", "U",  "Np", "Pu", "Am", "Cm",
    "Bk", "Cf", "Es", "Fm", "Md", "No", "Lr", "Rf", "Db", "Sg", "Bh", "Hs",
    "Mt", "Ds", "Rg", "Cn", "Nh", "Fl", "Mc", "Lv", "Ts", "Og"};

}  // namespace

bool is_element_symbol(std::string_view symbol) {
  for (auto e : kElements)
    if (e == symbol)
      return true;
  return false;
}

std::optional<BondOrder> BondOrder::try_from_double(double order) {
  const double half = order * 2.0;
  const double rounded = std::round(half);
  if (std::abs(half - rounded) > 1e-9)
    return std::nullopt;
  switch (static_cast<int>(rounded)) {
  case 0:
  case 2:
  case 3:
  case 4:
  case 6:
    return BondOrder(static_cast<std::uint8_t>(rounded));
  default:
    return std::nullopt;
  }
}

BondOrder BondOrder::from_double(double order) {
  auto b = try_from_double(order);
  if (!b)
    throw DomainError("bond order " + std::to_string(order) +
                      " is not one of 0, 1, 1.5, 2, 3");
  return *b;
}

std::string BondOrder::to_string() const {
  if (half_units_ % 2 == 0)
    return std::to_string(half_units_ / 2);
  return std::to_string(half_units_ / 2) + ".5";
}

std::string BondPair::to_string() const {
  return "(" + reactant.to_string() + "," + product.to_string() + ")";
}

}  // namespace piex
