#include "piex/error.h"

namespace piex {

namespace {

std::string join(const std::vector<std::string> &items) {
  std::string out;
  for (const auto &s : items) {
    if (!out.empty())
      out += "; ";
    out += s;
  }
  return out.empty() ? "validation failed" : out;
}

}  // namespace

ValidationError::ValidationError(std::vector<std::string> violations)
    : Error(join(violations)), violations_(std::move(violations)) { }

}  // namespace piex
