#include "guidewave/core/types.hpp"

#include <cmath>

#include "guidewave/core/errors.hpp"

namespace guidewave {

void CellSpec::validate() const {
  if (!(L > 0.0) || !(H > 0.0) || !std::isfinite(L) || !std::isfinite(H)) {
    throw ConfigError("cell: period and height must be positive (got L=" + std::to_string(L) +
                      ", H=" + std::to_string(H) + ")");
  }
}

std::string to_string(Side side) { return side == Side::Plus ? "plus" : "minus"; }

Side side_from_string(const std::string& name) {
  if (name == "plus") return Side::Plus;
  if (name == "minus") return Side::Minus;
  throw ConfigError("unknown side '" + name + "' (expected plus or minus)");
}

}  // namespace guidewave
