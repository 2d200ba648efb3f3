#include "guidewave/core/tolerances.hpp"

#include "guidewave/core/errors.hpp"
#include "guidewave/core/types.hpp"

namespace guidewave {

void Tolerances::validate() const {
  if (!(unit_circle > 0.0) || !(pencil_residual > 0.0) || !(gram_condition_warn > 0.0) ||
      !(lap_epsilon > 0.0)) {
    throw ConfigError("tolerances must all be strictly positive");
  }
  if (!(unit_circle < kPi / 4.0)) throw ConfigError("unit_circle tolerance must be below pi/4");
}

}  // namespace guidewave
