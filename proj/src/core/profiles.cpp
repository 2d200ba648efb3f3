#include "guidewave/core/profiles.hpp"

#include <cmath>

#include "guidewave/core/errors.hpp"

namespace guidewave {

namespace {

// int_0^s u^4 (1-u)^4 du
double quartic_integral(double s) {
  const double s5 = std::pow(s, 5);
  return s5 * (1.0 / 5.0 + s * (-2.0 / 3.0 + s * (6.0 / 7.0 + s * (-1.0 / 2.0 + s / 9.0))));
}

}  // namespace

double zeta(double t, double a, double b) {
  if (!(b > a)) throw ConfigError("zeta: requires a < b");
  if (t <= a) return 1.0;
  if (t >= b) return 0.0;
  // Substituting s = (tau - a)/(b - a) turns the ratio of integrals into a ratio of
  // polynomial integrals over [0, 1]; the full integral equals 1/630.
  return 1.0 - 630.0 * quartic_integral((t - a) / (b - a));
}

void RadialBump::validate() const {
  if (!(inner >= 0.0) || !(outer > inner)) {
    throw ConfigError("bump: requires 0 <= inner < outer");
  }
}

double RadialBump::operator()(const Point& x) const {
  return amplitude * zeta((x - center).norm(), inner, outer);
}

Box RadialBump::support() const {
  return {center - Point(outer, outer), center + Point(outer, outer)};
}

}  // namespace guidewave
