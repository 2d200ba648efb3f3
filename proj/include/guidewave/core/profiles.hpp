#pragma once

#include "guidewave/core/types.hpp"

namespace guidewave {

// C^4 cut-off: 1 for t <= a, 0 for t >= b, and in between
// 1 - int_a^t (s-a)^4 (s-b)^4 ds / int_a^b (s-a)^4 (s-b)^4 ds.
double zeta(double t, double a, double b);

// amplitude * zeta(|x - center|; inner, outer): flat top of radius inner, tapering to zero at outer.
struct RadialBump {
  Point center{0.0, 0.0};
  double inner = 0.0;
  double outer = 0.0;
  double amplitude = 0.0;

  void validate() const;
  double operator()(const Point& x) const;
  Box support() const;
};

}  // namespace guidewave
