#pragma once

#include <vector>

namespace guidewave {

// n-point Gauss-Legendre rule on [0, 1]; exact for polynomials of degree 2n - 1.
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

GaussRule gauss_legendre(int n);

}  // namespace guidewave
