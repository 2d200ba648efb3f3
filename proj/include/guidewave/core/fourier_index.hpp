#pragma once

#include <cstddef>

namespace guidewave {

// Index (j, l) of the basis function exp(2 pi i j x1 / L) sin(pi l x2 / H),
// with j in [-N, N] and l in [1, N].
struct FourierIndex {
  int j = 0;
  int l = 1;

  bool operator==(const FourierIndex&) const = default;
};

// Dimension (2N + 1) N of the truncated basis.
int fourier_dim(int N);

// Flat position (j + N) N + (l - 1) of an index.
int flat_index(int N, FourierIndex idx);

FourierIndex unflat_index(int N, int flat);

}  // namespace guidewave
