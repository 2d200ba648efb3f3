#include "guidewave/core/fourier_index.hpp"

#include <string>

#include "guidewave/core/errors.hpp"

namespace guidewave {

int fourier_dim(int N) {
  if (N < 1) throw ConfigError("Fourier truncation N must be >= 1, got " + std::to_string(N));
  return (2 * N + 1) * N;
}

int flat_index(int N, FourierIndex idx) {
  if (idx.j < -N || idx.j > N || idx.l < 1 || idx.l > N) {
    throw ConfigError("Fourier index (" + std::to_string(idx.j) + ", " + std::to_string(idx.l) +
                      ") outside truncation N=" + std::to_string(N));
  }
  return (idx.j + N) * N + (idx.l - 1);
}

FourierIndex unflat_index(int N, int flat) {
  if (flat < 0 || flat >= fourier_dim(N)) {
    throw ConfigError("flat Fourier index " + std::to_string(flat) + " out of range");
  }
  return {flat / N - N, flat % N + 1};
}

}  // namespace guidewave
