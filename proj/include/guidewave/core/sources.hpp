#pragma once

#include <optional>

#include "guidewave/core/profiles.hpp"
#include "guidewave/core/types.hpp"

namespace guidewave {

// Volume source f of  Delta u + k^2 q u = f; compactly supported in the junction.
struct SourceSpec {
  std::optional<RadialBump> bump;

  bool empty() const { return !bump.has_value(); }
  double operator()(const Point& x) const { return bump ? (*bump)(x) : 0.0; }
};

// Inhomogeneous Dirichlet data on edges tagged `dirichlet`.
struct DirichletSpec {
  enum class Kind { None, PlaneWave, GuideSine };

  Kind kind = Kind::None;
  // PlaneWave: amplitude * exp(i wavenumber (cos(angle) x1 + sin(angle) x2)).
  double angle = 0.0;
  double wavenumber = 0.0;
  // GuideSine: amplitude * sin(pi ell (x2 - y0) / height).
  int ell = 1;
  double y0 = 0.0;
  double height = 1.0;
  cplx amplitude{1.0, 0.0};

  cplx operator()(const Point& x) const;
};

}  // namespace guidewave
