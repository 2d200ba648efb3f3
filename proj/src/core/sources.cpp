#include "guidewave/core/sources.hpp"

#include <cmath>

namespace guidewave {

cplx DirichletSpec::operator()(const Point& x) const {
  switch (kind) {
    case Kind::None:
      return 0.0;
    case Kind::PlaneWave: {
      const double phase = wavenumber * (std::cos(angle) * x.x() + std::sin(angle) * x.y());
      return amplitude * std::exp(cplx(0.0, phase));
    }
    case Kind::GuideSine:
      return amplitude * std::sin(kPi * ell * (x.y() - y0) / height);
  }
  return 0.0;
}

}  // namespace guidewave
