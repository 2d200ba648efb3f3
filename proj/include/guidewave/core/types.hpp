#pragma once

#include <complex>
#include <string>

#include <Eigen/Core>

namespace guidewave {

using cplx = std::complex<double>;
using Point = Eigen::Vector2d;

inline constexpr double kPi = 3.14159265358979323846;

// Periodicity cell (0, L) x (0, H) of a half-guide.
struct CellSpec {
  double L = 1.0;  // period in x1
  double H = 1.0;  // guide height in x2

  void validate() const;
  bool is_reference() const { return L == 1.0 && H == 1.0; }
};

enum class Side { Plus, Minus };

std::string to_string(Side side);
Side side_from_string(const std::string& name);

// Axis-aligned box, used for declared supports and mesh bounds.
struct Box {
  Point lo{0.0, 0.0};
  Point hi{0.0, 0.0};

  bool contains(const Point& x, double slack = 0.0) const {
    return x.x() >= lo.x() - slack && x.x() <= hi.x() + slack && x.y() >= lo.y() - slack &&
           x.y() <= hi.y() + slack;
  }
};

}  // namespace guidewave
