#pragma once

#include <optional>
#include <string>
#include <vector>

#include "guidewave/core/refractive_index.hpp"
#include "guidewave/core/sources.hpp"
#include "guidewave/core/tolerances.hpp"
#include "guidewave/core/types.hpp"

namespace guidewave {

// Role of a polygon edge in the boundary value problem.
enum class EdgeTag { Internal, Wall, InterfacePlus, InterfaceMinus, DirichletData };

std::string to_string(EdgeTag tag);
EdgeTag edge_tag_from_string(const std::string& name);

enum class RegionKind { Junction, GuidePlus, GuideMinus };

// Simple polygon; edge i joins vertex i and vertex i + 1 (cyclically).
struct PolygonRegion {
  std::vector<Point> vertices;
  std::vector<EdgeTag> edge_tags;
  RegionKind kind = RegionKind::Junction;

  void validate() const;
  double signed_area() const;
  bool contains(const Point& x) const;
};

// Periodic half-guide attached to the junction at x1 = anchor.
// Side Plus occupies x1 > anchor, side Minus x1 < anchor; the cross-section is (y0, y0 + H).
struct GuideConfig {
  Side side = Side::Plus;
  CellSpec cell;
  double y0 = 0.0;
  double anchor = 0.0;
  std::vector<FourierCoefficient> table;

  // Periodic index anchored so that local x1 = 0 is the junction end of the guide.
  RefractiveIndex index() const;
};

// Reference solver settings; its absorption is Tolerances::lap_epsilon.
struct LapConfig {
  int buffer_cells = 15;
};

// Full description of one scattering problem.
struct ProblemConfig {
  std::string name = "problem";
  double k = 0.0;
  std::optional<GuideConfig> left;
  std::optional<GuideConfig> right;
  std::vector<PolygonRegion> junction;
  RefractiveIndex junction_index;  // periodic background plus optional compact perturbation
  std::optional<RadialBump> perturbation;
  SourceSpec source;
  DirichletSpec dirichlet;
  int N = 16;
  int M = 4;
  double h = 0.05;
  int guide_cells = 2;  // guide cells kept inside the computational domain, per side
  int interface_quadrature = 8;
  Tolerances tol;
  LapConfig lap;

  void validate() const;
};

ProblemConfig parse_config(const std::string& text);
ProblemConfig load_config(const std::string& path);

}  // namespace guidewave
