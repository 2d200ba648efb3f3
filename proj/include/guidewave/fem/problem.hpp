#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "guidewave/core/config.hpp"
#include "guidewave/dtn/dtn_operator.hpp"
#include "guidewave/fem/mesh.hpp"

namespace guidewave::fem {

// Geometry of the truncated domain: the junction regions plus `guide_cells` periods of each
// attached half-guide, cut off by a transparent interface.
struct DomainLayout {
  std::vector<PolygonRegion> junction;
  std::optional<GuideConfig> left;   // side Minus
  std::optional<GuideConfig> right;  // side Plus
  int guide_cells = 2;

  static DomainLayout from_config(const ProblemConfig& cfg);

  const std::optional<GuideConfig>& guide(Side side) const { return side == Side::Plus ? right : left; }
  double interface_x1(Side side) const;

  // Polygon regions of the domain. With extra_cells > 0 each guide continues for that many
  // further periods and ends in a wall instead of an interface; the regions of the truncated
  // domain are reproduced unchanged, so both meshes coincide there.
  std::vector<PolygonRegion> regions(int extra_cells = 0) const;
};

// Interface segment of one side with the x2 coordinates of the mesh vertices on it.
dtn::InterfaceSegment interface_segment(const Mesh& mesh, const DomainLayout& layout, Side side);

// Data of  Delta u + (k^2 + i absorption) q u = f  on a meshed domain, with walls (u = 0),
// Dirichlet edges (u = dirichlet) and transparent interfaces (d_n u = T u).
struct JunctionProblem {
  double k = 0.0;
  double absorption = 0.0;
  std::function<double(const Point&, RegionKind)> q;
  std::function<double(const Point&)> f;           // empty means zero
  std::function<cplx(const Point&)> dirichlet;     // required if the mesh has Dirichlet edges
  std::shared_ptr<const dtn::DtnOperator> dtn_plus;
  std::shared_ptr<const dtn::DtnOperator> dtn_minus;

  const std::shared_ptr<const dtn::DtnOperator>& dtn(Side side) const {
    return side == Side::Plus ? dtn_plus : dtn_minus;
  }
};

// Medium, source and Dirichlet data of a configuration; DtN operators are attached separately.
JunctionProblem make_problem(const ProblemConfig& cfg);

}  // namespace guidewave::fem
