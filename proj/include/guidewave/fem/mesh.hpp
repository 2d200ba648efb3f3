#pragma once

#include <array>
#include <map>
#include <utility>
#include <vector>

#include "guidewave/core/config.hpp"
#include "guidewave/core/types.hpp"

namespace guidewave::fem {

using EdgeKey = std::pair<int, int>;  // (min vertex, max vertex)

inline EdgeKey edge_key(int a, int b) { return a < b ? EdgeKey{a, b} : EdgeKey{b, a}; }

// Conforming triangulation of a union of polygon regions.
struct Mesh {
  std::vector<Point> vertices;
  std::vector<std::array<int, 3>> triangles;  // counter-clockwise
  std::vector<int> triangle_region;           // index into region_kinds
  std::vector<RegionKind> region_kinds;
  std::map<EdgeKey, EdgeTag> edge_tags;       // every edge lying on a non-internal polygon edge
  double h = 0.0;

  std::size_t num_triangles() const { return triangles.size(); }
  double triangle_area(int t) const;
  double area() const;
  // Circumradius over inradius; 2 for an equilateral triangle.
  double quality(int t) const;
  double max_quality() const;
  Box bounds() const;
  // Edges carrying `tag`, as vertex pairs.
  std::vector<EdgeKey> tagged_edges(EdgeTag tag) const;
};

// Meshes each region independently with boundary points spaced at most h apart and interior
// points from a global equilateral lattice of spacing h, then merges the pieces. Regions must
// meet along whole edges (vertices of one region lying on another region's edge are inserted
// automatically). Identical regions always produce identical sub-meshes, so a domain that is a
// superset of another reproduces the smaller mesh exactly on the shared regions.
Mesh generate_mesh(const std::vector<PolygonRegion>& regions, double h);
Mesh generate_mesh(const PolygonRegion& domain, double h);

}  // namespace guidewave::fem
