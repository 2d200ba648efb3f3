#pragma once

#include <array>
#include <map>
#include <vector>

#include <Eigen/Core>

#include "guidewave/fem/mesh.hpp"

namespace guidewave::fem {

// Local node order on a triangle (v0, v1, v2):
//   0..2  vertices,
//   3, 4  edge v0-v1 at barycentric (2/3, 1/3, 0) and (1/3, 2/3, 0),
//   5, 6  edge v1-v2 at (0, 2/3, 1/3) and (0, 1/3, 2/3),
//   7, 8  edge v2-v0 at (1/3, 0, 2/3) and (2/3, 0, 1/3),
//   9     centroid.
inline constexpr int kP3Nodes = 10;

using Bary = Eigen::Vector3d;

std::array<double, kP3Nodes> p3_shape(const Bary& l);
// Derivatives with respect to the three barycentric coordinates.
std::array<Eigen::Vector3d, kP3Nodes> p3_shape_dbary(const Bary& l);
const std::array<Bary, kP3Nodes>& p3_nodes();

// Quadrature on the reference triangle in barycentric coordinates; weights sum to 1
// (multiply by the triangle area).
struct TriangleRule {
  std::vector<Bary> points;
  std::vector<double> weights;
};

// Collapsed (Duffy) Gauss rule with n x n points; exact for total degree 2n - 2.
TriangleRule triangle_rule(int n);

// Gradients of the barycentric coordinates of triangle t (rows of the returned 3x2 matrix).
Eigen::Matrix<double, 3, 2> bary_gradients(const Point& p0, const Point& p1, const Point& p2);

// Barycentric coordinates of x with respect to triangle (p0, p1, p2).
Bary barycentric(const Point& p0, const Point& p1, const Point& p2, const Point& x);

// Global numbering of continuous P3 degrees of freedom: vertices first, then two per edge
// (ordered from the smaller to the larger vertex index), then one per triangle.
class P3Space {
 public:
  explicit P3Space(const Mesh& mesh);

  const Mesh& mesh() const { return *mesh_; }
  int num_dofs() const { return num_dofs_; }
  const std::array<int, kP3Nodes>& element_dofs(int t) const { return element_dofs_[t]; }
  Point dof_position(int dof) const { return positions_[dof]; }
  // Four dofs along the mesh edge a-b in order a, 1/3, 2/3, b.
  std::array<int, 4> edge_dofs(int a, int b) const;
  int num_edges() const { return static_cast<int>(edge_index_.size()); }

 private:
  const Mesh* mesh_;
  std::map<EdgeKey, int> edge_index_;
  std::vector<std::array<int, kP3Nodes>> element_dofs_;
  std::vector<Point> positions_;
  int num_dofs_ = 0;
};

// Cubic Lagrange basis on [0, 1] with nodes 0, 1/3, 2/3, 1.
std::array<double, 4> cubic_lagrange_1d(double s);

}  // namespace guidewave::fem
