#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "guidewave/fem/assembly.hpp"

namespace guidewave::fem {

// Uniform-grid bucket search for the triangle containing a point.
class TriangleLocator {
 public:
  explicit TriangleLocator(const Mesh& mesh);
  // Triangle index and barycentric coordinates, or nullopt outside the mesh.
  std::optional<std::pair<int, Bary>> locate(const Point& x) const;

 private:
  const Mesh* mesh_;
  Point origin_;
  double cell_ = 1.0;
  int nx_ = 1, ny_ = 1;
  std::vector<std::vector<int>> buckets_;
};

// P3 finite element function on a mesh.
class SolutionField {
 public:
  SolutionField(std::shared_ptr<const Mesh> mesh, Eigen::VectorXcd values);

  const Mesh& mesh() const { return *mesh_; }
  std::shared_ptr<const Mesh> mesh_ptr() const { return mesh_; }
  const P3Space& space() const { return *space_; }
  const Eigen::VectorXcd& values() const { return values_; }

  cplx eval_in(int triangle, const Bary& l) const;
  // Throws DomainMismatchError outside the mesh.
  cplx eval(const Point& x) const;
  std::optional<cplx> try_eval(const Point& x) const;
  double l2_norm() const;

 private:
  std::shared_ptr<const Mesh> mesh_;
  std::shared_ptr<const P3Space> space_;
  Eigen::VectorXcd values_;
  std::shared_ptr<const TriangleLocator> locator_;
};

struct SolveReport {
  int dofs = 0;
  int free_dofs = 0;
  double residual = 0.0;
  double seconds_assembly = 0.0;
  double seconds_solve = 0.0;
};

// Assemble and solve on `mesh`.
SolutionField solve(const JunctionProblem& problem, std::shared_ptr<const Mesh> mesh, SolveReport* report = nullptr);

// Nodal interpolation of `field` onto the P3 space of `mesh` (which must lie inside field's mesh).
SolutionField interpolate(const SolutionField& field, std::shared_ptr<const Mesh> mesh);

// ||u - v||_L2 / ||v||_L2 over u's mesh. v is evaluated at u's quadrature points, so the meshes
// may differ but must cover the same domain (DomainMismatchError otherwise).
double field_error(const SolutionField& u, const SolutionField& v);
double field_error(const SolutionField& u, const std::function<cplx(const Point&)>& exact);

// Plain-text exports. Mesh: vertices, triangles (with region index) and tagged edges.
// Field: one line "x1 x2 re im" per degree of freedom.
void write_mesh(const std::string& path, const Mesh& mesh);
void write_field(const std::string& path, const SolutionField& field);

}  // namespace guidewave::fem
