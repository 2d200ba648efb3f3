#include "guidewave/fem/solution.hpp"

#include <chrono>
#include <cmath>
#include <fstream>

#include "guidewave/core/errors.hpp"

namespace guidewave::fem {

namespace {

constexpr int kErrorRule = 6;
constexpr double kInsideSlack = 1e-10;

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

TriangleLocator::TriangleLocator(const Mesh& mesh) : mesh_(&mesh) {
  const Box b = mesh.bounds();
  cell_ = std::max(mesh.h, 1e-6) * 2.0;
  origin_ = b.lo;
  nx_ = std::max(1, static_cast<int>(std::ceil((b.hi.x() - b.lo.x()) / cell_)) + 1);
  ny_ = std::max(1, static_cast<int>(std::ceil((b.hi.y() - b.lo.y()) / cell_)) + 1);
  buckets_.resize(static_cast<std::size_t>(nx_) * ny_);
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    Point lo = mesh.vertices[mesh.triangles[t][0]], hi = lo;
    for (int v : mesh.triangles[t]) lo = lo.cwiseMin(mesh.vertices[v]), hi = hi.cwiseMax(mesh.vertices[v]);
    const int i0 = std::clamp(static_cast<int>(std::floor((lo.x() - origin_.x()) / cell_)), 0, nx_ - 1);
    const int i1 = std::clamp(static_cast<int>(std::floor((hi.x() - origin_.x()) / cell_)), 0, nx_ - 1);
    const int j0 = std::clamp(static_cast<int>(std::floor((lo.y() - origin_.y()) / cell_)), 0, ny_ - 1);
    const int j1 = std::clamp(static_cast<int>(std::floor((hi.y() - origin_.y()) / cell_)), 0, ny_ - 1);
    for (int i = i0; i <= i1; ++i) {
      for (int j = j0; j <= j1; ++j) buckets_[static_cast<std::size_t>(i) * ny_ + j].push_back(static_cast<int>(t));
    }
  }
}

std::optional<std::pair<int, Bary>> TriangleLocator::locate(const Point& x) const {
  const int i = static_cast<int>(std::floor((x.x() - origin_.x()) / cell_));
  const int j = static_cast<int>(std::floor((x.y() - origin_.y()) / cell_));
  std::optional<std::pair<int, Bary>> best;
  double best_min = -std::numeric_limits<double>::infinity();
  for (int di = -1; di <= 1; ++di) {
    for (int dj = -1; dj <= 1; ++dj) {
      const int a = i + di, b = j + dj;
      if (a < 0 || b < 0 || a >= nx_ || b >= ny_) continue;
      for (int t : buckets_[static_cast<std::size_t>(a) * ny_ + b]) {
        const auto& tri = mesh_->triangles[t];
        const Bary l = barycentric(mesh_->vertices[tri[0]], mesh_->vertices[tri[1]], mesh_->vertices[tri[2]], x);
        const double m = l.minCoeff();
        if (m >= 0.0) return std::make_pair(t, l);
        if (m > best_min) {
          best_min = m;
          best = std::make_pair(t, l);
        }
      }
    }
  }
  if (best && best_min >= -kInsideSlack) return best;
  return std::nullopt;
}

SolutionField::SolutionField(std::shared_ptr<const Mesh> mesh, Eigen::VectorXcd values)
    : mesh_(std::move(mesh)),
      space_(std::make_shared<P3Space>(*mesh_)),
      values_(std::move(values)),
      locator_(std::make_shared<TriangleLocator>(*mesh_)) {
  if (values_.size() != space_->num_dofs()) throw DomainMismatchError("coefficient vector does not match the mesh");
}

cplx SolutionField::eval_in(int triangle, const Bary& l) const {
  const auto phi = p3_shape(l);
  const auto& dofs = space_->element_dofs(triangle);
  cplx s = 0.0;
  for (int a = 0; a < kP3Nodes; ++a) s += values_[dofs[a]] * phi[a];
  return s;
}

std::optional<cplx> SolutionField::try_eval(const Point& x) const {
  const auto hit = locator_->locate(x);
  if (!hit) return std::nullopt;
  return eval_in(hit->first, hit->second);
}

cplx SolutionField::eval(const Point& x) const {
  const auto v = try_eval(x);
  if (!v) {
    throw DomainMismatchError("point (" + std::to_string(x.x()) + ", " + std::to_string(x.y()) + ") is outside the mesh");
  }
  return *v;
}

double SolutionField::l2_norm() const {
  const TriangleRule rule = triangle_rule(kErrorRule);
  double s = 0.0;
  for (std::size_t t = 0; t < mesh_->num_triangles(); ++t) {
    const double area = mesh_->triangle_area(static_cast<int>(t));
    for (std::size_t k = 0; k < rule.points.size(); ++k) {
      s += rule.weights[k] * area * std::norm(eval_in(static_cast<int>(t), rule.points[k]));
    }
  }
  return std::sqrt(s);
}

SolutionField solve(const JunctionProblem& problem, std::shared_ptr<const Mesh> mesh, SolveReport* report) {
  const auto t0 = std::chrono::steady_clock::now();
  const P3Space space(*mesh);
  const AssembledSystem sys = assemble(problem, space);
  const double ta = seconds_since(t0);
  const auto t1 = std::chrono::steady_clock::now();
  double residual = 0.0;
  const Eigen::VectorXcd u = solve_sparse(sys.S, sys.F, &residual);
  if (report) {
    report->dofs = sys.num_dofs;
    report->free_dofs = static_cast<int>(sys.free_dofs.size());
    report->residual = residual;
    report->seconds_assembly = ta;
    report->seconds_solve = seconds_since(t1);
  }
  return SolutionField(std::move(mesh), sys.expand(u));
}

SolutionField interpolate(const SolutionField& field, std::shared_ptr<const Mesh> mesh) {
  const P3Space space(*mesh);
  Eigen::VectorXcd v(space.num_dofs());
  for (int d = 0; d < space.num_dofs(); ++d) v[d] = field.eval(space.dof_position(d));
  return SolutionField(std::move(mesh), std::move(v));
}

namespace {

template <class Exact>
double relative_error(const SolutionField& u, Exact&& exact) {
  const Mesh& mesh = u.mesh();
  const TriangleRule rule = triangle_rule(kErrorRule);
  double num = 0.0, den = 0.0;
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tri = mesh.triangles[t];
    const double area = mesh.triangle_area(static_cast<int>(t));
    for (std::size_t k = 0; k < rule.points.size(); ++k) {
      const Bary& l = rule.points[k];
      const Point x = l[0] * mesh.vertices[tri[0]] + l[1] * mesh.vertices[tri[1]] + l[2] * mesh.vertices[tri[2]];
      const cplx ve = exact(static_cast<int>(t), l, x);
      num += rule.weights[k] * area * std::norm(u.eval_in(static_cast<int>(t), l) - ve);
      den += rule.weights[k] * area * std::norm(ve);
    }
  }
  if (den == 0.0) throw DomainMismatchError("reference field has zero norm");
  return std::sqrt(num / den);
}

}  // namespace

double field_error(const SolutionField& u, const SolutionField& v) {
  const double au = u.mesh().area(), av = v.mesh().area();
  if (std::abs(au - av) > 1e-9 * std::max(au, av)) {
    throw DomainMismatchError("fields live on different domains (areas " + std::to_string(au) + " and " +
                              std::to_string(av) + ")");
  }
  if (u.mesh_ptr() == v.mesh_ptr()) {
    return relative_error(u, [&](int t, const Bary& l, const Point&) { return v.eval_in(t, l); });
  }
  return relative_error(u, [&](int, const Bary&, const Point& x) {
    const auto val = v.try_eval(x);
    if (!val) throw DomainMismatchError("fields live on different domains");
    return *val;
  });
}

double field_error(const SolutionField& u, const std::function<cplx(const Point&)>& exact) {
  return relative_error(u, [&](int, const Bary&, const Point& x) { return exact(x); });
}

void write_mesh(const std::string& path, const Mesh& mesh) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out.precision(17);
  out << "vertices " << mesh.vertices.size() << "\n";
  for (const auto& v : mesh.vertices) out << v.x() << " " << v.y() << "\n";
  out << "triangles " << mesh.triangles.size() << "\n";
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tri = mesh.triangles[t];
    out << tri[0] << " " << tri[1] << " " << tri[2] << " " << mesh.triangle_region[t] << "\n";
  }
  out << "edges " << mesh.edge_tags.size() << "\n";
  for (const auto& [key, tag] : mesh.edge_tags) out << key.first << " " << key.second << " " << to_string(tag) << "\n";
}

void write_field(const std::string& path, const SolutionField& field) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out.precision(17);
  out << "# x1 x2 re im\n";
  for (int d = 0; d < field.space().num_dofs(); ++d) {
    const Point x = field.space().dof_position(d);
    const cplx v = field.values()[d];
    out << x.x() << " " << x.y() << " " << v.real() << " " << v.imag() << "\n";
  }
}

}  // namespace guidewave::fem
