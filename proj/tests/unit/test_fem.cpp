#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

#include "guidewave/core/errors.hpp"
#include "guidewave/core/quadrature.hpp"
#include "guidewave/fem/solution.hpp"
#include "guidewave/floquet/pencil.hpp"

using namespace guidewave;
using namespace guidewave::fem;

namespace {

PolygonRegion rect(double x0, double y0, double x1, double y1, std::vector<EdgeTag> tags,
                   RegionKind kind = RegionKind::Junction) {
  return {{Point(x0, y0), Point(x1, y0), Point(x1, y1), Point(x0, y1)}, std::move(tags), kind};
}

PolygonRegion walled_square() { return rect(0, 0, 1, 1, std::vector<EdgeTag>(4, EdgeTag::Wall)); }

std::shared_ptr<const Mesh> shared_mesh(const std::vector<PolygonRegion>& r, double h) {
  return std::make_shared<const Mesh>(generate_mesh(r, h));
}

double constant_q(const Point&, RegionKind) { return 1.0; }

// Uniform guide q = 1 on (1, 3) x (0, 1) attached to the junction (0, 1) x (0, 1).
DomainLayout straight_guide_layout() {
  DomainLayout d;
  d.junction = {rect(0, 0, 1, 1, {EdgeTag::Wall, EdgeTag::Internal, EdgeTag::Wall, EdgeTag::DirichletData})};
  GuideConfig g;
  g.side = Side::Plus;
  g.anchor = 1.0;
  g.table = {{0, 0, {1.0, 0.0}}};
  d.right = g;
  return d;
}

std::shared_ptr<const dtn::DtnOperator> guide_dtn(const Mesh& mesh, const DomainLayout& d, double k, int M) {
  const auto& g = *d.guide(Side::Plus);
  const auto p = floquet::build_pencil(g.index(), k, g.cell, 8);
  auto [plus, minus] = floquet::classify_and_orthonormalize(floquet::solve_modes(p, M, Tolerances{}), p, M, Tolerances{});
  return std::make_shared<const dtn::DtnOperator>(plus, interface_segment(mesh, d, Side::Plus), 8, Tolerances{});
}

}  // namespace

TEST_CASE("unit square mesh: area, quality and wall tags") {
  for (double h : {0.5, 0.1, 0.03}) {
    const Mesh m = generate_mesh(walled_square(), h);
    CHECK(m.area() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(m.max_quality() <= 10.0);
    CHECK(m.tagged_edges(EdgeTag::Wall).size() == static_cast<std::size_t>(4 * std::ceil(1.0 / h - 1e-9)));
    for (std::size_t t = 0; t < m.num_triangles(); ++t) CHECK(m.triangle_area(static_cast<int>(t)) > 0.0);
  }
}

TEST_CASE("mesh edges never exceed h on the boundary") {
  const Mesh m = generate_mesh(walled_square(), 0.07);
  for (const auto& [a, b] : m.tagged_edges(EdgeTag::Wall)) {
    CHECK((m.vertices[a] - m.vertices[b]).norm() <= 0.07 + 1e-12);
  }
}

TEST_CASE("strip with two transparent interfaces") {
  const std::vector<PolygonRegion> regions{
      rect(-1, 0, 1, 1, {EdgeTag::Wall, EdgeTag::Internal, EdgeTag::Wall, EdgeTag::Internal}),
      rect(1, 0, 3, 1, {EdgeTag::Wall, EdgeTag::InterfacePlus, EdgeTag::Wall, EdgeTag::Internal}, RegionKind::GuidePlus),
      rect(-3, 0, -1, 1, {EdgeTag::Wall, EdgeTag::Internal, EdgeTag::Wall, EdgeTag::InterfaceMinus},
           RegionKind::GuideMinus)};
  const Mesh m = generate_mesh(regions, 0.1);
  CHECK(m.area() == doctest::Approx(6.0).epsilon(1e-12));
  CHECK(m.tagged_edges(EdgeTag::InterfacePlus).size() == 10);
  CHECK(m.tagged_edges(EdgeTag::InterfaceMinus).size() == 10);
  for (const auto& [a, b] : m.tagged_edges(EdgeTag::InterfacePlus)) {
    CHECK(m.vertices[a].x() == 3.0);
    CHECK(m.vertices[b].x() == 3.0);
  }
  CHECK(m.max_quality() <= 10.0);
}

TEST_CASE("non-convex region and hanging region vertices are meshed conformingly") {
  const PolygonRegion L{{Point(0, 0), Point(2, 0), Point(2, 1), Point(1, 1), Point(1, 2), Point(0, 2)},
                        std::vector<EdgeTag>(6, EdgeTag::Wall)};
  const Mesh m = generate_mesh(L, 0.1);
  CHECK(m.area() == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(m.max_quality() <= 10.0);

  // A short region attached to the middle of a long edge.
  const std::vector<PolygonRegion> t{
      rect(0, 0, 1, 2, {EdgeTag::Wall, EdgeTag::Internal, EdgeTag::Wall, EdgeTag::Wall}),
      rect(1, 0.5, 2, 1.5, {EdgeTag::Wall, EdgeTag::Wall, EdgeTag::Wall, EdgeTag::Internal}, RegionKind::GuidePlus)};
  const Mesh mt = generate_mesh(t, 0.13);
  CHECK(mt.area() == doctest::Approx(3.0).epsilon(1e-12));
  // Conformity: every interior edge has exactly two triangles.
  std::map<EdgeKey, int> count;
  for (const auto& tri : mt.triangles) {
    for (int e = 0; e < 3; ++e) ++count[edge_key(tri[e], tri[(e + 1) % 3])];
  }
  double boundary_length = 0.0;
  for (const auto& [key, c] : count) {
    if (c == 1) boundary_length += (mt.vertices[key.first] - mt.vertices[key.second]).norm();
  }
  CHECK(boundary_length == doctest::Approx(8.0).epsilon(1e-12));
}

TEST_CASE("mesh of an extended domain reproduces the truncated domain's triangles") {
  const DomainLayout d = straight_guide_layout();
  const Mesh small = generate_mesh(d.regions(), 0.1);
  const Mesh big = generate_mesh(d.regions(4), 0.1);
  CHECK(big.area() == doctest::Approx(7.0).epsilon(1e-12));
  std::set<std::vector<double>> tri_big;
  for (const auto& t : big.triangles) {
    std::vector<double> key;
    for (int v : t) key.insert(key.end(), {big.vertices[v].x(), big.vertices[v].y()});
    tri_big.insert(key);
  }
  for (const auto& t : small.triangles) {
    std::vector<double> key;
    for (int v : t) key.insert(key.end(), {small.vertices[v].x(), small.vertices[v].y()});
    CHECK(tri_big.count(key) == 1);
  }
  CHECK(big.tagged_edges(EdgeTag::InterfacePlus).empty());
}

TEST_CASE("invalid polygons are rejected") {
  const PolygonRegion bow{{Point(0, 0), Point(1, 1), Point(1, 0), Point(0, 1)}, std::vector<EdgeTag>(4, EdgeTag::Wall)};
  CHECK_THROWS_AS(generate_mesh(bow, 0.1), MeshError);
  CHECK_THROWS_AS(generate_mesh(walled_square(), 0.0), MeshError);
  // Overlapping regions.
  const std::vector<PolygonRegion> overlap{walled_square(), rect(0.5, 0, 1.5, 1, std::vector<EdgeTag>(4, EdgeTag::Wall))};
  CHECK_THROWS(generate_mesh(overlap, 0.1));
}

TEST_CASE("P3 shape functions: nodal property, partition of unity, derivatives") {
  const auto& nodes = p3_nodes();
  for (int a = 0; a < kP3Nodes; ++a) {
    const auto n = p3_shape(nodes[a]);
    for (int b = 0; b < kP3Nodes; ++b) CHECK(n[b] == doctest::Approx(a == b ? 1.0 : 0.0));
  }
  const Bary l(0.2, 0.3, 0.5);
  const auto n = p3_shape(l);
  double s = 0.0;
  for (double v : n) s += v;
  CHECK(s == doctest::Approx(1.0));
  // Derivative along the direction (1, -1, 0), which keeps the sum of coordinates fixed.
  const auto d = p3_shape_dbary(l);
  const double eps = 1e-6;
  const auto np = p3_shape(l + Bary(eps, -eps, 0)), nm = p3_shape(l - Bary(eps, -eps, 0));
  for (int a = 0; a < kP3Nodes; ++a) {
    CHECK((np[a] - nm[a]) / (2 * eps) == doctest::Approx(d[a][0] - d[a][1]).epsilon(1e-7));
  }
  const auto c = cubic_lagrange_1d(0.4);
  CHECK(c[0] + c[1] + c[2] + c[3] == doctest::Approx(1.0));
  CHECK(cubic_lagrange_1d(1.0 / 3.0)[1] == doctest::Approx(1.0));
  CHECK(cubic_lagrange_1d(0.0)[0] == doctest::Approx(1.0));
}

TEST_CASE("collapsed Gauss triangle rule is exact to degree 10") {
  const TriangleRule r = triangle_rule(6);
  // int over the reference triangle of x^a y^b = a! b! / (a + b + 2)!, normalized by area 1/2.
  for (int a = 0; a <= 10; ++a) {
    for (int b = 0; a + b <= 10; ++b) {
      double s = 0.0;
      for (std::size_t k = 0; k < r.points.size(); ++k) {
        s += r.weights[k] * std::pow(r.points[k][1], a) * std::pow(r.points[k][2], b);
      }
      const double exact = 2.0 * std::tgamma(a + 1) * std::tgamma(b + 1) / std::tgamma(a + b + 3);
      CHECK(s == doctest::Approx(exact).epsilon(1e-13));
    }
  }
}

TEST_CASE("stiffness and mass matrices: symmetry, constants, integral of q") {
  const Mesh m = generate_mesh(walled_square(), 0.2);
  const P3Space space(m);
  const auto q = [](const Point& x, RegionKind) { return 1.0 + x.x() * x.y(); };
  const VolumeMatrices v = assemble_volume(space, q);
  CHECK((SparseMatrixR(v.K - SparseMatrixR(v.K.transpose()))).norm() < 1e-12);
  CHECK((SparseMatrixR(v.M - SparseMatrixR(v.M.transpose()))).norm() < 1e-12);
  const Eigen::VectorXd one = Eigen::VectorXd::Ones(space.num_dofs());
  CHECK((v.K * one).norm() < 1e-10);
  CHECK(one.dot(v.M * one) == doctest::Approx(1.25).epsilon(1e-13));
  // Energy of the interpolant of x: int |grad x|^2 = 1.
  Eigen::VectorXd x(space.num_dofs());
  for (int d = 0; d < space.num_dofs(); ++d) x[d] = space.dof_position(d).x();
  CHECK(x.dot(v.K * x) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(space.num_dofs() == static_cast<int>(m.vertices.size() + 2 * space.num_edges() + m.num_triangles()));
}

TEST_CASE("harmonic cubic with Dirichlet data is reproduced to round-off") {
  auto mesh = shared_mesh({rect(0, 0, 1, 1, std::vector<EdgeTag>(4, EdgeTag::DirichletData))}, 0.2);
  const auto exact = [](const Point& x) {
    return cplx(x.x() * x.x() * x.x() - 3 * x.x() * x.y() * x.y(), 2 * x.x() * x.y());
  };
  JunctionProblem p;
  p.k = 0.0;
  p.q = constant_q;
  p.dirichlet = exact;
  const SolutionField u = solve(p, mesh);
  CHECK(field_error(u, exact) < 1e-12);
}

TEST_CASE("manufactured solution converges at fourth order") {
  const double k = 1.0;
  const auto q = [](const Point& x, RegionKind) { return 1.0 + 0.5 * std::cos(x.x()) * std::sin(2 * x.y()); };
  const auto exact = [](const Point& x) { return cplx(std::sin(kPi * x.x()) * std::sin(kPi * x.y()), 0.0); };
  JunctionProblem p;
  p.k = k;
  p.q = q;
  p.f = [&](const Point& x) {
    return (-2 * kPi * kPi + k * k * q(x, RegionKind::Junction)) * exact(x).real();
  };
  std::vector<double> errors;
  for (double h : {0.1, 0.05}) {
    SolveReport report;
    errors.push_back(field_error(solve(p, shared_mesh({walled_square()}, h), &report), exact));
    CHECK(report.residual <= 1e-10);
  }
  const double slope = std::log2(errors[0] / errors[1]);
  MESSAGE("errors ", errors[0], " ", errors[1], " slope ", slope);
  CHECK(slope > 3.5);
  CHECK(errors[1] < 1e-6);
}

TEST_CASE("straight guide with transparent interface reproduces the outgoing mode") {
  const DomainLayout d = straight_guide_layout();
  const double k = std::sqrt(kPi * kPi + 4.0);
  auto mesh = shared_mesh(d.regions(), 0.1);
  JunctionProblem p;
  p.k = k;
  p.q = constant_q;
  p.dirichlet = [](const Point& x) { return cplx(std::sin(kPi * x.y()), 0.0); };
  p.dtn_plus = guide_dtn(*mesh, d, k, 4);
  const SolutionField u = solve(p, mesh);
  const auto exact = [](const Point& x) { return std::exp(cplx(0, 2 * x.x())) * std::sin(kPi * x.y()); };
  const double err = field_error(u, exact);
  MESSAGE("guide error ", err);
  CHECK(err < 1e-5);
}

TEST_CASE("interface terms couple interface dofs only") {
  const DomainLayout d = straight_guide_layout();
  const double k = 2.0;
  auto mesh = shared_mesh(d.regions(), 0.25);
  const P3Space space(*mesh);
  JunctionProblem p;
  p.k = k;
  p.q = constant_q;
  p.dirichlet = [](const Point&) { return cplx(1.0, 0.0); };
  p.dtn_plus = guide_dtn(*mesh, d, k, 3);
  const AssembledSystem with = assemble(p, space);
  const VolumeMatrices v = assemble_volume(space, constant_q);
  const InterfaceTraces tr = interface_traces(space, *p.dtn_plus);
  std::set<int> iface(tr.dofs.begin(), tr.dofs.end());
  CHECK(tr.dofs.size() == static_cast<std::size_t>(3 * 4 + 1));
  SparseMatrixC volume = v.K.cast<cplx>() - (k * k) * v.M.cast<cplx>();
  // Compare on the free dofs.
  Eigen::MatrixXcd diff = Eigen::MatrixXcd(with.S);
  for (std::size_t i = 0; i < with.free_dofs.size(); ++i) {
    for (std::size_t j = 0; j < with.free_dofs.size(); ++j) {
      diff(i, j) -= volume.coeff(with.free_dofs[i], with.free_dofs[j]);
      if (std::abs(diff(i, j)) > 1e-12) {
        CHECK(iface.count(with.free_dofs[i]) == 1);
        CHECK(iface.count(with.free_dofs[j]) == 1);
      }
    }
  }
  CHECK(diff.norm() > 1e-3);
}

TEST_CASE("missing interface operator or Dirichlet data is reported") {
  const DomainLayout d = straight_guide_layout();
  auto mesh = shared_mesh(d.regions(), 0.25);
  const P3Space space(*mesh);
  JunctionProblem p;
  p.k = 1.0;
  p.q = constant_q;
  CHECK_THROWS_AS(assemble(p, space), ConfigError);
  p.dirichlet = [](const Point&) { return cplx(1.0, 0.0); };
  CHECK_THROWS_AS(assemble(p, space), ConfigError);
}

TEST_CASE("field_error across different meshes and domain mismatch") {
  auto m1 = shared_mesh({walled_square()}, 0.1);
  auto m2 = shared_mesh({walled_square()}, 0.13);
  const auto f = [](const Point& x) { return cplx(std::cos(x.x()), x.y() * x.y()); };
  auto interp = [&](std::shared_ptr<const Mesh> m) {
    const P3Space s(*m);
    Eigen::VectorXcd v(s.num_dofs());
    for (int d = 0; d < s.num_dofs(); ++d) v[d] = f(s.dof_position(d));
    return SolutionField(m, v);
  };
  const SolutionField u1 = interp(m1), u2 = interp(m2);
  CHECK(field_error(u1, u2) < 1e-6);
  CHECK(field_error(u1, u1) == 0.0);
  CHECK(field_error(interpolate(u2, m1), u1) < 1e-6);
  auto m3 = shared_mesh({rect(0, 0, 2, 1, std::vector<EdgeTag>(4, EdgeTag::Wall))}, 0.2);
  CHECK_THROWS_AS(field_error(u1, interp(m3)), DomainMismatchError);
  CHECK_THROWS_AS(u1.eval(Point(1.5, 0.5)), DomainMismatchError);
}

TEST_CASE("mesh and field export") {
  auto m = shared_mesh({walled_square()}, 0.5);
  const P3Space s(*m);
  const SolutionField u(m, Eigen::VectorXcd::Ones(s.num_dofs()));
  const auto dir = std::filesystem::temp_directory_path();
  write_mesh((dir / "gw_mesh.txt").string(), *m);
  write_field((dir / "gw_field.txt").string(), u);
  std::ifstream in((dir / "gw_field.txt").string());
  std::string line;
  int lines = 0;
  while (std::getline(in, line)) ++lines;
  CHECK(lines == s.num_dofs() + 1);
}
