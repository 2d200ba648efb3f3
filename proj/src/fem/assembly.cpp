#include "guidewave/fem/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/UmfPackSupport>

#include "guidewave/core/errors.hpp"

namespace guidewave::fem {

namespace {

constexpr int kVolumeRule = 6;

struct ElementGeometry {
  Point p0, p1, p2;
  double area;
  Eigen::Matrix<double, 3, 2> grad;
};

ElementGeometry element_geometry(const Mesh& mesh, int t) {
  const auto& tri = mesh.triangles[t];
  ElementGeometry g{mesh.vertices[tri[0]], mesh.vertices[tri[1]], mesh.vertices[tri[2]], mesh.triangle_area(t), {}};
  g.grad = bary_gradients(g.p0, g.p1, g.p2);
  return g;
}

}  // namespace

VolumeMatrices assemble_volume(const P3Space& space, const std::function<double(const Point&, RegionKind)>& q) {
  const Mesh& mesh = space.mesh();
  const TriangleRule rule = triangle_rule(kVolumeRule);
  std::vector<std::array<double, kP3Nodes>> shapes;
  std::vector<std::array<Eigen::Vector3d, kP3Nodes>> dshapes;
  for (const auto& l : rule.points) {
    shapes.push_back(p3_shape(l));
    dshapes.push_back(p3_shape_dbary(l));
  }

  std::vector<Eigen::Triplet<double>> kt, mt;
  const std::size_t nt = mesh.num_triangles();
  kt.reserve(nt * kP3Nodes * kP3Nodes);
  mt.reserve(nt * kP3Nodes * kP3Nodes);
  for (std::size_t t = 0; t < nt; ++t) {
    const ElementGeometry g = element_geometry(mesh, static_cast<int>(t));
    const RegionKind kind = mesh.region_kinds[mesh.triangle_region[t]];
    Eigen::Matrix<double, kP3Nodes, kP3Nodes> ke = Eigen::Matrix<double, kP3Nodes, kP3Nodes>::Zero();
    Eigen::Matrix<double, kP3Nodes, kP3Nodes> me = ke;
    for (std::size_t k = 0; k < rule.points.size(); ++k) {
      const Bary& l = rule.points[k];
      const Point x = l[0] * g.p0 + l[1] * g.p1 + l[2] * g.p2;
      const double w = rule.weights[k] * g.area;
      const double qx = q(x, kind);
      Eigen::Matrix<double, kP3Nodes, 2> grads;
      Eigen::Matrix<double, kP3Nodes, 1> n;
      for (int a = 0; a < kP3Nodes; ++a) {
        grads.row(a) = dshapes[k][a].transpose() * g.grad;
        n[a] = shapes[k][a];
      }
      ke.noalias() += w * grads * grads.transpose();
      me.noalias() += (w * qx) * n * n.transpose();
    }
    const auto& dofs = space.element_dofs(static_cast<int>(t));
    for (int a = 0; a < kP3Nodes; ++a) {
      for (int b = 0; b < kP3Nodes; ++b) {
        kt.emplace_back(dofs[a], dofs[b], ke(a, b));
        mt.emplace_back(dofs[a], dofs[b], me(a, b));
      }
    }
  }
  VolumeMatrices v;
  v.K.resize(space.num_dofs(), space.num_dofs());
  v.M.resize(space.num_dofs(), space.num_dofs());
  v.K.setFromTriplets(kt.begin(), kt.end());
  v.M.setFromTriplets(mt.begin(), mt.end());
  return v;
}

InterfaceTraces interface_traces(const P3Space& space, const dtn::DtnOperator& op) {
  const Mesh& mesh = space.mesh();
  const auto& seg = op.segment();
  const EdgeTag tag = seg.side == Side::Plus ? EdgeTag::InterfacePlus : EdgeTag::InterfaceMinus;

  struct Piece {
    double ya, yb;
    std::array<int, 4> dofs;
  };
  std::vector<Piece> pieces;
  for (const auto& [a, b] : mesh.tagged_edges(tag)) {
    const Point pa = mesh.vertices[a], pb = mesh.vertices[b];
    const double tolx = 1e-9 * (1.0 + std::abs(seg.x1));
    if (std::abs(pa.x() - seg.x1) > tolx || std::abs(pb.x() - seg.x1) > tolx) {
      throw DomainMismatchError("interface edges do not lie on the DtN interface line");
    }
    const bool up = pa.y() < pb.y();
    pieces.push_back({up ? pa.y() : pb.y(), up ? pb.y() : pa.y(), up ? space.edge_dofs(a, b) : space.edge_dofs(b, a)});
  }
  std::sort(pieces.begin(), pieces.end(), [](const Piece& x, const Piece& y) { return x.ya < y.ya; });
  // The quadrature must be composite over exactly these mesh edges.
  for (const auto& p : pieces) {
    for (double y : {p.ya, p.yb}) {
      const bool found = std::any_of(seg.breakpoints.begin(), seg.breakpoints.end(),
                                     [y](double b) { return std::abs(b - y) <= 1e-10; });
      if (!found) throw DomainMismatchError("DtN quadrature breakpoints do not match the interface mesh");
    }
  }

  InterfaceTraces tr;
  std::map<int, int> column;
  for (const auto& p : pieces) {
    for (int d : p.dofs) {
      if (column.emplace(d, static_cast<int>(tr.dofs.size())).second) tr.dofs.push_back(d);
    }
  }
  const auto& quad = op.quadrature();
  tr.values = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(quad.x2.size()), static_cast<Eigen::Index>(tr.dofs.size()));
  std::size_t piece = 0;
  for (std::size_t n = 0; n < quad.x2.size(); ++n) {
    const double y = quad.x2[n];
    while (piece + 1 < pieces.size() && y > pieces[piece].yb) ++piece;
    const Piece& p = pieces[piece];
    if (y < p.ya - 1e-12 || y > p.yb + 1e-12) {
      throw DomainMismatchError("interface quadrature node outside the meshed interface");
    }
    const auto w = cubic_lagrange_1d((y - p.ya) / (p.yb - p.ya));
    for (int i = 0; i < 4; ++i) tr.values(static_cast<Eigen::Index>(n), column.at(p.dofs[i])) += w[i];
  }
  return tr;
}

Eigen::VectorXcd AssembledSystem::expand(const Eigen::VectorXcd& reduced) const {
  Eigen::VectorXcd u = constrained;
  for (std::size_t i = 0; i < free_dofs.size(); ++i) u[free_dofs[i]] = reduced[static_cast<Eigen::Index>(i)];
  return u;
}

AssembledSystem assemble(const JunctionProblem& problem, const P3Space& space) {
  const Mesh& mesh = space.mesh();
  const int n = space.num_dofs();
  if (!problem.q) throw ConfigError("problem has no refractive index");

  // Constraints: Dirichlet data by nodal interpolation, then walls (which take priority).
  std::vector<char> fixed(n, 0);
  Eigen::VectorXcd uc = Eigen::VectorXcd::Zero(n);
  for (const auto& [a, b] : mesh.tagged_edges(EdgeTag::DirichletData)) {
    if (!problem.dirichlet) throw ConfigError("mesh has Dirichlet edges but no Dirichlet data is given");
    for (int d : space.edge_dofs(a, b)) {
      fixed[d] = 1;
      uc[d] = problem.dirichlet(space.dof_position(d));
    }
  }
  for (const auto& [a, b] : mesh.tagged_edges(EdgeTag::Wall)) {
    for (int d : space.edge_dofs(a, b)) {
      fixed[d] = 1;
      uc[d] = 0.0;
    }
  }
  for (Side side : {Side::Plus, Side::Minus}) {
    const EdgeTag tag = side == Side::Plus ? EdgeTag::InterfacePlus : EdgeTag::InterfaceMinus;
    if (!mesh.tagged_edges(tag).empty() && !problem.dtn(side)) {
      throw ConfigError("mesh has " + to_string(tag) + " edges but no DtN operator for side " + to_string(side));
    }
  }

  const VolumeMatrices vm = assemble_volume(space, problem.q);
  const cplx k2(problem.k * problem.k, problem.absorption);
  SparseMatrixC S = vm.K.cast<cplx>() - k2 * vm.M.cast<cplx>();

  for (Side side : {Side::Plus, Side::Minus}) {
    const auto& op = problem.dtn(side);
    if (!op) continue;
    const InterfaceTraces tr = interface_traces(space, *op);
    const Eigen::MatrixXcd D = op->interface_block(tr.values);
    std::vector<Eigen::Triplet<cplx>> dt;
    for (std::size_t a = 0; a < tr.dofs.size(); ++a) {
      for (std::size_t b = 0; b < tr.dofs.size(); ++b) {
        dt.emplace_back(tr.dofs[a], tr.dofs[b], -D(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)));
      }
    }
    SparseMatrixC Dm(n, n);
    Dm.setFromTriplets(dt.begin(), dt.end());
    S += Dm;
  }

  // Load vector -int f phi.
  Eigen::VectorXcd F = Eigen::VectorXcd::Zero(n);
  if (problem.f) {
    const TriangleRule rule = triangle_rule(kVolumeRule);
    for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
      const ElementGeometry g = element_geometry(mesh, static_cast<int>(t));
      const auto& dofs = space.element_dofs(static_cast<int>(t));
      for (std::size_t k = 0; k < rule.points.size(); ++k) {
        const Bary& l = rule.points[k];
        const double fx = problem.f(l[0] * g.p0 + l[1] * g.p1 + l[2] * g.p2);
        if (fx == 0.0) continue;
        const auto phi = p3_shape(l);
        for (int a = 0; a < kP3Nodes; ++a) F[dofs[a]] -= rule.weights[k] * g.area * fx * phi[a];
      }
    }
  }

  AssembledSystem sys;
  sys.num_dofs = n;
  sys.constrained = uc;
  std::vector<int> reduced(n, -1);
  for (int d = 0; d < n; ++d) {
    if (!fixed[d]) {
      reduced[d] = static_cast<int>(sys.free_dofs.size());
      sys.free_dofs.push_back(d);
    }
  }
  const Eigen::VectorXcd lift = S * uc;
  std::vector<Eigen::Triplet<cplx>> st;
  st.reserve(static_cast<std::size_t>(S.nonZeros()));
  for (int c = 0; c < S.outerSize(); ++c) {
    for (SparseMatrixC::InnerIterator it(S, c); it; ++it) {
      const int r = reduced[it.row()], cc = reduced[it.col()];
      if (r >= 0 && cc >= 0) st.emplace_back(r, cc, it.value());
    }
  }
  const int nf = static_cast<int>(sys.free_dofs.size());
  sys.S.resize(nf, nf);
  sys.S.setFromTriplets(st.begin(), st.end());
  sys.F.resize(nf);
  for (int i = 0; i < nf; ++i) sys.F[i] = F[sys.free_dofs[i]] - lift[sys.free_dofs[i]];
  return sys;
}

Eigen::VectorXcd solve_sparse(const SparseMatrixC& S, const Eigen::VectorXcd& F, double* residual) {
  if (S.rows() != S.cols() || S.rows() != F.size()) throw SingularSystemError("system dimensions do not match");
  if (S.rows() == 0) {
    if (residual) *residual = 0.0;
    return Eigen::VectorXcd();
  }
  SparseMatrixC A = S;
  A.makeCompressed();
  Eigen::UmfPackLU<SparseMatrixC> lu;
  lu.compute(A);
  if (lu.info() != Eigen::Success) {
    throw SingularSystemError("sparse LU factorization failed; the wavenumber may be at a resonance of the truncated problem");
  }
  Eigen::VectorXcd u = lu.solve(F);
  const double fnorm = std::max(F.norm(), 1e-300);
  double rel = (F - A * u).norm() / fnorm;
  for (int step = 0; step < 3 && rel > 1e-12; ++step) {
    const Eigen::VectorXcd r = F - A * u;
    u += lu.solve(r);
    rel = (F - A * u).norm() / fnorm;
  }
  if (!std::isfinite(rel) || rel > 1e-10) {
    throw SingularSystemError("relative residual " + std::to_string(rel) +
                              " exceeds 1e-10; the system is numerically singular");
  }
  if (residual) *residual = rel;
  return u;
}

}  // namespace guidewave::fem
