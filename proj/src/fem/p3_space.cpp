#include "guidewave/fem/p3_space.hpp"

#include "guidewave/core/errors.hpp"
#include "guidewave/core/quadrature.hpp"

namespace guidewave::fem {

namespace {

// Local edges as (first vertex, second vertex, first local node); nodes run first -> second.
constexpr std::array<std::array<int, 3>, 3> kLocalEdges{{{0, 1, 3}, {1, 2, 5}, {2, 0, 7}}};

}  // namespace

std::array<double, kP3Nodes> p3_shape(const Bary& l) {
  std::array<double, kP3Nodes> n{};
  for (int i = 0; i < 3; ++i) n[i] = 0.5 * l[i] * (3.0 * l[i] - 1.0) * (3.0 * l[i] - 2.0);
  for (const auto& [a, b, s] : kLocalEdges) {
    n[s] = 4.5 * l[a] * l[b] * (3.0 * l[a] - 1.0);
    n[s + 1] = 4.5 * l[a] * l[b] * (3.0 * l[b] - 1.0);
  }
  n[9] = 27.0 * l[0] * l[1] * l[2];
  return n;
}

std::array<Eigen::Vector3d, kP3Nodes> p3_shape_dbary(const Bary& l) {
  std::array<Eigen::Vector3d, kP3Nodes> d;
  for (auto& v : d) v.setZero();
  for (int i = 0; i < 3; ++i) d[i][i] = 0.5 * (27.0 * l[i] * l[i] - 18.0 * l[i] + 2.0);
  for (const auto& [a, b, s] : kLocalEdges) {
    // 4.5 la lb (3 la - 1)
    d[s][a] = 4.5 * l[b] * (6.0 * l[a] - 1.0);
    d[s][b] = 4.5 * l[a] * (3.0 * l[a] - 1.0);
    // 4.5 la lb (3 lb - 1)
    d[s + 1][a] = 4.5 * l[b] * (3.0 * l[b] - 1.0);
    d[s + 1][b] = 4.5 * l[a] * (6.0 * l[b] - 1.0);
  }
  d[9] = 27.0 * Eigen::Vector3d(l[1] * l[2], l[0] * l[2], l[0] * l[1]);
  return d;
}

const std::array<Bary, kP3Nodes>& p3_nodes() {
  static const std::array<Bary, kP3Nodes> nodes = [] {
    std::array<Bary, kP3Nodes> n;
    n[0] = Bary(1, 0, 0);
    n[1] = Bary(0, 1, 0);
    n[2] = Bary(0, 0, 1);
    for (const auto& [a, b, s] : kLocalEdges) {
      n[s] = (2.0 * n[a] + n[b]) / 3.0;
      n[s + 1] = (n[a] + 2.0 * n[b]) / 3.0;
    }
    n[9] = Bary(1, 1, 1) / 3.0;
    return n;
  }();
  return nodes;
}

TriangleRule triangle_rule(int n) {
  const GaussRule g = gauss_legendre(n);
  TriangleRule r;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double u = g.nodes[i];
      const double v = g.nodes[j] * (1.0 - u);
      r.points.emplace_back(1.0 - u - v, u, v);
      r.weights.push_back(2.0 * g.weights[i] * g.weights[j] * (1.0 - u));
    }
  }
  return r;
}

Eigen::Matrix<double, 3, 2> bary_gradients(const Point& p0, const Point& p1, const Point& p2) {
  const double det = (p1.x() - p0.x()) * (p2.y() - p0.y()) - (p1.y() - p0.y()) * (p2.x() - p0.x());
  Eigen::Matrix<double, 3, 2> g;
  g << p1.y() - p2.y(), p2.x() - p1.x(), p2.y() - p0.y(), p0.x() - p2.x(), p0.y() - p1.y(), p1.x() - p0.x();
  return g / det;
}

Bary barycentric(const Point& p0, const Point& p1, const Point& p2, const Point& x) {
  const Eigen::Matrix<double, 3, 2> g = bary_gradients(p0, p1, p2);
  const double l1 = g.row(1).dot(x - p0);
  const double l2 = g.row(2).dot(x - p0);
  return Bary(1.0 - l1 - l2, l1, l2);
}

P3Space::P3Space(const Mesh& mesh) : mesh_(&mesh) {
  const int nv = static_cast<int>(mesh.vertices.size());
  for (const auto& t : mesh.triangles) {
    for (int e = 0; e < 3; ++e) edge_index_.emplace(edge_key(t[e], t[(e + 1) % 3]), 0);
  }
  int next = 0;
  for (auto& [key, id] : edge_index_) id = next++;
  const int ne = next;
  const int nt = static_cast<int>(mesh.triangles.size());
  num_dofs_ = nv + 2 * ne + nt;

  positions_.resize(num_dofs_);
  for (int v = 0; v < nv; ++v) positions_[v] = mesh.vertices[v];
  for (const auto& [key, id] : edge_index_) {
    const Point a = mesh.vertices[key.first], b = mesh.vertices[key.second];
    positions_[nv + 2 * id] = (2.0 * a + b) / 3.0;
    positions_[nv + 2 * id + 1] = (a + 2.0 * b) / 3.0;
  }
  element_dofs_.resize(nt);
  for (int t = 0; t < nt; ++t) {
    const auto& tri = mesh.triangles[t];
    auto& d = element_dofs_[t];
    for (int i = 0; i < 3; ++i) d[i] = tri[i];
    for (const auto& [a, b, s] : kLocalEdges) {
      const int va = tri[a], vb = tri[b];
      const int id = edge_index_.at(edge_key(va, vb));
      const int first = nv + 2 * id;
      d[s] = va < vb ? first : first + 1;
      d[s + 1] = va < vb ? first + 1 : first;
    }
    d[9] = nv + 2 * ne + t;
    positions_[d[9]] = (mesh.vertices[tri[0]] + mesh.vertices[tri[1]] + mesh.vertices[tri[2]]) / 3.0;
  }
}

std::array<int, 4> P3Space::edge_dofs(int a, int b) const {
  const auto it = edge_index_.find(edge_key(a, b));
  if (it == edge_index_.end()) throw MeshError("edge is not part of the mesh");
  const int nv = static_cast<int>(mesh_->vertices.size());
  const int first = nv + 2 * it->second;
  return a < b ? std::array<int, 4>{a, first, first + 1, b} : std::array<int, 4>{a, first + 1, first, b};
}

std::array<double, 4> cubic_lagrange_1d(double s) {
  const double a = 3.0 * s;
  return {-(a - 1.0) * (a - 2.0) * (a - 3.0) / 6.0, 0.5 * a * (a - 2.0) * (a - 3.0), -0.5 * a * (a - 1.0) * (a - 3.0),
          a * (a - 1.0) * (a - 2.0) / 6.0};
}

}  // namespace guidewave::fem
