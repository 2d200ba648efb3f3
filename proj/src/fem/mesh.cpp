#include "guidewave/fem/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <string>
#include <unordered_map>

#include "guidewave/core/errors.hpp"

namespace guidewave::fem {

double Mesh::triangle_area(int t) const {
  const auto& tri = triangles[t];
  const Point a = vertices[tri[1]] - vertices[tri[0]];
  const Point b = vertices[tri[2]] - vertices[tri[0]];
  return 0.5 * (a.x() * b.y() - a.y() * b.x());
}

double Mesh::area() const {
  double s = 0.0;
  for (std::size_t t = 0; t < triangles.size(); ++t) s += triangle_area(static_cast<int>(t));
  return s;
}

double Mesh::quality(int t) const {
  const auto& tri = triangles[t];
  const double a = (vertices[tri[1]] - vertices[tri[2]]).norm();
  const double b = (vertices[tri[2]] - vertices[tri[0]]).norm();
  const double c = (vertices[tri[0]] - vertices[tri[1]]).norm();
  const double area = std::abs(triangle_area(t));
  const double s = 0.5 * (a + b + c);
  return a * b * c * s / (4.0 * area * area);
}

double Mesh::max_quality() const {
  double q = 0.0;
  for (std::size_t t = 0; t < triangles.size(); ++t) q = std::max(q, quality(static_cast<int>(t)));
  return q;
}

Box Mesh::bounds() const {
  Box b{Point::Constant(std::numeric_limits<double>::infinity()),
        Point::Constant(-std::numeric_limits<double>::infinity())};
  for (const auto& v : vertices) {
    b.lo = b.lo.cwiseMin(v);
    b.hi = b.hi.cwiseMax(v);
  }
  return b;
}

std::vector<EdgeKey> Mesh::tagged_edges(EdgeTag tag) const {
  std::vector<EdgeKey> out;
  for (const auto& [key, t] : edge_tags) {
    if (t == tag) out.push_back(key);
  }
  return out;
}

namespace {

double orient(const Point& a, const Point& b, const Point& c) {
  return (b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x());
}

// Positive when d lies strictly inside the circumcircle of the counter-clockwise triangle abc.
double in_circle(const Point& a, const Point& b, const Point& c, const Point& d) {
  const long double adx = a.x() - d.x(), ady = a.y() - d.y();
  const long double bdx = b.x() - d.x(), bdy = b.y() - d.y();
  const long double cdx = c.x() - d.x(), cdy = c.y() - d.y();
  const long double ad = adx * adx + ady * ady, bd = bdx * bdx + bdy * bdy, cd = cdx * cdx + cdy * cdy;
  return static_cast<double>(adx * (bdy * cd - bd * cdy) - ady * (bdx * cd - bd * cdx) +
                             ad * (bdx * cdy - bdy * cdx));
}

// Incremental Bowyer-Watson Delaunay triangulation with a walking point location.
class Delaunay {
 public:
  explicit Delaunay(const std::vector<Point>& pts) : pts_(pts) {
    Point lo = pts_[0], hi = pts_[0];
    for (const auto& p : pts_) lo = lo.cwiseMin(p), hi = hi.cwiseMax(p);
    const Point c = 0.5 * (lo + hi);
    const double r = 50.0 * std::max((hi - lo).maxCoeff(), 1e-6);
    const int n = static_cast<int>(pts_.size());
    pts_.push_back(c + Point(-2.0 * r, -r));
    pts_.push_back(c + Point(2.0 * r, -r));
    pts_.push_back(c + Point(0.0, 2.0 * r));
    tris_.push_back({{n, n + 1, n + 2}, {{-1, -1, -1}}, true});
    for (int i = 0; i < n; ++i) insert(i);
  }

  // Triangles not touching the auxiliary super-triangle.
  std::vector<std::array<int, 3>> triangles() const {
    const int n = static_cast<int>(pts_.size()) - 3;
    std::vector<std::array<int, 3>> out;
    for (const auto& t : tris_) {
      if (t.alive && t.v[0] < n && t.v[1] < n && t.v[2] < n) out.push_back(t.v);
    }
    return out;
  }

 private:
  struct Tri {
    std::array<int, 3> v;
    std::array<int, 3> nbr;  // nbr[i] is across the edge opposite v[i]
    bool alive;
  };

  bool circle_contains(int t, const Point& p) const {
    const auto& v = tris_[t].v;
    return in_circle(pts_[v[0]], pts_[v[1]], pts_[v[2]], p) > 0.0;
  }

  int locate(const Point& p) {
    int t = last_;
    if (t < 0 || !tris_[t].alive) {
      t = static_cast<int>(tris_.size()) - 1;
      while (!tris_[t].alive) --t;
    }
    for (std::size_t steps = 0; steps < 4 * tris_.size() + 10; ++steps) {
      const auto& tri = tris_[t];
      bool moved = false;
      for (int k = 0; k < 3; ++k) {
        const int e = (k + rot_++) % 3;
        const Point& a = pts_[tri.v[(e + 1) % 3]];
        const Point& b = pts_[tri.v[(e + 2) % 3]];
        if (orient(a, b, p) < 0.0 && tri.nbr[e] >= 0) {
          t = tri.nbr[e];
          moved = true;
          break;
        }
      }
      if (!moved) return t;
    }
    throw MeshError("point location failed during triangulation");
  }

  void insert(int pi) {
    const Point& p = pts_[pi];
    const int start = locate(p);

    std::vector<int> cavity{start};
    std::set<int> in_cavity{start};
    for (std::size_t i = 0; i < cavity.size(); ++i) {
      for (int nb : tris_[cavity[i]].nbr) {
        if (nb >= 0 && !in_cavity.count(nb) && circle_contains(nb, p)) {
          in_cavity.insert(nb);
          cavity.push_back(nb);
        }
      }
    }

    // Boundary edges (a, b) of the cavity, counter-clockwise, with the triangle outside.
    struct BEdge {
      int a, b, outside, owner;
    };
    std::vector<BEdge> boundary;
    for (bool star = false; !star;) {
      boundary.clear();
      star = true;
      for (int t : cavity) {
        if (!in_cavity.count(t)) continue;
        for (int e = 0; e < 3; ++e) {
          const int nb = tris_[t].nbr[e];
          if (nb >= 0 && in_cavity.count(nb)) continue;
          boundary.push_back({tris_[t].v[(e + 1) % 3], tris_[t].v[(e + 2) % 3], nb, t});
        }
      }
      // Round-off can make the cavity non-star-shaped; shrink it until every boundary edge sees p.
      for (const auto& be : boundary) {
        if (orient(pts_[be.a], pts_[be.b], p) <= 0.0 && be.owner != start) {
          in_cavity.erase(be.owner);
          star = false;
          break;
        }
      }
    }

    for (int t : cavity) {
      if (in_cavity.count(t)) tris_[t].alive = false;
    }
    std::unordered_map<int, int> starting_at;  // boundary vertex a -> new triangle (a, b, p)
    std::vector<int> created;
    for (const auto& be : boundary) {
      const int id = static_cast<int>(tris_.size());
      tris_.push_back({{be.a, be.b, pi}, {-1, -1, be.outside}, true});
      if (be.outside >= 0) {
        auto& o = tris_[be.outside];
        for (int e = 0; e < 3; ++e) {
          const int oa = o.v[(e + 1) % 3], ob = o.v[(e + 2) % 3];
          if (oa == be.b && ob == be.a) o.nbr[e] = id;
        }
      }
      starting_at[be.a] = id;
      created.push_back(id);
    }
    for (int id : created) {
      auto& t = tris_[id];
      // Edge opposite v[0]=a is (b, p): shared with the new triangle starting at b.
      t.nbr[0] = starting_at.at(t.v[1]);
      // Edge opposite v[1]=b is (p, a): shared with the new triangle ending at a.
      for (int other : created) {
        if (tris_[other].v[1] == t.v[0]) t.nbr[1] = other;
      }
    }
    last_ = created.back();
  }

  std::vector<Point> pts_;
  std::vector<Tri> tris_;
  int last_ = -1;
  unsigned rot_ = 0;
};

struct PointKey {
  long long x, y;
  bool operator==(const PointKey&) const = default;
};
struct PointKeyHash {
  std::size_t operator()(const PointKey& k) const {
    return std::hash<long long>()(k.x) ^ (std::hash<long long>()(k.y) * 1000003ull);
  }
};

PointKey key_of(const Point& p) {
  return {std::llround(p.x() * 1e10), std::llround(p.y() * 1e10)};
}

double segment_distance(const Point& p, const Point& a, const Point& b) {
  const Point ab = b - a;
  const double t = std::clamp((p - a).dot(ab) / ab.squaredNorm(), 0.0, 1.0);
  return (p - (a + t * ab)).norm();
}

// Polygon edges with the vertices of all other regions that lie on them inserted.
std::vector<std::pair<std::vector<Point>, EdgeTag>> conforming_edges(const PolygonRegion& r,
                                                                     const std::vector<Point>& all_vertices) {
  std::vector<std::pair<std::vector<Point>, EdgeTag>> out;
  const std::size_t n = r.vertices.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point a = r.vertices[i], b = r.vertices[(i + 1) % n];
    const Point ab = b - a;
    const double len = ab.norm();
    std::vector<std::pair<double, Point>> on_edge;
    for (const auto& v : all_vertices) {
      const double t = (v - a).dot(ab) / (len * len);
      if (t <= 1e-12 || t >= 1.0 - 1e-12) continue;
      if (std::abs(orient(a, b, v)) <= 1e-12 * len * (1.0 + len)) on_edge.emplace_back(t, v);
    }
    std::sort(on_edge.begin(), on_edge.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
    std::vector<Point> chain{a};
    for (const auto& [t, v] : on_edge) {
      if ((v - chain.back()).norm() > 1e-12 * (1.0 + len)) chain.push_back(v);
    }
    chain.push_back(b);
    out.emplace_back(std::move(chain), r.edge_tags[i]);
  }
  return out;
}

// Points on segment [a, b] at spacing <= h, generated from the lexicographically smaller end so
// that two regions sharing the segment produce bit-identical coordinates.
std::vector<Point> sample_segment(Point a, Point b, double h) {
  const bool swap = (b.x() < a.x()) || (b.x() == a.x() && b.y() < a.y());
  if (swap) std::swap(a, b);
  const int n = std::max(1, static_cast<int>(std::ceil((b - a).norm() / h - 1e-9)));
  std::vector<Point> pts;
  for (int i = 0; i <= n; ++i) {
    pts.push_back(i == 0 ? a : i == n ? b : Point(a + (b - a) * (static_cast<double>(i) / n)));
  }
  if (swap) std::reverse(pts.begin(), pts.end());
  return pts;
}

struct RegionMesh {
  std::vector<Point> points;
  std::vector<std::array<int, 3>> triangles;
  std::vector<std::pair<std::pair<int, int>, EdgeTag>> segments;  // local indices
};

RegionMesh mesh_region(const PolygonRegion& region, const std::vector<Point>& all_vertices, double h) {
  RegionMesh rm;
  std::unordered_map<PointKey, int, PointKeyHash> index;
  auto add_point = [&](const Point& p) {
    const auto [it, inserted] = index.emplace(key_of(p), static_cast<int>(rm.points.size()));
    if (inserted) rm.points.push_back(p);
    return it->second;
  };

  std::vector<std::pair<Point, Point>> segs;
  for (const auto& [chain, tag] : conforming_edges(region, all_vertices)) {
    for (std::size_t c = 0; c + 1 < chain.size(); ++c) {
      const auto pts = sample_segment(chain[c], chain[c + 1], h);
      for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const int a = add_point(pts[i]), b = add_point(pts[i + 1]);
        rm.segments.push_back({{a, b}, tag});
        segs.emplace_back(pts[i], pts[i + 1]);
      }
    }
  }

  // Interior points from the global lattice, kept clear of the boundary and outside every
  // boundary segment's diametral circle so that all segments are Delaunay edges.
  Point lo = region.vertices[0], hi = region.vertices[0];
  for (const auto& v : region.vertices) lo = lo.cwiseMin(v), hi = hi.cwiseMax(v);
  const double dy = h * std::sqrt(3.0) / 2.0;
  const long long r0 = static_cast<long long>(std::floor(lo.y() / dy)) - 1;
  const long long r1 = static_cast<long long>(std::ceil(hi.y() / dy)) + 1;
  // Bucket segments for fast distance queries.
  const double cell = 2.0 * h;
  std::unordered_map<PointKey, std::vector<int>, PointKeyHash> buckets;
  auto bucket_of = [cell](const Point& p) {
    return PointKey{static_cast<long long>(std::floor(p.x() / cell)), static_cast<long long>(std::floor(p.y() / cell))};
  };
  for (std::size_t s = 0; s < segs.size(); ++s) {
    const Point mid = 0.5 * (segs[s].first + segs[s].second);
    buckets[bucket_of(mid)].push_back(static_cast<int>(s));
  }
  for (long long r = r0; r <= r1; ++r) {
    const double y = r * dy;
    const double shift = (r % 2 != 0) ? 0.5 * h : 0.0;
    const long long c0 = static_cast<long long>(std::floor((lo.x() - shift) / h)) - 1;
    const long long c1 = static_cast<long long>(std::ceil((hi.x() - shift) / h)) + 1;
    for (long long c = c0; c <= c1; ++c) {
      const Point p(c * h + shift, y);
      if (!region.contains(p)) continue;
      bool keep = true;
      const PointKey b = bucket_of(p);
      for (long long bx = b.x - 1; bx <= b.x + 1 && keep; ++bx) {
        for (long long by = b.y - 1; by <= b.y + 1 && keep; ++by) {
          const auto it = buckets.find({bx, by});
          if (it == buckets.end()) continue;
          for (int s : it->second) {
            const auto& [a, e] = segs[s];
            const Point mid = 0.5 * (a + e);
            if (segment_distance(p, a, e) < 0.45 * h || (p - mid).norm() <= 0.5 * (e - a).norm() * 1.0001) {
              keep = false;
              break;
            }
          }
        }
      }
      if (keep) add_point(p);
    }
  }

  Delaunay dt(rm.points);
  for (const auto& t : dt.triangles()) {
    const Point centroid = (rm.points[t[0]] + rm.points[t[1]] + rm.points[t[2]]) / 3.0;
    if (region.contains(centroid)) rm.triangles.push_back(t);
  }

  // Every boundary segment must be an edge of the triangulation.
  std::set<EdgeKey> edges;
  for (const auto& t : rm.triangles) {
    for (int e = 0; e < 3; ++e) edges.insert(edge_key(t[e], t[(e + 1) % 3]));
  }
  for (const auto& [seg, tag] : rm.segments) {
    if (!edges.count(edge_key(seg.first, seg.second))) {
      throw MeshError("boundary segment near (" + std::to_string(rm.points[seg.first].x()) + ", " +
                      std::to_string(rm.points[seg.first].y()) +
                      ") was not recovered; the polygon has an acute corner or a part thinner than h");
    }
  }
  double area = 0.0;
  for (const auto& t : rm.triangles) area += 0.5 * orient(rm.points[t[0]], rm.points[t[1]], rm.points[t[2]]);
  if (std::abs(area - std::abs(region.signed_area())) > 1e-9 * std::abs(region.signed_area())) {
    throw MeshError("triangulated area does not match the polygon area");
  }
  return rm;
}

}  // namespace

Mesh generate_mesh(const std::vector<PolygonRegion>& regions, double h) {
  if (!(h > 0.0)) throw MeshError("mesh size h must be positive");
  if (regions.empty()) throw MeshError("no regions to mesh");
  std::vector<Point> all_vertices;
  for (const auto& r : regions) {
    try {
      r.validate();
    } catch (const ConfigError& e) {
      throw MeshError(e.what());
    }
    all_vertices.insert(all_vertices.end(), r.vertices.begin(), r.vertices.end());
  }

  Mesh mesh;
  mesh.h = h;
  std::unordered_map<PointKey, int, PointKeyHash> global;
  for (std::size_t ri = 0; ri < regions.size(); ++ri) {
    const RegionMesh rm = mesh_region(regions[ri], all_vertices, h);
    std::vector<int> to_global(rm.points.size());
    for (std::size_t i = 0; i < rm.points.size(); ++i) {
      const auto [it, inserted] = global.emplace(key_of(rm.points[i]), static_cast<int>(mesh.vertices.size()));
      if (inserted) mesh.vertices.push_back(rm.points[i]);
      to_global[i] = it->second;
    }
    mesh.region_kinds.push_back(regions[ri].kind);
    for (const auto& t : rm.triangles) {
      mesh.triangles.push_back({to_global[t[0]], to_global[t[1]], to_global[t[2]]});
      mesh.triangle_region.push_back(static_cast<int>(ri));
    }
    for (const auto& [seg, tag] : rm.segments) {
      if (tag == EdgeTag::Internal) continue;
      const EdgeKey key = edge_key(to_global[seg.first], to_global[seg.second]);
      const auto [it, inserted] = mesh.edge_tags.emplace(key, tag);
      if (!inserted && it->second != tag) {
        throw MeshError("edge shared by two regions carries conflicting tags");
      }
    }
  }

  // Conformity: every edge is shared by at most two triangles with opposite orientations.
  std::map<std::pair<int, int>, int> directed;
  for (const auto& t : mesh.triangles) {
    for (int e = 0; e < 3; ++e) {
      if (++directed[{t[e], t[(e + 1) % 3]}] > 1) throw MeshError("regions overlap: non-conforming mesh");
    }
  }
  return mesh;
}

Mesh generate_mesh(const PolygonRegion& domain, double h) {
  return generate_mesh(std::vector<PolygonRegion>{domain}, h);
}

}  // namespace guidewave::fem
