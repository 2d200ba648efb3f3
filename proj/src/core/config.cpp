#include "guidewave/core/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "guidewave/core/errors.hpp"

namespace guidewave {

using nlohmann::json;

std::string to_string(EdgeTag tag) {
  switch (tag) {
    case EdgeTag::Internal: return "internal";
    case EdgeTag::Wall: return "wall";
    case EdgeTag::InterfacePlus: return "interface_plus";
    case EdgeTag::InterfaceMinus: return "interface_minus";
    case EdgeTag::DirichletData: return "dirichlet";
  }
  return "internal";
}

EdgeTag edge_tag_from_string(const std::string& name) {
  if (name == "internal") return EdgeTag::Internal;
  if (name == "wall") return EdgeTag::Wall;
  if (name == "interface_plus") return EdgeTag::InterfacePlus;
  if (name == "interface_minus") return EdgeTag::InterfaceMinus;
  if (name == "dirichlet") return EdgeTag::DirichletData;
  throw ConfigError("unknown edge tag '" + name + "'");
}

namespace {

double cross(const Point& a, const Point& b) { return a.x() * b.y() - a.y() * b.x(); }

// Proper or touching intersection of closed segments ab and cd.
bool segments_intersect(const Point& a, const Point& b, const Point& c, const Point& d) {
  const double d1 = cross(b - a, c - a), d2 = cross(b - a, d - a);
  const double d3 = cross(d - c, a - c), d4 = cross(d - c, b - c);
  const double eps = 1e-14 * (1.0 + (b - a).squaredNorm() + (d - c).squaredNorm());
  if (((d1 > eps && d2 < -eps) || (d1 < -eps && d2 > eps)) &&
      ((d3 > eps && d4 < -eps) || (d3 < -eps && d4 > eps))) {
    return true;
  }
  auto on_segment = [eps](const Point& p, const Point& q, const Point& r, double o) {
    return std::abs(o) <= eps && r.x() >= std::min(p.x(), q.x()) - 1e-14 &&
           r.x() <= std::max(p.x(), q.x()) + 1e-14 && r.y() >= std::min(p.y(), q.y()) - 1e-14 &&
           r.y() <= std::max(p.y(), q.y()) + 1e-14;
  };
  return on_segment(a, b, c, d1) || on_segment(a, b, d, d2) || on_segment(c, d, a, d3) ||
         on_segment(c, d, b, d4);
}

}  // namespace

double PolygonRegion::signed_area() const {
  double area = 0.0;
  const std::size_t n = vertices.size();
  for (std::size_t i = 0; i < n; ++i) area += cross(vertices[i], vertices[(i + 1) % n]);
  return 0.5 * area;
}

void PolygonRegion::validate() const {
  const std::size_t n = vertices.size();
  if (n < 3) throw ConfigError("polygon needs at least 3 vertices");
  if (edge_tags.size() != n) {
    throw ConfigError("polygon has " + std::to_string(n) + " vertices but " +
                      std::to_string(edge_tags.size()) + " edge tags");
  }
  double scale = 0.0;
  for (const auto& v : vertices) scale = std::max(scale, v.norm());
  for (std::size_t i = 0; i < n; ++i) {
    if ((vertices[(i + 1) % n] - vertices[i]).norm() <= 1e-12 * (1.0 + scale)) {
      throw ConfigError("degenerate polygon: edge " + std::to_string(i) + " has zero length");
    }
  }
  if (std::abs(signed_area()) <= 1e-12 * (1.0 + scale * scale)) {
    throw ConfigError("degenerate polygon: zero area");
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (j == i + 1 || (i == 0 && j == n - 1)) continue;
      if (segments_intersect(vertices[i], vertices[(i + 1) % n], vertices[j], vertices[(j + 1) % n])) {
        throw ConfigError("degenerate polygon: edges " + std::to_string(i) + " and " +
                          std::to_string(j) + " intersect");
      }
    }
  }
}

bool PolygonRegion::contains(const Point& x) const {
  bool inside = false;
  const std::size_t n = vertices.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Point& a = vertices[i];
    const Point& b = vertices[j];
    if ((a.y() > x.y()) != (b.y() > x.y())) {
      const double xc = a.x() + (x.y() - a.y()) * (b.x() - a.x()) / (b.y() - a.y());
      if (x.x() < xc) inside = !inside;
    }
  }
  return inside;
}

RefractiveIndex GuideConfig::index() const {
  return RefractiveIndex(cell, table, Point(anchor, y0));
}

void ProblemConfig::validate() const {
  if (!(k > 0.0) || !std::isfinite(k)) throw ConfigError("wavenumber must be positive");
  if (N < 1) throw ConfigError("truncation.N must be >= 1");
  if (M < 1) throw ConfigError("truncation.M must be >= 1");
  if (!(h > 0.0)) throw ConfigError("mesh.h must be positive");
  if (guide_cells < 1) throw ConfigError("domain.guide_cells must be >= 1");
  if (interface_quadrature < 1) throw ConfigError("interface quadrature order must be >= 1");
  if (lap.buffer_cells < 1) throw ConfigError("lap.buffer_cells must be >= 1");
  tol.validate();
  if (junction.empty()) throw ConfigError("junction needs at least one polygon region");
  for (const auto& r : junction) r.validate();

  // Each guide must attach to junction edges covering its whole cross-section.
  for (const auto* g : {&left, &right}) {
    if (!*g) continue;
    const GuideConfig& guide = **g;
    guide.cell.validate();
    double covered = 0.0;
    for (const auto& r : junction) {
      const std::size_t n = r.vertices.size();
      for (std::size_t i = 0; i < n; ++i) {
        const Point& a = r.vertices[i];
        const Point& b = r.vertices[(i + 1) % n];
        const double tol_x = 1e-12 * (1.0 + std::abs(guide.anchor));
        if (std::abs(a.x() - guide.anchor) > tol_x || std::abs(b.x() - guide.anchor) > tol_x) continue;
        const double lo = std::max(std::min(a.y(), b.y()), guide.y0);
        const double hi = std::min(std::max(a.y(), b.y()), guide.y0 + guide.cell.H);
        if (hi > lo) {
          if (r.edge_tags[i] != EdgeTag::Internal) {
            throw ConfigError("junction edge on the " + to_string(guide.side) +
                              " guide attachment must be tagged internal");
          }
          covered += hi - lo;
        }
      }
    }
    if (std::abs(covered - guide.cell.H) > 1e-9 * guide.cell.H) {
      throw ConfigError("junction does not cover the " + to_string(guide.side) +
                        " guide cross-section at x1=" + std::to_string(guide.anchor));
    }
  }

  // Volume source must be compactly supported inside the junction.
  if (source.bump) {
    source.bump->validate();
    for (int s = 0; s < 64; ++s) {
      const double t = 2.0 * kPi * s / 64.0;
      const Point p = source.bump->center + source.bump->outer * Point(std::cos(t), std::sin(t));
      bool inside = false;
      for (const auto& r : junction) inside = inside || r.contains(p);
      if (!inside) throw ConfigError("source support is not strictly inside the junction");
    }
  }
}

namespace {

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  return j.contains(key) ? j.at(key).get<T>() : fallback;
}

Point parse_point(const json& j) {
  if (!j.is_array() || j.size() != 2) throw ConfigError("expected a point [x1, x2]");
  return {j[0].get<double>(), j[1].get<double>()};
}

CellSpec parse_cell(const json& j) {
  CellSpec cell{get_or(j, "period", 1.0), get_or(j, "height", 1.0)};
  cell.validate();
  return cell;
}

std::vector<FourierCoefficient> parse_table(const json& j) {
  std::vector<FourierCoefficient> table;
  for (const auto& row : j) {
    if (!row.is_array() || row.size() != 4) throw ConfigError("qhat rows must be [j, l, re, im]");
    table.push_back({row[0].get<int>(), row[1].get<int>(),
                     cplx(row[2].get<double>(), row[3].get<double>())});
  }
  return table;
}

RadialBump parse_bump(const json& j) {
  if (get_or<std::string>(j, "type", "bump") != "bump") {
    throw ConfigError("only radial 'bump' profiles are supported");
  }
  RadialBump b{parse_point(j.at("center")), j.at("inner").get<double>(), j.at("outer").get<double>(),
               j.at("amplitude").get<double>()};
  b.validate();
  return b;
}

GuideConfig parse_guide(const json& j, Side side) {
  GuideConfig g;
  g.side = side;
  g.cell = parse_cell(j.at("cell"));
  g.y0 = get_or(j, "y0", 0.0);
  g.anchor = j.at("anchor").get<double>();
  g.table = parse_table(j.at("qhat"));
  return g;
}

DirichletSpec parse_dirichlet(const json& j) {
  DirichletSpec d;
  const auto type = get_or<std::string>(j, "type", "none");
  if (type == "none") return d;
  if (j.contains("amplitude")) d.amplitude = cplx(j["amplitude"][0].get<double>(), j["amplitude"][1].get<double>());
  if (type == "plane_wave") {
    d.kind = DirichletSpec::Kind::PlaneWave;
    d.angle = j.at("angle").get<double>();
    d.wavenumber = j.at("wavenumber").get<double>();
  } else if (type == "guide_sine") {
    d.kind = DirichletSpec::Kind::GuideSine;
    d.ell = j.at("ell").get<int>();
    d.y0 = get_or(j, "y0", 0.0);
    d.height = j.at("height").get<double>();
  } else {
    throw ConfigError("unknown dirichlet type '" + type + "'");
  }
  return d;
}

}  // namespace

ProblemConfig parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  ProblemConfig cfg;
  try {
    cfg.name = get_or<std::string>(doc, "name", "problem");
    if (!doc.contains("wavenumber")) throw ConfigError("wavenumber is required");
    cfg.k = doc.at("wavenumber").get<double>();
    if (doc.contains("left_guide")) cfg.left = parse_guide(doc["left_guide"], Side::Minus);
    if (doc.contains("right_guide")) cfg.right = parse_guide(doc["right_guide"], Side::Plus);

    const json& jn = doc.at("junction");
    for (const auto& jr : jn.at("regions")) {
      PolygonRegion r;
      for (const auto& v : jr.at("vertices")) r.vertices.push_back(parse_point(v));
      for (const auto& t : jr.at("edge_tags")) r.edge_tags.push_back(edge_tag_from_string(t.get<std::string>()));
      r.kind = RegionKind::Junction;
      cfg.junction.push_back(std::move(r));
    }
    if (jn.contains("background")) {
      const json& jb = jn["background"];
      if (jb.contains("constant")) {
        cfg.junction_index = RefractiveIndex::constant(jb["constant"].get<double>());
      } else {
        const Point origin = jb.contains("origin") ? parse_point(jb["origin"]) : Point(0.0, 0.0);
        cfg.junction_index = RefractiveIndex(parse_cell(jb.at("cell")), parse_table(jb.at("qhat")), origin);
      }
    }
    if (jn.contains("q2")) {
      cfg.perturbation = parse_bump(jn["q2"]);
      const RadialBump bump = *cfg.perturbation;
      cfg.junction_index.set_perturbation({[bump](const Point& x) { return bump(x); }, bump.support()});
    }
    if (jn.contains("source")) {
      if (get_or<std::string>(jn["source"], "type", "bump") != "none") cfg.source.bump = parse_bump(jn["source"]);
    }
    if (jn.contains("dirichlet")) cfg.dirichlet = parse_dirichlet(jn["dirichlet"]);

    const json& jt = doc.at("truncation");
    cfg.N = jt.at("N").get<int>();
    cfg.M = jt.at("M").get<int>();
    cfg.h = doc.at("mesh").at("h").get<double>();
    if (doc.contains("domain")) {
      cfg.guide_cells = get_or(doc["domain"], "guide_cells", cfg.guide_cells);
      cfg.interface_quadrature = get_or(doc["domain"], "interface_quadrature", cfg.interface_quadrature);
    }
    if (doc.contains("tolerances")) {
      const json& jtol = doc["tolerances"];
      cfg.tol.unit_circle = get_or(jtol, "unit_circle", cfg.tol.unit_circle);
      cfg.tol.pencil_residual = get_or(jtol, "pencil_residual", cfg.tol.pencil_residual);
      cfg.tol.gram_condition_warn = get_or(jtol, "gram_condition_warn", cfg.tol.gram_condition_warn);
      cfg.tol.lap_epsilon = get_or(jtol, "lap_epsilon", cfg.tol.lap_epsilon);
    }
    if (doc.contains("lap")) cfg.lap.buffer_cells = get_or(doc["lap"], "buffer_cells", cfg.lap.buffer_cells);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config field error: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

ProblemConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace guidewave
