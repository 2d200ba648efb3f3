#include "guidewave/fem/problem.hpp"

#include <algorithm>
#include <cmath>

#include "guidewave/core/errors.hpp"

namespace guidewave::fem {

DomainLayout DomainLayout::from_config(const ProblemConfig& cfg) {
  DomainLayout d;
  d.junction = cfg.junction;
  d.left = cfg.left;
  d.right = cfg.right;
  d.guide_cells = cfg.guide_cells;
  return d;
}

double DomainLayout::interface_x1(Side side) const {
  const auto& g = guide(side);
  if (!g) throw ConfigError("no guide attached on side " + to_string(side));
  const double len = guide_cells * g->cell.L;
  return side == Side::Plus ? g->anchor + len : g->anchor - len;
}

namespace {

PolygonRegion guide_rectangle(const GuideConfig& g, double from, double to, EdgeTag far_tag) {
  const double y0 = g.y0, y1 = g.y0 + g.cell.H;
  const double lo = std::min(from, to), hi = std::max(from, to);
  PolygonRegion r;
  r.vertices = {Point(lo, y0), Point(hi, y0), Point(hi, y1), Point(lo, y1)};
  // Edges: bottom, right, top, left.
  const bool plus = g.side == Side::Plus;
  r.edge_tags = {EdgeTag::Wall, plus ? far_tag : EdgeTag::Internal, EdgeTag::Wall,
                 plus ? EdgeTag::Internal : far_tag};
  r.kind = plus ? RegionKind::GuidePlus : RegionKind::GuideMinus;
  return r;
}

}  // namespace

std::vector<PolygonRegion> DomainLayout::regions(int extra_cells) const {
  std::vector<PolygonRegion> out = junction;
  for (const auto* g : {&left, &right}) {
    if (!*g) continue;
    const GuideConfig& gc = **g;
    const double dir = gc.side == Side::Plus ? 1.0 : -1.0;
    const double end = gc.anchor + dir * guide_cells * gc.cell.L;
    const EdgeTag iface = gc.side == Side::Plus ? EdgeTag::InterfacePlus : EdgeTag::InterfaceMinus;
    if (extra_cells <= 0) {
      out.push_back(guide_rectangle(gc, gc.anchor, end, iface));
    } else {
      out.push_back(guide_rectangle(gc, gc.anchor, end, EdgeTag::Internal));
      out.push_back(guide_rectangle(gc, end, end + dir * extra_cells * gc.cell.L, EdgeTag::Wall));
    }
  }
  return out;
}

dtn::InterfaceSegment interface_segment(const Mesh& mesh, const DomainLayout& layout, Side side) {
  const auto& g = layout.guide(side);
  if (!g) throw ConfigError("no guide attached on side " + to_string(side));
  dtn::InterfaceSegment seg;
  seg.side = side;
  seg.x1 = layout.interface_x1(side);
  seg.y0 = g->y0;
  seg.H = g->cell.H;
  const EdgeTag tag = side == Side::Plus ? EdgeTag::InterfacePlus : EdgeTag::InterfaceMinus;
  for (const auto& [a, b] : mesh.tagged_edges(tag)) {
    for (int v : {a, b}) {
      if (std::abs(mesh.vertices[v].x() - seg.x1) > 1e-9 * (1.0 + std::abs(seg.x1))) {
        throw DomainMismatchError("interface edge is not on the line x1 = " + std::to_string(seg.x1));
      }
      seg.breakpoints.push_back(mesh.vertices[v].y());
    }
  }
  if (seg.breakpoints.empty()) throw DomainMismatchError("mesh has no " + to_string(tag) + " edges");
  std::sort(seg.breakpoints.begin(), seg.breakpoints.end());
  seg.breakpoints.erase(std::unique(seg.breakpoints.begin(), seg.breakpoints.end()), seg.breakpoints.end());
  if (std::abs(seg.breakpoints.front() - seg.y0) > 1e-9 || std::abs(seg.breakpoints.back() - seg.y0 - seg.H) > 1e-9) {
    throw DomainMismatchError("interface edges do not span the guide cross-section");
  }
  return seg;
}

JunctionProblem make_problem(const ProblemConfig& cfg) {
  JunctionProblem p;
  p.k = cfg.k;
  const RefractiveIndex junction = cfg.junction_index;
  const std::optional<RefractiveIndex> plus = cfg.right ? std::optional(cfg.right->index()) : std::nullopt;
  const std::optional<RefractiveIndex> minus = cfg.left ? std::optional(cfg.left->index()) : std::nullopt;
  p.q = [junction, plus, minus](const Point& x, RegionKind kind) {
    switch (kind) {
      case RegionKind::GuidePlus:
        return plus->eval_periodic(x);
      case RegionKind::GuideMinus:
        return minus->eval_periodic(x);
      case RegionKind::Junction:
        break;
    }
    return junction.eval(x);
  };
  if (!cfg.source.empty()) {
    const SourceSpec s = cfg.source;
    p.f = [s](const Point& x) { return s(x); };
  }
  if (cfg.dirichlet.kind != DirichletSpec::Kind::None) {
    const DirichletSpec d = cfg.dirichlet;
    p.dirichlet = [d](const Point& x) { return d(x); };
  }
  return p;
}

}  // namespace guidewave::fem
