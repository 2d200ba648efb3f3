#include "guidewave/cli/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "guidewave/core/errors.hpp"
#include "guidewave/dtn/dtn_operator.hpp"
#include "guidewave/floquet/serialization.hpp"
#include "guidewave/oracle/oracle.hpp"

namespace guidewave::cli {

using nlohmann::json;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Runs `f`, re-raising library errors with the same type and the stage name prefixed.
template <class F>
auto stage(const std::string& name, F&& f) -> decltype(f()) {
  const auto tag = [&](const std::exception& e) { return name + ": " + e.what(); };
  try {
    return f();
  } catch (const ConfigError& e) {
    throw ConfigError(tag(e));
  } catch (const EigensolverError& e) {
    throw EigensolverError(tag(e));
  } catch (const StandingWaveError& e) {
    throw StandingWaveError(tag(e));
  } catch (const SpectralTruncationError& e) {
    throw SpectralTruncationError(tag(e));
  } catch (const GramError& e) {
    throw GramError(tag(e));
  } catch (const MeshError& e) {
    throw MeshError(tag(e));
  } catch (const SingularSystemError& e) {
    throw SingularSystemError(tag(e));
  } catch (const DomainMismatchError& e) {
    throw DomainMismatchError(tag(e));
  } catch (const InsufficientDecayError& e) {
    throw InsufficientDecayError(tag(e));
  } catch (const Error& e) {
    throw Error(tag(e));
  }
}

const char* guide_name(Side side) { return side == Side::Plus ? "right" : "left"; }

json report_json(const floquet::ModeSolveReport& r) {
  return {{"companion_size", r.companion_size},       {"eigenvalues_in_window", r.eigenvalues_in_window},
          {"rejected_by_residual", r.rejected_by_residual}, {"clusters", r.clusters},
          {"max_residual", r.max_residual},           {"seconds_eigenvalues", r.seconds_eigenvalues},
          {"seconds_vectors", r.seconds_vectors}};
}

json config_json(const ProblemConfig& cfg) {
  return {{"wavenumber", cfg.k},
          {"N", cfg.N},
          {"M", cfg.M},
          {"h", cfg.h},
          {"guide_cells", cfg.guide_cells},
          {"interface_quadrature", cfg.interface_quadrature},
          {"tolerances",
           {{"unit_circle", cfg.tol.unit_circle},
            {"pencil_residual", cfg.tol.pencil_residual},
            {"gram_condition_warn", cfg.tol.gram_condition_warn},
            {"lap_epsilon", cfg.tol.lap_epsilon},
            {"cluster_radius", cfg.tol.cluster_radius()}}},
          {"lap", {{"buffer_cells", cfg.lap.buffer_cells}}}};
}

std::string fingerprint_hex(std::uint64_t f) {
  std::ostringstream s;
  s << std::hex << std::setw(16) << std::setfill('0') << f;
  return s.str();
}

}  // namespace

GuideSpectrum compute_spectrum(const GuideConfig& guide, double k, int N, int M, const Tolerances& tol) {
  GuideSpectrum s;
  const RefractiveIndex q = guide.index();
  s.pencil = floquet::build_pencil(q, k, guide.cell, N);
  s.modes = floquet::solve_modes(s.pencil, M, tol, &s.report);
  s.M = M;
  s.min_q = q.min_value();
  return s;
}

floquet::ModeBasis outgoing_basis(const GuideSpectrum& spectrum, const GuideConfig& guide, int M, const Tolerances& tol) {
  if (M > spectrum.M) throw ConfigError("truncation M exceeds the computed spectrum height");
  const auto modes = M == spectrum.M ? spectrum.modes : floquet::restrict_to_rectangle(spectrum.modes, M, tol);
  auto [plus, minus] = floquet::classify_and_orthonormalize(modes, spectrum.pencil, M, tol);
  return guide.side == Side::Plus ? plus : minus;
}

Workspace prepare(const ProblemConfig& cfg, int M_max) {
  Workspace ws;
  ws.cfg = cfg;
  ws.layout = fem::DomainLayout::from_config(cfg);
  const auto t0 = std::chrono::steady_clock::now();
  ws.mesh = stage("mesh", [&] {
    return std::make_shared<const fem::Mesh>(fem::generate_mesh(ws.layout.regions(), cfg.h));
  });
  ws.seconds_mesh = seconds_since(t0);
  stage("modes", [&] {
    if (cfg.left) ws.left = std::make_shared<const GuideSpectrum>(compute_spectrum(*cfg.left, cfg.k, cfg.N, M_max, cfg.tol));
    if (cfg.right) {
      const bool same = cfg.left && ws.left && cfg.left->index().fingerprint() == cfg.right->index().fingerprint() &&
                        cfg.left->cell.L == cfg.right->cell.L && cfg.left->cell.H == cfg.right->cell.H;
      ws.right = same ? ws.left
                      : std::make_shared<const GuideSpectrum>(compute_spectrum(*cfg.right, cfg.k, cfg.N, M_max, cfg.tol));
    }
    return 0;
  });
  return ws;
}

SolveResult solve_with(const Workspace& ws, int M, const std::optional<floquet::ModeBasis>& left_basis,
                       const std::optional<floquet::ModeBasis>& right_basis) {
  const ProblemConfig& cfg = ws.cfg;
  const auto t0 = std::chrono::steady_clock::now();
  SolveResult res;
  json guides = json::object();
  fem::JunctionProblem problem = fem::make_problem(cfg);

  for (Side side : {Side::Minus, Side::Plus}) {
    const auto& guide = ws.layout.guide(side);
    if (!guide) continue;
    const auto& spectrum = side == Side::Plus ? ws.right : ws.left;
    const auto& given = side == Side::Plus ? right_basis : left_basis;
    const std::string name = guide_name(side);

    const floquet::ModeBasis basis = stage("modes (" + name + " guide)", [&] {
      if (given) return *given;
      if (!spectrum) throw ConfigError("no spectrum computed");
      return outgoing_basis(*spectrum, *guide, M, cfg.tol);
    });
    const double min_q = spectrum ? spectrum->min_q : guide->index().min_value();
    if (min_q <= 0.0) {
      res.warnings.push_back("refractive index of the " + name + " guide is not positive (min " + std::to_string(min_q) +
                             "); mode normalization uses |k int q |phi|^2|");
    }
    const int evanescent = static_cast<int>(basis.size()) - basis.J;
    if (basis.size() == 0) {
      res.warnings.push_back("mode basis of the " + name + " guide is empty; the interface acts as a Neumann boundary");
    } else if (evanescent == 0) {
      res.warnings.push_back("no evanescent modes of the " + name + " guide fall in the truncation rectangle; the DtN map uses propagating modes only");
    }

    auto op = stage("dtn (" + name + " guide)", [&] {
      return std::make_shared<const dtn::DtnOperator>(basis, fem::interface_segment(*ws.mesh, ws.layout, side),
                                                      cfg.interface_quadrature, cfg.tol);
    });
    for (const auto& w : op->warnings()) res.warnings.push_back(name + " guide: " + w);
    (side == Side::Plus ? problem.dtn_plus : problem.dtn_minus) = op;

    json alphas = json::array();
    double max_residual = 0.0;
    for (const auto& m : basis.modes) {
      alphas.push_back({m.alpha.real(), m.alpha.imag()});
      max_residual = std::max(max_residual, m.residual);
    }
    json g = {{"side", to_string(side)},
              {"anchor", guide->anchor},
              {"interface_x1", ws.layout.interface_x1(side)},
              {"q_fingerprint", fingerprint_hex(basis.q_fingerprint)},
              {"J", basis.J},
              {"modes", basis.size()},
              {"evanescent", evanescent},
              {"alphas", alphas},
              {"max_mode_residual", max_residual},
              {"gram_condition", op->condition_number()},
              {"gram_regularized", op->regularized()},
              {"min_q", min_q},
              {"from_cache", given.has_value()}};
    if (spectrum && !given) g["mode_solve"] = report_json(spectrum->report);
    guides[name] = g;
  }

  fem::SolveReport sr;
  res.field = stage("fem", [&] { return fem::solve(problem, ws.mesh, &sr); });

  res.manifest = {{"name", cfg.name},
                  {"config", config_json(cfg)},
                  {"truncation_M", M},
                  {"mesh",
                   {{"h", ws.mesh->h},
                    {"vertices", ws.mesh->vertices.size()},
                    {"triangles", ws.mesh->num_triangles()},
                    {"max_quality", ws.mesh->max_quality()},
                    {"area", ws.mesh->area()},
                    {"seconds", ws.seconds_mesh}}},
                  {"guides", guides},
                  {"fem",
                   {{"dofs", sr.dofs},
                    {"free_dofs", sr.free_dofs},
                    {"relative_residual", sr.residual},
                    {"seconds_assembly", sr.seconds_assembly},
                    {"seconds_solve", sr.seconds_solve}}},
                  {"solution_l2_norm", res.field->l2_norm()},
                  {"seconds_total", seconds_since(t0)},
                  {"warnings", res.warnings}};
  return res;
}

SolveResult run_solve(const std::string& config_path, const RunOptions& options) {
  const auto t0 = std::chrono::steady_clock::now();
  const ProblemConfig cfg = stage("config", [&] { return load_config(config_path); });
  const std::string out = options.output_dir.empty() ? cfg.name + "_out" : options.output_dir;
  const std::string cache = options.cache_dir.empty() ? out + "/cache" : options.cache_dir;
  std::filesystem::create_directories(out);

  // Cached bases skip the eigensolve entirely.
  std::optional<floquet::ModeBasis> cached[2];
  bool all_cached = true;
  std::string keys[2];
  for (Side side : {Side::Minus, Side::Plus}) {
    const auto& g = side == Side::Plus ? cfg.right : cfg.left;
    if (!g) continue;
    const int i = side == Side::Plus ? 1 : 0;
    keys[i] = floquet::mode_cache_key(g->index().fingerprint(), cfg.k, g->cell, cfg.N, cfg.M, cfg.tol);
    if (options.use_cache) {
      if (auto hit = floquet::load_mode_cache(cache, keys[i])) cached[i] = side == Side::Plus ? hit->first : hit->second;
    }
    all_cached = all_cached && cached[i].has_value();
  }

  Workspace ws;
  if (all_cached) {
    ws.cfg = cfg;
    ws.layout = fem::DomainLayout::from_config(cfg);
    const auto tm = std::chrono::steady_clock::now();
    ws.mesh = stage("mesh", [&] {
      return std::make_shared<const fem::Mesh>(fem::generate_mesh(ws.layout.regions(), cfg.h));
    });
    ws.seconds_mesh = seconds_since(tm);
  } else {
    ws = prepare(cfg, cfg.M);
  }
  SolveResult res = all_cached ? solve_with(ws, cfg.M, cached[0], cached[1]) : solve_with(ws, cfg.M);

  stage("export", [&] {
    if (!all_cached) {
      for (Side side : {Side::Minus, Side::Plus}) {
        const auto& g = side == Side::Plus ? cfg.right : cfg.left;
        const auto& spectrum = side == Side::Plus ? ws.right : ws.left;
        if (!g || !spectrum) continue;
        const auto bases = floquet::classify_and_orthonormalize(spectrum->modes, spectrum->pencil, cfg.M, cfg.tol);
        floquet::save_mode_cache(cache, keys[side == Side::Plus ? 1 : 0], bases.first, bases.second);
      }
    }
    fem::write_mesh(out + "/mesh.txt", *ws.mesh);
    fem::write_field(out + "/field.txt", *res.field);
    if (options.plot_nx > 0 && options.plot_ny > 0) {
      std::ofstream plot(out + "/field_plot.csv");
      emit_field_plot_data(*res.field, options.plot_nx, options.plot_ny, plot);
    }
    res.manifest["config_path"] = config_path;
    res.manifest["mode_cache"] = cache;
    res.manifest["seconds_run"] = seconds_since(t0);
    std::ofstream m(out + "/manifest.json");
    m << res.manifest.dump(2) << "\n";
    return 0;
  });
  return res;
}

Reference reference_from_string(const std::string& name) {
  if (name == "self" || name == "self_richest") return Reference::SelfRichest;
  if (name == "lap") return Reference::Lap;
  throw ConfigError("unknown reference '" + name + "' (expected self or lap)");
}

double log_linear_slope(const std::vector<int>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n < 2) return 0.0;
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += std::log(y[i]);
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (x[i] - mx) * (std::log(y[i]) - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxx > 0.0 ? sxy / sxx : 0.0;
}

std::string ConvergenceTable::to_csv() const {
  std::ostringstream s;
  s << "reference";
  for (int m : M) s << ",M=" << m;
  s << ",slope\n" << reference;
  char buf[64];
  for (double e : errors) {
    std::snprintf(buf, sizeof buf, ",%.10e", e);
    s << buf;
  }
  std::snprintf(buf, sizeof buf, ",%.10e\n", slope);
  s << buf;
  return s.str();
}

ConvergenceTable run_convergence(const Workspace& ws, const std::vector<int>& M_list, Reference reference,
                                 int reference_M) {
  if (M_list.empty()) throw ConfigError("empty M list");
  if (!std::is_sorted(M_list.begin(), M_list.end())) throw ConfigError("M list must be ascending");
  ConvergenceTable table;
  table.M = M_list;

  std::optional<fem::SolutionField> ref;
  if (reference == Reference::SelfRichest) {
    table.reference_M = std::max(reference_M, M_list.back());
    table.reference = "self_M" + std::to_string(table.reference_M);
    ref = solve_with(ws, table.reference_M).field;
  } else {
    table.reference = "lap";
    ref = stage("lap reference", [&] {
      return oracle::lap_reference(fem::make_problem(ws.cfg), ws.layout, ws.cfg.tol.lap_epsilon, ws.cfg.lap.buffer_cells,
                                   ws.cfg.h);
    });
  }
  for (int M : M_list) {
    const SolveResult r = solve_with(ws, M);
    table.errors.push_back(fem::field_error(*r.field, *ref));
  }
  table.slope = log_linear_slope(table.M, table.errors);
  return table;
}

ConvergenceTable run_convergence(const std::string& config_path, const std::vector<int>& M_list, Reference reference,
                                 int reference_M) {
  const ProblemConfig cfg = stage("config", [&] { return load_config(config_path); });
  int M_max = M_list.empty() ? cfg.M : *std::max_element(M_list.begin(), M_list.end());
  if (reference == Reference::SelfRichest) M_max = std::max(M_max, reference_M);
  const Workspace ws = prepare(cfg, M_max);
  return run_convergence(ws, M_list, reference, reference_M);
}

void emit_field_plot_data(const fem::SolutionField& field, int nx, int ny, std::ostream& out) {
  if (nx < 2 || ny < 2) throw ConfigError("plot grid needs at least 2 x 2 points");
  const Box b = field.mesh().bounds();
  out << "x1,x2,re,im,abs,inside\n";
  char buf[160];
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const Point x(b.lo.x() + (b.hi.x() - b.lo.x()) * i / (nx - 1), b.lo.y() + (b.hi.y() - b.lo.y()) * j / (ny - 1));
      const auto v = field.try_eval(x);
      if (v) {
        std::snprintf(buf, sizeof buf, "%.10g,%.10g,%.10e,%.10e,%.10e,1\n", x.x(), x.y(), v->real(), v->imag(), std::abs(*v));
      } else {
        std::snprintf(buf, sizeof buf, "%.10g,%.10g,nan,nan,nan,0\n", x.x(), x.y());
      }
      out << buf;
    }
  }
}

bool check(std::ostream& out) {
  bool all = true;
  const auto report = [&](const std::string& name, bool ok, double value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3e", value);
    out << (ok ? "PASS " : "FAIL ") << name << " (" << buf << ")\n";
    all = all && ok;
  };
  const auto run = [&](const std::string& name, auto&& f) {
    try {
      f();
    } catch (const std::exception& e) {
      out << "FAIL " << name << " (" << e.what() << ")\n";
      all = false;
    }
  };
  const auto distance = [](std::vector<cplx> a, std::vector<cplx> b) {
    if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
    double worst = 0.0;
    for (const cplx& x : a) {
      auto it = std::min_element(b.begin(), b.end(), [&](cplx p, cplx q) { return std::abs(p - x) < std::abs(q - x); });
      worst = std::max(worst, std::abs(*it - x));
      b.erase(it);
    }
    return worst;
  };
  const auto alphas = [](const std::vector<floquet::FloquetMode>& modes) {
    std::vector<cplx> a;
    for (const auto& m : modes) a.push_back(m.alpha);
    return a;
  };

  run("q = 0 spectrum", [&] {
    const auto p = floquet::build_pencil(RefractiveIndex(CellSpec{}, {}), 1.0, CellSpec{}, 8);
    const double d = distance(alphas(floquet::solve_modes(p, 5, Tolerances{})), oracle::laplace_spectrum(8, 5));
    report("q = 0 spectrum", d <= 1e-8, d);
  });
  run("constant q spectrum", [&] {
    const auto p = floquet::build_pencil(RefractiveIndex::constant(2.0), kPi, CellSpec{}, 8);
    std::vector<cplx> ref;
    for (const auto& m : oracle::constant_q_modes(2.0, kPi, 4).modes) ref.push_back(m.alpha);
    const double d = distance(alphas(floquet::solve_modes(p, 4, Tolerances{})), ref);
    report("constant q spectrum", d <= 1e-7, d);
  });
  run("conjugation symmetry", [&] {
    const RefractiveIndex q1(CellSpec{}, {{0, 0, {2, 0}}, {-7, 1, {2, -4}}, {7, 1, {2, 4}}, {-3, 2, {3, 0}},
                                          {3, 2, {3, 0}}, {-1, 3, {1, 0.2}}, {1, 3, {1, -0.2}}});
    const auto p = floquet::build_pencil(q1, 1.0, CellSpec{}, 8);
    const auto a = alphas(floquet::solve_modes(p, 4, Tolerances{}));
    std::vector<cplx> b;
    for (const cplx& x : a) b.push_back(-std::conj(x));
    const double d = distance(a, b);
    report("conjugation symmetry", d <= 1e-6, d);
  });
  run("harmonic cubic reproduction", [&] {
    const PolygonRegion sq{{Point(0, 0), Point(1, 0), Point(1, 1), Point(0, 1)},
                           std::vector<EdgeTag>(4, EdgeTag::DirichletData)};
    const auto exact = [](const Point& x) { return cplx(x.x() * x.x() * x.x() - 3 * x.x() * x.y() * x.y(), 0.0); };
    fem::JunctionProblem p;
    p.q = [](const Point&, RegionKind) { return 1.0; };
    p.dirichlet = exact;
    const double e = fem::field_error(fem::solve(p, std::make_shared<const fem::Mesh>(fem::generate_mesh(sq, 0.25))), exact);
    report("harmonic cubic reproduction", e <= 1e-11, e);
  });
  run("transparent boundary", [&] {
    fem::DomainLayout d;
    d.junction = {{{Point(0, 0), Point(1, 0), Point(1, 1), Point(0, 1)},
                   {EdgeTag::Wall, EdgeTag::Internal, EdgeTag::Wall, EdgeTag::DirichletData}}};
    GuideConfig g;
    g.anchor = 1.0;
    g.table = {{0, 0, {1.0, 0.0}}};
    d.right = g;
    const double k = std::sqrt(kPi * kPi + 4.0);
    auto mesh = std::make_shared<const fem::Mesh>(fem::generate_mesh(d.regions(), 0.1));
    GuideSpectrum s = compute_spectrum(g, k, 8, 4, Tolerances{});
    fem::JunctionProblem p;
    p.k = k;
    p.q = [](const Point&, RegionKind) { return 1.0; };
    p.dirichlet = [](const Point& x) { return cplx(std::sin(kPi * x.y()), 0.0); };
    p.dtn_plus = std::make_shared<const dtn::DtnOperator>(outgoing_basis(s, g, 4, Tolerances{}),
                                                          fem::interface_segment(*mesh, d, Side::Plus), 8, Tolerances{});
    const double e = fem::field_error(fem::solve(p, mesh), [](const Point& x) {
      return std::exp(cplx(0, 2 * x.x())) * std::sin(kPi * x.y());
    });
    report("transparent boundary", e <= 1e-4, e);
  });
  return all;
}

}  // namespace guidewave::cli
