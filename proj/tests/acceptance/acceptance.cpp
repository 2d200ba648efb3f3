// Acceptance suite: one PASS/FAIL line per criterion, tolerances fixed below.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "guidewave/cli/pipeline.hpp"
#include "guidewave/core/errors.hpp"
#include "guidewave/core/fourier_index.hpp"
#include "guidewave/core/quadrature.hpp"
#include "guidewave/oracle/oracle.hpp"

using namespace guidewave;

namespace {

constexpr double kTolLaplace = 1e-8;        // 1: q = 0 spectrum
constexpr double kTimeLaplace = 10.0;       // 1: seconds
constexpr double kTolConstantQ = 1e-7;      // 2: constant-q spectrum
constexpr double kTolConjugation = 1e-6;    // 4: alpha -> -conj(alpha)
constexpr double kTolOrtho = 1e-8;          // 5: normalization and flux identities
constexpr double kMinFemOrder = 3.5;        // 6: observed L2 order
constexpr double kTimeFem = 60.0;           // 6: seconds
constexpr double kTolTransparent = 1e-3;    // 7: relative L2 error
constexpr double kDecayFactor = 5.0;        // 8: error(M=8) <= error(M=2) / 5
constexpr double kTolLap = 5e-2;            // 9: relative L2 difference
constexpr double kTimeLap = 300.0;          // 9: seconds

int failures = 0;

void verdict(int id, bool ok, const std::string& what, const std::string& detail, double seconds) {
  std::printf("CRITERION %d %s: %s | %s | %.1f s\n", id, ok ? "PASS" : "FAIL", what.c_str(), detail.c_str(), seconds);
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Runs one criterion; an exception is a failure with the message as detail.
void criterion(int id, const std::string& what, const std::function<void(double& seconds)>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  double seconds = 0.0;
  try {
    body(seconds);
  } catch (const std::exception& e) {
    verdict(id, false, what, std::string("exception: ") + e.what(), seconds_since(t0));
  }
}

// Worst distance under greedy nearest matching; infinity if sizes differ.
double spectrum_distance(std::vector<cplx> a, std::vector<cplx> b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  double worst = 0.0;
  for (const cplx& x : a) {
    auto it = std::min_element(b.begin(), b.end(), [&](cplx p, cplx q) { return std::abs(p - x) < std::abs(q - x); });
    worst = std::max(worst, std::abs(*it - x));
    b.erase(it);
  }
  return worst;
}

std::vector<cplx> alphas(const std::vector<floquet::FloquetMode>& modes) {
  std::vector<cplx> out;
  for (const auto& m : modes) out.push_back(m.alpha);
  return out;
}

// Identities of the propagating modes of a classified pair of bases, verified by tensor Gauss
// quadrature of the mode functions over one cell:
//   k int q phi_j conj(phi_j') = sign_j delta,  -i int d1 phi_j conj(phi_j') = sign_j lambda_j delta
// for modes of the same cluster. Returns the worst deviation and the number of modes checked.
std::pair<double, int> orthonormality_defect(const floquet::ModeBasis& plus, const floquet::ModeBasis& minus,
                                             const RefractiveIndex& q, double k) {
  std::vector<const floquet::FloquetMode*> modes;
  for (const auto* b : {&plus, &minus}) {
    for (const auto& m : b->modes) {
      if (m.propagating()) modes.push_back(&m);
    }
  }
  if (modes.empty()) return {0.0, 0};
  const CellSpec cell = modes[0]->cell;
  const GaussRule g = gauss_legendre(96);
  const std::size_t n = modes.size();
  Eigen::MatrixXcd Q = Eigen::MatrixXcd::Zero(n, n), F = Q;
  for (std::size_t a = 0; a < g.nodes.size(); ++a) {
    for (std::size_t b = 0; b < g.nodes.size(); ++b) {
      const Point x(g.nodes[a] * cell.L, g.nodes[b] * cell.H);
      const double w = g.weights[a] * g.weights[b] * cell.L * cell.H;
      const double qx = eval_refractive_index(q, x);
      Eigen::VectorXcd v(n), d(n);
      for (std::size_t i = 0; i < n; ++i) {
        v[i] = floquet::eval_mode(*modes[i], 0, x, false);
        d[i] = floquet::eval_mode(*modes[i], 0, x, true);
      }
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          Q(i, j) += w * k * qx * v[i] * std::conj(v[j]);
          F(i, j) += w * cplx(0, -1) * d[i] * std::conj(v[j]);
        }
      }
    }
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (std::abs(modes[i]->alpha - modes[j]->alpha) > 1e-9) continue;  // different clusters
      const double sign = modes[i]->norm_sign;
      const double dq = std::abs(Q(i, j) - (i == j ? sign : 0.0));
      const double df = std::abs(F(i, j) - (i == j ? sign * *modes[i]->lambda : 0.0));
      worst = std::max({worst, dq, df});
    }
  }
  return {worst, static_cast<int>(n)};
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

int main(int argc, char** argv) {
  const std::string config_dir = GUIDEWAVE_CONFIG_DIR;
  const std::string cli_binary = argc > 1 ? argv[1] : "";
  const ProblemConfig example1 = load_config(config_dir + "/example1.cfg");
  const Tolerances tol = example1.tol;

  // 1. q = 0 spectrum.
  criterion(1, "q = 0 spectrum, N = 16, M = 5", [&](double&) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto p = floquet::build_pencil(RefractiveIndex(CellSpec{}, {}), 1.0, CellSpec{}, 16);
    const auto modes = floquet::solve_modes(p, 5, tol);
    const double t = seconds_since(t0);
    std::vector<cplx> exact;
    for (int l = 1; l <= 4; ++l) exact.insert(exact.end(), {cplx(0, kPi * l), cplx(0, -kPi * l)});
    const double d = spectrum_distance(alphas(modes), exact);
    verdict(1, d <= kTolLaplace && t <= kTimeLaplace, "q = 0 spectrum, N = 16, M = 5",
            fmt("%.0f eigenvalues, max error %.2e (tol %.0e)", static_cast<double>(modes.size()), d, kTolLaplace) +
                fmt(", time limit %.0f s", kTimeLaplace),
            t);
  });

  // 2 and 5 share the constant-q bases.
  floquet::ModeBasis cq_plus, cq_minus;
  const RefractiveIndex q2 = RefractiveIndex::constant(2.0);
  criterion(2, "constant q = 2, k = pi, N = 16, M = 4", [&](double&) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto p = floquet::build_pencil(q2, kPi, CellSpec{}, 16);
    const auto modes = floquet::solve_modes(p, 4, tol);
    std::tie(cq_plus, cq_minus) = floquet::classify_and_orthonormalize(modes, p, 4, tol);
    std::vector<cplx> exact{cplx(kPi, 0), cplx(kPi, 0)};  // +-pi reduce to the zone edge
    for (int l = 2; kPi * kPi * l * l - 2 * kPi * kPi < 16 * kPi * kPi; ++l) {
      const double kappa = std::sqrt(kPi * kPi * l * l - 2 * kPi * kPi);
      exact.insert(exact.end(), {cplx(0, kappa), cplx(0, -kappa)});
    }
    const double d = spectrum_distance(alphas(modes), exact);
    // Direction: the right-going wave exp(i pi x1) lives on j = 0, the left-going exp(-i pi x1) on j = -1.
    bool directions = cq_plus.J == 1 && cq_minus.J == 1;
    for (const auto* b : {&cq_plus, &cq_minus}) {
      for (const auto& m : b->modes) {
        if (!m.propagating()) continue;
        double mass0 = 0.0, mass1 = 0.0;
        for (int f = 0; f < m.coeffs.size(); ++f) {
          const int j = unflat_index(16, f).j;
          if (j == 0) mass0 += std::norm(m.coeffs[f]);
          if (j == -1) mass1 += std::norm(m.coeffs[f]);
        }
        const int dominant_j = mass0 > mass1 ? 0 : -1;
        directions = directions && ((*m.lambda > 0) == (dominant_j == 0));
      }
    }
    verdict(2, d <= kTolConstantQ && directions, "constant q = 2, k = pi, N = 16, M = 4",
            fmt("%.0f eigenvalues, max error %.2e (tol %.0e)", static_cast<double>(modes.size()), d, kTolConstantQ) +
                ", sign(lambda) matches direction: " + (directions ? "yes" : "no"),
            seconds_since(t0));
  });

  // Example 1 spectrum at N = 32, shared by 3, 4, 8 and 9.
  std::optional<cli::Workspace> ws;
  const auto prepare_example1 = [&] {
    if (!ws) {
      ProblemConfig cfg = example1;
      cfg.N = 32;
      cfg.h = 0.02;
      ws = cli::prepare(cfg, 10);
      std::printf("# example 1 spectrum: companion %d, %.1f s eigenvalues, %.1f s vectors\n",
                  ws->right->report.companion_size, ws->right->report.seconds_eigenvalues,
                  ws->right->report.seconds_vectors);
    }
    return *ws;
  };
  const RefractiveIndex q1 = example1.right->index();
  const double k1 = example1.k;

  criterion(3, "strip counting, example 1 q, M = 8, N = 32", [&](double&) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto& spectrum = *prepare_example1().right;
    const auto modes = floquet::restrict_to_rectangle(spectrum.modes, 8, tol);
    const int n0 = floquet::strip_threshold(k1, q1);
    bool ok = n0 <= 7;
    std::string detail = fmt("k = %g, N0 = %.0f:", k1, n0);
    for (int n = n0; n <= 7; ++n) {
      const int count = floquet::eigencount_in_strip(modes, n, k1, q1);
      const double radius = floquet::strip_disc_radius(n, k1, q1);
      double dist = std::numeric_limits<double>::infinity();
      for (const auto& m : modes) {
        if (m.alpha.imag() >= (n - 0.5) * kPi && m.alpha.imag() < (n + 0.5) * kPi) dist = std::abs(m.alpha - cplx(0, kPi * n));
      }
      ok = ok && count == 1 && dist < radius;
      detail += fmt(" n=%.0f count %.0f |a-i pi n| %.3f", n, count, dist) + fmt(" < %.3f;", radius);
    }
    verdict(3, ok, "strip counting, example 1 q, M = 8, N = 32", detail, seconds_since(t0));
  });

  criterion(4, "conjugation symmetry, example 1 q", [&](double&) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto a = alphas(prepare_example1().right->modes);
    std::vector<cplx> b;
    for (const cplx& x : a) b.push_back(-std::conj(x));
    const double d = spectrum_distance(a, b);
    verdict(4, d <= kTolConjugation, "conjugation symmetry, example 1 q",
            fmt("%.0f eigenvalues (M = 10, N = 32), max defect %.2e (tol %.0e)", static_cast<double>(a.size()), d,
                kTolConjugation),
            seconds_since(t0));
  });

  criterion(5, "orthonormalization identities", [&](double&) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto [d2, n2] = orthonormality_defect(cq_plus, cq_minus, q2, kPi);
    // Example-1 clusters at the configured k (none propagate below the first cut-off).
    const auto& spectrum = *prepare_example1().right;
    const auto [p1, m1] = floquet::classify_and_orthonormalize(floquet::restrict_to_rectangle(spectrum.modes, 8, tol),
                                                               spectrum.pencil, 8, tol);
    const auto [d3, n3] = orthonormality_defect(p1, m1, q1, k1);
    // Supplementary: example 1 q at k = 3, where propagating clusters exist.
    const auto p = floquet::build_pencil(q1, 3.0, CellSpec{}, 16);
    const auto [ps, ms] = floquet::classify_and_orthonormalize(floquet::solve_modes(p, 4, tol), p, 4, tol);
    const auto [ds, ns] = orthonormality_defect(ps, ms, q1, 3.0);
    const bool ok = n2 == 2 && d2 <= kTolOrtho && d3 <= kTolOrtho && ds <= kTolOrtho && ns > 0;
    verdict(5, ok, "orthonormalization identities",
            fmt("criterion-2 modes: %.0f, defect %.2e; ", n2, d2) +
                fmt("criterion-3 modes: %.0f, defect %.2e; ", n3, d3) +
                fmt("example 1 q at k = 3: %.0f modes, defect %.2e (tol %.0e)", ns, ds, kTolOrtho),
            seconds_since(t0));
  });

  criterion(6, "FEM order, manufactured solution", [&](double&) {
    const auto t0 = std::chrono::steady_clock::now();
    const PolygonRegion square{{Point(0, 0), Point(1, 0), Point(1, 1), Point(0, 1)}, std::vector<EdgeTag>(4, EdgeTag::Wall)};
    const double k = 1.0;
    const auto q = [](const Point& x, RegionKind) { return 1.0 + 0.5 * std::cos(x.x()) * std::sin(2 * x.y()); };
    const auto exact = [](const Point& x) { return cplx(std::sin(kPi * x.x()) * std::sin(kPi * x.y()), 0.0); };
    fem::JunctionProblem p;
    p.k = k;
    p.q = q;
    p.f = [&](const Point& x) { return (-2 * kPi * kPi + k * k * q(x, RegionKind::Junction)) * exact(x).real(); };
    const std::vector<double> hs{0.2, 0.1, 0.05};
    std::vector<double> errs;
    for (double h : hs) {
      errs.push_back(fem::field_error(fem::solve(p, std::make_shared<const fem::Mesh>(fem::generate_mesh(square, h))), exact));
    }
    // Least-squares slope of log(error) against log(h).
    double mx = 0, my = 0, sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < hs.size(); ++i) mx += std::log(hs[i]) / 3, my += std::log(errs[i]) / 3;
    for (std::size_t i = 0; i < hs.size(); ++i) {
      sxy += (std::log(hs[i]) - mx) * (std::log(errs[i]) - my);
      sxx += (std::log(hs[i]) - mx) * (std::log(hs[i]) - mx);
    }
    const double order = sxy / sxx;
    const double t = seconds_since(t0);
    verdict(6, order >= kMinFemOrder && t <= kTimeFem, "FEM order, manufactured solution",
            fmt("errors %.2e %.2e %.2e", errs[0], errs[1], errs[2]) +
                fmt(" at h = 0.2 0.1 0.05, order %.2f (min %.1f)", order, kMinFemOrder),
            t);
  });

  criterion(7, "transparent boundary, uniform guide", [&](double&) {
    const auto t0 = std::chrono::steady_clock::now();
    // q = 2 in junction and guide; k^2 q = pi^2 + 4 so the l = 1 mode propagates with beta = 2.
    const double c = 2.0, k = std::sqrt((kPi * kPi + 4.0) / c);
    fem::DomainLayout d;
    d.junction = {{{Point(0, 0), Point(1, 0), Point(1, 1), Point(0, 1)},
                   {EdgeTag::Wall, EdgeTag::Internal, EdgeTag::Wall, EdgeTag::DirichletData}}};
    GuideConfig g;
    g.anchor = 1.0;
    g.table = {{0, 0, {c, 0.0}}};
    d.right = g;
    auto mesh = std::make_shared<const fem::Mesh>(fem::generate_mesh(d.regions(), 0.02));
    const auto spectrum = cli::compute_spectrum(g, k, 16, 4, tol);
    fem::JunctionProblem p;
    p.k = k;
    p.q = [c](const Point&, RegionKind) { return c; };
    p.dirichlet = [](const Point& x) { return cplx(std::sin(kPi * x.y()), 0.0); };
    p.dtn_plus = std::make_shared<const dtn::DtnOperator>(cli::outgoing_basis(spectrum, g, 4, tol),
                                                          fem::interface_segment(*mesh, d, Side::Plus), 8, tol);
    const double e = fem::field_error(fem::solve(p, mesh), [](const Point& x) {
      return std::exp(cplx(0, 2 * x.x())) * std::sin(kPi * x.y());
    });
    verdict(7, e <= kTolTransparent, "transparent boundary, uniform guide",
            fmt("h = 0.02, M = 4: relative L2 error %.2e (tol %.0e)", e, kTolTransparent), seconds_since(t0));
  });

  criterion(8, "convergence in M, example 1", [&](double&) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto table = cli::run_convergence(prepare_example1(), {2, 4, 6, 8}, cli::Reference::SelfRichest, 10);
    bool positive = true;
    for (double e : table.errors) positive = positive && e > 0.0;
    const bool ok = positive && table.slope < 0.0 && table.errors[3] <= table.errors[0] / kDecayFactor;
    verdict(8, ok, "convergence in M, example 1",
            fmt("N = 32, h = 0.02, errors vs M = 10: %.2e %.2e %.2e", table.errors[0], table.errors[1], table.errors[2]) +
                fmt(" %.2e, slope %.3f, ratio e2/e8 %.1f", table.errors[3], table.slope,
                    table.errors[0] / table.errors[3]) +
                fmt(" (min %.0f)", kDecayFactor),
            seconds_since(t0));
  });

  criterion(9, "limiting-absorption cross-check, example 1", [&](double&) {
    const auto& w = prepare_example1();
    const auto t0 = std::chrono::steady_clock::now();
    const auto u = cli::solve_with(w, 6);
    oracle::LapReport rep;
    const auto ref = oracle::lap_reference(fem::make_problem(w.cfg), w.layout, w.cfg.tol.lap_epsilon,
                                           w.cfg.lap.buffer_cells, w.cfg.h, &rep);
    const double d = fem::field_error(*u.field, ref);
    const double t = seconds_since(t0);
    verdict(9, d <= kTolLap && t <= kTimeLap, "limiting-absorption cross-check, example 1",
            fmt("M = 6 vs epsilon = %.0e, %.0f buffer cells", w.cfg.tol.lap_epsilon, w.cfg.lap.buffer_cells) +
                fmt(", h = 0.02 (%.0f dofs): relative L2 difference %.2e (tol %.0e)", rep.dofs, d, kTolLap),
            t);
  });

  criterion(10, "determinism of converge runs", [&](double&) {
    const auto t0 = std::chrono::steady_clock::now();
    if (cli_binary.empty()) throw Error("path of the command-line tool not given");
    // Example 1 with a smaller truncation so that two complete runs stay fast.
    auto doc = nlohmann::json::parse(read_file(config_dir + "/example1.cfg"), nullptr, true, true);
    doc["truncation"]["N"] = 12;
    doc["mesh"]["h"] = 0.1;
    const auto dir = std::filesystem::temp_directory_path() / "guidewave_acceptance";
    std::filesystem::create_directories(dir);
    const std::string cfg = (dir / "example1_small.cfg").string();
    std::ofstream(cfg) << doc.dump(2);
    std::vector<std::string> csv;
    for (int run = 0; run < 2; ++run) {
      const std::string out = (dir / ("converge_" + std::to_string(run) + ".csv")).string();
      std::filesystem::remove(out);
      const std::string cmd = "\"" + cli_binary + "\" converge \"" + cfg + "\" --M 2,4,6 --ref self --ref-M 8 --out \"" + out + "\"";
      if (std::system(cmd.c_str()) != 0) throw Error("converge run failed: " + cmd);
      csv.push_back(read_file(out));
    }
    const bool ok = !csv[0].empty() && csv[0] == csv[1];
    verdict(10, ok, "determinism of converge runs",
            std::string("two converge runs: ") + (ok ? "byte-identical CSV" : "CSV differs"), seconds_since(t0));
  });

  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
