#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "guidewave/cli/pipeline.hpp"
#include "guidewave/core/errors.hpp"

using namespace guidewave;
using namespace guidewave::cli;

namespace {

// Unit junction fed through its left edge by sin(pi x2), followed by a uniform guide q = 1.
std::string straight_guide_config(double k, int M, double h = 0.1) {
  std::ostringstream s;
  s.precision(17);
  s << R"({
    "name": "straight", "wavenumber": )" << k << R"(,
    "right_guide": {"cell": {"period": 1, "height": 1}, "y0": 0, "anchor": 1, "qhat": [[0, 0, 1, 0]]},
    "junction": {
      "regions": [{"vertices": [[0, 0], [1, 0], [1, 1], [0, 1]], "edge_tags": ["wall", "internal", "wall", "dirichlet"]}],
      "background": {"constant": 1.0},
      "dirichlet": {"type": "guide_sine", "ell": 1, "y0": 0, "height": 1}
    },
    "truncation": {"N": 8, "M": )" << M << R"(},
    "mesh": {"h": )" << h << R"(}
  })";
  return s.str();
}

std::string write_temp(const std::string& name, const std::string& text) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream(path) << text;
  return path.string();
}

}  // namespace

TEST_CASE("uniform guide: propagating mode has constant modulus along the guide") {
  const double k = std::sqrt(kPi * kPi + 4.0);
  const Workspace ws = prepare(parse_config(straight_guide_config(k, 4)), 4);
  const SolveResult r = solve_with(ws, 4);
  CHECK(r.manifest["guides"]["right"]["J"] == 1);
  CHECK(r.warnings.empty());
  for (double x1 : {0.25, 0.8, 1.5, 2.2, 2.9}) {
    CHECK(std::abs(r.field->eval(Point(x1, 0.5))) == doctest::Approx(1.0).epsilon(1e-2));
  }
  std::ostringstream csv;
  emit_field_plot_data(*r.field, 31, 5, csv);
  std::istringstream in(csv.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "x1,x2,re,im,abs,inside");
  int rows = 0, inside = 0;
  while (std::getline(in, line)) {
    ++rows;
    inside += line.back() == '1';
  }
  CHECK(rows == 31 * 5);
  CHECK(inside == rows);
}

TEST_CASE("plot data of the zero field and points outside the domain") {
  auto mesh = std::make_shared<const fem::Mesh>(fem::generate_mesh(
      PolygonRegion{{Point(0, 0), Point(2, 0), Point(2, 1), Point(1, 1), Point(1, 2), Point(0, 2)},
                    std::vector<EdgeTag>(6, EdgeTag::Wall)},
      0.25));
  const fem::P3Space space(*mesh);
  const fem::SolutionField zero(mesh, Eigen::VectorXcd::Zero(space.num_dofs()));
  std::ostringstream csv;
  emit_field_plot_data(zero, 5, 5, csv);
  std::istringstream in(csv.str());
  std::string line;
  std::getline(in, line);
  int outside = 0;
  while (std::getline(in, line)) {
    if (line.back() == '0') {
      ++outside;
      CHECK(line.find("nan") != std::string::npos);
    } else {
      CHECK(line.find(",0.0000000000e+00,0.0000000000e+00,0.0000000000e+00,") != std::string::npos);
    }
  }
  CHECK(outside == 4);  // grid points with x1, x2 in {1.5, 2}
}

TEST_CASE("wavenumber at a cut-off aborts in the mode stage") {
  const Workspace ws = prepare(parse_config(straight_guide_config(kPi, 4)), 4);
  try {
    solve_with(ws, 4);
    FAIL("expected a standing-wave error");
  } catch (const StandingWaveError& e) {
    CHECK(std::string(e.what()).rfind("modes (right guide): ", 0) == 0);
  }
}

TEST_CASE("truncation without evanescent modes warns") {
  const double k = std::sqrt(kPi * kPi + 4.0);
  const Workspace ws = prepare(parse_config(straight_guide_config(k, 1)), 1);
  const SolveResult r = solve_with(ws, 1);
  REQUIRE(r.warnings.size() == 1);
  CHECK(r.warnings[0].find("propagating modes only") != std::string::npos);
  CHECK(r.manifest["guides"]["right"]["evanescent"] == 0);
}

TEST_CASE("run_solve writes artifacts and reuses the mode cache") {
  const auto dir = std::filesystem::temp_directory_path() / "gw_cli_run";
  std::filesystem::remove_all(dir);
  const std::string cfg = write_temp("gw_straight.cfg", straight_guide_config(std::sqrt(kPi * kPi + 4.0), 3));
  RunOptions opt;
  opt.output_dir = dir.string();
  const SolveResult first = run_solve(cfg, opt);
  for (const char* f : {"manifest.json", "mesh.txt", "field.txt"}) CHECK(std::filesystem::exists(dir / f));
  CHECK(first.manifest["guides"]["right"]["from_cache"] == false);
  CHECK(first.manifest["config"]["tolerances"].contains("gram_condition_warn"));
  const SolveResult second = run_solve(cfg, opt);
  CHECK(second.manifest["guides"]["right"]["from_cache"] == true);
  CHECK((first.field->values() - second.field->values()).norm() <= 1e-12 * first.field->values().norm());
}

TEST_CASE("convergence table: determinism, duplicates and decay") {
  const std::string cfg = write_temp("gw_straight_conv.cfg", straight_guide_config(std::sqrt(kPi * kPi + 4.0), 4, 0.2));
  const ConvergenceTable a = run_convergence(cfg, {2, 2, 3}, Reference::SelfRichest, 6);
  const ConvergenceTable b = run_convergence(cfg, {2, 2, 3}, Reference::SelfRichest, 6);
  CHECK(a.to_csv() == b.to_csv());
  CHECK(a.errors[0] == a.errors[1]);
  CHECK(a.errors[0] > 0.0);
  CHECK(a.reference_M == 6);
  CHECK(a.to_csv().rfind("reference,M=2,M=2,M=3,slope\nself_M6,", 0) == 0);
  CHECK_THROWS_AS(run_convergence(cfg, {3, 2}, Reference::SelfRichest, 6), ConfigError);
  CHECK(reference_from_string("lap") == Reference::Lap);
  CHECK_THROWS_AS(reference_from_string("exact"), ConfigError);
}

TEST_CASE("log-linear slope") {
  CHECK(log_linear_slope({1, 2, 3}, {std::exp(-1.0), std::exp(-2.0), std::exp(-3.0)}) == doctest::Approx(-1.0));
}

TEST_CASE("oracle invariant suite passes") {
  std::ostringstream out;
  CHECK(check(out));
  CHECK(out.str().find("FAIL") == std::string::npos);
}
