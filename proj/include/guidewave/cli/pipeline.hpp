#pragma once

#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "guidewave/core/config.hpp"
#include "guidewave/fem/solution.hpp"
#include "guidewave/floquet/modes.hpp"

namespace guidewave::cli {

// Eigenpairs of one guide's pencil inside the rectangle of height `M`; smaller truncations are
// obtained by restriction without a new eigensolve.
struct GuideSpectrum {
  floquet::QuadraticPencil pencil;
  std::vector<floquet::FloquetMode> modes;
  int M = 0;
  floquet::ModeSolveReport report;
  double min_q = 0.0;
};

GuideSpectrum compute_spectrum(const GuideConfig& guide, double k, int N, int M, const Tolerances& tol);

// Outgoing basis of `guide` for truncation M <= spectrum.M (Plus basis for a right guide,
// Minus basis for a left guide).
floquet::ModeBasis outgoing_basis(const GuideSpectrum& spectrum, const GuideConfig& guide, int M,
                                  const Tolerances& tol);

// Everything one configuration's solves share: layout, mesh and guide spectra.
struct Workspace {
  ProblemConfig cfg;
  fem::DomainLayout layout;
  std::shared_ptr<const fem::Mesh> mesh;
  std::shared_ptr<const GuideSpectrum> left;
  std::shared_ptr<const GuideSpectrum> right;
  double seconds_mesh = 0.0;
};

// Meshes the domain and computes guide spectra up to height M_max. Guides with identical
// pencils share one eigensolve.
Workspace prepare(const ProblemConfig& cfg, int M_max);

struct SolveResult {
  std::optional<fem::SolutionField> field;
  nlohmann::json manifest;
  std::vector<std::string> warnings;
};

// Mode bases -> DtN operators -> FEM solve. Bases given explicitly take precedence over the
// workspace spectra (used with the mode cache).
SolveResult solve_with(const Workspace& ws, int M, const std::optional<floquet::ModeBasis>& left_basis = std::nullopt,
                       const std::optional<floquet::ModeBasis>& right_basis = std::nullopt);

struct RunOptions {
  std::string output_dir;   // default "<name>_out"
  std::string cache_dir;    // default "<output_dir>/cache"
  bool use_cache = true;
  int plot_nx = 0;          // regular plot grid; 0 disables the CSV
  int plot_ny = 0;
};

// Full run of a configuration file: writes manifest.json, mesh.txt, field.txt (and the plot CSV
// if requested) into the output directory and the mode bases into the cache.
SolveResult run_solve(const std::string& config_path, const RunOptions& options = {});

enum class Reference { SelfRichest, Lap };

Reference reference_from_string(const std::string& name);

struct ConvergenceTable {
  std::vector<int> M;
  std::vector<double> errors;
  double slope = 0.0;  // least-squares slope of log(error) against M
  std::string reference;
  int reference_M = 0;

  std::string to_csv() const;
};

// Relative L2(D) errors of the solutions for each M against the richest-M solution
// (max(reference_M, max M_list)) or the limiting-absorption reference.
ConvergenceTable run_convergence(const Workspace& ws, const std::vector<int>& M_list, Reference reference,
                                 int reference_M = 10);
ConvergenceTable run_convergence(const std::string& config_path, const std::vector<int>& M_list, Reference reference,
                                 int reference_M = 10);

// Least-squares slope of log(y) against x.
double log_linear_slope(const std::vector<int>& x, const std::vector<double>& y);

// Samples on an nx x ny grid over the mesh bounds: "x1,x2,re,im,abs,inside"; points outside
// the domain have inside = 0 and nan values.
void emit_field_plot_data(const fem::SolutionField& field, int nx, int ny, std::ostream& out);

// Closed-form oracle invariants; writes one PASS/FAIL line each and returns true if all pass.
bool check(std::ostream& out);

}  // namespace guidewave::cli
