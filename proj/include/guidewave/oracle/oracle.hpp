#pragma once

#include <vector>

#include "guidewave/fem/solution.hpp"

namespace guidewave::oracle {

// Quasimomentum reduced into the window (-pi/L, pi/L].
double reduce_quasimomentum(double alpha_re, double L);

// Closed-form spectrum for q = 0: alpha = -2 pi j / L +- i pi l / H; inside the window
// these are +- i pi l / H for l = 1..M-1 (independent of k and N).
std::vector<cplx> laplace_spectrum(int N, int M, CellSpec cell = {});

struct ConstantQMode {
  cplx alpha;         // reduced into the window
  int ell = 0;
  bool propagating = false;
  int direction = 0;  // +1 right-going, -1 left-going (propagating modes only)
};

struct ConstantQSpectrum {
  std::vector<ConstantQMode> modes;
  std::vector<int> cutoff_ells;  // l with k^2 c = (pi l / H)^2: standing-wave boundary
  bool at_cutoff() const { return !cutoff_ells.empty(); }
};

// Closed-form modes of q = c: (alpha + 2 pi j / L)^2 = k^2 c - (pi l / H)^2, for every l whose
// roots lie in the rectangle |Im alpha| < pi M / H (which may include l >= M when k^2 c > 0).
ConstantQSpectrum constant_q_modes(double c, double k, int M, CellSpec cell = {});

struct LapReport {
  int dofs = 0;
  double residual = 0.0;
  double far_ratio = 0.0;  // max |u| in the outermost buffer cells / max |u|
  double seconds = 0.0;
};

// Limiting-absorption reference: solves  Delta u + (k^2 + i epsilon) q u = f  on the domain
// extended by `buffer_cells` periods per guide with walls at the far ends (no DtN terms), and
// returns the nodal restriction to the truncated domain meshed with the same h.
// Throws InsufficientDecayError when the field in the outermost cells exceeds 1e-3 of its maximum.
fem::SolutionField lap_reference(const fem::JunctionProblem& problem, const fem::DomainLayout& layout, double epsilon,
                                 int buffer_cells, double h, LapReport* report = nullptr);

}  // namespace guidewave::oracle
