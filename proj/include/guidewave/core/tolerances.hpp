#pragma once

namespace guidewave {

// Numerical tolerances shared by the mode solver, the DtN operator and the reference solver.
struct Tolerances {
  double unit_circle = 1e-6;           // |Im alpha| below this counts as propagating
  double pencil_residual = 1e-8;       // relative to ||B||_F
  double gram_condition_warn = 1e10;   // warn (and regularize) above this Gram condition number
  double lap_epsilon = 1e-2;           // absorption of the reference solver

  void validate() const;

  // Radius used to group numerically repeated eigenvalues.
  double cluster_radius() const { return 10.0 * unit_circle; }
};

}  // namespace guidewave
