#pragma once

#include <vector>

#include <Eigen/Sparse>

#include "guidewave/fem/p3_space.hpp"
#include "guidewave/fem/problem.hpp"

namespace guidewave::fem {

using SparseMatrixC = Eigen::SparseMatrix<cplx>;
using SparseMatrixR = Eigen::SparseMatrix<double>;

// Stiffness K_ab = int grad phi_b . grad phi_a and weighted mass M_ab = int q phi_b phi_a.
struct VolumeMatrices {
  SparseMatrixR K;
  SparseMatrixR M;
};

VolumeMatrices assemble_volume(const P3Space& space, const std::function<double(const Point&, RegionKind)>& q);

// FE traces (quadrature nodes x interface dofs) of the basis functions on one interface,
// with the global dof of each column.
struct InterfaceTraces {
  Eigen::MatrixXd values;
  std::vector<int> dofs;
};

InterfaceTraces interface_traces(const P3Space& space, const dtn::DtnOperator& op);

// Linear system on the free (unconstrained) dofs:
//   S = K - (k^2 + i absorption) M - D_plus - D_minus,  F = -int f phi - S_fc u_c.
struct AssembledSystem {
  SparseMatrixC S;
  Eigen::VectorXcd F;
  std::vector<int> free_dofs;     // reduced index -> global dof
  Eigen::VectorXcd constrained;   // global vector holding wall / Dirichlet values, zero elsewhere
  int num_dofs = 0;

  // Global coefficient vector from a reduced solution.
  Eigen::VectorXcd expand(const Eigen::VectorXcd& reduced) const;
};

AssembledSystem assemble(const JunctionProblem& problem, const P3Space& space);

// Sparse LU solve; throws SingularSystemError when the factorization fails or the relative
// residual stays above 1e-10 after refinement. `residual` receives the final relative residual.
Eigen::VectorXcd solve_sparse(const SparseMatrixC& S, const Eigen::VectorXcd& F, double* residual = nullptr);

}  // namespace guidewave::fem
