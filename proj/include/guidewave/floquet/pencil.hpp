#pragma once

#include <cstdint>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "guidewave/core/refractive_index.hpp"
#include "guidewave/core/types.hpp"

namespace guidewave::floquet {

using SparseMatrixC = Eigen::SparseMatrix<cplx>;

// Fourier-Galerkin quadratic pencil (B + alpha A - alpha^2 I) v = 0 of the quasi-periodic cell
// problem in the basis exp(2 pi i j x1 / L) sin(pi l x2 / H).
struct QuadraticPencil {
  SparseMatrixC B;          // Laplacian symbol plus k^2 times the multiplication operator
  Eigen::VectorXcd A_diag;  // diagonal of A: -4 pi j / L
  SparseMatrixC mult_q;     // coefficient map of v -> q v (truncated)
  int N = 0;
  double k = 0.0;
  CellSpec cell;
  double B_frobenius = 0.0;
  std::uint64_t q_fingerprint = 0;

  int dim() const { return static_cast<int>(A_diag.size()); }
  Eigen::MatrixXcd dense_B() const { return Eigen::MatrixXcd(B); }
  Eigen::MatrixXcd dense_A() const { return A_diag.asDiagonal(); }

  // P(alpha) = B + alpha A - alpha^2 I.
  SparseMatrixC evaluate(cplx alpha) const;
};

// Coefficient matrix of the multiplication v -> q v restricted to the truncated sine basis.
// Only the periodic part of q enters.
SparseMatrixC multiplication_matrix(const RefractiveIndex& q, CellSpec cell, int N);

// Throws ConfigError when the table's j-bandwidth exceeds 2N.
QuadraticPencil build_pencil(const RefractiveIndex& q, double k, CellSpec cell, int N);

// Companion matrix [[0, I], [B, A]] acting on (V; alpha V).
Eigen::MatrixXcd linearize(const QuadraticPencil& p);

}  // namespace guidewave::floquet
