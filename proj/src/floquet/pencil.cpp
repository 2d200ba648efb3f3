#include "guidewave/floquet/pencil.hpp"

#include <vector>

#include "guidewave/core/errors.hpp"
#include "guidewave/core/fourier_index.hpp"

namespace guidewave::floquet {

SparseMatrixC multiplication_matrix(const RefractiveIndex& q, CellSpec cell, int N) {
  const int d = fourier_dim(N);
  // With q = sum_m qhat(j, m) cos(pi m x2 / H) and the symmetric cosine coefficients
  // qs(j, 0) = qhat(j, 0), qs(j, +-m) = qhat(j, m) / 2, the product q * sin(pi l' x2 / H) has
  // sine coefficient qs(j - j', l - l') - qs(j - j', l + l') at (j, l).
  auto qs = [&q](int j, int m) { return m == 0 ? q.qhat(j, 0) : 0.5 * q.qhat(j, m); };
  std::vector<Eigen::Triplet<cplx>> triplets;
  for (int j = -N; j <= N; ++j) {
    for (int l = 1; l <= N; ++l) {
      const int row = flat_index(N, {j, l});
      for (const auto& c : q.table()) {
        const int jp = j - c.j;
        if (jp < -N || jp > N) continue;
        // Columns l' with |l - l'| = m contribute +qs, with l + l' = m contribute -qs.
        // Each table entry (c.j, c.l) is visited once; both signs of the l-difference are
        // handled here, so the entry stands for the pair (c.j, +-c.l).
        const int m = c.l;
        const cplx half = qs(c.j, m);
        if (m == 0) {
          triplets.emplace_back(row, flat_index(N, {jp, l}), half);
          continue;
        }
        if (l - m >= 1) triplets.emplace_back(row, flat_index(N, {jp, l - m}), half);
        if (l + m <= N) triplets.emplace_back(row, flat_index(N, {jp, l + m}), half);
        if (m - l >= 1 && m - l <= N) triplets.emplace_back(row, flat_index(N, {jp, m - l}), -half);
      }
    }
  }
  (void)cell;
  SparseMatrixC mat(d, d);
  mat.setFromTriplets(triplets.begin(), triplets.end());
  mat.prune(cplx(0.0));
  return mat;
}

QuadraticPencil build_pencil(const RefractiveIndex& q, double k, CellSpec cell, int N) {
  cell.validate();
  const int d = fourier_dim(N);
  if (q.bandwidth_j() > 2 * N) {
    throw ConfigError("qhat bandwidth " + std::to_string(q.bandwidth_j()) + " in j exceeds 2N=" +
                      std::to_string(2 * N) + "; raise N");
  }
  QuadraticPencil p;
  p.N = N;
  p.k = k;
  p.cell = cell;
  p.q_fingerprint = q.fingerprint();
  p.mult_q = multiplication_matrix(q, cell, N);
  p.A_diag.resize(d);
  SparseMatrixC D(d, d);
  D.reserve(Eigen::VectorXi::Constant(d, 1));
  for (int j = -N; j <= N; ++j) {
    const double kj = 2.0 * kPi * j / cell.L;
    for (int l = 1; l <= N; ++l) {
      const int f = flat_index(N, {j, l});
      const double kl = kPi * l / cell.H;
      D.insert(f, f) = -(kj * kj) - kl * kl;
      p.A_diag(f) = -4.0 * kPi * j / cell.L;
    }
  }
  p.B = D + (k * k) * p.mult_q;
  p.B.makeCompressed();
  p.B_frobenius = p.B.norm();
  return p;
}

SparseMatrixC QuadraticPencil::evaluate(cplx alpha) const {
  const int d = dim();
  SparseMatrixC diag(d, d);
  diag.reserve(Eigen::VectorXi::Constant(d, 1));
  for (int f = 0; f < d; ++f) diag.insert(f, f) = alpha * A_diag(f) - alpha * alpha;
  SparseMatrixC P = B + diag;
  P.makeCompressed();
  return P;
}

Eigen::MatrixXcd linearize(const QuadraticPencil& p) {
  const int d = p.dim();
  Eigen::MatrixXcd L = Eigen::MatrixXcd::Zero(2 * d, 2 * d);
  L.topRightCorner(d, d).setIdentity();
  L.bottomLeftCorner(d, d) = p.dense_B();
  L.bottomRightCorner(d, d).diagonal() = p.A_diag;
  return L;
}

}  // namespace guidewave::floquet
