#include "guidewave/dtn/dtn_operator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include <Eigen/Eigenvalues>

#include "guidewave/core/errors.hpp"
#include "guidewave/core/quadrature.hpp"

namespace guidewave::dtn {

InterfaceQuadrature make_interface_quadrature(const InterfaceSegment& seg, int order, int N) {
  if (order < 1) throw ConfigError("interface quadrature order must be >= 1");
  std::vector<double> bp = seg.breakpoints;
  if (bp.empty()) bp = {seg.y0, seg.y0 + seg.H};
  std::sort(bp.begin(), bp.end());
  const double tol = 1e-12 * (1.0 + std::abs(seg.y0) + seg.H);
  if (std::abs(bp.front() - seg.y0) > tol || std::abs(bp.back() - (seg.y0 + seg.H)) > tol) {
    throw ConfigError("interface breakpoints do not span the guide cross-section");
  }
  const GaussRule g = gauss_legendre(order / 2 + 1);
  const double max_piece = seg.H / std::max(N, 1);
  InterfaceQuadrature q;
  for (std::size_t i = 0; i + 1 < bp.size(); ++i) {
    const double len = bp[i + 1] - bp[i];
    if (len <= tol) continue;
    const int pieces = static_cast<int>(std::ceil(len / max_piece - 1e-9));
    for (int p = 0; p < pieces; ++p) {
      const double a = bp[i] + len * p / pieces;
      const double b = bp[i] + len * (p + 1) / pieces;
      for (std::size_t k = 0; k < g.nodes.size(); ++k) {
        q.x2.push_back(a + (b - a) * g.nodes[k]);
        q.weights.push_back((b - a) * g.weights[k]);
      }
    }
  }
  return q;
}

DtnOperator::DtnOperator(floquet::ModeBasis basis, InterfaceSegment seg, int quadrature_order,
                         const Tolerances& tol)
    : basis_(std::move(basis)), seg_(std::move(seg)) {
  if (basis_.modes.empty()) throw ConfigError("DtN operator needs a nonempty mode basis");
  if (basis_.side != seg_.side) throw ConfigError("mode basis and interface belong to different sides");
  if (std::abs(basis_.cell.H - seg_.H) > 1e-12 * seg_.H) {
    throw ConfigError("interface height does not match the guide cell height");
  }
  quad_ = make_interface_quadrature(seg_, quadrature_order, basis_.N);
  const int nq = static_cast<int>(quad_.x2.size());
  const int m = static_cast<int>(basis_.size());
  const double sign = seg_.side == Side::Plus ? 1.0 : -1.0;

  // Interfaces sit on cell boundaries, so traces are taken at local x1 = 0; the constant
  // factor z^n of the actual cell index cancels in the DtN map.
  phi_.resize(nq, m);
  psi_.resize(nq, m);
  for (int c = 0; c < m; ++c) {
    for (int r = 0; r < nq; ++r) {
      const Point x(0.0, quad_.x2[r] - seg_.y0);
      phi_(r, c) = floquet::eval_mode(basis_.modes[c], 0, x, false);
      psi_(r, c) = sign * floquet::eval_mode(basis_.modes[c], 0, x, true);
    }
  }
  const Eigen::Map<const Eigen::VectorXd> w(quad_.weights.data(), nq);
  gram_ = phi_.adjoint() * w.asDiagonal() * phi_;
  gram_ = 0.5 * (gram_ + gram_.adjoint()).eval();

  llt_.compute(gram_);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(gram_);
  const Eigen::VectorXd mu = eig.eigenvalues();
  if (llt_.info() != Eigen::Success || mu(0) <= 0.0) {
    // Report the pair of modes whose traces are closest to parallel.
    int ja = 0, jb = std::min(1, m - 1);
    double worst = -1.0;
    for (int a = 0; a < m; ++a) {
      for (int b = a + 1; b < m; ++b) {
        const double cosang = std::abs(gram_(a, b)) / std::sqrt(std::abs(gram_(a, a) * gram_(b, b)));
        if (cosang > worst) worst = cosang, ja = a, jb = b;
      }
    }
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "Gram matrix of %s mode traces is not positive definite; modes %d and %d are "
                  "collinear (|cos| = %.3g). Lower M or raise N.",
                  to_string(seg_.side).c_str(), ja, jb, worst);
    throw GramError(buf);
  }
  condition_ = mu(m - 1) / mu(0);
  if (condition_ > tol.gram_condition_warn) {
    regularized_ = true;
    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "%s Gram matrix condition %.3g exceeds %.3g; using a truncated spectral solve",
                  to_string(seg_.side).c_str(), condition_, tol.gram_condition_warn);
    warnings_.emplace_back(buf);
    Eigen::VectorXd inv = Eigen::VectorXd::Zero(m);
    for (int i = 0; i < m; ++i) {
      if (mu(i) >= 1e-12 * mu(m - 1)) inv(i) = 1.0 / mu(i);
    }
    pinv_ = eig.eigenvectors() * inv.asDiagonal() * eig.eigenvectors().adjoint();
  }
}

Eigen::MatrixXcd DtnOperator::solve_gram(const Eigen::MatrixXcd& rhs) const {
  return regularized_ ? Eigen::MatrixXcd(pinv_ * rhs) : Eigen::MatrixXcd(llt_.solve(rhs));
}

Eigen::MatrixXcd DtnOperator::project(const Eigen::MatrixXcd& g) const {
  const Eigen::Map<const Eigen::VectorXd> w(quad_.weights.data(), static_cast<Eigen::Index>(quad_.weights.size()));
  return phi_.adjoint() * w.asDiagonal() * g;
}

Eigen::MatrixXcd DtnOperator::interface_block(const Eigen::MatrixXd& fe_traces) const {
  const Eigen::Map<const Eigen::VectorXd> w(quad_.weights.data(), static_cast<Eigen::Index>(quad_.weights.size()));
  const Eigen::MatrixXcd traces = fe_traces.cast<cplx>();
  const Eigen::MatrixXcd coeffs = solve_gram(project(traces));           // modes x dofs
  const Eigen::MatrixXcd neumann = psi_ * coeffs;                       // nodes x dofs
  return traces.transpose() * w.asDiagonal() * neumann;                 // FE traces are real
}

DtnOperator build_gram(const floquet::ModeBasis& basis, const InterfaceSegment& seg, int quadrature_order,
                       const Tolerances& tol) {
  return DtnOperator(basis, seg, quadrature_order, tol);
}

Eigen::VectorXcd decompose_trace(const DtnOperator& op, const Eigen::VectorXcd& g) {
  if (g.size() != static_cast<Eigen::Index>(op.quadrature().x2.size())) {
    throw ConfigError("decompose_trace: samples do not match the interface quadrature");
  }
  return op.solve_gram(op.project(g));
}

Eigen::VectorXcd neumann_functional(const DtnOperator& op, const Eigen::VectorXcd& g) {
  return op.normal_derivatives() * decompose_trace(op, g);
}

double boundedness_constant(const DtnOperator& op, int lmax) {
  const auto& q = op.quadrature();
  const int nq = static_cast<int>(q.x2.size());
  const double H = op.segment().H;
  double best = 0.0;
  for (int l = 1; l <= lmax; ++l) {
    Eigen::VectorXcd g(nq);
    for (int r = 0; r < nq; ++r) g(r) = std::sin(kPi * l * (q.x2[r] - op.segment().y0) / H);
    const Eigen::VectorXcd t = neumann_functional(op, g);
    double tn = 0.0;
    for (int r = 0; r < nq; ++r) tn += q.weights[r] * std::norm(t(r));
    const double h1 = (1.0 + std::pow(kPi * l / H, 2)) * H / 2.0;
    best = std::max(best, std::sqrt(tn / h1));
  }
  return best;
}

}  // namespace guidewave::dtn
