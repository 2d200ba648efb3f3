#include "guidewave/floquet/modes.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseLU>

// LAPACK's C interface takes std::complex when these are defined before its headers.
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include "guidewave/core/errors.hpp"
#include "guidewave/core/fourier_index.hpp"

namespace guidewave::floquet {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Eigenvalues of a dense complex matrix (destroyed on exit).
Eigen::VectorXcd dense_eigenvalues(Eigen::MatrixXcd& mat) {
  const lapack_int n = static_cast<lapack_int>(mat.rows());
  Eigen::VectorXcd w(n);
  const lapack_int info = LAPACKE_zgeev(LAPACK_COL_MAJOR, 'N', 'N', n, mat.data(), n, w.data(),
                                        nullptr, 1, nullptr, 1);
  if (info != 0) {
    throw EigensolverError("dense eigensolver failed (info=" + std::to_string(info) +
                           ") on companion matrix of size " + std::to_string(n));
  }
  return w;
}

// Single-linkage grouping of values closer than `radius`; groups are returned in index order.
std::vector<std::vector<int>> cluster(const std::vector<cplx>& values, double radius) {
  const int n = static_cast<int>(values.size());
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&parent](int a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      if (std::abs(values[a] - values[b]) < radius) parent[find(a)] = find(b);
    }
  }
  std::vector<std::vector<int>> groups;
  std::vector<int> slot(n, -1);
  for (int a = 0; a < n; ++a) {
    const int r = find(a);
    if (slot[r] < 0) {
      slot[r] = static_cast<int>(groups.size());
      groups.emplace_back();
    }
    groups[slot[r]].push_back(a);
  }
  return groups;
}

// Orthonormal basis of the near-null space of P(sigma) of dimension m, by block inverse
// iteration with a slightly perturbed shift.
Eigen::MatrixXcd near_null_space(const QuadraticPencil& p, cplx sigma, int m, std::mt19937& rng) {
  const int d = p.dim();
  const cplx shift = sigma + 1e-9 * (1.0 + std::abs(sigma)) * std::exp(cplx(0.0, 0.7));
  Eigen::SparseLU<SparseMatrixC> lu;
  lu.compute(p.evaluate(shift));
  if (lu.info() != Eigen::Success) {
    throw EigensolverError("inverse iteration: factorization of the shifted pencil failed at alpha=" +
                           std::to_string(sigma.real()) + "+" + std::to_string(sigma.imag()) + "i");
  }
  std::normal_distribution<double> normal;
  Eigen::MatrixXcd Y(d, m);
  for (int c = 0; c < m; ++c) {
    for (int r = 0; r < d; ++r) Y(r, c) = cplx(normal(rng), normal(rng));
  }
  for (int it = 0; it < 3; ++it) {
    Eigen::MatrixXcd X = lu.solve(Y);
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(X);
    Y = qr.householderQ() * Eigen::MatrixXcd::Identity(d, m);
  }
  return Y;
}

double pencil_residual(const QuadraticPencil& p, cplx alpha, const Eigen::VectorXcd& v) {
  const Eigen::VectorXcd r = p.B * v + (alpha * p.A_diag - Eigen::VectorXcd::Constant(p.dim(), alpha * alpha))
                                           .cwiseProduct(v);
  return r.norm() / std::max(p.B_frobenius, 1e-300);
}

// Fix the arbitrary phase: the largest coefficient becomes real positive.
void normalize_phase(Eigen::VectorXcd& v) {
  Eigen::Index imax = 0;
  v.cwiseAbs().maxCoeff(&imax);
  const cplx ref = v(imax);
  if (std::abs(ref) > 0.0) v *= std::abs(ref) / ref;
}

ModeKind kind_from_alpha(cplx alpha, double tau) {
  if (std::abs(alpha.imag()) < tau) return ModeKind::PropagatingRight;
  return alpha.imag() > 0.0 ? ModeKind::EvanescentRight : ModeKind::EvanescentLeft;
}

bool mode_less(const FloquetMode& a, const FloquetMode& b) {
  const bool pa = a.propagating(), pb = b.propagating();
  if (pa != pb) return pa;
  if (!pa) {
    const double ia = std::abs(a.alpha.imag()), ib = std::abs(b.alpha.imag());
    if (std::abs(ia - ib) > 1e-12 * (1.0 + ia)) return ia < ib;
    return a.alpha.real() < b.alpha.real();
  }
  if (std::abs(a.alpha.real() - b.alpha.real()) > 1e-12) return a.alpha.real() < b.alpha.real();
  return a.lambda.value_or(0.0) > b.lambda.value_or(0.0);
}

}  // namespace

std::string to_string(ModeKind kind) {
  switch (kind) {
    case ModeKind::PropagatingRight: return "propagating_right";
    case ModeKind::PropagatingLeft: return "propagating_left";
    case ModeKind::EvanescentRight: return "evanescent_right";
    case ModeKind::EvanescentLeft: return "evanescent_left";
  }
  return "evanescent_right";
}

ModeKind mode_kind_from_string(const std::string& name) {
  for (ModeKind k : {ModeKind::PropagatingRight, ModeKind::PropagatingLeft, ModeKind::EvanescentRight,
                     ModeKind::EvanescentLeft}) {
    if (to_string(k) == name) return k;
  }
  throw ConfigError("unknown mode kind '" + name + "'");
}

std::vector<FloquetMode> solve_modes(const QuadraticPencil& p, int M, const Tolerances& tol,
                                     ModeSolveReport* report) {
  if (M < 1) throw ConfigError("solve_modes: M must be >= 1");
  tol.validate();
  const int d = p.dim();
  const double re_max = kPi / p.cell.L;
  const double im_max = kPi * M / p.cell.H;
  const double delta = tol.cluster_radius();
  ModeSolveReport rep;
  rep.companion_size = 2 * d;

  auto t0 = Clock::now();
  Eigen::MatrixXcd companion = linearize(p);
  const Eigen::VectorXcd all = dense_eigenvalues(companion);
  companion.resize(0, 0);
  rep.seconds_eigenvalues = seconds_since(t0);

  // The window is shifted by delta so that a zone-edge eigenvalue at +-pi/L is kept exactly once;
  // eigenvalues on the top edge |Im alpha| = pi M / H are excluded (strict inequality).
  std::vector<cplx> kept;
  for (Eigen::Index i = 0; i < all.size(); ++i) {
    const cplx a = all(i);
    if (!std::isfinite(a.real()) || !std::isfinite(a.imag())) continue;
    if (a.real() > -re_max + delta && a.real() <= re_max + delta && std::abs(a.imag()) < im_max - delta) {
      kept.push_back(a);
    }
  }
  std::sort(kept.begin(), kept.end(), [](cplx a, cplx b) {
    return a.imag() != b.imag() ? a.imag() < b.imag() : a.real() < b.real();
  });
  rep.eigenvalues_in_window = static_cast<int>(kept.size());

  t0 = Clock::now();
  std::mt19937 rng(20240611u);
  std::vector<FloquetMode> modes;
  const auto groups = cluster(kept, delta);
  rep.clusters = static_cast<int>(groups.size());
  for (const auto& group : groups) {
    const int m = static_cast<int>(group.size());
    cplx sigma = 0.0;
    for (int idx : group) sigma += kept[idx];
    sigma /= static_cast<double>(m);

    const Eigen::MatrixXcd Y = near_null_space(p, sigma, m, rng);
    // Rayleigh-Ritz on the quadratic pencil projected onto span(Y).
    const Eigen::MatrixXcd Bp = Y.adjoint() * (p.B * Y);
    const Eigen::MatrixXcd Ap = Y.adjoint() * p.A_diag.asDiagonal() * Y;
    Eigen::MatrixXcd small = Eigen::MatrixXcd::Zero(2 * m, 2 * m);
    small.topRightCorner(m, m).setIdentity();
    small.bottomLeftCorner(m, m) = Bp;
    small.bottomRightCorner(m, m) = Ap;
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> ces(small);
    std::vector<int> order(2 * m);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      return std::abs(ces.eigenvalues()(a) - sigma) < std::abs(ces.eigenvalues()(b) - sigma);
    });
    std::vector<cplx> ritz;
    for (int i = 0; i < m; ++i) ritz.push_back(ces.eigenvalues()(order[i]));
    double spread = 0.0;
    cplx mean = 0.0;
    for (cplx r : ritz) mean += r / static_cast<double>(m);
    for (cplx r : ritz) spread = std::max(spread, std::abs(r - mean));

    std::vector<std::pair<cplx, Eigen::VectorXcd>> pairs;
    if (m > 1 && spread < 1e-9 * (1.0 + std::abs(mean))) {
      // Semisimple repeated eigenvalue: any orthonormal basis of the eigenspace will do.
      for (int c = 0; c < m; ++c) pairs.emplace_back(mean, Y.col(c));
    } else {
      for (int i = 0; i < m; ++i) {
        Eigen::VectorXcd v = Y * ces.eigenvectors().col(order[i]).head(m);
        pairs.emplace_back(ritz[i], v);
      }
    }
    for (auto& [alpha, v] : pairs) {
      const double nv = v.norm();
      if (!(nv > 0.0)) continue;
      v /= nv;
      normalize_phase(v);
      FloquetMode mode;
      mode.alpha = alpha;
      mode.coeffs = v;
      mode.kind = kind_from_alpha(alpha, tol.unit_circle);
      mode.residual = pencil_residual(p, alpha, v);
      mode.N = p.N;
      mode.cell = p.cell;
      if (mode.residual > tol.pencil_residual) {
        ++rep.rejected_by_residual;
        continue;
      }
      rep.max_residual = std::max(rep.max_residual, mode.residual);
      modes.push_back(std::move(mode));
    }
  }
  rep.seconds_vectors = seconds_since(t0);
  std::stable_sort(modes.begin(), modes.end(), mode_less);
  if (report) *report = rep;
  return modes;
}

std::vector<FloquetMode> restrict_to_rectangle(const std::vector<FloquetMode>& modes, int M,
                                                 const Tolerances& tol) {
  std::vector<FloquetMode> out;
  for (const auto& m : modes) {
    if (std::abs(m.alpha.imag()) < kPi * M / m.cell.H - tol.cluster_radius()) out.push_back(m);
  }
  return out;
}

cplx cell_q_product(const QuadraticPencil& p, const FloquetMode& s, const FloquetMode& r) {
  const double w = 0.5 * p.cell.L * p.cell.H;
  return p.k * w * r.coeffs.dot(p.mult_q * s.coeffs);
}

cplx cell_flux_product(const FloquetMode& s, const FloquetMode& r) {
  const int N = s.N;
  const double w = 0.5 * s.cell.L * s.cell.H;
  cplx sum = 0.0;
  for (int f = 0; f < s.coeffs.size(); ++f) {
    const FourierIndex idx = unflat_index(N, f);
    const double kx = s.alpha.real() + 2.0 * kPi * idx.j / s.cell.L;
    sum += kx * s.coeffs(f) * std::conj(r.coeffs(f));
  }
  return w * sum;
}

std::pair<ModeBasis, ModeBasis> classify_and_orthonormalize(const std::vector<FloquetMode>& modes,
                                                            const QuadraticPencil& p, int M,
                                                            const Tolerances& tol) {
  ModeBasis plus, minus;
  for (ModeBasis* b : {&plus, &minus}) {
    b->side = b == &plus ? Side::Plus : Side::Minus;
    b->N = p.N;
    b->M = M;
    b->cell = p.cell;
    b->k = p.k;
    b->q_fingerprint = p.q_fingerprint;
  }

  std::vector<FloquetMode> propagating;
  for (const auto& m : modes) {
    if (std::abs(m.alpha.imag()) < tol.unit_circle) {
      propagating.push_back(m);
    } else {
      FloquetMode e = m;
      e.kind = m.alpha.imag() > 0.0 ? ModeKind::EvanescentRight : ModeKind::EvanescentLeft;
      e.lambda.reset();
      (m.alpha.imag() > 0.0 ? plus : minus).modes.push_back(std::move(e));
    }
  }

  std::vector<cplx> alphas;
  for (const auto& m : propagating) alphas.push_back(m.alpha);
  for (const auto& group : cluster(alphas, tol.cluster_radius())) {
    const int m = static_cast<int>(group.size());
    double alpha = 0.0;
    for (int idx : group) alpha += propagating[idx].alpha.real() / m;
    std::vector<FloquetMode> members;
    for (int idx : group) {
      members.push_back(propagating[idx]);
      members.back().alpha = cplx(alpha, 0.0);
    }
    // P c = k lambda Q c with P, Q the flux and q-weighted cell forms.
    Eigen::MatrixXcd P(m, m), Q(m, m);
    for (int r = 0; r < m; ++r) {
      for (int s = 0; s < m; ++s) {
        P(r, s) = cell_flux_product(members[s], members[r]);
        Q(r, s) = cell_q_product(p, members[s], members[r]);  // already carries the factor k
      }
    }
    P = 0.5 * (P + P.adjoint()).eval();
    Q = 0.5 * (Q + Q.adjoint()).eval();

    Eigen::VectorXd lambdas(m);
    Eigen::MatrixXcd C(m, m);
    Eigen::LLT<Eigen::MatrixXcd> llt(Q);
    if (llt.info() == Eigen::Success) {
      Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXcd> ges(P, Q);
      lambdas = ges.eigenvalues();
      C = ges.eigenvectors();
    } else {
      // Indefinite q: the q-weighted form need not be positive on the cluster.
      Eigen::ComplexEigenSolver<Eigen::MatrixXcd> ces(Q.fullPivLu().solve(P));
      C = ces.eigenvectors();
      for (int i = 0; i < m; ++i) {
        const cplx lam = ces.eigenvalues()(i);
        if (std::abs(lam.imag()) > 1e-8 * (1.0 + std::abs(lam))) {
          throw StandingWaveError("propagating cluster at alpha=" + std::to_string(alpha) +
                                  " has complex flux eigenvalue; modes cannot be classified");
        }
        lambdas(i) = lam.real();
      }
    }
    for (int i = 0; i < m; ++i) {
      Eigen::VectorXcd c = C.col(i);
      const double qn = (c.adjoint() * Q * c)(0, 0).real();
      if (std::abs(qn) <= 1e-14) {
        throw StandingWaveError("propagating cluster at alpha=" + std::to_string(alpha) +
                                " has a combination with vanishing q-weighted norm");
      }
      c /= std::sqrt(std::abs(qn));
      const int sign = qn > 0.0 ? 1 : -1;
      // With k int q |phi|^2 = sign, the flux -i int d1 phi conj(phi) equals sign * lambda.
      const double lam = lambdas(i);
      if (std::abs(lam) <= 1e-10) {
        throw StandingWaveError("standing wave detected: propagating mode at alpha=" +
                                std::to_string(alpha) + " carries no energy flux (cut-off wavenumber)");
      }
      FloquetMode mode = members[0];
      mode.coeffs.setZero();
      for (int s = 0; s < m; ++s) mode.coeffs += c(s) * members[s].coeffs;
      mode.lambda = lam;
      mode.norm_sign = sign;
      mode.kind = lam > 0.0 ? ModeKind::PropagatingRight : ModeKind::PropagatingLeft;
      mode.residual = pencil_residual(p, mode.alpha, mode.coeffs / mode.coeffs.norm());
      (lam > 0.0 ? plus : minus).modes.push_back(std::move(mode));
    }
  }

  for (ModeBasis* b : {&plus, &minus}) {
    std::stable_sort(b->modes.begin(), b->modes.end(), mode_less);
    b->J = static_cast<int>(std::count_if(b->modes.begin(), b->modes.end(),
                                          [](const FloquetMode& m) { return m.propagating(); }));
  }
  return {std::move(plus), std::move(minus)};
}

cplx eval_mode(const FloquetMode& m, int n, const Point& x, bool derivative) {
  const int N = m.N;
  const cplx I(0.0, 1.0);
  Eigen::VectorXd sines(N);
  for (int l = 1; l <= N; ++l) sines(l - 1) = std::sin(kPi * l * x.y() / m.cell.H);
  cplx sum = 0.0;
  for (int j = -N; j <= N; ++j) {
    const cplx kx = m.alpha + 2.0 * kPi * j / m.cell.L;
    const cplx phase = std::exp(I * kx * x.x());
    cplx inner = 0.0;
    for (int l = 1; l <= N; ++l) inner += m.coeffs(flat_index(N, {j, l})) * sines(l - 1);
    sum += (derivative ? I * kx : cplx(1.0)) * phase * inner;
  }
  return sum * std::pow(m.z(), n);
}

int strip_threshold(double k, const RefractiveIndex& q) {
  const double bound = k * k * q.sup_norm() / kPi;
  int n = 1;
  while (kPi * (2 * n - 1) / 2.0 < bound) ++n;
  return n;
}

double strip_disc_radius(int n, double k, const RefractiveIndex& q) {
  return 2.0 * k * k * q.sup_norm() / (kPi * (2 * n - 1));
}

int eigencount_in_strip(const std::vector<FloquetMode>& modes, int n, double k, const RefractiveIndex& q) {
  if (!q.cell().is_reference()) {
    throw ConfigError("eigencount_in_strip is stated for the reference cell L = H = 1");
  }
  const int n0 = strip_threshold(k, q);
  if (n < n0) {
    throw ConfigError("eigencount_in_strip: n=" + std::to_string(n) + " is below the threshold N0=" +
                      std::to_string(n0));
  }
  int count = 0;
  for (const auto& m : modes) {
    const double im = m.alpha.imag();
    if (std::abs(m.alpha.real()) <= kPi + 1e-9 && im >= (n - 0.5) * kPi && im < (n + 0.5) * kPi) ++count;
  }
  if (count != 1) {
    throw SpectralTruncationError("strip " + std::to_string(n) + " holds " + std::to_string(count) +
                                  " eigenvalues instead of one; the Fourier truncation is too coarse");
  }
  return count;
}

}  // namespace guidewave::floquet
