#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "guidewave/core/refractive_index.hpp"
#include "guidewave/core/tolerances.hpp"
#include "guidewave/floquet/pencil.hpp"

namespace guidewave::floquet {

enum class ModeKind { PropagatingRight, PropagatingLeft, EvanescentRight, EvanescentLeft };

std::string to_string(ModeKind kind);
ModeKind mode_kind_from_string(const std::string& name);

// Floquet-Bloch mode w(x) = exp(i alpha x1) sum v_{j,l} exp(2 pi i j x1 / L) sin(pi l x2 / H).
struct FloquetMode {
  cplx alpha;                 // quasimomentum per unit length, Re alpha in (-pi/L, pi/L]
  Eigen::VectorXcd coeffs;    // v_{j,l}, flat-indexed
  ModeKind kind = ModeKind::EvanescentRight;
  std::optional<double> lambda;  // energy flux, propagating modes only
  // Sign of k * int q |phi|^2 after normalization; -1 can only occur for indefinite q.
  int norm_sign = 1;
  double residual = 0.0;      // ||P(alpha) v|| / ||B||_F
  int N = 0;
  CellSpec cell;

  cplx z() const { return std::exp(cplx(0.0, 1.0) * alpha * cell.L); }
  bool propagating() const {
    return kind == ModeKind::PropagatingRight || kind == ModeKind::PropagatingLeft;
  }
};

// Modes radiating into one half-guide, propagating ones first.
struct ModeBasis {
  Side side = Side::Plus;
  std::vector<FloquetMode> modes;
  int N = 0;
  int M = 0;
  int J = 0;  // number of propagating modes
  CellSpec cell;
  double k = 0.0;
  std::uint64_t q_fingerprint = 0;

  std::size_t size() const { return modes.size(); }
};

struct ModeSolveReport {
  int companion_size = 0;
  int eigenvalues_in_window = 0;
  int rejected_by_residual = 0;
  int clusters = 0;
  double max_residual = 0.0;
  double seconds_eigenvalues = 0.0;
  double seconds_vectors = 0.0;
};

// All eigenpairs with Re alpha in (-pi/L, pi/L] and |Im alpha| < pi M / H, with pencil residual
// below tolerance. Coefficient vectors are normalized to unit 2-norm. Propagating modes come
// back with kind PropagatingRight and no lambda until classified.
std::vector<FloquetMode> solve_modes(const QuadraticPencil& p, int M, const Tolerances& tol,
                                     ModeSolveReport* report = nullptr);

// Subset of `modes` inside the rectangle |Im alpha| < pi M / H, with the same edge margin as solve_modes.
std::vector<FloquetMode> restrict_to_rectangle(const std::vector<FloquetMode>& modes, int M,
                                                 const Tolerances& tol = {});

// Splits modes into the plus and minus bases; propagating clusters are orthonormalized so that
// k int q phi_j conj(phi_j') = delta_jj' on one cell and carry their energy flux lambda.
std::pair<ModeBasis, ModeBasis> classify_and_orthonormalize(const std::vector<FloquetMode>& modes,
                                                            const QuadraticPencil& p, int M,
                                                            const Tolerances& tol);

// w(x) z^n for cell index n and x in the reference cell; with derivative=true, d/dx1 of it.
cplx eval_mode(const FloquetMode& m, int n, const Point& x, bool derivative);

// Closed-form cell integrals of a mode pair: k int q phi_s conj(phi_r) and
// -i int d1 phi_s conj(phi_r) (real alpha assumed).
cplx cell_q_product(const QuadraticPencil& p, const FloquetMode& s, const FloquetMode& r);
cplx cell_flux_product(const FloquetMode& s, const FloquetMode& r);

// Smallest n with pi (2n - 1) / 2 >= k^2 ||q||_inf / pi (reference cell).
int strip_threshold(double k, const RefractiveIndex& q);

// Radius 2 k^2 ||q||_inf / (pi (2n - 1)) of the disc around i pi n holding the strip eigenvalue.
double strip_disc_radius(int n, double k, const RefractiveIndex& q);

// Number of alpha with Im alpha in [(n - 1/2) pi, (n + 1/2) pi); throws SpectralTruncationError
// when it differs from one for n >= strip_threshold.
int eigencount_in_strip(const std::vector<FloquetMode>& modes, int n, double k, const RefractiveIndex& q);

}  // namespace guidewave::floquet
