#include "guidewave/oracle/oracle.hpp"

#include <chrono>
#include <cmath>
#include <string>

#include "guidewave/core/errors.hpp"

namespace guidewave::oracle {

double reduce_quasimomentum(double alpha_re, double L) {
  const double period = 2.0 * kPi / L;
  double a = alpha_re - period * std::round(alpha_re / period);
  if (a <= -kPi / L + 1e-12 * period) a += period;
  return a;
}

std::vector<cplx> laplace_spectrum(int N, int M, CellSpec cell) {
  if (N < 1 || M < 1) throw ConfigError("truncation parameters must be positive");
  cell.validate();
  std::vector<cplx> out;
  for (int l = 1; l < M; ++l) {
    out.emplace_back(0.0, kPi * l / cell.H);
    out.emplace_back(0.0, -kPi * l / cell.H);
  }
  return out;
}

ConstantQSpectrum constant_q_modes(double c, double k, int M, CellSpec cell) {
  cell.validate();
  ConstantQSpectrum s;
  const double k2c = k * k * c;
  const double height = kPi * M / cell.H;
  for (int l = 1;; ++l) {
    const double t = kPi * l / cell.H;
    const double d = k2c - t * t;
    // Evanescent decay rates grow with l; stop once they leave the rectangle |Im alpha| < pi M / H.
    if (d < 0.0 && std::sqrt(-d) >= height * (1.0 - 1e-12)) break;
    if (std::abs(d) <= 1e-12 * std::max(1.0, k2c)) {
      s.cutoff_ells.push_back(l);
      continue;
    }
    if (d > 0.0) {
      const double beta = std::sqrt(d);
      for (int sign : {1, -1}) {
        s.modes.push_back({cplx(reduce_quasimomentum(sign * beta, cell.L), 0.0), l, true, sign});
      }
    } else {
      const double kappa = std::sqrt(-d);
      s.modes.push_back({cplx(0.0, kappa), l, false, 0});
      s.modes.push_back({cplx(0.0, -kappa), l, false, 0});
    }
  }
  return s;
}

fem::SolutionField lap_reference(const fem::JunctionProblem& problem, const fem::DomainLayout& layout, double epsilon,
                                 int buffer_cells, double h, LapReport* report) {
  if (!(epsilon > 0.0)) throw ConfigError("limiting absorption requires epsilon > 0");
  if (buffer_cells < 5) throw ConfigError("limiting absorption requires at least 5 buffer cells");
  const auto t0 = std::chrono::steady_clock::now();

  fem::JunctionProblem p = problem;
  p.absorption = epsilon;
  p.dtn_plus.reset();
  p.dtn_minus.reset();

  auto big = std::make_shared<const fem::Mesh>(fem::generate_mesh(layout.regions(buffer_cells), h));
  fem::SolveReport sr;
  const fem::SolutionField u = fem::solve(p, big, &sr);

  // Decay check: compare the outermost buffer cell of every guide with the global maximum.
  double umax = 0.0, far = 0.0;
  const auto& space = u.space();
  for (int d = 0; d < space.num_dofs(); ++d) {
    const double a = std::abs(u.values()[d]);
    umax = std::max(umax, a);
    const Point x = space.dof_position(d);
    for (Side side : {Side::Plus, Side::Minus}) {
      const auto& g = layout.guide(side);
      if (!g) continue;
      const double end = layout.interface_x1(side) + (side == Side::Plus ? 1.0 : -1.0) * buffer_cells * g->cell.L;
      if (std::abs(x.x() - end) <= g->cell.L && x.y() >= g->y0 && x.y() <= g->y0 + g->cell.H) far = std::max(far, a);
    }
  }
  const double ratio = umax > 0.0 ? far / umax : 0.0;
  if (ratio > 1e-3) {
    throw InsufficientDecayError("field in the outermost buffer cell is " + std::to_string(ratio) +
                                 " of its maximum; increase buffer_cells or epsilon");
  }

  auto small = std::make_shared<const fem::Mesh>(fem::generate_mesh(layout.regions(), h));
  fem::SolutionField restricted = fem::interpolate(u, small);
  if (report) {
    report->dofs = sr.dofs;
    report->residual = sr.residual;
    report->far_ratio = ratio;
    report->seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
  return restricted;
}

}  // namespace guidewave::oracle
