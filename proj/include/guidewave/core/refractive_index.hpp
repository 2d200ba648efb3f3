#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "guidewave/core/types.hpp"

namespace guidewave {

// One entry [j, l, re, im] of a coefficient table.
struct FourierCoefficient {
  int j = 0;
  int l = 0;
  cplx value{0.0, 0.0};
};

// Compactly supported real perturbation with its declared support.
struct Perturbation {
  std::function<double(const Point&)> fn;
  Box support;
};

// Refractive index q(x) = sum_{j, l >= 0} qhat(j, l) exp(2 pi i j x1 / L) cos(pi l x2 / H) + q2(x).
// The periodic part is expressed in cell coordinates relative to `origin`, i.e. the
// point `origin` maps to the cell corner (0, 0).
class RefractiveIndex {
 public:
  RefractiveIndex() = default;
  RefractiveIndex(CellSpec cell, std::vector<FourierCoefficient> table, Point origin = Point(0.0, 0.0));

  static RefractiveIndex constant(double c, CellSpec cell = {}, Point origin = Point(0.0, 0.0));

  const CellSpec& cell() const { return cell_; }
  const Point& origin() const { return origin_; }
  const std::vector<FourierCoefficient>& table() const { return table_; }

  // Coefficient lookup with the even extension qhat(j, -l) = qhat(j, l); zero outside the table.
  cplx qhat(int j, int l) const;

  // Largest |j| and largest l present in the table.
  int bandwidth_j() const { return band_j_; }
  int bandwidth_l() const { return band_l_; }

  void set_perturbation(Perturbation p) { perturbation_ = std::move(p); }
  bool has_perturbation() const { return perturbation_.has_value(); }

  // Periodic part only, at a global point.
  double eval_periodic(const Point& x) const;

  // Periodic part plus perturbation.
  double eval(const Point& x) const;

  // Max of |q_periodic| and min of q_periodic over a uniform sampling grid of one cell.
  double sup_norm(int samples = 512) const;
  double min_value(int samples = 256) const;

  // Stable 64-bit fingerprint of the cell and the periodic table.
  std::uint64_t fingerprint() const;

 private:
  cplx eval_sum(const Point& local) const;

  CellSpec cell_{};
  std::vector<FourierCoefficient> table_;
  Point origin_{0.0, 0.0};
  std::optional<Perturbation> perturbation_;
  int band_j_ = 0;
  int band_l_ = 0;
};

// Value of q at a point, with the imaginary residue of the Fourier sum checked.
double eval_refractive_index(const RefractiveIndex& q, const Point& x);

}  // namespace guidewave
