#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "guidewave/core/tolerances.hpp"
#include "guidewave/floquet/modes.hpp"

namespace guidewave::dtn {

// Vertical interface segment {x1} x (y0, y0 + H) where a half-guide is cut off.
// `breakpoints` are the x2 coordinates of mesh vertices on the segment (ends included);
// quadrature is composite over them so that piecewise-polynomial traces are integrated exactly.
struct InterfaceSegment {
  Side side = Side::Plus;
  double x1 = 0.0;
  double y0 = 0.0;
  double H = 1.0;
  std::vector<double> breakpoints;
};

// Composite Gauss rule on the interface, in physical x2.
struct InterfaceQuadrature {
  std::vector<double> x2;
  std::vector<double> weights;
};

// Each breakpoint interval is split further until pieces are no longer than H / N, then gets a
// Gauss rule exact for polynomials of degree `order`.
InterfaceQuadrature make_interface_quadrature(const InterfaceSegment& seg, int order, int N);

// Dirichlet-to-Neumann map of one half-guide truncated to its mode basis. Traces are decomposed
// in the L2 sense: G c = b with G = <phi_l, phi_j> and b_j = <g, phi_j> on the interface. The
// Neumann datum is the outward normal derivative: +d/dx1 on side Plus, -d/dx1 on side Minus.
class DtnOperator {
 public:
  DtnOperator(floquet::ModeBasis basis, InterfaceSegment seg, int quadrature_order, const Tolerances& tol);

  Side side() const { return seg_.side; }
  const floquet::ModeBasis& basis() const { return basis_; }
  const InterfaceSegment& segment() const { return seg_; }
  const InterfaceQuadrature& quadrature() const { return quad_; }
  std::size_t size() const { return basis_.size(); }

  // Mode traces and outward normal derivatives at the quadrature nodes (nodes x modes).
  const Eigen::MatrixXcd& traces() const { return phi_; }
  const Eigen::MatrixXcd& normal_derivatives() const { return psi_; }
  const Eigen::MatrixXcd& gram() const { return gram_; }

  double condition_number() const { return condition_; }
  bool regularized() const { return regularized_; }
  const std::vector<std::string>& warnings() const { return warnings_; }

  // Solve G c = rhs (columns independent).
  Eigen::MatrixXcd solve_gram(const Eigen::MatrixXcd& rhs) const;

  // b = Phi^H W g for samples g at the quadrature nodes (one column per function).
  Eigen::MatrixXcd project(const Eigen::MatrixXcd& g) const;

  // Interface block Phi_h^H W Psi G^{-1} Phi^H W Phi_h for real FE traces Phi_h (nodes x dofs):
  // entry (a, b) is <T phi_b, phi_a> for FE basis functions phi_a, phi_b.
  Eigen::MatrixXcd interface_block(const Eigen::MatrixXd& fe_traces) const;

 private:
  floquet::ModeBasis basis_;
  InterfaceSegment seg_;
  InterfaceQuadrature quad_;
  Eigen::MatrixXcd phi_;
  Eigen::MatrixXcd psi_;
  Eigen::MatrixXcd gram_;
  Eigen::LLT<Eigen::MatrixXcd> llt_;
  Eigen::MatrixXcd pinv_;  // used when regularized
  double condition_ = 1.0;
  bool regularized_ = false;
  std::vector<std::string> warnings_;
};

DtnOperator build_gram(const floquet::ModeBasis& basis, const InterfaceSegment& seg, int quadrature_order,
                       const Tolerances& tol = {});

// Coefficients c with sum c_m phi_m the L2 projection of g onto the mode traces.
Eigen::VectorXcd decompose_trace(const DtnOperator& op, const Eigen::VectorXcd& g);

// Outward normal derivative of the mode expansion of g, sampled at the quadrature nodes.
Eigen::VectorXcd neumann_functional(const DtnOperator& op, const Eigen::VectorXcd& g);

// max over sin(pi l (x2 - y0) / H), l = 1..lmax, of ||T g||_L2 / ||g||_H1, with the H1 norm
// taken from the sine series (1 + (pi l / H)^2) weights.
double boundedness_constant(const DtnOperator& op, int lmax);

}  // namespace guidewave::dtn
