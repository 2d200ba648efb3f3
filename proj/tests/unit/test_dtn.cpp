#include <doctest.h>

#include <cmath>
#include <random>

#include "guidewave/core/errors.hpp"
#include "guidewave/dtn/dtn_operator.hpp"
#include "guidewave/floquet/pencil.hpp"

using namespace guidewave;
using namespace guidewave::floquet;
using namespace guidewave::dtn;

namespace {

struct Bases {
  ModeBasis plus, minus;
};

Bases bases_for(const RefractiveIndex& q, double k, int N, int M, CellSpec cell = {}) {
  const QuadraticPencil p = build_pencil(q, k, cell, N);
  auto [plus, minus] = classify_and_orthonormalize(solve_modes(p, M, Tolerances{}), p, M, Tolerances{});
  return {plus, minus};
}

InterfaceSegment segment(Side side, double H = 1.0, int pieces = 10) {
  InterfaceSegment s;
  s.side = side;
  s.x1 = side == Side::Plus ? 3.0 : -3.0;
  s.H = H;
  for (int i = 0; i <= pieces; ++i) s.breakpoints.push_back(H * i / pieces);
  return s;
}

// Trace of mode m of the operator's basis at the quadrature nodes.
Eigen::VectorXcd mode_trace(const DtnOperator& op, int m) { return op.traces().col(m); }

}  // namespace

TEST_CASE("q = 0 Gram matrix is diagonal with entries 1/2") {
  const Bases b = bases_for(RefractiveIndex(CellSpec{}, {}), 1.0, 8, 5);
  const DtnOperator op = build_gram(b.plus, segment(Side::Plus), 8);
  REQUIRE(op.size() == 4);
  CHECK((op.gram() - 0.5 * Eigen::MatrixXcd::Identity(4, 4)).norm() < 1e-13);
  CHECK((op.gram() - op.gram().adjoint()).norm() < 1e-12);
  CHECK(op.condition_number() == doctest::Approx(1.0));
  // T sin(pi l x2) = -pi l sin(pi l x2) for l < M and 0 above: C = 4 pi / sqrt(1 + 16 pi^2).
  CHECK(boundedness_constant(op, 8) == doctest::Approx(4 * kPi / std::sqrt(1 + 16 * kPi * kPi)).epsilon(1e-10));
}

TEST_CASE("single-mode basis gives a positive 1x1 Gram matrix") {
  const Bases b = bases_for(RefractiveIndex(CellSpec{}, {}), 1.0, 8, 2);
  const DtnOperator op = build_gram(b.plus, segment(Side::Plus), 8);
  REQUIRE(op.size() == 1);
  CHECK(op.gram()(0, 0).real() > 0.0);
  CHECK(op.gram()(0, 0).imag() == 0.0);
}

TEST_CASE("trace decomposition: reproduction, orthogonality and linearity") {
  const RefractiveIndex q1(CellSpec{}, {{0, 0, {2, 0}},  {-7, 1, {2, -4}}, {7, 1, {2, 4}},    {-3, 2, {3, 0}},
                                        {3, 2, {3, 0}},  {-1, 3, {1, 0.2}}, {1, 3, {1, -0.2}}});
  const Bases b = bases_for(q1, 1.0, 16, 5);
  const DtnOperator op = build_gram(b.plus, segment(Side::Plus, 1.0, 37), 8);
  REQUIRE(op.size() >= 4);
  const int m = static_cast<int>(op.size());

  const Eigen::VectorXcd c2 = decompose_trace(op, mode_trace(op, 1));
  CHECK((c2 - Eigen::VectorXcd::Unit(m, 1)).norm() < 1e-10);

  const Eigen::VectorXcd g = 2.0 * mode_trace(op, 0) + cplx(0, 3) * mode_trace(op, 3);
  Eigen::VectorXcd want = Eigen::VectorXcd::Zero(m);
  want(0) = 2.0;
  want(3) = cplx(0, 3);
  const Eigen::VectorXcd c = decompose_trace(op, g);
  CHECK((c - want).norm() < 1e-10);
  const Eigen::VectorXcd b_vec = op.project(g);
  CHECK((op.gram() * c - b_vec).norm() <= 1e-10 * b_vec.norm());

  // Idempotence on random expansions.
  std::mt19937 rng(11);
  std::normal_distribution<double> nd;
  Eigen::VectorXcd r(m);
  for (int i = 0; i < m; ++i) r(i) = cplx(nd(rng), nd(rng));
  CHECK((decompose_trace(op, op.traces() * r) - r).norm() < 1e-10 * r.norm());

  CHECK(neumann_functional(op, Eigen::VectorXcd::Zero(g.size())).norm() == 0.0);
}

TEST_CASE("traces orthogonal to the basis decompose to zero") {
  const Bases b = bases_for(RefractiveIndex(CellSpec{}, {}), 1.0, 8, 3);
  const DtnOperator op = build_gram(b.plus, segment(Side::Plus), 8);
  const auto& x2 = op.quadrature().x2;
  Eigen::VectorXcd g(x2.size());
  for (std::size_t i = 0; i < x2.size(); ++i) g(i) = std::sin(3 * kPi * x2[i]);
  CHECK(decompose_trace(op, g).norm() < 1e-12);
}

TEST_CASE("Neumann data of single modes") {
  SUBCASE("evanescent q = 0 mode decays like exp(-pi x1)") {
    const Bases b = bases_for(RefractiveIndex(CellSpec{}, {}), 1.0, 8, 3);
    const DtnOperator op = build_gram(b.plus, segment(Side::Plus), 8);
    const Eigen::VectorXcd g = mode_trace(op, 0);
    CHECK((neumann_functional(op, g) + kPi * g).norm() < 1e-10 * g.norm());
  }
  SUBCASE("propagating modes radiate outward on both sides") {
    // q = 1 and k^2 = pi^2 + 4: the l = 1 modes have beta = +-2.
    const double k = std::sqrt(kPi * kPi + 4.0);
    const Bases b = bases_for(RefractiveIndex::constant(1.0), k, 12, 3);
    REQUIRE(b.plus.J == 1);
    REQUIRE(b.minus.J == 1);
    const DtnOperator plus = build_gram(b.plus, segment(Side::Plus), 8);
    const DtnOperator minus = build_gram(b.minus, segment(Side::Minus), 8);
    const Eigen::VectorXcd gp = mode_trace(plus, 0);
    const Eigen::VectorXcd gm = mode_trace(minus, 0);
    CHECK((neumann_functional(plus, gp) - cplx(0, 2) * gp).norm() < 1e-9 * gp.norm());
    // Outward derivative -d/dx1 of exp(-2 i x1) sin(pi x2) is 2i times the trace as well.
    CHECK((neumann_functional(minus, gm) - cplx(0, 2) * gm).norm() < 1e-9 * gm.norm());

    auto pairing = [](const DtnOperator& op, const Eigen::VectorXcd& t, const Eigen::VectorXcd& g) {
      cplx s = 0.0;
      for (std::size_t i = 0; i < op.quadrature().weights.size(); ++i) s += op.quadrature().weights[i] * t(i) * std::conj(g(i));
      return s;
    };
    CHECK(pairing(plus, neumann_functional(plus, gp), gp).imag() > 0.0);
    CHECK(pairing(minus, neumann_functional(minus, gm), gm).imag() > 0.0);
    // In terms of the raw x1-derivative the left-going flux is negative.
    CHECK(pairing(minus, -neumann_functional(minus, gm), gm).imag() < 0.0);
  }
}

TEST_CASE("Gram matrix of a non-unit guide") {
  const CellSpec cell{1.0, 0.5};
  const RefractiveIndex q(cell, {{0, 0, {3, 0}}, {-2, 5, {0.3, -0.8}}, {2, 5, {0.3, 0.8}}}, Point(0.0, -0.25));
  const Bases b = bases_for(q, 2.0, 12, 3, cell);
  InterfaceSegment s = segment(Side::Minus, 0.5, 7);
  s.y0 = -0.25;
  for (double& v : s.breakpoints) v -= 0.25;
  const DtnOperator op = build_gram(b.minus, s, 8);
  CHECK(op.condition_number() < 1e6);
  CHECK((op.gram() - op.gram().adjoint()).norm() < 1e-12);
}

TEST_CASE("mismatched inputs are rejected") {
  const Bases b = bases_for(RefractiveIndex(CellSpec{}, {}), 1.0, 8, 3);
  CHECK_THROWS_AS(build_gram(b.plus, segment(Side::Minus), 8), ConfigError);
  InterfaceSegment short_seg = segment(Side::Plus);
  short_seg.breakpoints.pop_back();
  CHECK_THROWS_AS(build_gram(b.plus, short_seg, 8), ConfigError);
  ModeBasis empty = b.plus;
  empty.modes.clear();
  CHECK_THROWS_AS(build_gram(empty, segment(Side::Plus), 8), ConfigError);
}
