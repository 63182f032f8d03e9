#include <catch_amalgamated.hpp>

#include "support/random_configs.hpp"

using namespace isotri;
using namespace isotri::testing;

namespace {

Matrix mat2(cplx a, cplx b, cplx c, cplx d) {
  Matrix M(2, 2);
  M << a, b, c, d;
  return M;
}

}  // namespace

TEST_CASE("trivial chains give diagonal B") {
  const auto coeffs = trivial_config(3, 2, {0.0, 1.0, cplx(0, 1)}, 4, {0.1, 0.2, cplx(0.3, 0.1)});
  for (int i = 0; i < 3; ++i) {
    for (int k = 0; k < 4; ++k) {
      for (int l = 0; l < 4; ++l) {
        const cplx expect = k == l ? coeffs.theta[i] - k * 2.0 / 3.0 : cplx{};
        CHECK(std::abs(coeffs.B[i](k, l) - expect) < 1e-15);
      }
    }
  }
  const Matrix Binf = b_infinity(coeffs);
  CHECK(off_diagonal_magnitude(Binf) == 0.0);
  CHECK(std::abs(Binf(2, 2) - (coeffs.theta[0] + coeffs.theta[1] + coeffs.theta[2] - 4.0)) < 1e-14);
  CHECK(schlesinger_residual(rebuilder(coeffs), coeffs.curve.a(), 1e-5) < 1e-12);
}

TEST_CASE("polynomial example") {
  const auto poly = polynomial_example();
  CHECK(max_abs(poly.B[0] - mat2(0.25, 0.5, 0.0, -0.25)) < 1e-10);
  CHECK(max_abs(poly.B[1] - mat2(0.25, -0.5, 0.0, -0.25)) < 1e-10);
  const auto num = polynomial_example_numeric();
  CHECK(max_abs(num.B[0] - poly.B[0]) < 1e-8);
  CHECK(max_abs(num.B[1] - poly.B[1]) < 1e-8);
  CHECK(max_abs(b_infinity(poly) - mat2(0.5, 0.0, 0.0, -0.5)) < 1e-12);
  CHECK(schlesinger_residual(rebuilder(poly), poly.curve.a(), 1e-5) < 1e-6);
  CHECK(schlesinger_residual(rebuilder(num), num.curve.a(), 1e-5) < 1e-6);

  const auto zero = build_polynomial(polynomial_example_curve(), {0.25, 0.25}, 0, {0.0});
  CHECK(zero.B[0](0, 1) == cplx{});
  CHECK_THROWS_AS(build_polynomial(CurveFamily(3, 1, {0.0, 1.0}, 2), {0.0, 0.0}, 0, {1.0}), InvalidRegime);
  CHECK_THROWS_AS(build_polynomial(rational_example_curve(), {0.0, 0.0}, 0, {1.0, 1.0}), InvalidRegime);
}

TEST_CASE("rational example") {
  const cplx a1{0.2, -0.1}, a2{1.3, 0.4}, c{0.7, -0.3};
  const std::vector<cplx> theta = {0.2, -0.35};
  const auto rat = rational_example(c, theta, a1, a2);
  const auto num = rational_example_numeric(c, theta, a1, a2);
  const cplx expect = 2.0 * c / ((a1 - a2) * (a1 - a2));
  CHECK(std::abs(rat.B[0](0, 2) - expect) < 1e-10);
  CHECK(std::abs(rat.B[1](0, 2) + expect) < 1e-10);
  CHECK(std::abs(num.B[0](0, 2) - expect) < 1e-8);
  CHECK(std::abs(num.B[1](0, 2) + expect) < 1e-8);
  for (int i = 0; i < 2; ++i) {
    CHECK(std::abs(num.B[i](0, 1)) < 1e-10);
    CHECK(std::abs(num.B[i](1, 2)) < 1e-10);
    CHECK(rat.B[i](0, 1) == cplx{});
  }
  CHECK(off_diagonal_magnitude(b_infinity(num)) < 1e-8);
  CHECK(schlesinger_residual(rebuilder(rat), rat.curve.a(), 1e-5 * rat.curve.sep()) < 1e-6);
  CHECK(schlesinger_residual(rebuilder(num), num.curve.a(), 1e-5 * num.curve.sep()) < 1e-6);

  // Equal coefficients at every branch point give the trivial solution.
  CurveFamily curve(2, -1, {0.0, 1.0, cplx(0.5, 1.0)}, 5);
  const auto flat = build_rational(curve, {0.1, 0.2, 0.3}, {{1.0, 2.0, 3.0, 4.0}, {1.0, 2.0, 3.0, 4.0}, {1.0, 2.0, 3.0, 4.0}});
  for (const auto& Bi : flat.B) CHECK(off_diagonal_magnitude(Bi) < 1e-12);
  CHECK_THROWS_AS(build_rational(polynomial_example_curve(), {0.0, 0.0}, {{1.0}, {1.0}}), InvalidRegime);
}

TEST_CASE("numeric build rejects wrong chain counts and open lifts") {
  const auto curve = polynomial_example_curve();
  CHECK_THROWS_AS(build_numeric(curve, {0.0, 0.0}, {}), RegimeViolation);
  auto open = loop_around_branch_point(curve, 0);
  open.windings = 1;
  Chain ch;
  ch.add(1.0, open);
  CHECK_THROWS_AS(build_numeric(curve, {0.0, 0.0}, {ch}), RegimeViolation);
  CHECK_THROWS_AS(build_numeric(curve, {0.0}, {Chain{}}), InvalidArgument);
}

TEST_CASE("recipes agree with quadrature over their equivalent chains") {
  ConfigGenerator gen(99);
  for (int trial = 0; trial < 6; ++trial) {
    const auto cfg = gen.next(trial % 2 == 0, ChainStyle::Recipe);
    INFO(cfg.label);
    const auto num = build_numeric(cfg.coeffs.curve, cfg.coeffs.theta, equivalent_chains(cfg.coeffs));
    for (std::size_t i = 0; i < num.B.size(); ++i) {
      CHECK(max_abs(num.B[i] - cfg.coeffs.B[i]) < 1e-8 * std::max(1.0, max_abs(cfg.coeffs.B[i])));
    }
  }
}

TEST_CASE("structure and Schlesinger residual on random builds") {
  ConfigGenerator gen(2024);
  for (int trial = 0; trial < 8; ++trial) {
    const auto style = trial < 4 ? ChainStyle::Recipe : ChainStyle::Residue;
    const auto cfg = gen.next(trial % 2 == 0, style);
    INFO(cfg.label);
    const auto rep = structure_report(cfg.coeffs);
    CHECK(rep.lower == 0.0);
    CHECK(rep.diagonal_step < 1e-14);
    CHECK(rep.band == 0.0);
    CHECK(off_diagonal_magnitude(b_infinity(cfg.coeffs)) < 1e-8);
    const double h = 1e-5 * cfg.coeffs.curve.sep();
    CHECK(schlesinger_residual(rebuilder(cfg.coeffs), cfg.coeffs.curve.a(), h) < 1e-6);
  }
}
