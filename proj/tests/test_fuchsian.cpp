#include <catch_amalgamated.hpp>

#include "support/random_configs.hpp"

using namespace isotri;
using namespace isotri::testing;

namespace {

cplx pi_power(const FundamentalSolution& sol, cplx z, const std::vector<cplx>& exponents) {
  const auto logs = sol.log_branches(z);
  cplx e{};
  for (std::size_t i = 0; i < logs.size(); ++i) e += exponents[i] * logs[i];
  return std::exp(e);
}

std::vector<cplx> shifted(const std::vector<cplx>& theta, cplx by) {
  auto out = theta;
  for (auto& t : out) t += by;
  return out;
}

// Central differences of Phi along the real and imaginary directions.
Matrix phi_fd(const FundamentalSolution& sol, cplx z, double h) {
  return (phi(sol, z + h) - phi(sol, z - h)) / (2.0 * h);
}

}  // namespace

TEST_CASE("D matches the power products") {
  const auto poly = polynomial_example();
  const FundamentalSolution sol(poly);
  const cplx z{0.3, 0.7};
  const Matrix D = d_matrix(sol, z);
  CHECK(std::abs(D(0, 0) - std::pow(z, 0.25) * std::pow(z - 1.0, 0.25)) < 1e-14);
  CHECK(std::abs(D(1, 1) * D(0, 0) - 1.0) < 1e-14);
  CHECK(std::abs(D(0, 1)) == 0.0);
  CHECK_THROWS_AS(d_matrix(sol, 1.0), SingularPoint);
}

TEST_CASE("polynomial example fundamental solution") {
  for (const auto& coeffs : {polynomial_example(), polynomial_example_numeric()}) {
    const FundamentalSolution sol(coeffs);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    for (int k = 0; k < 20; ++k) {
      const cplx z(0.5 + u(rng), 0.2 + std::abs(u(rng)));
      if (!sol.is_admissible(z)) continue;
      const Matrix P = phi(sol, z);
      const cplx root = pi_power(sol, z, {0.25, 0.25});
      CHECK(std::abs(P(0, 0) - root) < 1e-10);
      CHECK(std::abs(P(1, 1) - 1.0 / root) < 1e-10);
      CHECK(std::abs(P(0, 1) - (2.0 * z - 1.0) / root) < 1e-8);
      CHECK(P(1, 0) == cplx{});
      CHECK(ode_residual(sol, coeffs, z) < 1e-8);
    }
  }
}

TEST_CASE("rational example fundamental solution") {
  const cplx a1{0.2, -0.1}, a2{1.3, 0.4}, c{0.7, -0.3};
  const std::vector<cplx> theta = {cplx(0.2, 0.05), -0.35};
  for (const auto& coeffs : {rational_example(c, theta, a1, a2), rational_example_numeric(c, theta, a1, a2)}) {
    const FundamentalSolution sol(coeffs);
    for (const cplx z : sample_points(sol, 20, 17)) {
      const Matrix P = phi(sol, z);
      const cplx d0 = pi_power(sol, z, theta);
      CHECK(std::abs(P(0, 0) - d0) < 1e-8);
      CHECK(std::abs(P(1, 1) - pi_power(sol, z, shifted(theta, 0.5))) < 1e-8);
      CHECK(std::abs(P(2, 2) - pi_power(sol, z, shifted(theta, 1.0))) < 1e-8);
      CHECK(std::abs(P(0, 2) - 2.0 * c / (a1 - a2) * d0 * (z - a1)) < 1e-8);
      CHECK(std::abs(P(0, 1)) < 1e-8);
      CHECK(std::abs(P(1, 2)) < 1e-8);
      CHECK(ode_residual(sol, coeffs, z) < 1e-8);
    }
  }
}

TEST_CASE("derivative, inverse and determinant on random configurations") {
  ConfigGenerator gen(7);
  const ChainStyle styles[] = {ChainStyle::Recipe, ChainStyle::Residue, ChainStyle::Fiber, ChainStyle::Mixed};
  for (int trial = 0; trial < 12; ++trial) {
    const auto cfg = gen.next(trial % 2 == 0, styles[trial % 4]);
    INFO(cfg.label);
    const auto sol = cfg.solution();
    const double h = 1e-5 * cfg.coeffs.curve.sep();
    for (const cplx z : sample_points(sol, 6, static_cast<std::uint64_t>(trial))) {
      const auto ev = evaluate(sol, z);
      const Matrix P = ev.phi();
      const double scale = std::max(1.0, max_abs(ev.phi_derivative()));
      CHECK(max_abs(ev.phi_derivative() - phi_fd(sol, z, h)) < 1e-6 * scale);
      const Matrix I = Matrix::Identity(sol.p(), sol.p());
      CHECK(max_abs(ev.phi_inverse() * P - I) < 1e-10);
      cplx det_d = 1.0;
      for (int k = 0; k < sol.p(); ++k) det_d *= ev.D(k, k);
      CHECK(std::abs(P.determinant() - det_d) < 1e-10 * std::max(1.0, std::abs(det_d)));
      CHECK(ode_residual(sol, cfg.coeffs, z) < 1e-8);
    }
  }
}

TEST_CASE("kappa derivative identity on random configurations") {
  ConfigGenerator gen(11);
  const ChainStyle styles[] = {ChainStyle::Residue, ChainStyle::Fiber, ChainStyle::Mixed, ChainStyle::Recipe};
  for (int trial = 0; trial < 8; ++trial) {
    const auto cfg = gen.next(trial % 2 == 1, styles[trial % 4]);
    INFO(cfg.label);
    const auto sol = cfg.solution();
    const cplx z = sample_points(sol, 1, 3)[0];
    for (int j = 1; j < sol.p() && j <= 4; ++j) CHECK(lemma1_residual(sol, j, z) < 1e-8);
  }
}

TEST_CASE("fiber chains give constant ratios along rows") {
  const auto coeffs = case2_p3();
  const FundamentalSolution sol(coeffs);
  const auto pts = sample_points(sol, 10, 23);
  const auto ref = alpha_hat(phi(sol, pts[0]));
  CHECK(std::abs(ref[0]) > 1e-3);
  for (const cplx z : pts) {
    const Matrix P = phi(sol, z);
    for (int k = 0; k < 3; ++k) {
      for (int l = k; l < 3; ++l) {
        const cplx expect = l == k ? cplx(1.0) : ref[static_cast<std::size_t>(l - k - 1)];
        CHECK(std::abs(P(k, l) / P(k, k) - expect) < 1e-8);
      }
    }
    CHECK(ode_residual(sol, coeffs, z) < 1e-8);
  }
  for (const auto& Bi : coeffs.B) CHECK(off_diagonal_magnitude(Bi) < 1e-10);
}

TEST_CASE("fiber clearance and singular points are reported") {
  const auto coeffs = case3_p3();
  const FundamentalSolution sol(coeffs);
  const auto& loop = sol.chains()[0].terms[0].loop;
  const cplx on_loop = loop.center + loop.radius;
  CHECK_FALSE(sol.is_admissible(on_loop));
  CHECK_THROWS_AS(phi(sol, on_loop), ChainTooCloseToFiber);
  CHECK_THROWS_AS(phi(sol, coeffs.curve.a(0)), SingularPoint);
  CHECK_THROWS_AS(FundamentalSolution(coeffs, coeffs.curve.a(1)), SingularPoint);
  CHECK_THROWS_AS(FundamentalSolution(TriangularCoefficients{coeffs.curve, coeffs.theta, coeffs.B, ExternalMatrices{}}),
                  InvalidArgument);
}
