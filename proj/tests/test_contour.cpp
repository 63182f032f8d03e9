#include <catch_amalgamated.hpp>

#include "isotri/contour.hpp"

using namespace isotri;

TEST_CASE("branch point loops") {
  CurveFamily c(2, 1, {0.0, 1.0}, 2);
  const auto loop = loop_around_branch_point(c, 0, 0.1);
  CHECK(loop.windings == 2);
  CHECK(winding_number(std::span<const Segment>(loop.segments), 0.0) == 1);
  CHECK(winding_number(std::span<const Segment>(loop.segments), 1.0) == 0);
  CHECK(is_closed_on_surface(c, loop));

  CurveFamily c1(1, 1, {0.0, 1.0}, 2);
  CHECK(loop_around_branch_point(c1, 1).windings == 1);

  CHECK_THROWS_AS(loop_around_branch_point(c, 0, 1.0), RadiusTooLarge);
  CHECK_THROWS_AS(loop_around_branch_point(c, 0, 0.5), RadiusTooLarge);
  CHECK_THROWS_AS(loop_around_branch_point(c, 0, 1e-4), RadiusTooSmall);
  CHECK_THROWS_AS(loop_around_branch_point(c, 2), InvalidArgument);

  CurveFamily c4(4, 3, {0.0, 1.0, cplx(0, 1)}, 2);
  for (int nu = 0; nu < 3; ++nu) {
    for (int sheet = 0; sheet < 4; ++sheet) {
      const auto l = loop_around_branch_point(c4, nu, std::nullopt, sheet);
      CHECK(l.windings == 4);
      CHECK(is_closed_on_surface(c4, l));
    }
  }
}

TEST_CASE("a single turn around one branch point is not closed for m = 2") {
  CurveFamily c(2, 1, {0.0, 1.0}, 2);
  auto loop = loop_around_branch_point(c, 0, 0.1);
  loop.windings = 1;
  CHECK_FALSE(is_closed_on_surface(c, loop));
}

TEST_CASE("infinity loops") {
  CurveFamily c(2, 1, {0.0, 1.0}, 2);
  const auto l0 = loop_around_infinity(c, 0, 10.0);
  const auto l1 = loop_around_infinity(c, 1, 10.0);
  CHECK(l0.windings == 1);
  CHECK(is_closed_on_surface(c, l0));
  CHECK(is_closed_on_surface(c, l1));
  // The two points at infinity sit on different sheets over the base point.
  CHECK(std::abs(l0.base_w + l1.base_w) < 1e-12 * std::abs(l0.base_w));
  CHECK(curve_residual(c, {l0.base_zeta, l0.base_w}) < 1e-13);
  // Clockwise in the plane: positive about infinity.
  CHECK(winding_number(std::span<const Segment>(l0.segments), 0.0) == -1);

  CurveFamily c34(3, 1, {0.0, 1.0, 2.0, 3.0}, 2);
  const auto l = loop_around_infinity(c34, 0);
  CHECK(l.windings == 3);
  CHECK(is_closed_on_surface(c34, l));

  CurveFamily c24(2, 1, {0.0, 1.0, 2.0, 3.0}, 2);
  CHECK(loop_around_infinity(c24, 1).windings == 1);

  CHECK_THROWS_AS(loop_around_infinity(c, 0, 1.5), RadiusTooSmall);
  CHECK_THROWS_AS(loop_around_infinity(c, 2), InvalidArgument);

  CurveFamily c46(4, 1, {0.0, 1.0, 2.0, cplx(0, 1), cplx(1, 1), cplx(2, 1)}, 2);
  for (int alpha = 0; alpha < 2; ++alpha) {
    const auto li = loop_around_infinity(c46, alpha);
    CHECK(li.windings == 2);
    CHECK(is_closed_on_surface(c46, li));
  }
}

TEST_CASE("fiber point loops") {
  CurveFamily c(2, 1, {0.0, 1.0}, 2);
  const auto l = loop_around_fiber_point(c, 3.0, 0, 0.2);
  CHECK(l.windings == 1);
  CHECK(is_closed_on_surface(c, l));
  // The base value sits on sheet 0 of the fiber over 3.
  CHECK(std::abs(l.base_w - std::sqrt(3.2 * 2.2)) < 1e-12);

  CHECK_THROWS_AS(loop_around_fiber_point(c, 3.0, 2), InvalidArgument);
  CHECK_THROWS_AS(loop_around_fiber_point(c, 3.0, -1), InvalidArgument);
  CHECK_THROWS_AS(loop_around_fiber_point(c, 3.0, 0, 0.6), RadiusTooLarge);

  CurveFamily c1(1, 1, {0.0, 1.0}, 2);
  const auto l1 = loop_around_fiber_point(c1, cplx(0.5, 0.5), 0);
  CHECK(is_closed_on_surface(c1, l1));
}

TEST_CASE("generic circles and polylines") {
  CurveFamily c(3, 1, {0.0, 1.0}, 2);
  // Encloses both branch points: local monodromy e^{2 pi i 2/3}, order 3.
  const auto big = loop_circle(c, 0.5, 2.0, 0);
  CHECK(big.windings == 3);
  CHECK(is_closed_on_surface(c, big));
  // Encloses nothing.
  CHECK(loop_circle(c, cplx(5, 5), 1.0, 1).windings == 1);

  const auto poly = loop_polyline(c, {cplx(2, 2), cplx(-2, 2), cplx(-2, -2), cplx(2, -2)}, 0, 3);
  CHECK(is_closed_on_surface(c, poly));
  CHECK_THROWS_AS(loop_polyline(c, {cplx(2, 2), cplx(-2, 2), cplx(-2, -2), cplx(2, -2)}, 0, 1),
                  RegimeViolation);
  CHECK_THROWS_AS(loop_polyline(c, {cplx(0, 0), cplx(1, 1), cplx(0, 1)}, 0), BranchPointHit);
}

TEST_CASE("chains") {
  CurveFamily c(2, 1, {0.0, 1.0}, 2);
  Chain empty;
  CHECK(empty.empty());
  Chain ch;
  ch.add(2.0, loop_around_infinity(c, 0));
  const auto scaled = ch.scaled(cplx(0, 1));
  CHECK(scaled.terms[0].coefficient == cplx(0, 2));
  CHECK((ch + scaled).terms.size() == 2);
}
