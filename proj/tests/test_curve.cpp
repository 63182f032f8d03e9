#include <catch_amalgamated.hpp>

#include <random>

#include "isotri/curve.hpp"

using namespace isotri;
using Catch::Matchers::WithinAbs;

namespace {

bool contains_root(const std::vector<SheetedPoint>& pts, cplx w, double tol = 1e-12) {
  for (const auto& p : pts) {
    if (std::abs(p.w - w) < tol) return true;
  }
  return false;
}

// Plain Euler-free oracle: many tiny steps, each picking the nearest root.
cplx brute_force(const CurveFamily& c, auto path, cplx w, int steps) {
  for (int k = 1; k <= steps; ++k) w = nearest_root(c, path(static_cast<double>(k) / steps), w);
  return w;
}

}  // namespace

TEST_CASE("curve family validation") {
  REQUIRE_THROWS_AS(CurveFamily(4, 2, {0.0, 1.0}, 2), InvalidArgument);
  REQUIRE_THROWS_AS(CurveFamily(2, 0, {0.0, 1.0}, 2), InvalidArgument);
  REQUIRE_THROWS_AS(CurveFamily(2, 1, {0.0, 0.0}, 2), InvalidArgument);
  REQUIRE_THROWS_AS(CurveFamily(2, 1, {}, 2), InvalidArgument);
  REQUIRE_THROWS_AS(CurveFamily(2, 1, {0.0}, 0), InvalidArgument);
  REQUIRE_THROWS_AS(CurveFamily(0, 1, {0.0}, 1), InvalidArgument);

  CurveFamily c(3, -2, {0.0, 1.0, cplx(0, 2)}, 3);
  CHECK(c.N() == 3);
  CHECK_THAT(c.sep(), WithinAbs(1.0, 1e-15));
  CHECK_THAT(c.exclusion_radius(), WithinAbs(1e-3, 1e-18));
  CHECK(CurveFamily(2, 1, {cplx(3, 1)}, 1).sep() == 1.0);
}

TEST_CASE("structure constants") {
  auto sc = structure_constants(CurveFamily(2, 1, {0.0, 1.0}, 2));
  CHECK(sc.s == 2);
  CHECK(sc.m1 == 1);
  CHECK(sc.N1 == 1);
  CHECK(sc.genus == 0);

  sc = structure_constants(CurveFamily(3, 1, {0.0, 1.0, 2.0, 3.0}, 2));
  CHECK(sc.s == 1);
  CHECK(sc.m1 == 3);
  CHECK(sc.N1 == 4);
  CHECK(sc.genus == 3);

  sc = structure_constants(CurveFamily(2, 1, {0.0, 1.0, 2.0, 3.0, 4.0}, 2));
  CHECK(sc.s == 1);
  CHECK(sc.genus == 2);

  for (int m = 1; m <= 6; ++m) {
    for (int N = 1; N <= 6; ++N) {
      std::vector<cplx> a;
      for (int i = 0; i < N; ++i) a.emplace_back(i, 0);
      const auto s = structure_constants(CurveFamily(m, 1, a, 1));
      CHECK(s.m1 * s.s == m);
      CHECK(s.N1 * s.s == N);
      CHECK(2 * s.genus == (m - 1) * (N - 1) - s.s + 1);
      CHECK(s.genus >= 0);
    }
  }
}

TEST_CASE("fiber points") {
  CurveFamily c2(2, 1, {0.0, 1.0}, 1);
  auto pts = fiber(c2, 2.0);
  REQUIRE(pts.size() == 2);
  CHECK(contains_root(pts, std::sqrt(2.0)));
  CHECK(contains_root(pts, -std::sqrt(2.0)));

  pts = fiber(c2, 0.5);
  CHECK(contains_root(pts, cplx(0, 0.5)));
  CHECK(contains_root(pts, cplx(0, -0.5)));

  CurveFamily c3(3, 1, {0.0}, 1);
  pts = fiber(c3, 8.0);
  REQUIRE(pts.size() == 3);
  const cplx omega = std::polar(1.0, 2.0 * pi / 3.0);
  CHECK(std::abs(pts[0].w - 2.0) < 1e-12);
  CHECK(contains_root(pts, 2.0 * omega));
  CHECK(contains_root(pts, 2.0 * omega * omega));
  for (const auto& p : pts) CHECK(curve_residual(c3, p) < 1e-14);

  CHECK_THROWS_AS(fiber(c2, cplx(1e-5, 0)), BranchPointHit);
}

TEST_CASE("continuation around a single branch point flips the sheet") {
  CurveFamily c(2, 1, {0.0, 1.0}, 1);
  const auto path = [](double t) { return std::polar(0.3, 2.0 * pi * t); };
  const cplx w0 = std::sqrt(cplx(0.3 * (0.3 - 1.0)));
  const cplx w1 = continue_w(c, path, w0);
  CHECK(std::abs(w1 + w0) < 1e-12);
  CHECK(std::abs(w1 - brute_force(c, path, w0, 10000)) < 1e-12);
}

TEST_CASE("continuation around both branch points returns to the start") {
  CurveFamily c(2, 1, {0.0, 1.0}, 1);
  const auto path = [](double t) { return std::polar(5.0, 2.0 * pi * t); };
  const cplx w0 = sheet_value(c, 5.0, 1);
  CHECK(std::abs(continue_w(c, path, w0) - w0) < 1e-12);
}

TEST_CASE("constant path is the identity") {
  CurveFamily c(3, 2, {0.0, 1.0, cplx(0, 1)}, 1);
  const cplx z{2.0, 0.5};
  const cplx w0 = sheet_value(c, z, 2);
  CHECK(continue_w(c, [z](double) { return z; }, w0) == w0);
}

TEST_CASE("local monodromy at a branch point has order m") {
  for (int m : {2, 3, 4}) {
    CurveFamily c(m, 1, {0.0, 1.0, cplx(0.3, 1.2)}, 1);
    const Segment seg = circle(c.a(2), 0.2, +1);
    const cplx w0 = sheet_value(c, start_point(seg), 0);
    Continuation cont(c);
    cplx w = w0;
    for (int k = 1; k <= m; ++k) {
      w = cont.track(seg, w);
      if (k < m) CHECK(std::abs(w - w0) > 1e-3);
    }
    CHECK(std::abs(w - w0) < 1e-12 * std::abs(w0));
  }
}

TEST_CASE("continuation properties on random paths") {
  std::mt19937 rng(20240611);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const int m = 2 + trial % 3;
    std::vector<cplx> a;
    for (int i = 0; i < 3; ++i) a.emplace_back(u(rng), u(rng));
    CurveFamily c(m, 1, a, 1);
    const cplx p0{3.0 * u(rng), 3.0 + u(rng)};
    const cplx p1{3.0 * u(rng), -3.0 + u(rng)};
    // Dog-leg path around the right of all branch points.
    const std::vector<Segment> path = {LineSegment{p0, cplx(4, 0)}, LineSegment{cplx(4, 0), p1}};
    const std::vector<Segment> back = {LineSegment{p1, cplx(4, 0)}, LineSegment{cplx(4, 0), p0}};
    const cplx w0 = sheet_value(c, p0, trial % m);

    const cplx w1 = continue_w(c, std::span<const Segment>(path), w0);
    CHECK(curve_residual(c, {p1, w1}) < 1e-12);
    CHECK(std::abs(continue_w(c, std::span<const Segment>(back), w1) - w0) < 1e-12 * std::abs(w0));

    ContinuationOptions fine;
    fine.initial_steps = 32;
    fine.max_step_fraction = 0.0625;
    CHECK(std::abs(continue_w(c, std::span<const Segment>(path), w0, fine) - w1) <
          1e-12 * std::abs(w1));
  }
}
