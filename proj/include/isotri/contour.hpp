#pragma once

// Closed sheeted loops on the superelliptic surface and complex-weighted
// chains of them.

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "isotri/curve.hpp"

namespace isotri {

enum class LoopKind {
  BranchPoint,  // small loop around P_{a_nu}
  Infinity,     // small loop around a point at infinity
  FiberPoint,   // small loop around a regular point over some z
  Circle,       // generic circle, possibly enclosing several branch points
  Polyline,     // user supplied closed polygon
};

inline const char* to_string(LoopKind kind) {
  switch (kind) {
    case LoopKind::BranchPoint: return "branch_loop";
    case LoopKind::Infinity: return "infinity_loop";
    case LoopKind::FiberPoint: return "fiber_loop";
    case LoopKind::Circle: return "circle";
    case LoopKind::Polyline: return "polyline";
  }
  return "unknown";
}

/// A closed planar path traversed `windings` times, with the sheet of w fixed
/// at the start point. The lift to the surface is closed after all windings.
struct SheetedLoop {
  std::vector<Segment> segments;
  cplx base_zeta;
  cplx base_w;
  int windings = 1;

  LoopKind kind = LoopKind::Polyline;
  int index = 0;       // nu, alpha or sheet t, depending on kind (0-based)
  cplx center{};       // circle center, when the loop is a circle
  double radius = 0.0; // circle radius, 0 for polylines
};

struct ChainTerm {
  cplx coefficient{1.0, 0.0};
  SheetedLoop loop;
};

/// Formal complex combination of sheeted loops. Empty means the trivial class.
struct Chain {
  std::vector<ChainTerm> terms;

  bool empty() const { return terms.empty(); }

  Chain& add(cplx coefficient, SheetedLoop loop) {
    terms.push_back({coefficient, std::move(loop)});
    return *this;
  }

  Chain scaled(cplx factor) const {
    Chain out = *this;
    for (auto& t : out.terms) t.coefficient *= factor;
    return out;
  }

  friend Chain operator+(Chain lhs, const Chain& rhs) {
    lhs.terms.insert(lhs.terms.end(), rhs.terms.begin(), rhs.terms.end());
    return lhs;
  }
};

inline double distance_to(const SheetedLoop& loop, cplx p) {
  return distance_to(std::span<const Segment>(loop.segments), p);
}

inline double path_clearance(const CurveFamily& curve, const SheetedLoop& loop) {
  double d = std::numeric_limits<double>::infinity();
  for (const auto& ai : curve.a()) d = std::min(d, distance_to(loop, ai));
  return d;
}

/// Value of w at the end of the lifted loop (after all windings).
inline cplx lift_endpoint(const CurveFamily& curve, const SheetedLoop& loop) {
  Continuation cont(curve);
  cplx w = loop.base_w;
  for (int k = 0; k < loop.windings; ++k) w = cont.track(std::span<const Segment>(loop.segments), w);
  return w;
}

inline bool is_closed_on_surface(const CurveFamily& curve, const SheetedLoop& loop,
                                 double tol = 1e-8) {
  if (loop.segments.empty()) return true;
  if (std::abs(end_point(loop.segments.back()) - loop.base_zeta) >
      tol * std::max(1.0, std::abs(loop.base_zeta))) {
    return false;
  }
  if (path_clearance(curve, loop) < curve.exclusion_radius()) return false;
  const cplx w_end = lift_endpoint(curve, loop);
  return std::abs(w_end - loop.base_w) <= tol * std::max(1.0, std::abs(loop.base_w));
}

namespace detail {

inline void check_radius_lower(const CurveFamily& curve, double radius) {
  if (!(radius > curve.exclusion_radius())) {
    throw RadiusTooSmall("loop radius must exceed the exclusion radius");
  }
}

inline void require_closed(const CurveFamily& curve, const SheetedLoop& loop) {
  if (!is_closed_on_surface(curve, loop)) {
    throw RegimeViolation(std::string(to_string(loop.kind)) + " does not lift to a closed cycle");
  }
}

}  // namespace detail

inline double default_branch_radius(const CurveFamily& curve) { return curve.sep() / 4.0; }

/// Smallest distance from a branch point to a straight spoke joining b to
/// one of the other branch points.
inline double spoke_clearance(const CurveFamily& curve, cplx b) {
  double d = std::numeric_limits<double>::infinity();
  for (int j = 0; j < curve.N(); ++j) {
    const Segment spoke = LineSegment{b, curve.a(j)};
    for (int k = 0; k < curve.N(); ++k) {
      if (k != j) d = std::min(d, distance_to(spoke, curve.a(k)));
    }
  }
  return d;
}

/// centroid + 2 spread (spread at least sep), along i when every a_i is real
/// and along 1 otherwise. If the straight spokes from there to the branch
/// points pass within 0.3 sep of another branch point, the direction is
/// rotated in steps of pi/12 to the first that clears, or the best one.
inline cplx default_base_point(const CurveFamily& curve) {
  const cplx c = curve.centroid();
  double spread = 0.0;
  bool all_real = true;
  for (const auto& ai : curve.a()) {
    spread = std::max(spread, std::abs(ai - c));
    if (ai.imag() != 0.0) all_real = false;
  }
  spread = std::max(spread, curve.sep());
  const cplx dir = all_real ? cplx(0.0, 1.0) : cplx(1.0, 0.0);
  cplx best = c + 2.0 * spread * dir;
  double best_clearance = -1.0;
  for (int k = 0; k < 24; ++k) {
    const cplx b = c + 2.0 * spread * dir * std::polar(1.0, k * pi / 12.0);
    const double cl = spoke_clearance(curve, b);
    if (cl >= 0.3 * curve.sep()) return b;
    if (cl > best_clearance) {
      best_clearance = cl;
      best = b;
    }
  }
  return best;
}

/// Large enough to enclose the default base point, so that loops based there
/// never cross the infinity loop.
inline double default_infinity_radius(const CurveFamily& curve) {
  return 2.0 * std::max(curve.max_abs_branch_point() + 1.0, std::abs(default_base_point(curve)));
}

/// Smallest radius the infinity loops use when only integrands with poles at
/// the branch points are involved. The integrand grows like
/// |zeta|^{jnN/m - 1}, so rounding on the circle scales with R^{jnN/m}.
inline double tight_infinity_radius(const CurveFamily& curve) {
  return curve.max_abs_branch_point() + 1.25 * curve.sep();
}

inline double default_fiber_radius(const CurveFamily& curve, cplx z) {
  return std::min(curve.sep(), curve.branch_distance(z)) / 4.0;
}

/// Loop around P_{a_nu}: a circle in zeta traversed m times, which is one
/// turn in the local coordinate (zeta - a_nu)^{1/m}. Counterclockwise.
inline SheetedLoop loop_around_branch_point(const CurveFamily& curve, int nu,
                                            std::optional<double> radius = std::nullopt,
                                            int start_sheet = 0) {
  if (nu < 0 || nu >= curve.N()) throw InvalidArgument("branch index out of range");
  const double r = radius.value_or(default_branch_radius(curve));
  detail::check_radius_lower(curve, r);
  if (r >= 0.5 * curve.isolation(nu)) {
    throw RadiusTooLarge("branch loop radius must stay below half the distance to the next branch point");
  }
  SheetedLoop loop;
  loop.segments = {circle(curve.a(nu), r, +1)};
  loop.base_zeta = curve.a(nu) + r;
  loop.base_w = sheet_value(curve, loop.base_zeta, start_sheet);
  loop.windings = curve.m();
  loop.kind = LoopKind::BranchPoint;
  loop.index = nu;
  loop.center = curve.a(nu);
  loop.radius = r;
  return loop;
}

/// Value of w at zeta = R > 0 on the branch w ~ e^{2 pi i alpha/m} zeta^{N/m}
/// (1 - a_i/zeta)^{1/m}, i.e. the branch whose expansion at infinity is
/// centred on the point infinity_alpha.
inline cplx infinity_sheet_value(const CurveFamily& curve, double R, int alpha) {
  const auto sc = structure_constants(curve);
  cplx log_sum{};
  for (const auto& ai : curve.a()) log_sum += std::log(1.0 - ai / R);
  const double mag = std::pow(R, static_cast<double>(curve.N()) / curve.m());
  return mag * std::exp(log_sum / static_cast<double>(curve.m())) *
         std::polar(1.0, 2.0 * pi * alpha / curve.m());
}

/// Loop around the point at infinity infinity_alpha (alpha 0-based). The
/// planar circle is traversed m1 times clockwise in zeta, which is the
/// positive orientation about the point at infinity.
inline SheetedLoop loop_around_infinity(const CurveFamily& curve, int alpha,
                                        std::optional<double> radius = std::nullopt) {
  const auto sc = structure_constants(curve);
  if (alpha < 0 || alpha >= sc.s) throw InvalidArgument("infinity index out of range");
  const double R = radius.value_or(default_infinity_radius(curve));
  if (!(R > curve.max_abs_branch_point() + curve.sep())) {
    throw RadiusTooSmall("infinity loop radius must exceed max|a_i| + sep");
  }
  SheetedLoop loop;
  loop.segments = {circle(cplx{0.0, 0.0}, R, -1)};
  loop.base_zeta = R;
  loop.base_w = infinity_sheet_value(curve, R, alpha);
  loop.windings = sc.m1;
  loop.kind = LoopKind::Infinity;
  loop.index = alpha;
  loop.center = 0.0;
  loop.radius = R;
  return loop;
}

/// Loop around the point of sheet t over z (the eta_t loops). One
/// counterclockwise turn; the sheet is labelled at the center z.
inline SheetedLoop loop_around_fiber_point(const CurveFamily& curve, cplx z, int t,
                                           std::optional<double> radius = std::nullopt) {
  if (t < 0 || t >= curve.m()) throw InvalidArgument("fiber sheet index out of range");
  curve.require_regular(z);
  const double limit = std::min(curve.sep(), curve.branch_distance(z));
  const double r = radius.value_or(limit / 4.0);
  detail::check_radius_lower(curve, r);
  if (r >= 0.5 * limit) throw RadiusTooLarge("fiber loop radius too large");
  SheetedLoop loop;
  loop.segments = {circle(z, r, +1)};
  loop.base_zeta = z + r;
  const cplx w_center = sheet_value(curve, z, t);
  loop.base_w = continue_w(curve, [&](double s) { return z + s * r; }, w_center);
  loop.windings = 1;
  loop.kind = LoopKind::FiberPoint;
  loop.index = t;
  loop.center = z;
  loop.radius = r;
  return loop;
}

/// Generic circle. Unless given, the winding count is the smallest one that
/// closes the lift (at most m).
inline SheetedLoop loop_circle(const CurveFamily& curve, cplx center, double radius, int sheet,
                               int orientation = +1, int windings = 0) {
  detail::check_radius_lower(curve, radius);
  SheetedLoop loop;
  loop.segments = {circle(center, radius, orientation)};
  loop.base_zeta = center + radius;
  loop.base_w = sheet_value(curve, loop.base_zeta, sheet);
  loop.kind = LoopKind::Circle;
  loop.index = sheet;
  loop.center = center;
  loop.radius = radius;
  if (path_clearance(curve, loop) < curve.exclusion_radius()) {
    throw BranchPointHit("circle passes too close to a branch point");
  }
  if (windings > 0) {
    loop.windings = windings;
    detail::require_closed(curve, loop);
    return loop;
  }
  Continuation cont(curve);
  cplx w = loop.base_w;
  for (int k = 1; k <= curve.m(); ++k) {
    w = cont.track(std::span<const Segment>(loop.segments), w);
    if (std::abs(w - loop.base_w) <= 1e-8 * std::max(1.0, std::abs(loop.base_w))) {
      loop.windings = k;
      return loop;
    }
  }
  throw RegimeViolation("circle lift did not close within m windings");
}

/// Closed polygon through `vertices` (the first vertex is the base point and
/// is appended at the end), traversed `windings` times.
inline SheetedLoop loop_polyline(const CurveFamily& curve, const std::vector<cplx>& vertices,
                                 int sheet, int windings = 1) {
  if (vertices.size() < 3) throw InvalidArgument("a polyline loop needs at least 3 vertices");
  if (windings < 1) throw InvalidArgument("windings must be positive");
  SheetedLoop loop;
  for (std::size_t k = 0; k < vertices.size(); ++k) {
    loop.segments.push_back(LineSegment{vertices[k], vertices[(k + 1) % vertices.size()]});
  }
  loop.base_zeta = vertices.front();
  loop.base_w = sheet_value(curve, loop.base_zeta, sheet);
  loop.windings = windings;
  loop.kind = LoopKind::Polyline;
  loop.index = sheet;
  if (path_clearance(curve, loop) < curve.exclusion_radius()) {
    throw BranchPointHit("polyline passes too close to a branch point");
  }
  detail::require_closed(curve, loop);
  return loop;
}

/// Same planar loop on a family with moved branch points: the base value of w
/// is replaced by the nearest root over the new curve.
inline SheetedLoop reseat(const CurveFamily& curve, const SheetedLoop& loop) {
  SheetedLoop out = loop;
  out.base_w = nearest_root(curve, loop.base_zeta, loop.base_w);
  return out;
}

inline Chain reseat(const CurveFamily& curve, const Chain& chain) {
  Chain out = chain;
  for (auto& t : out.terms) t.loop = reseat(curve, t.loop);
  return out;
}

}  // namespace isotri
