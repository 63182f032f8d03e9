#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <variant>
#include <vector>

#include "isotri/types.hpp"

namespace isotri {

/// Straight segment traversed from `from` to `to`.
struct LineSegment {
  cplx from;
  cplx to;
};

/// Circular arc center + radius*e^{i(start_angle + t*sweep)}, t in [0, 1].
/// A positive sweep runs counterclockwise.
struct ArcSegment {
  cplx center;
  double radius = 0.0;
  double start_angle = 0.0;
  double sweep = 0.0;
};

using Segment = std::variant<LineSegment, ArcSegment>;

inline cplx point_at(const Segment& seg, double t) {
  if (const auto* line = std::get_if<LineSegment>(&seg)) {
    return line->from + t * (line->to - line->from);
  }
  const auto& arc = std::get<ArcSegment>(seg);
  return arc.center + std::polar(arc.radius, arc.start_angle + t * arc.sweep);
}

/// d(zeta)/dt along the segment.
inline cplx tangent_at(const Segment& seg, double t) {
  if (const auto* line = std::get_if<LineSegment>(&seg)) {
    return line->to - line->from;
  }
  const auto& arc = std::get<ArcSegment>(seg);
  return cplx{0.0, arc.sweep} * std::polar(arc.radius, arc.start_angle + t * arc.sweep);
}

inline cplx start_point(const Segment& seg) { return point_at(seg, 0.0); }
inline cplx end_point(const Segment& seg) { return point_at(seg, 1.0); }

inline double segment_length(const Segment& seg) {
  if (const auto* line = std::get_if<LineSegment>(&seg)) {
    return std::abs(line->to - line->from);
  }
  const auto& arc = std::get<ArcSegment>(seg);
  return arc.radius * std::abs(arc.sweep);
}

inline double distance_to(const Segment& seg, cplx p) {
  if (const auto* line = std::get_if<LineSegment>(&seg)) {
    const cplx d = line->to - line->from;
    const double len2 = std::norm(d);
    if (len2 == 0.0) return std::abs(p - line->from);
    const double t = std::clamp(std::real((p - line->from) * std::conj(d)) / len2, 0.0, 1.0);
    return std::abs(p - (line->from + t * d));
  }
  const auto& arc = std::get<ArcSegment>(seg);
  const cplx rel = p - arc.center;
  const double full = 2.0 * pi;
  if (std::abs(arc.sweep) >= full || std::abs(rel) == 0.0) {
    return std::abs(std::abs(rel) - arc.radius);
  }
  // Angular position of p measured along the sweep direction.
  double phi = std::arg(rel) - arc.start_angle;
  if (arc.sweep < 0) phi = -phi;
  phi = std::fmod(phi, full);
  if (phi < 0) phi += full;
  if (phi <= std::abs(arc.sweep)) return std::abs(std::abs(rel) - arc.radius);
  return std::min(std::abs(p - start_point(seg)), std::abs(p - end_point(seg)));
}

inline double distance_to(std::span<const Segment> path, cplx p) {
  double d = std::numeric_limits<double>::infinity();
  for (const auto& seg : path) d = std::min(d, distance_to(seg, p));
  return d;
}

/// Number of counterclockwise turns the closed path makes about p.
/// Arcs are chopped into pieces short enough that each piece's change of
/// argument is the principal one, unless p sits almost on the path.
inline int winding_number(std::span<const Segment> path, cplx p) {
  double total = 0.0;
  for (const auto& seg : path) {
    int pieces = 1;
    if (const auto* arc = std::get_if<ArcSegment>(&seg)) {
      pieces = std::max(1, static_cast<int>(std::ceil(std::abs(arc->sweep) / (pi / 32.0))));
    }
    for (int k = 0; k < pieces; ++k) {
      const cplx s = point_at(seg, static_cast<double>(k) / pieces) - p;
      const cplx e = point_at(seg, static_cast<double>(k + 1) / pieces) - p;
      total += std::arg(e / s);
    }
  }
  return static_cast<int>(std::lround(total / (2.0 * pi)));
}

/// Full circle of the given orientation (+1 counterclockwise), starting at
/// center + radius*e^{i*start_angle}.
inline ArcSegment circle(cplx center, double radius, int orientation = 1, double start_angle = 0.0) {
  return ArcSegment{center, radius, start_angle, orientation >= 0 ? 2.0 * pi : -2.0 * pi};
}

}  // namespace isotri
