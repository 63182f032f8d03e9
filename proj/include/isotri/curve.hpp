#pragma once

// Superelliptic family w^m = prod_i (zeta - a_i) and continuation of the
// multivalued function w along paths in the zeta-plane.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "isotri/errors.hpp"
#include "isotri/path.hpp"
#include "isotri/types.hpp"

namespace isotri {

/// The data (m, n, a_1..a_N, p) fixing a superelliptic family and the size of
/// the triangular solutions built on it. Branch point indices are 0-based.
class CurveFamily {
 public:
  static constexpr double default_exclusion_factor = 1e-3;

  CurveFamily(int m, int n, std::vector<cplx> a, int p,
              double exclusion_factor = default_exclusion_factor)
      : m_(m), n_(n), a_(std::move(a)), p_(p), exclusion_factor_(exclusion_factor) {
    if (m_ < 1) throw InvalidArgument("m must be a positive integer");
    if (n_ == 0) throw InvalidArgument("n must be nonzero");
    if (std::gcd(std::abs(n_), m_) != 1) {
      throw InvalidArgument("gcd(|n|, m) must be 1, got n=" + std::to_string(n_) +
                            ", m=" + std::to_string(m_));
    }
    if (a_.empty()) throw InvalidArgument("at least one branch point is required");
    if (p_ < 1) throw InvalidArgument("p must be a positive integer");
    if (!(exclusion_factor_ > 0.0)) throw InvalidArgument("exclusion factor must be positive");
    sep_ = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < a_.size(); ++i) {
      if (!std::isfinite(a_[i].real()) || !std::isfinite(a_[i].imag())) {
        throw InvalidArgument("branch points must be finite");
      }
      for (std::size_t k = i + 1; k < a_.size(); ++k) {
        sep_ = std::min(sep_, std::abs(a_[i] - a_[k]));
      }
    }
    if (a_.size() == 1) sep_ = 1.0;
    if (!(sep_ > 0.0)) throw InvalidArgument("branch points must be pairwise distinct");
  }

  int m() const { return m_; }
  int n() const { return n_; }
  int N() const { return static_cast<int>(a_.size()); }
  int p() const { return p_; }
  const std::vector<cplx>& a() const { return a_; }
  cplx a(int i) const { return a_.at(static_cast<std::size_t>(i)); }

  /// Minimum pairwise distance of the branch points (1 when N = 1).
  double sep() const { return sep_; }
  double exclusion_radius() const { return exclusion_factor_ * sep_; }
  double exclusion_factor() const { return exclusion_factor_; }

  /// n/m, the common difference of the exponents.
  double step() const { return static_cast<double>(n_) / m_; }

  /// Same family parameters with moved branch points.
  CurveFamily with_branch_points(std::vector<cplx> a) const {
    return CurveFamily(m_, n_, std::move(a), p_, exclusion_factor_);
  }

  cplx product(cplx zeta) const {
    cplx r{1.0, 0.0};
    for (const auto& ai : a_) r *= zeta - ai;
    return r;
  }

  /// Distance from zeta to the nearest branch point.
  double branch_distance(cplx zeta) const {
    double d = std::numeric_limits<double>::infinity();
    for (const auto& ai : a_) d = std::min(d, std::abs(zeta - ai));
    return d;
  }

  /// Distance from a_i to the nearest other branch point (sep when N = 1).
  double isolation(int i) const {
    double d = std::numeric_limits<double>::infinity();
    for (int k = 0; k < N(); ++k) {
      if (k != i) d = std::min(d, std::abs(a(k) - a(i)));
    }
    return N() == 1 ? sep_ : d;
  }

  double max_abs_branch_point() const {
    double r = 0.0;
    for (const auto& ai : a_) r = std::max(r, std::abs(ai));
    return r;
  }

  cplx centroid() const {
    cplx c{};
    for (const auto& ai : a_) c += ai;
    return c / static_cast<double>(a_.size());
  }

  void require_regular(cplx zeta) const {
    if (branch_distance(zeta) < exclusion_radius()) {
      throw BranchPointHit("point lies within the exclusion radius of a branch point");
    }
  }

 private:
  int m_;
  int n_;
  std::vector<cplx> a_;
  int p_;
  double exclusion_factor_;
  double sep_ = 1.0;
};

struct SheetedPoint {
  cplx zeta;
  cplx w;
};

struct StructureConstants {
  int s = 1;       // points at infinity, gcd(m, N)
  int m1 = 1;      // m / s
  int N1 = 1;      // N / s
  int genus = 0;
};

inline StructureConstants structure_constants(const CurveFamily& curve) {
  StructureConstants sc;
  sc.s = std::gcd(curve.m(), curve.N());
  sc.m1 = curve.m() / sc.s;
  sc.N1 = curve.N() / sc.s;
  sc.genus = ((curve.m() - 1) * (curve.N() - 1) - sc.s + 1) / 2;
  return sc;
}

/// Relative residual of the curve equation at a point.
inline double curve_residual(const CurveFamily& curve, const SheetedPoint& pt) {
  const cplx prod = curve.product(pt.zeta);
  return std::abs(ipow(pt.w, curve.m()) - prod) / std::max(1.0, std::abs(prod));
}

inline cplx principal_root(const CurveFamily& curve, cplx zeta) {
  const cplx prod = curve.product(zeta);
  if (curve.m() == 1) return prod;
  return std::pow(prod, 1.0 / curve.m());
}

/// The m points over zeta. Sheet k carries the principal root times e^{2 pi i k/m}.
inline std::vector<SheetedPoint> fiber(const CurveFamily& curve, cplx zeta) {
  curve.require_regular(zeta);
  const cplx r0 = principal_root(curve, zeta);
  std::vector<SheetedPoint> pts;
  pts.reserve(static_cast<std::size_t>(curve.m()));
  for (int k = 0; k < curve.m(); ++k) {
    pts.push_back({zeta, r0 * std::polar(1.0, 2.0 * pi * k / curve.m())});
  }
  return pts;
}

inline cplx sheet_value(const CurveFamily& curve, cplx zeta, int sheet) {
  if (sheet < 0 || sheet >= curve.m()) {
    throw InvalidArgument("sheet index " + std::to_string(sheet) + " out of range");
  }
  curve.require_regular(zeta);
  return principal_root(curve, zeta) * std::polar(1.0, 2.0 * pi * sheet / curve.m());
}

/// The m-th root of prod(zeta) closest to `near`.
inline cplx nearest_root(const CurveFamily& curve, cplx zeta, cplx near) {
  const cplx r0 = principal_root(curve, zeta);
  if (curve.m() == 1) return r0;
  const double step = 2.0 * pi / curve.m();
  const long k = std::lround(std::arg(near / r0) / step);
  return r0 * std::polar(1.0, step * static_cast<double>(k));
}

struct ContinuationOptions {
  double max_step_fraction = 0.25;  // |d zeta| relative to distance to the nearest a_i
  double separation_ratio = 3.0;    // chosen root must beat the runner-up by this factor
  double min_dt = 1e-14;
  int initial_steps = 8;
};

/// Analytic continuation of w along a parametrized zeta-path.
///
/// Each step predicts w_next = w + (w/m) sum_i dzeta/(zeta - a_i) and picks the
/// m-th root of prod(zeta_next - a_i) closest to the prediction. A step is
/// halved when it is long compared to the distance to the nearest branch point
/// or when the closest root is not `separation_ratio` times closer than the
/// runner-up.
class Continuation {
 public:
  explicit Continuation(const CurveFamily& curve, ContinuationOptions opts = {})
      : curve_(curve), opts_(opts) {}

  template <class Path>
  cplx track(const Path& path, double t0, double t1, cplx w0) const {
    if (t1 == t0) return w0;
    cplx zeta = path(t0);
    curve_.require_regular(zeta);
    cplx w = w0;
    double t = t0;
    const double span = t1 - t0;
    double dt = span / opts_.initial_steps;
    const int m = curve_.m();
    const double root_step = 2.0 * pi / m;

    while ((span > 0 && t < t1) || (span < 0 && t > t1)) {
      if (std::abs(dt) > std::abs(t1 - t)) dt = t1 - t;
      const double tn = (std::abs(t1 - (t + dt)) <= 1e-15 * std::abs(span)) ? t1 : t + dt;
      const cplx zn = path(tn);
      if (zn == zeta) {
        t = tn;
        dt *= 2.0;
        continue;
      }
      const double dist = curve_.branch_distance(zeta);
      if (std::abs(zn - zeta) > opts_.max_step_fraction * dist) {
        shrink(dt, span);
        continue;
      }
      curve_.require_regular(zn);
      cplx drift{};
      for (const auto& ai : curve_.a()) drift += (zn - zeta) / (zeta - ai);
      const cplx predicted = w + (w / static_cast<double>(m)) * drift;
      const cplx r0 = principal_root(curve_, zn);
      cplx chosen = r0;
      if (m > 1) {
        const long k = std::lround(std::arg(predicted / r0) / root_step);
        chosen = r0 * std::polar(1.0, root_step * static_cast<double>(k));
        const cplx left = chosen * std::polar(1.0, -root_step);
        const cplx right = chosen * std::polar(1.0, root_step);
        const double best = std::abs(chosen - predicted);
        const double runner = std::min(std::abs(left - predicted), std::abs(right - predicted));
        if (best * opts_.separation_ratio > runner) {
          shrink(dt, span);
          continue;
        }
      }
      t = tn;
      zeta = zn;
      w = chosen;
      dt *= 2.0;
    }
    return w;
  }

  /// Along the whole segment, t in [0, 1].
  cplx track(const Segment& seg, cplx w0) const {
    return track([&seg](double t) { return point_at(seg, t); }, 0.0, 1.0, w0);
  }

  cplx track(std::span<const Segment> path, cplx w0) const {
    cplx w = w0;
    for (const auto& seg : path) w = track(seg, w);
    return w;
  }

  const CurveFamily& curve() const { return curve_; }

 private:
  void shrink(double& dt, double span) const {
    dt *= 0.5;
    if (std::abs(dt) < opts_.min_dt * std::abs(span)) {
      throw StepFailure("continuation step underflow: root matching stayed ambiguous");
    }
  }

  const CurveFamily& curve_;
  ContinuationOptions opts_;
};

/// Continues w from path(0) to path(1).
template <class Path>
cplx continue_w(const CurveFamily& curve, const Path& path, cplx w_start,
                ContinuationOptions opts = {}) {
  return Continuation(curve, opts).track(path, 0.0, 1.0, w_start);
}

inline cplx continue_w(const CurveFamily& curve, std::span<const Segment> path, cplx w_start,
                       ContinuationOptions opts = {}) {
  return Continuation(curve, opts).track(path, w_start);
}

}  // namespace isotri
