#pragma once

// Adaptive Gauss-Kronrod integration of w^{jn} g(zeta) dzeta along sheeted
// loops, with w carried from node to node by continuation.

#include <array>
#include <vector>

#include "isotri/contour.hpp"

namespace isotri {

enum class IntegrandKind {
  Omega,       // w^{jn} / (zeta - a_i)
  Kappa,       // w^{jn} / (zeta - z)
  KappaPrime,  // w^{jn} / (zeta - z)^2
};

struct Integrand {
  IntegrandKind kind = IntegrandKind::Omega;
  int i = 0;     // branch index for Omega
  cplx z{};      // kernel point for Kappa / KappaPrime
  int j = 1;

  static Integrand omega(int i, int j) { return {IntegrandKind::Omega, i, cplx{}, j}; }
  static Integrand kappa(cplx z, int j) { return {IntegrandKind::Kappa, 0, z, j}; }
  static Integrand kappa_prime(cplx z, int j) { return {IntegrandKind::KappaPrime, 0, z, j}; }

  cplx pole(const CurveFamily& curve) const {
    return kind == IntegrandKind::Omega ? curve.a(i) : z;
  }

  cplx rational_part(const CurveFamily& curve, cplx zeta) const {
    switch (kind) {
      case IntegrandKind::Omega: return 1.0 / (zeta - curve.a(i));
      case IntegrandKind::Kappa: return 1.0 / (zeta - z);
      case IntegrandKind::KappaPrime: {
        const cplx d = zeta - z;
        return 1.0 / (d * d);
      }
    }
    return 0.0;
  }
};

struct QuadratureOptions {
  double panel_rel_tol = 1e-12;
  double abs_tol = 1e-300;
  int max_depth = 40;
  long max_panels = 200000;
};

namespace detail {

// 15-point Kronrod abscissae (positive half, the last is the center) and
// weights, with the embedded 7-point Gauss weights on the odd abscissae.
inline constexpr std::array<double, 8> xgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> wgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> wg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

// Node positions in [-1, 1] in increasing order, with Kronrod and Gauss weights.
struct Rule {
  std::array<double, 15> x{};
  std::array<double, 15> wk{};
  std::array<double, 15> wgauss{};
};

inline const Rule& gk15() {
  static const Rule rule = [] {
    Rule r;
    for (int k = 0; k < 7; ++k) {
      r.x[k] = -xgk[k];
      r.x[14 - k] = xgk[k];
      r.wk[k] = r.wk[14 - k] = wgk[k];
      if (k % 2 == 1) r.wgauss[k] = r.wgauss[14 - k] = wg[k / 2];
    }
    r.x[7] = 0.0;
    r.wk[7] = wgk[7];
    r.wgauss[7] = wg[3];
    return r;
  }();
  return rule;
}

class LoopIntegrator {
 public:
  LoopIntegrator(const CurveFamily& curve, std::span<const Integrand> integrands,
                 const QuadratureOptions& opts)
      : curve_(curve),
        integrands_(integrands),
        opts_(opts),
        cont_(curve, ContinuationOptions{0.25, 3.0, 1e-14, 1}) {}

  // Integrates over one pass of the segment starting with w0; returns w at the end.
  cplx segment(const Segment& seg, cplx w0, std::vector<cplx>& acc) {
    int pieces = 1;
    if (const auto* arc = std::get_if<ArcSegment>(&seg)) {
      pieces = std::max(1, static_cast<int>(std::ceil(std::abs(arc->sweep) / (pi / 4.0))));
    } else {
      pieces = 2;
    }
    cplx w = w0;
    for (int k = 0; k < pieces; ++k) {
      w = panel(seg, static_cast<double>(k) / pieces, static_cast<double>(k + 1) / pieces, w, 0, acc);
    }
    return w;
  }

 private:
  cplx panel(const Segment& seg, double t0, double t1, cplx w0, int depth, std::vector<cplx>& acc) {
    if (++panels_ > opts_.max_panels) {
      throw QuadratureNoConvergence("quadrature exceeded the panel budget");
    }
    const auto& rule = gk15();
    const double half = 0.5 * (t1 - t0);
    const double mid = 0.5 * (t0 + t1);
    const auto path = [&seg](double t) { return point_at(seg, t); };
    const std::size_t nf = integrands_.size();

    std::vector<cplx> kron(nf), gauss(nf);
    std::vector<double> l1(nf, 0.0);
    double tprev = t0;
    cplx w = w0;
    for (int q = 0; q < 15; ++q) {
      const double t = mid + half * rule.x[q];
      w = cont_.track(path, tprev, t, w);
      tprev = t;
      const cplx zeta = point_at(seg, t);
      const cplx dz = tangent_at(seg, t) * half;
      for (std::size_t f = 0; f < nf; ++f) {
        const auto& in = integrands_[f];
        const cplx val = ipow(w, in.j * curve_.n()) * in.rational_part(curve_, zeta) * dz;
        kron[f] += rule.wk[q] * val;
        gauss[f] += rule.wgauss[q] * val;
        l1[f] += rule.wk[q] * std::abs(val);
      }
    }

    bool ok = true;
    for (std::size_t f = 0; f < nf && ok; ++f) {
      const double err = std::abs(kron[f] - gauss[f]);
      if (err > std::max(opts_.panel_rel_tol * l1[f], opts_.abs_tol)) ok = false;
    }
    if (ok) {
      for (std::size_t f = 0; f < nf; ++f) acc[f] += kron[f];
      return cont_.track(path, tprev, t1, w);
    }
    if (depth >= opts_.max_depth) {
      throw QuadratureNoConvergence("quadrature tolerance unreachable within the subdivision limit");
    }
    const cplx wmid = panel(seg, t0, mid, w0, depth + 1, acc);
    return panel(seg, mid, t1, wmid, depth + 1, acc);
  }

  const CurveFamily& curve_;
  std::span<const Integrand> integrands_;
  QuadratureOptions opts_;
  Continuation cont_;
  long panels_ = 0;
};

}  // namespace detail

/// Integrals of several integrands over one sheeted loop, sharing one w-track.
inline std::vector<cplx> integrate(const CurveFamily& curve, const SheetedLoop& loop,
                                   std::span<const Integrand> integrands,
                                   const QuadratureOptions& opts = {}) {
  std::vector<cplx> acc(integrands.size());
  if (loop.segments.empty() || integrands.empty()) return acc;
  const double excl = curve.exclusion_radius();
  for (const auto& in : integrands) {
    if (in.kind == IntegrandKind::Omega && (in.i < 0 || in.i >= curve.N())) {
      throw InvalidArgument("Omega index out of range");
    }
    if (in.j < 1) throw InvalidArgument("power index j must be positive");
    if (distance_to(loop, in.pole(curve)) < excl) {
      throw PoleTooClose("integration path passes within the exclusion radius of a pole");
    }
  }
  if (path_clearance(curve, loop) < excl) {
    throw PoleTooClose("integration path passes within the exclusion radius of a branch point");
  }
  detail::LoopIntegrator integrator(curve, integrands, opts);
  cplx w = loop.base_w;
  for (int k = 0; k < loop.windings; ++k) {
    for (const auto& seg : loop.segments) w = integrator.segment(seg, w, acc);
  }
  if (std::abs(w - loop.base_w) > 1e-8 * std::max(1.0, std::abs(loop.base_w))) {
    throw RegimeViolation("loop lift is not closed on the surface");
  }
  return acc;
}

inline cplx integrate(const CurveFamily& curve, const SheetedLoop& loop, const Integrand& integrand,
                      const QuadratureOptions& opts = {}) {
  return integrate(curve, loop, std::span<const Integrand>(&integrand, 1), opts)[0];
}

/// Coefficient-weighted sum over the chain terms, in chain order.
inline std::vector<cplx> integrate(const CurveFamily& curve, const Chain& chain,
                                   std::span<const Integrand> integrands,
                                   const QuadratureOptions& opts = {}) {
  std::vector<cplx> total(integrands.size());
  for (const auto& term : chain.terms) {
    if (term.coefficient == cplx{}) continue;
    const auto part = integrate(curve, term.loop, integrands, opts);
    for (std::size_t f = 0; f < total.size(); ++f) total[f] += term.coefficient * part[f];
  }
  return total;
}

inline cplx integrate(const CurveFamily& curve, const Chain& chain, const Integrand& integrand,
                      const QuadratureOptions& opts = {}) {
  return integrate(curve, chain, std::span<const Integrand>(&integrand, 1), opts)[0];
}

inline double kernel_factor(const CurveFamily& curve, int j) {
  return -static_cast<double>(curve.m()) / (static_cast<double>(j) * curve.n());
}

inline cplx kappa(const CurveFamily& curve, const Chain& chain, int j, cplx z,
                  const QuadratureOptions& opts = {}) {
  return kernel_factor(curve, j) * integrate(curve, chain, Integrand::kappa(z, j), opts);
}

inline cplx kappa_prime(const CurveFamily& curve, const Chain& chain, int j, cplx z,
                        const QuadratureOptions& opts = {}) {
  return kernel_factor(curve, j) * integrate(curve, chain, Integrand::kappa_prime(z, j), opts);
}

struct KappaPair {
  cplx value;
  cplx derivative;
};

/// kappa and kappa_prime from one pass over the chain.
inline KappaPair kappa_pair(const CurveFamily& curve, const Chain& chain, int j, cplx z,
                            const QuadratureOptions& opts = {}) {
  const std::array<Integrand, 2> ins = {Integrand::kappa(z, j), Integrand::kappa_prime(z, j)};
  const auto r = integrate(curve, chain, std::span<const Integrand>(ins), opts);
  const double f = kernel_factor(curve, j);
  return {f * r[0], f * r[1]};
}

}  // namespace isotri
