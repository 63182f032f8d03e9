#pragma once

// Monodromy of Phi by numerical continuation of the Fuchsian system along
// z-plane loops, and the closed forms it is compared against.

#include <algorithm>
#include <numeric>

#include "isotri/fuchsian.hpp"

namespace isotri {

/// A closed z-plane path starting and ending at `base`.
struct ZLoop {
  std::vector<Segment> segments;
  cplx base;
  int around = -1;  // branch index the loop encircles, -1 for other loops
};

/// Keyhole loop rho_j: straight out from base_z towards a_j, one
/// counterclockwise circle about a_j, straight back. The circle radius is the
/// smaller of 0.4 times the isolation of a_j and half the distance from a_j to
/// the spokes of the other loops, so the keyholes of one base point form a
/// standard loop system.
inline ZLoop loop_generator(const CurveFamily& curve, int j, cplx base_z) {
  if (j < 0 || j >= curve.N()) throw InvalidArgument("loop index out of range");
  if (curve.branch_distance(base_z) < curve.exclusion_radius()) {
    throw GeometryFailure("base point lies on a branch point");
  }
  const cplx aj = curve.a(j);
  double r = 0.4 * curve.isolation(j);
  for (int k = 0; k < curve.N(); ++k) {
    if (k == j) continue;
    r = std::min(r, 0.5 * distance_to(Segment{LineSegment{base_z, curve.a(k)}}, aj));
  }
  if (std::abs(base_z - aj) <= 2.0 * r) r = 0.5 * std::abs(base_z - aj);
  if (r < 10.0 * curve.exclusion_radius()) {
    throw GeometryFailure("branch points too clustered for the default keyhole loops");
  }
  const cplx u = (base_z - aj) / std::abs(base_z - aj);
  const cplx p1 = aj + r * u;
  ZLoop loop;
  loop.base = base_z;
  loop.around = j;
  loop.segments = {LineSegment{base_z, p1}, circle(aj, r, +1, std::arg(u)), LineSegment{p1, base_z}};
  const auto spoke = std::span<const Segment>(loop.segments.data(), 1);
  for (int k = 0; k < curve.N(); ++k) {
    if (k == j) continue;
    if (distance_to(spoke, curve.a(k)) < std::max(curve.exclusion_radius(), 0.5 * r)) {
      throw GeometryFailure("keyhole spoke passes too close to another branch point");
    }
  }
  return loop;
}

/// Counterclockwise circle about the centroid through base_z; it must enclose
/// every branch point.
inline ZLoop large_circle(const CurveFamily& curve, cplx base_z) {
  const cplx c = curve.centroid();
  const double R = std::abs(base_z - c);
  for (const auto& ai : curve.a()) {
    if (std::abs(ai - c) > R - curve.sep() / 4.0) {
      throw GeometryFailure("base point too close to the branch points for a large circle");
    }
  }
  ZLoop loop;
  loop.base = base_z;
  loop.segments = {circle(c, R, +1, std::arg(base_z - c))};
  return loop;
}

struct OdeOptions {
  double rel_tol = 1e-12;
  double abs_tol = 1e-30;  // floor only; entries shrinking near a_j need relative control
  long max_steps = 2000000;
  double min_step = 1e-14;
};

namespace detail {

// The continuation runs in extended precision: Phi spans many orders of
// magnitude across its columns (|Pi|^{(p-1)|n|/m}), and the entries of
// Phi^{-1} Phi_rho are recovered by cancellation.
using real_x = long double;
using cplx_x = std::complex<real_x>;
using MatrixX = Eigen::Matrix<cplx_x, Eigen::Dynamic, Eigen::Dynamic>;

// Dormand-Prince 5(4) on dY/dt = F(t) Y with F(t) = A(z(t)) z'(t).
template <class Field>
MatrixX dopri5(const Field& F, MatrixX Y, const OdeOptions& opts) {
  static constexpr real_x c2 = 1.0L / 5, c3 = 3.0L / 10, c4 = 4.0L / 5, c5 = 8.0L / 9;
  static constexpr real_x a21 = 1.0L / 5;
  static constexpr real_x a31 = 3.0L / 40, a32 = 9.0L / 40;
  static constexpr real_x a41 = 44.0L / 45, a42 = -56.0L / 15, a43 = 32.0L / 9;
  static constexpr real_x a51 = 19372.0L / 6561, a52 = -25360.0L / 2187, a53 = 64448.0L / 6561,
                          a54 = -212.0L / 729;
  static constexpr real_x a61 = 9017.0L / 3168, a62 = -355.0L / 33, a63 = 46732.0L / 5247,
                          a64 = 49.0L / 176, a65 = -5103.0L / 18656;
  static constexpr real_x b1 = 35.0L / 384, b3 = 500.0L / 1113, b4 = 125.0L / 192, b5 = -2187.0L / 6784,
                          b6 = 11.0L / 84;
  static constexpr real_x e1 = 71.0L / 57600, e3 = -71.0L / 16695, e4 = 71.0L / 1920,
                          e5 = -17253.0L / 339200, e6 = 22.0L / 525, e7 = -1.0L / 40;

  real_x t = 0.0L;
  real_x h = 1.0L / 64;
  long steps = 0;
  MatrixX k1 = F(0.0L) * Y;
  while (t < 1.0L) {
    if (++steps > opts.max_steps) throw IntegrationFailure("ODE continuation exceeded the step budget");
    if (t + h > 1.0L) h = 1.0L - t;
    const MatrixX k2 = F(t + c2 * h) * (Y + h * a21 * k1);
    const MatrixX k3 = F(t + c3 * h) * (Y + h * (a31 * k1 + a32 * k2));
    const MatrixX k4 = F(t + c4 * h) * (Y + h * (a41 * k1 + a42 * k2 + a43 * k3));
    const MatrixX k5 = F(t + c5 * h) * (Y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    const MatrixX k6 = F(t + h) * (Y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    const MatrixX Yn = Y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    const MatrixX k7 = F(t + h) * Yn;
    const MatrixX E = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

    real_x err = 0.0L;
    for (Eigen::Index r = 0; r < Y.rows(); ++r) {
      for (Eigen::Index c = 0; c < Y.cols(); ++c) {
        const real_x sc = opts.abs_tol + opts.rel_tol * std::max(std::abs(Y(r, c)), std::abs(Yn(r, c)));
        err = std::max(err, std::abs(E(r, c)) / sc);
      }
    }
    if (!std::isfinite(err)) throw IntegrationFailure("ODE continuation produced non-finite values");
    if (err <= 1.0L) {
      t += h;
      Y = Yn;
      k1 = k7;
    }
    const real_x factor = err == 0.0L ? 5.0L : std::clamp(0.9L * std::pow(err, -0.2L), 0.2L, 5.0L);
    h *= factor;
    if (h < opts.min_step) throw IntegrationFailure("ODE step size underflow");
  }
  return Y;
}

inline std::pair<cplx_x, cplx_x> point_and_tangent(const Segment& seg, real_x t) {
  if (const auto* l = std::get_if<LineSegment>(&seg)) {
    const cplx_x a(l->from), b(l->to);
    return {a + (b - a) * t, b - a};
  }
  const auto& arc = std::get<ArcSegment>(seg);
  const cplx_x e = std::polar(static_cast<real_x>(arc.radius), arc.start_angle + arc.sweep * t);
  return {cplx_x(arc.center) + e, cplx_x(0.0L, static_cast<real_x>(arc.sweep)) * e};
}

inline MatrixX continue_x(const CurveFamily& curve, const std::vector<Matrix>& B, const ZLoop& loop, MatrixX Y,
                          const OdeOptions& opts) {
  std::vector<MatrixX> Bx;
  for (const auto& Bi : B) Bx.push_back(Bi.cast<cplx_x>());
  std::vector<cplx_x> ax;
  for (const auto& ai : curve.a()) ax.emplace_back(ai);
  const auto dim = Y.rows();
  for (const auto& seg : loop.segments) {
    for (const auto& ai : curve.a()) {
      if (distance_to(seg, ai) < curve.exclusion_radius()) {
        throw IntegrationFailure("continuation path passes through a branch point");
      }
    }
    if (segment_length(seg) == 0.0) continue;
    const auto F = [&](real_x t) {
      const auto [z, dz] = point_and_tangent(seg, t);
      MatrixX A = MatrixX::Zero(dim, dim);
      for (std::size_t i = 0; i < Bx.size(); ++i) A += Bx[i] * (dz / (z - ax[i]));
      return A;
    };
    Y = dopri5(F, std::move(Y), opts);
  }
  return Y;
}

// Phi(base)^{-1} from the closed form, polished by one Newton step.
inline MatrixX refined_inverse(const PhiEvaluation& ev) {
  const MatrixX P = ev.phi().cast<cplx_x>();
  const MatrixX X = ev.phi_inverse().cast<cplx_x>();
  return X + X * (MatrixX::Identity(P.rows(), P.cols()) - P * X);
}

}  // namespace detail

/// Continues Y along the loop through dY/dz = (sum_i B^(i)/(z - a_i)) Y.
inline Matrix continue_phi(const CurveFamily& curve, const std::vector<Matrix>& B, const ZLoop& loop,
                           const Matrix& Y, const OdeOptions& opts = {}) {
  return detail::continue_x(curve, B, loop, Y.cast<detail::cplx_x>(), opts).cast<cplx>();
}

/// Phi(base_z) continued once around the loop.
inline Matrix continue_phi(const FundamentalSolution& sol, const std::vector<Matrix>& B, const ZLoop& loop,
                           const OdeOptions& opts = {}) {
  return continue_phi(sol.curve(), B, loop, phi(sol, loop.base), opts);
}

/// Phi(base)^{-1} Phi_rho(base).
inline Matrix monodromy_along(const FundamentalSolution& sol, const std::vector<Matrix>& B, const ZLoop& loop,
                              const OdeOptions& opts = {}) {
  const auto ev = evaluate(sol, loop.base);
  const auto end = detail::continue_x(sol.curve(), B, loop, ev.phi().cast<detail::cplx_x>(), opts);
  return (detail::refined_inverse(ev) * end).cast<cplx>();
}

inline Matrix monodromy_matrix(const FundamentalSolution& sol, const std::vector<Matrix>& B, int j,
                               const OdeOptions& opts = {}) {
  return monodromy_along(sol, B, loop_generator(sol.curve(), j, sol.base_z()), opts);
}

struct MonodromyData {
  std::vector<Matrix> generators;  // one per branch point, in branch order
  std::vector<ZLoop> loops;
  cplx base_z;
  /// Branch indices in the order the loops are traversed along a large
  /// counterclockwise circle through base_z.
  std::vector<int> order;
};

/// Branch indices sorted by the direction of their spokes from base_z,
/// measured counterclockwise from the outward direction base_z - centroid.
inline std::vector<int> loop_order(const CurveFamily& curve, cplx base_z) {
  const double tail = std::arg(base_z - curve.centroid());
  std::vector<double> angle(static_cast<std::size_t>(curve.N()));
  for (int j = 0; j < curve.N(); ++j) {
    double phi = std::arg(curve.a(j) - base_z) - tail;
    phi = std::fmod(phi, 2.0 * pi);
    if (phi < 0) phi += 2.0 * pi;
    angle[static_cast<std::size_t>(j)] = phi;
  }
  std::vector<int> order(static_cast<std::size_t>(curve.N()));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int x, int y) { return angle[static_cast<std::size_t>(x)] < angle[static_cast<std::size_t>(y)]; });
  return order;
}

inline MonodromyData monodromy_data(const FundamentalSolution& sol, const std::vector<Matrix>& B,
                                    const std::vector<ZLoop>& loops, const OdeOptions& opts = {}) {
  MonodromyData data;
  data.base_z = sol.base_z();
  data.loops = loops;
  data.order = loop_order(sol.curve(), sol.base_z());
  const auto ev = evaluate(sol, sol.base_z());
  const auto inv = detail::refined_inverse(ev);
  const detail::MatrixX start = ev.phi().cast<detail::cplx_x>();
  for (const auto& loop : loops) {
    data.generators.push_back((inv * detail::continue_x(sol.curve(), B, loop, start, opts)).cast<cplx>());
  }
  return data;
}

inline std::vector<ZLoop> standard_loops(const CurveFamily& curve, cplx base_z) {
  std::vector<ZLoop> loops;
  for (int j = 0; j < curve.N(); ++j) loops.push_back(loop_generator(curve, j, base_z));
  return loops;
}

inline MonodromyData monodromy_data(const FundamentalSolution& sol, const std::vector<Matrix>& B,
                                    const OdeOptions& opts = {}) {
  return monodromy_data(sol, B, standard_loops(sol.curve(), sol.base_z()), opts);
}

/// Product of the generators in traversal order, the first loop rightmost;
/// this is the monodromy along the large counterclockwise circle, i.e. the
/// clockwise loop about infinity.
inline Matrix monodromy_at_infinity(const MonodromyData& data) {
  const auto p = data.generators.empty() ? 0 : data.generators.front().rows();
  Matrix P = Matrix::Identity(p, p);
  for (int j : data.order) P = data.generators[static_cast<std::size_t>(j)] * P;
  return P;
}

/// Case 1: diag(e^{2 pi i beta_k^(j)}).
inline Matrix case1_monodromy(const FundamentalSolution& sol, int j) {
  const int p = sol.p();
  Matrix Mj = Matrix::Zero(p, p);
  for (int k = 0; k < p; ++k) Mj(k, k) = std::exp(two_pi_i * sol.beta()(k, j));
  return Mj;
}

/// alpha-hat_d = Phi_{k,k+d}/Phi_{kk}, read off row 0 of Phi(z).
inline std::vector<cplx> alpha_hat(const Matrix& phi_z) {
  std::vector<cplx> out;
  for (Eigen::Index d = 1; d < phi_z.cols(); ++d) out.push_back(phi_z(0, d) / phi_z(0, 0));
  return out;
}

/// e^{2 pi i theta_j} A^{-1} diag(q^k) A with q = e^{-2 pi i n/m} and A the unit
/// upper triangular Toeplitz matrix with bands alpha-hat_d: the monodromy when
/// every kappa_d is a multiple of Pi^{dn/m} (fiber-point chains).
inline Matrix case2_monodromy(const FundamentalSolution& sol, int j, const std::vector<cplx>& ahat) {
  const int p = sol.p();
  const cplx q = std::exp(-two_pi_i * sol.curve().step());
  std::vector<cplx> bands = {1.0};
  bands.insert(bands.end(), ahat.begin(), ahat.end());
  Matrix A = detail::toeplitz_upper(bands, p);
  Matrix Q = Matrix::Zero(p, p);
  for (int k = 0; k < p; ++k) Q(k, k) = ipow(q, k);
  const Matrix Ainv = A.triangularView<Eigen::Upper>().solve(Matrix::Identity(p, p));
  return std::exp(two_pi_i * sol.theta()[static_cast<std::size_t>(j)]) * Ainv * Q * A;
}

/// The printed p = 3 Case 2 matrix.
inline Matrix case2_p3(cplx theta_j, double step, cplx a1, cplx a2) {
  const cplx q = std::exp(-two_pi_i * step);
  Matrix M(3, 3);
  M << 1.0, a1 * (1.0 - q), a2 * (1.0 - q * q) - a1 * a1 * (q - q * q),
      0.0, q, a1 * (q - q * q),
      0.0, 0.0, q * q;
  return std::exp(two_pi_i * theta_j) * M;
}

/// The printed p = 3 Case 3 matrix (gamma_1 fiber loops, gamma_2 trivial).
inline Matrix case3_p3(cplx theta_j, double step, cplx alpha) {
  const cplx q = std::exp(-two_pi_i * step);
  Matrix M(3, 3);
  M << 1.0, alpha * (1.0 - q), alpha * alpha / 2.0 * (1.0 - q) * (1.0 - q),
      0.0, q, alpha * (q - q * q),
      0.0, 0.0, q * q;
  return std::exp(two_pi_i * theta_j) * M;
}

/// Coefficients of det(x I - A), highest power first (Faddeev-LeVerrier).
inline std::vector<cplx> characteristic_polynomial(const Matrix& A) {
  const auto n = A.rows();
  std::vector<cplx> c(static_cast<std::size_t>(n + 1));
  c[0] = 1.0;
  Matrix Mk = Matrix::Zero(n, n);
  for (Eigen::Index k = 1; k <= n; ++k) {
    Mk = A * Mk + c[static_cast<std::size_t>(k - 1)] * Matrix::Identity(n, n);
    c[static_cast<std::size_t>(k)] = -(A * Mk).trace() / static_cast<double>(k);
  }
  return c;
}

inline std::vector<cplx> polynomial_from_roots(const std::vector<cplx>& roots) {
  std::vector<cplx> c = {1.0};
  for (const auto& r : roots) {
    c.push_back(0.0);
    for (std::size_t k = c.size() - 1; k > 0; --k) c[k] -= r * c[k - 1];
  }
  return c;
}

/// Distance between the spectrum of A and the expected multiset, measured
/// through the characteristic polynomial coefficients (stable under repeated
/// eigenvalues, unlike eigensolvers on defective matrices).
inline double spectrum_error(const Matrix& A, const std::vector<cplx>& expected) {
  const auto c = characteristic_polynomial(A);
  const auto e = polynomial_from_roots(expected);
  double err = 0.0;
  for (std::size_t k = 0; k < c.size(); ++k) err = std::max(err, std::abs(c[k] - e[k]));
  return err;
}

inline std::vector<cplx> expected_eigenvalues(const FundamentalSolution& sol, int j) {
  std::vector<cplx> ev;
  for (int k = 0; k < sol.p(); ++k) ev.push_back(std::exp(two_pi_i * sol.beta()(k, j)));
  return ev;
}

inline double lower_triangle(const Matrix& A) {
  double r = 0.0;
  for (Eigen::Index k = 0; k < A.rows(); ++k) {
    for (Eigen::Index l = 0; l < k; ++l) r = std::max(r, std::abs(A(k, l)));
  }
  return r;
}

/// max_j || M_j(a + delta) - M_j(a) ||_F with the loops and chains held fixed.
/// B is the coefficient set at the unperturbed a.
inline double isomonodromy_check(const FundamentalSolution& sol, const std::vector<Matrix>& B,
                                 const std::vector<cplx>& delta, const OdeOptions& opts = {}) {
  const auto& curve = sol.curve();
  if (static_cast<int>(delta.size()) != curve.N()) throw InvalidArgument("need one shift per branch point");
  double size = 0.0;
  for (const auto& d : delta) size = std::max(size, std::abs(d));
  if (size > curve.sep() / 10.0) throw InvalidArgument("perturbation larger than sep/10");
  const auto loops = standard_loops(curve, sol.base_z());
  const auto before = monodromy_data(sol, B, loops, opts);
  auto a = curve.a();
  for (std::size_t i = 0; i < a.size(); ++i) a[i] += delta[i];
  const FundamentalSolution moved(rebuild(sol.coefficients(), a, sol.quadrature()), sol.base_z(),
                                  sol.quadrature());
  const auto after = monodromy_data(moved, moved.coefficients().B, loops, opts);
  double worst = 0.0;
  for (std::size_t j = 0; j < before.generators.size(); ++j) {
    worst = std::max(worst, (after.generators[j] - before.generators[j]).norm());
  }
  return worst;
}

inline double isomonodromy_check(const FundamentalSolution& sol, const std::vector<cplx>& delta,
                                 const OdeOptions& opts = {}) {
  return isomonodromy_check(sol, sol.coefficients().B, delta, opts);
}

}  // namespace isotri
