#pragma once

// Upper triangular solutions B^(1..N) of the Schlesinger system built from
// contour integrals of w^{jn} dzeta/(zeta - a_i), or from their closed-form
// residues, plus a finite-difference check of the Schlesinger equations.

#include <functional>
#include <variant>
#include <vector>

#include "isotri/quadrature.hpp"
#include "isotri/residues.hpp"

namespace isotri {

/// chains[d-1] is the cycle gamma_d feeding the d-th superdiagonal.
struct NumericChains {
  std::vector<Chain> chains;
};

/// c[d-1] = c_d; the chain behind band d is (c_d / 2 pi i A_d) gamma_{infinity_alpha}.
struct PolynomialAtInfinity {
  int alpha = 0;
  std::vector<cplx> c;
};

/// c[nu][d-1] = c_d^nu; the chain behind band d is sum_nu (c_d^nu / 2 pi i) gamma_{a_nu}.
struct RationalAtBranchPoints {
  std::vector<std::vector<cplx>> c;
};

/// Matrices supplied from outside (e.g. a previous build-b run).
struct ExternalMatrices {};

using Provenance =
    std::variant<NumericChains, PolynomialAtInfinity, RationalAtBranchPoints, ExternalMatrices>;

struct TriangularCoefficients {
  CurveFamily curve;
  std::vector<cplx> theta;
  std::vector<Matrix> B;
  Provenance provenance;
};

inline const char* provenance_name(const Provenance& p) {
  switch (p.index()) {
    case 0: return "numeric";
    case 1: return "polynomial";
    case 2: return "rational";
    default: return "external";
  }
}

namespace detail {

inline void require_theta(const CurveFamily& curve, const std::vector<cplx>& theta) {
  if (static_cast<int>(theta.size()) != curve.N()) {
    throw InvalidArgument("theta needs one entry per branch point");
  }
}

// B^(i) with the diagonal theta_i - k n/m and the given superdiagonal bands
// bands[i][d-1].
inline std::vector<Matrix> assemble(const CurveFamily& curve, const std::vector<cplx>& theta,
                                    const std::vector<std::vector<cplx>>& bands) {
  const int p = curve.p();
  std::vector<Matrix> B;
  for (int i = 0; i < curve.N(); ++i) {
    Matrix Bi = Matrix::Zero(p, p);
    for (int k = 0; k < p; ++k) {
      Bi(k, k) = theta[static_cast<std::size_t>(i)] - static_cast<double>(k) * curve.step();
      for (int l = k + 1; l < p; ++l) {
        Bi(k, l) = bands[static_cast<std::size_t>(i)][static_cast<std::size_t>(l - k - 1)];
      }
    }
    B.push_back(std::move(Bi));
  }
  return B;
}

}  // namespace detail

inline TriangularCoefficients build_numeric(const CurveFamily& curve, const std::vector<cplx>& theta,
                                            const std::vector<Chain>& chains,
                                            const QuadratureOptions& opts = {}) {
  detail::require_theta(curve, theta);
  const int p = curve.p();
  if (static_cast<int>(chains.size()) != p - 1) {
    throw RegimeViolation("expected p-1 = " + std::to_string(p - 1) + " chains, got " +
                          std::to_string(chains.size()));
  }
  std::vector<std::vector<cplx>> bands(static_cast<std::size_t>(curve.N()),
                                       std::vector<cplx>(static_cast<std::size_t>(p - 1)));
  // The Omega integrands have poles only at the branch points, so infinity
  // loops may shrink to any circle about 0 that still encloses them all.
  const double tight = tight_infinity_radius(curve);
  for (int d = 1; d < p; ++d) {
    std::vector<Integrand> ins;
    for (int i = 0; i < curve.N(); ++i) ins.push_back(Integrand::omega(i, d));
    Chain chain = chains[static_cast<std::size_t>(d - 1)];
    for (auto& term : chain.terms) {
      if (term.loop.kind == LoopKind::Infinity && term.loop.radius > tight) {
        term.loop = loop_around_infinity(curve, term.loop.index, tight);
      }
    }
    const auto v = integrate(curve, chain, std::span<const Integrand>(ins), opts);
    for (int i = 0; i < curve.N(); ++i) {
      bands[static_cast<std::size_t>(i)][static_cast<std::size_t>(d - 1)] = v[static_cast<std::size_t>(i)];
    }
  }
  return {curve, theta, detail::assemble(curve, theta, bands), NumericChains{chains}};
}

inline TriangularCoefficients build_polynomial(const CurveFamily& curve,
                                               const std::vector<cplx>& theta, int alpha,
                                               const std::vector<cplx>& c) {
  detail::require_theta(curve, theta);
  const auto sc = structure_constants(curve);
  if (curve.n() < 0 || sc.s < 2) {
    throw InvalidRegime("the polynomial regime needs n > 0 and gcd(m, N) > 1");
  }
  if (alpha < 0 || alpha >= sc.s) throw InvalidArgument("infinity index out of range");
  const int p = curve.p();
  if (static_cast<int>(c.size()) < p - 1) throw InvalidArgument("need p-1 coefficients c_j");
  std::vector<std::vector<cplx>> bands(static_cast<std::size_t>(curve.N()),
                                       std::vector<cplx>(static_cast<std::size_t>(p - 1)));
  for (int d = 1; d < p; ++d) {
    if (d % sc.m1 != 0) continue;
    const cplx f = c[static_cast<std::size_t>(d - 1)] / infinity_prefactor(curve, alpha, d);
    for (int i = 0; i < curve.N(); ++i) {
      bands[static_cast<std::size_t>(i)][static_cast<std::size_t>(d - 1)] =
          f * residue_at_infinity(curve, alpha, i, d);
    }
  }
  return {curve, theta, detail::assemble(curve, theta, bands), PolynomialAtInfinity{alpha, c}};
}

inline TriangularCoefficients build_rational(const CurveFamily& curve,
                                             const std::vector<cplx>& theta,
                                             const std::vector<std::vector<cplx>>& c) {
  detail::require_theta(curve, theta);
  if (curve.n() > 0) throw InvalidRegime("the rational regime needs n < 0");
  const int p = curve.p();
  if (static_cast<int>(c.size()) != curve.N()) {
    throw InvalidArgument("need one coefficient row per branch point");
  }
  for (const auto& row : c) {
    if (static_cast<int>(row.size()) < p - 1) throw InvalidArgument("need p-1 coefficients per row");
  }
  std::vector<std::vector<cplx>> bands(static_cast<std::size_t>(curve.N()),
                                       std::vector<cplx>(static_cast<std::size_t>(p - 1)));
  for (int d = 1; d < p; ++d) {
    if (d % curve.m() != 0) continue;
    for (int i = 0; i < curve.N(); ++i) {
      cplx sum{};
      for (int nu = 0; nu < curve.N(); ++nu) {
        sum += c[static_cast<std::size_t>(nu)][static_cast<std::size_t>(d - 1)] *
               residue_at_branch_point(curve, nu, i, d);
      }
      bands[static_cast<std::size_t>(i)][static_cast<std::size_t>(d - 1)] = sum;
    }
  }
  return {curve, theta, detail::assemble(curve, theta, bands), RationalAtBranchPoints{c}};
}

/// Re-run the same recipe on a family with moved branch points. Numeric
/// chains keep their planar geometry; only their base sheets are reseated.
inline TriangularCoefficients rebuild(const TriangularCoefficients& coeffs,
                                      const std::vector<cplx>& a,
                                      const QuadratureOptions& opts = {}) {
  const CurveFamily moved = coeffs.curve.with_branch_points(a);
  return std::visit(
      [&](const auto& prov) -> TriangularCoefficients {
        using T = std::decay_t<decltype(prov)>;
        if constexpr (std::is_same_v<T, NumericChains>) {
          std::vector<Chain> chains;
          for (const auto& ch : prov.chains) chains.push_back(reseat(moved, ch));
          return build_numeric(moved, coeffs.theta, chains, opts);
        } else if constexpr (std::is_same_v<T, PolynomialAtInfinity>) {
          return build_polynomial(moved, coeffs.theta, prov.alpha, prov.c);
        } else if constexpr (std::is_same_v<T, RationalAtBranchPoints>) {
          return build_rational(moved, coeffs.theta, prov.c);
        } else {
          throw InvalidArgument("externally supplied matrices cannot be rebuilt at moved branch points");
        }
      },
      coeffs.provenance);
}

/// The chains a residue recipe stands for, so that it can be compared with
/// (or evaluated through) quadrature.
inline std::vector<Chain> equivalent_chains(const TriangularCoefficients& coeffs) {
  const auto& curve = coeffs.curve;
  const int p = curve.p();
  return std::visit(
      [&](const auto& prov) -> std::vector<Chain> {
        using T = std::decay_t<decltype(prov)>;
        std::vector<Chain> out(static_cast<std::size_t>(std::max(0, p - 1)));
        if constexpr (std::is_same_v<T, NumericChains>) {
          return prov.chains;
        } else if constexpr (std::is_same_v<T, PolynomialAtInfinity>) {
          const auto loop = loop_around_infinity(curve, prov.alpha);
          for (int d = 1; d < p; ++d) {
            const cplx c = prov.c[static_cast<std::size_t>(d - 1)];
            if (c != cplx{}) {
              out[static_cast<std::size_t>(d - 1)].add(
                  c / (two_pi_i * infinity_prefactor(curve, prov.alpha, d)), loop);
            }
          }
          return out;
        } else if constexpr (std::is_same_v<T, RationalAtBranchPoints>) {
          for (int nu = 0; nu < curve.N(); ++nu) {
            const auto loop = loop_around_branch_point(curve, nu);
            for (int d = 1; d < p; ++d) {
              const cplx c = prov.c[static_cast<std::size_t>(nu)][static_cast<std::size_t>(d - 1)];
              if (c != cplx{}) out[static_cast<std::size_t>(d - 1)].add(c / two_pi_i, loop);
            }
          }
          return out;
        } else {
          throw InvalidArgument("externally supplied matrices carry no chains");
        }
      },
      coeffs.provenance);
}

/// B^(infinity) = sum_i B^(i).
inline Matrix b_infinity(const TriangularCoefficients& coeffs) {
  const int p = coeffs.curve.p();
  Matrix S = Matrix::Zero(p, p);
  for (const auto& Bi : coeffs.B) S += Bi;
  return S;
}

inline double off_diagonal_magnitude(const Matrix& A) {
  double r = 0.0;
  for (int k = 0; k < A.rows(); ++k) {
    for (int l = 0; l < A.cols(); ++l) {
      if (k != l) r = std::max(r, std::abs(A(k, l)));
    }
  }
  return r;
}

/// Deviations from the structural invariants: zero lower triangle, diagonal
/// step n/m, constant superdiagonal bands.
struct StructureReport {
  double lower = 0.0;
  double diagonal_step = 0.0;
  double band = 0.0;
};

inline StructureReport structure_report(const TriangularCoefficients& coeffs) {
  StructureReport r;
  const double step = coeffs.curve.step();
  for (const auto& Bi : coeffs.B) {
    const int p = static_cast<int>(Bi.rows());
    for (int k = 0; k < p; ++k) {
      for (int l = 0; l < k; ++l) r.lower = std::max(r.lower, std::abs(Bi(k, l)));
      if (k + 1 < p) {
        r.diagonal_step = std::max(r.diagonal_step, std::abs(Bi(k, k) - Bi(k + 1, k + 1) - step));
      }
      for (int l = k + 1; l + 1 < p; ++l) {
        r.band = std::max(r.band, std::abs(Bi(k, l) - Bi(k + 1, l + 1)));
      }
    }
  }
  return r;
}

using Builder = std::function<TriangularCoefficients(const std::vector<cplx>&)>;

inline Builder rebuilder(const TriangularCoefficients& coeffs, const QuadratureOptions& opts = {}) {
  return [coeffs, opts](const std::vector<cplx>& a) { return rebuild(coeffs, a, opts); };
}

/// max over i, j of the central-difference defect in
///   dB^(i)/da_j = [B^(i), B^(j)]/(a_i - a_j)          (i != j)
///   dB^(i)/da_i = -sum_{j != i} [B^(i), B^(j)]/(a_i - a_j)
/// measured in the Frobenius norm.
inline double schlesinger_residual(const Builder& builder, const std::vector<cplx>& a, double h) {
  const int N = static_cast<int>(a.size());
  const auto base = builder(a);
  double worst = 0.0;
  for (int j = 0; j < N; ++j) {
    auto ap = a, am = a;
    ap[static_cast<std::size_t>(j)] += h;
    am[static_cast<std::size_t>(j)] -= h;
    const auto Bp = builder(ap);
    const auto Bm = builder(am);
    for (int i = 0; i < N; ++i) {
      const Matrix dB = (Bp.B[static_cast<std::size_t>(i)] - Bm.B[static_cast<std::size_t>(i)]) / (2.0 * h);
      const auto& Bi = base.B[static_cast<std::size_t>(i)];
      Matrix rhs = Matrix::Zero(Bi.rows(), Bi.cols());
      if (i != j) {
        const auto& Bj = base.B[static_cast<std::size_t>(j)];
        rhs = (Bi * Bj - Bj * Bi) / (a[static_cast<std::size_t>(i)] - a[static_cast<std::size_t>(j)]);
      } else {
        for (int k = 0; k < N; ++k) {
          if (k == i) continue;
          const auto& Bk = base.B[static_cast<std::size_t>(k)];
          rhs -= (Bi * Bk - Bk * Bi) / (a[static_cast<std::size_t>(i)] - a[static_cast<std::size_t>(k)]);
        }
      }
      worst = std::max(worst, (dB - rhs).norm());
    }
  }
  return worst;
}

}  // namespace isotri
