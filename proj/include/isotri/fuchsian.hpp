#pragma once

// The fundamental solution Phi = M(kappa(z)) D(z) of the Fuchsian system
// dPhi/dz = sum_i B^(i)/(z - a_i) Phi, its derivative and closed-form inverse.

#include <array>
#include <optional>
#include <random>

#include "isotri/partitions.hpp"
#include "isotri/schlesinger.hpp"

namespace isotri {

class FundamentalSolution {
 public:
  explicit FundamentalSolution(TriangularCoefficients coeffs, std::optional<cplx> base_z = std::nullopt,
                               QuadratureOptions quad = {})
      : coeffs_(std::move(coeffs)), quad_(quad) {
    const auto& c = coeffs_.curve;
    base_z_ = base_z.value_or(default_base_point(c));
    if (c.branch_distance(base_z_) < c.exclusion_radius()) {
      throw SingularPoint("base point lies on a branch point");
    }
    if (std::holds_alternative<ExternalMatrices>(coeffs_.provenance)) {
      throw InvalidArgument("a fundamental solution needs chains or a residue recipe");
    }
    beta_ = Matrix::Zero(c.p(), c.N());
    for (int k = 0; k < c.p(); ++k) {
      for (int i = 0; i < c.N(); ++i) {
        beta_(k, i) = coeffs_.theta[static_cast<std::size_t>(i)] - static_cast<double>(k) * c.step();
      }
    }
    for (const auto& ai : c.a()) log_base_.push_back(std::log(base_z_ - ai));
    if (const auto* nc = std::get_if<NumericChains>(&coeffs_.provenance)) chains_ = nc->chains;
  }

  const CurveFamily& curve() const { return coeffs_.curve; }
  const TriangularCoefficients& coefficients() const { return coeffs_; }
  const std::vector<cplx>& theta() const { return coeffs_.theta; }
  cplx base_z() const { return base_z_; }
  int p() const { return coeffs_.curve.p(); }
  /// beta(k, i) = theta_i - k n/m (0-based k).
  const Matrix& beta() const { return beta_; }
  const std::vector<cplx>& log_base() const { return log_base_; }
  const std::vector<Chain>& chains() const { return chains_; }
  const QuadratureOptions& quadrature() const { return quad_; }

  /// log(z - a_i) continued along the straight segment from base_z.
  std::vector<cplx> log_branches(cplx z) const {
    const auto& c = curve();
    const std::array<Segment, 1> seg = {LineSegment{base_z_, z}};
    std::vector<cplx> out;
    for (int i = 0; i < c.N(); ++i) {
      if (distance_to(std::span<const Segment>(seg), c.a(i)) < c.exclusion_radius()) {
        throw SingularPoint("the path from the base point passes through a branch point");
      }
      out.push_back(log_base_[static_cast<std::size_t>(i)] + std::log((z - c.a(i)) / (base_z_ - c.a(i))));
    }
    return out;
  }

  /// Minimum distance from z at which a chain loop may pass: half its radius,
  /// capped at sep/8 (which also applies to polylines).
  static double fiber_clearance(const CurveFamily& curve, const SheetedLoop& loop) {
    const double cap = curve.sep() / 8.0;
    return loop.radius > 0.0 ? std::min(0.5 * loop.radius, cap) : cap;
  }

  /// True if z is a regular point that every chain loop keeps clear of.
  bool is_admissible(cplx z) const {
    const auto& c = curve();
    if (c.branch_distance(z) < c.exclusion_radius()) return false;
    for (const auto& ch : chains_) {
      for (const auto& t : ch.terms) {
        if (distance_to(t.loop, z) < fiber_clearance(c, t.loop)) return false;
      }
    }
    return true;
  }

  void require_admissible(cplx z) const {
    const auto& c = curve();
    if (c.branch_distance(z) < c.exclusion_radius()) throw SingularPoint("z is a branch point");
    for (const auto& ch : chains_) {
      for (const auto& t : ch.terms) {
        if (distance_to(t.loop, z) < fiber_clearance(c, t.loop)) {
          throw ChainTooCloseToFiber("a chain loop passes too close to the fiber over z");
        }
      }
    }
  }

  /// kappa_j(z) and kappa_j'(z) for j = 1..p-1 (R_j / S_j in the residue regimes).
  std::pair<std::vector<cplx>, std::vector<cplx>> kappas(cplx z) const {
    require_admissible(z);
    const auto& c = curve();
    const int p = c.p();
    std::vector<cplx> k(static_cast<std::size_t>(std::max(0, p - 1)));
    std::vector<cplx> kp(k.size());
    for (int d = 1; d < p; ++d) {
      const auto idx = static_cast<std::size_t>(d - 1);
      if (const auto* nc = std::get_if<NumericChains>(&coeffs_.provenance)) {
        const auto r = kappa_pair(c, nc->chains[idx], d, z, quad_);
        k[idx] = r.value;
        kp[idx] = r.derivative;
      } else if (const auto* pol = std::get_if<PolynomialAtInfinity>(&coeffs_.provenance)) {
        const auto r = R_j(c, z, pol->c[idx], d);
        k[idx] = r.value;
        kp[idx] = r.derivative;
      } else if (const auto* rat = std::get_if<RationalAtBranchPoints>(&coeffs_.provenance)) {
        std::vector<cplx> col;
        for (const auto& row : rat->c) col.push_back(row[idx]);
        const auto r = S_j(c, z, col, d);
        k[idx] = r.value;
        kp[idx] = r.derivative;
      }
    }
    return {k, kp};
  }

 private:
  TriangularCoefficients coeffs_;
  QuadratureOptions quad_;
  cplx base_z_;
  Matrix beta_;
  std::vector<cplx> log_base_;
  std::vector<Chain> chains_;
};

/// D(z) = diag(prod_i exp(beta_k^(i) log_i(z))).
inline Matrix d_matrix(const FundamentalSolution& sol, cplx z) {
  if (sol.curve().branch_distance(z) < sol.curve().exclusion_radius()) throw SingularPoint("z is a branch point");
  const auto logs = sol.log_branches(z);
  const int p = sol.p();
  Matrix D = Matrix::Zero(p, p);
  for (int k = 0; k < p; ++k) {
    cplx e{};
    for (std::size_t i = 0; i < logs.size(); ++i) e += sol.beta()(k, static_cast<Eigen::Index>(i)) * logs[i];
    D(k, k) = std::exp(e);
  }
  return D;
}

/// D_z D^{-1} = diag(sum_i beta_k^(i)/(z - a_i)).
inline Matrix d_log_derivative(const FundamentalSolution& sol, cplx z) {
  const auto& c = sol.curve();
  if (c.branch_distance(z) < c.exclusion_radius()) throw SingularPoint("z is a branch point");
  const int p = sol.p();
  Matrix L = Matrix::Zero(p, p);
  for (int k = 0; k < p; ++k) {
    for (int i = 0; i < c.N(); ++i) L(k, k) += sol.beta()(k, i) / (z - c.a(i));
  }
  return L;
}

struct PhiEvaluation {
  Matrix M, M_inv, M_z;
  Matrix D, D_z;
  std::vector<cplx> kappa, kappa_prime;

  Matrix phi() const { return M * D; }
  Matrix phi_derivative() const { return M_z * D + M * D_z; }
  /// D^{-1} M^{-1}, from the closed forms.
  Matrix phi_inverse() const {
    Matrix Dinv = Matrix::Zero(D.rows(), D.cols());
    for (Eigen::Index k = 0; k < D.rows(); ++k) Dinv(k, k) = 1.0 / D(k, k);
    return Dinv * M_inv;
  }
};

inline PhiEvaluation evaluate(const FundamentalSolution& sol, cplx z) {
  PhiEvaluation ev;
  auto [k, kp] = sol.kappas(z);
  const int p = sol.p();
  ev.M = m_matrix(k, p);
  ev.M_inv = m_inverse(k, p);
  ev.M_z = m_derivative(k, kp, p);
  ev.D = d_matrix(sol, z);
  ev.D_z = d_log_derivative(sol, z) * ev.D;
  ev.kappa = std::move(k);
  ev.kappa_prime = std::move(kp);
  return ev;
}

inline Matrix phi(const FundamentalSolution& sol, cplx z) { return evaluate(sol, z).phi(); }
inline Matrix phi_derivative(const FundamentalSolution& sol, cplx z) {
  return evaluate(sol, z).phi_derivative();
}
inline Matrix phi_inverse(const FundamentalSolution& sol, cplx z) { return evaluate(sol, z).phi_inverse(); }

/// sum_i B^(i)/(z - a_i).
inline Matrix connection_matrix(const CurveFamily& curve, const std::vector<Matrix>& B, cplx z) {
  if (curve.branch_distance(z) < curve.exclusion_radius()) throw SingularPoint("z is a branch point");
  Matrix A = Matrix::Zero(curve.p(), curve.p());
  for (int i = 0; i < curve.N(); ++i) A += B[static_cast<std::size_t>(i)] / (z - curve.a(i));
  return A;
}

inline Matrix connection_matrix(const TriangularCoefficients& coeffs, cplx z) {
  return connection_matrix(coeffs.curve, coeffs.B, z);
}

/// || Phi_z Phi^{-1} - sum_i B^(i)/(z - a_i) ||_F.
inline double ode_residual(const FundamentalSolution& sol, const std::vector<Matrix>& B, cplx z) {
  const auto ev = evaluate(sol, z);
  return (ev.phi_derivative() * ev.phi_inverse() - connection_matrix(sol.curve(), B, z)).norm();
}

inline double ode_residual(const FundamentalSolution& sol, const TriangularCoefficients& coeffs, cplx z) {
  return ode_residual(sol, coeffs.B, z);
}

/// |(-jn/m) kappa_j sum_i 1/(z - a_i) + kappa_j' - sum_i (1/(z - a_i)) int Omega_i^j|,
/// relative to max(1, |right-hand side|). Chains come from the solution's
/// recipe (equivalent chains in the residue regimes).
inline double lemma1_residual(const FundamentalSolution& sol, int j, cplx z) {
  const auto& c = sol.curve();
  if (j < 1 || j >= c.p()) throw InvalidArgument("j must lie in 1..p-1");
  sol.require_admissible(z);
  const auto chains = equivalent_chains(sol.coefficients());
  const auto& chain = chains[static_cast<std::size_t>(j - 1)];
  std::vector<Integrand> ins = {Integrand::kappa(z, j), Integrand::kappa_prime(z, j)};
  for (int i = 0; i < c.N(); ++i) ins.push_back(Integrand::omega(i, j));
  const auto r = integrate(c, chain, std::span<const Integrand>(ins), sol.quadrature());
  const double f = kernel_factor(c, j);
  cplx inv_sum{}, rhs{};
  for (int i = 0; i < c.N(); ++i) {
    inv_sum += 1.0 / (z - c.a(i));
    rhs += r[static_cast<std::size_t>(2 + i)] / (z - c.a(i));
  }
  const cplx lhs = (-static_cast<double>(j) * c.n() / c.m()) * f * r[0] * inv_sum + f * r[1];
  return std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs));
}

/// Admissible sample points. With fiber-loop chains the points are drawn
/// inside the first such loop (where kappa is nontrivial), otherwise from a
/// box around the branch points.
inline std::vector<cplx> sample_points(const FundamentalSolution& sol, int count, std::uint64_t seed) {
  const auto& c = sol.curve();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const SheetedLoop* fiber_loop = nullptr;
  for (const auto& ch : sol.chains()) {
    for (const auto& t : ch.terms) {
      if (t.loop.kind == LoopKind::FiberPoint && fiber_loop == nullptr) fiber_loop = &t.loop;
    }
  }
  const cplx center = fiber_loop ? fiber_loop->center : c.centroid();
  double scale = 0.0;
  if (fiber_loop) {
    scale = 0.45 * fiber_loop->radius;
  } else {
    for (const auto& ai : c.a()) scale = std::max(scale, std::abs(ai - center));
    scale += c.sep();
  }
  std::vector<cplx> pts;
  int attempts = 0;
  while (static_cast<int>(pts.size()) < count) {
    if (++attempts > 10000 * std::max(1, count)) {
      throw GeometryFailure("could not find admissible sample points");
    }
    const cplx z = center + scale * cplx(u(rng), u(rng));
    if (!sol.is_admissible(z)) continue;
    if (c.branch_distance(z) < 0.1 * c.sep()) continue;
    try {
      (void)sol.log_branches(z);
    } catch (const SingularPoint&) {
      continue;
    }
    pts.push_back(z);
  }
  return pts;
}

}  // namespace isotri
