#pragma once

// Closed-form residues of w^{jn} dzeta/(zeta - a_i) and of the kappa kernel,
// and the rational functions R_j (poles at infinity, n > 0) and S_j (poles at
// the branch points, n < 0) that replace kappa_j in the rational regimes.

#include <vector>

#include "isotri/curve.hpp"

namespace isotri {

/// beta (beta - 1) ... (beta - k + 1) / k!
inline cplx gen_binomial(cplx beta, int k) {
  if (k < 0) throw InvalidArgument("binomial index must be nonnegative");
  cplx v{1.0, 0.0};
  for (int r = 0; r < k; ++r) v *= (beta - static_cast<double>(r)) / static_cast<double>(r + 1);
  return v;
}

/// All tuples of `parts` nonnegative integers summing to `total`, in
/// lexicographic order.
inline std::vector<std::vector<int>> compositions(int total, int parts) {
  std::vector<std::vector<int>> out;
  if (total < 0 || parts < 0) return out;
  if (parts == 0) {
    if (total == 0) out.emplace_back();
    return out;
  }
  std::vector<int> cur(static_cast<std::size_t>(parts), 0);
  auto rec = [&](auto&& self, int pos, int remaining) -> void {
    if (pos == parts - 1) {
      cur[static_cast<std::size_t>(pos)] = remaining;
      out.push_back(cur);
      return;
    }
    for (int v = 0; v <= remaining; ++v) {
      cur[static_cast<std::size_t>(pos)] = v;
      self(self, pos + 1, remaining - v);
    }
  };
  rec(rec, 0, total);
  return out;
}

namespace detail {

inline void require_positive_j(int j) {
  if (j < 1) throw InvalidArgument("power index j must be positive");
}

inline void require_branch_index(const CurveFamily& curve, int i) {
  if (i < 0 || i >= curve.N()) throw InvalidArgument("branch index out of range");
}

inline void require_n_positive(const CurveFamily& curve) {
  if (curve.n() < 0) throw InvalidRegime("this formula needs n > 0");
}

inline void require_n_negative(const CurveFamily& curve) {
  if (curve.n() > 0) throw InvalidRegime("this formula needs n < 0");
}

// T = N j n / m when m1 | j, else -1.
inline int infinity_order(const CurveFamily& curve, int j) {
  const auto sc = structure_constants(curve);
  if (j % sc.m1 != 0) return -1;
  return curve.N() * j * curve.n() / curve.m();
}

// sum_{k_1..k_N, q; sum = T} (-1)^q prod_h binom(jn/m, k_h) a_h^{k_h} x^q
// and its derivative in x.
inline std::pair<cplx, cplx> infinity_sum(const CurveFamily& curve, int j, int T, cplx x) {
  const double e = static_cast<double>(j * curve.n()) / curve.m();
  cplx value{}, derivative{};
  for (const auto& k : compositions(T, curve.N() + 1)) {
    const int q = k.back();
    cplx term = (q % 2 == 0) ? 1.0 : -1.0;
    for (int h = 0; h < curve.N(); ++h) {
      const int kh = k[static_cast<std::size_t>(h)];
      term *= gen_binomial(e, kh) * ipow(curve.a(h), kh);
    }
    value += term * ipow(x, q);
    if (q > 0) derivative += term * static_cast<double>(q) * ipow(x, q - 1);
  }
  return {value, derivative};
}

// Residue in zeta of prod_{h != nu}(zeta - a_h)^{-e} (zeta - a_nu)^{-e} / (zeta - x)
// at zeta = a_nu, for x != a_nu, and its derivative in x.
inline std::pair<cplx, cplx> branch_sum_offcenter(const CurveFamily& curve, int nu, int e, cplx x) {
  cplx value{}, derivative{};
  if (e < 1) return {value, derivative};
  const cplx anu = curve.a(nu);
  for (const auto& k : compositions(e - 1, curve.N())) {
    const int knu = k[static_cast<std::size_t>(nu)];
    cplx prod{1.0, 0.0};
    for (int h = 0; h < curve.N(); ++h) {
      if (h == nu) continue;
      const int kh = k[static_cast<std::size_t>(h)];
      prod *= gen_binomial(-static_cast<double>(e), kh) * ipow(anu - curve.a(h), -(kh + e));
    }
    const double sign = (knu % 2 == 0) ? 1.0 : -1.0;
    value += sign * ipow(anu - x, -(knu + 1)) * prod;
    derivative += sign * static_cast<double>(knu + 1) * ipow(anu - x, -(knu + 2)) * prod;
  }
  return {value, derivative};
}

}  // namespace detail

/// A_j = e^{i pi N j n/m} nu_{jn alpha}, nu_{jn alpha} = -m1 e^{2 pi i jn alpha/m}
/// (alpha 0-based). The sheet of infinity_alpha carries the phase e^{2 pi i alpha/m};
/// phases e^{2 pi i alpha/s} would repeat a point at infinity when 1 < s < m.
inline cplx infinity_prefactor(const CurveFamily& curve, int alpha, int j) {
  const auto sc = structure_constants(curve);
  const double phase = pi * curve.N() * j * static_cast<double>(curve.n()) / curve.m();
  const cplx nu = -static_cast<double>(sc.m1) *
                  std::polar(1.0, 2.0 * pi * j * static_cast<double>(curve.n()) * alpha / curve.m());
  return std::polar(1.0, phase) * nu;
}

/// Residue of w^{jn} dzeta/(zeta - a_i) at infinity_alpha (n > 0).
inline cplx residue_at_infinity(const CurveFamily& curve, int alpha, int i, int j) {
  detail::require_n_positive(curve);
  detail::require_positive_j(j);
  detail::require_branch_index(curve, i);
  const auto sc = structure_constants(curve);
  if (alpha < 0 || alpha >= sc.s) throw InvalidArgument("infinity index out of range");
  const int T = detail::infinity_order(curve, j);
  if (T < 0) return 0.0;
  return infinity_prefactor(curve, alpha, j) * detail::infinity_sum(curve, j, T, curve.a(i)).first;
}

/// Residue of w^{jn} dzeta/(zeta - a_i) at P_{a_nu} (n < 0), in the local
/// coordinate (zeta - a_nu)^{1/m}.
inline cplx residue_at_branch_point(const CurveFamily& curve, int nu, int i, int j) {
  detail::require_n_negative(curve);
  detail::require_positive_j(j);
  detail::require_branch_index(curve, i);
  detail::require_branch_index(curve, nu);
  if (j % curve.m() != 0) return 0.0;
  const int e = j * std::abs(curve.n()) / curve.m();
  const double m = curve.m();
  if (i != nu) return m * detail::branch_sum_offcenter(curve, nu, e, curve.a(i)).first;

  const cplx anu = curve.a(nu);
  cplx sum{};
  for (const auto& k : compositions(e, curve.N() - 1)) {
    cplx prod{1.0, 0.0};
    std::size_t slot = 0;
    for (int h = 0; h < curve.N(); ++h) {
      if (h == nu) continue;
      const int kh = k[slot++];
      prod *= gen_binomial(-static_cast<double>(e), kh) * ipow(anu - curve.a(h), -(kh + e));
    }
    sum += prod;
  }
  return m * sum;
}

/// Residue of w^{jn} dzeta/(zeta - z) at the point of sheet t over z.
inline cplx residue_at_fiber_point(const CurveFamily& curve, cplx z, int t, int j) {
  detail::require_positive_j(j);
  return ipow(sheet_value(curve, z, t), j * curve.n());
}

struct RationalValue {
  cplx value;
  cplx derivative;
};

/// R_j(z) and dR_j/dz: kappa_j of the chain (c_j / 2 pi i A_j) gamma_{infinity_alpha}.
inline RationalValue R_j(const CurveFamily& curve, cplx z, cplx c_j, int j) {
  detail::require_n_positive(curve);
  detail::require_positive_j(j);
  if (structure_constants(curve).s < 2) {
    throw InvalidRegime("the polynomial regime needs gcd(m, N) > 1");
  }
  const int T = detail::infinity_order(curve, j);
  if (T < 0) return {0.0, 0.0};
  const auto [v, d] = detail::infinity_sum(curve, j, T, z);
  const cplx f = -static_cast<double>(curve.m()) * c_j / (static_cast<double>(j) * curve.n());
  return {f * v, f * d};
}

/// S_j(z) and dS_j/dz: kappa_j of the chain sum_nu (c_j^nu / 2 pi i) gamma_{a_nu}.
inline RationalValue S_j(const CurveFamily& curve, cplx z, const std::vector<cplx>& c, int j) {
  detail::require_n_negative(curve);
  detail::require_positive_j(j);
  if (static_cast<int>(c.size()) != curve.N()) {
    throw InvalidArgument("S_j needs one coefficient per branch point");
  }
  if (j % curve.m() != 0) return {0.0, 0.0};
  const int e = j * std::abs(curve.n()) / curve.m();
  const double m = curve.m();
  const double f = -m * m / (static_cast<double>(j) * curve.n());
  cplx v{}, d{};
  for (int nu = 0; nu < curve.N(); ++nu) {
    const cplx cnu = c[static_cast<std::size_t>(nu)];
    if (cnu == cplx{}) continue;
    const auto [sv, sd] = detail::branch_sum_offcenter(curve, nu, e, z);
    v += cnu * sv;
    d += cnu * sd;
  }
  return {f * v, f * d};
}

}  // namespace isotri
