#pragma once

// Integer partitions in multiplicity form and the unitriangular Toeplitz
// matrices built from partition sums of kappa_1..kappa_{p-1}.

#include <string>
#include <vector>

#include "isotri/errors.hpp"
#include "isotri/types.hpp"

namespace isotri {

/// sigma[j-1] = number of parts equal to j; sum_j j sigma[j-1] = T.
struct Partition {
  std::vector<int> sigma;

  int total() const {
    int t = 0;
    for (std::size_t j = 0; j < sigma.size(); ++j) t += static_cast<int>(j + 1) * sigma[j];
    return t;
  }

  friend bool operator==(const Partition&, const Partition&) = default;
};

/// Every partition of T, largest parts first. T = 0 gives the empty partition.
inline std::vector<Partition> partitions_of(int T) {
  if (T < 0) throw InvalidArgument("cannot partition a negative integer");
  std::vector<Partition> out;
  Partition cur{std::vector<int>(static_cast<std::size_t>(T), 0)};
  auto rec = [&](auto&& self, int remaining, int max_part) -> void {
    if (remaining == 0) {
      out.push_back(cur);
      return;
    }
    for (int part = std::min(remaining, max_part); part >= 1; --part) {
      ++cur.sigma[static_cast<std::size_t>(part - 1)];
      self(self, remaining - part, part);
      --cur.sigma[static_cast<std::size_t>(part - 1)];
    }
  };
  rec(rec, T, T);
  return out;
}

namespace detail {

inline double factorial(int k) {
  double f = 1.0;
  for (int r = 2; r <= k; ++r) f *= r;
  return f;
}

// psi_T = sum over partitions of T of prod_j kappa_j^{sigma_j} / sigma_j!
inline cplx psi(const std::vector<cplx>& kappas, int T, double sign) {
  cplx total{};
  for (const auto& q : partitions_of(T)) {
    cplx term{1.0, 0.0};
    for (std::size_t j = 0; j < q.sigma.size(); ++j) {
      const int s = q.sigma[j];
      if (s == 0) continue;
      term *= ipow(sign * kappas[j], s) / factorial(s);
    }
    total += term;
  }
  return total;
}

inline void require_length(const std::vector<cplx>& v, int p, const char* what) {
  if (p < 1) throw InvalidArgument("matrix size p must be positive");
  if (static_cast<int>(v.size()) < p - 1) {
    throw InvalidArgument(std::string(what) + " needs at least p-1 entries");
  }
}

inline Matrix toeplitz_upper(const std::vector<cplx>& bands, int p) {
  Matrix M = Matrix::Zero(p, p);
  for (int k = 0; k < p; ++k) {
    for (int l = k; l < p; ++l) M(k, l) = bands[static_cast<std::size_t>(l - k)];
  }
  return M;
}

inline Matrix partition_matrix(const std::vector<cplx>& kappas, int p, double sign) {
  require_length(kappas, p, "kappas");
  std::vector<cplx> bands(static_cast<std::size_t>(p));
  for (int d = 0; d < p; ++d) bands[static_cast<std::size_t>(d)] = psi(kappas, d, sign);
  return toeplitz_upper(bands, p);
}

}  // namespace detail

/// M_{k,k+d} = psi_d(kappa).
inline Matrix m_matrix(const std::vector<cplx>& kappas, int p) {
  return detail::partition_matrix(kappas, p, +1.0);
}

/// M^{-1}: the same partition sums with every kappa_j negated.
inline Matrix m_inverse(const std::vector<cplx>& kappas, int p) {
  return detail::partition_matrix(kappas, p, -1.0);
}

/// dM/dz given kappa_j(z) and kappa_j'(z).
inline Matrix m_derivative(const std::vector<cplx>& kappas, const std::vector<cplx>& kappa_primes,
                           int p) {
  detail::require_length(kappas, p, "kappas");
  detail::require_length(kappa_primes, p, "kappa_primes");
  std::vector<cplx> bands(static_cast<std::size_t>(p));
  for (int d = 1; d < p; ++d) {
    cplx total{};
    for (const auto& q : partitions_of(d)) {
      for (std::size_t r = 0; r < q.sigma.size(); ++r) {
        const int sr = q.sigma[r];
        if (sr == 0) continue;
        cplx term = ipow(kappas[r], sr - 1) / detail::factorial(sr - 1) * kappa_primes[r];
        for (std::size_t j = 0; j < q.sigma.size(); ++j) {
          if (j == r || q.sigma[j] == 0) continue;
          term *= ipow(kappas[j], q.sigma[j]) / detail::factorial(q.sigma[j]);
        }
        total += term;
      }
    }
    bands[static_cast<std::size_t>(d)] = total;
  }
  return detail::toeplitz_upper(bands, p);
}

}  // namespace isotri
