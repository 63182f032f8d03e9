#pragma once

#include <complex>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

namespace isotri {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;

inline constexpr double pi = std::numbers::pi;
inline constexpr cplx two_pi_i{0.0, 2.0 * std::numbers::pi};

/// x^k for integer k (negative allowed), with x^0 = 1 even for x = 0.
inline cplx ipow(cplx x, int k) {
  if (k < 0) return 1.0 / ipow(x, -k);
  cplx result{1.0, 0.0};
  cplx base = x;
  while (k > 0) {
    if (k & 1) result *= base;
    base *= base;
    k >>= 1;
  }
  return result;
}

inline double max_abs(const Matrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

}  // namespace isotri
