#pragma once

#include <bit>
#include <cmath>
#include <complex>
#include <stdexcept>

#include <Eigen/Dense>

namespace kicktop {

// In-place fast Walsh-Hadamard transform: applies the normalized N-qubit
// Hadamard H^{otimes N} in O(n log n). Involutive since H^2 = I.
inline void fwht(Eigen::VectorXcd& v) {
  const std::size_t n = static_cast<std::size_t>(v.size());
  if (n == 0 || !std::has_single_bit(n))
    throw std::invalid_argument("fwht: length must be a power of two");
  std::complex<double>* x = v.data();
  for (std::size_t len = 1; len < n; len <<= 1) {
    for (std::size_t base = 0; base < n; base += len << 1) {
      for (std::size_t i = base; i < base + len; ++i) {
        const std::complex<double> a = x[i];
        const std::complex<double> b = x[i + len];
        x[i] = a + b;
        x[i + len] = a - b;
      }
    }
  }
  v *= 1.0 / std::sqrt(static_cast<double>(n));
}

} // namespace kicktop
