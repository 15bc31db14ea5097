#pragma once

#include <numbers>
#include <stdexcept>
#include <string>

namespace kicktop {

// Parameters of the kicked top: twist strength k, rotation angle p about y,
// and qubit count N. The kick period and hbar are fixed to 1, so the
// effective Planck constant is 1/j with j = N/2.
struct TopParams {
  double k = 0.0;
  double p = std::numbers::pi / 2;
  int N = 1;

  double j() const { return 0.5 * N; }

  void validate() const {
    if (N < 1)
      throw std::domain_error("TopParams: N must be >= 1, got " + std::to_string(N));
    if (!(k >= 0.0))
      throw std::domain_error("TopParams: k must be >= 0, got " + std::to_string(k));
    const double two_pi = 2.0 * std::numbers::pi;
    if (!(p > -two_pi - 1e-12 && p <= two_pi + 1e-12))
      throw std::domain_error("TopParams: p must lie in (-2*pi, 2*pi], got " + std::to_string(p));
  }
};

} // namespace kicktop
