#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "rng.hpp"

namespace kicktop {

enum class DisorderKind { interaction, field };

inline std::string to_string(DisorderKind k) {
  return k == DisorderKind::interaction ? "interaction" : "field";
}

// One disorder realization: Gaussian perturbations of width w, either on the
// pair couplings eps_{ll'} (interaction kind) or on the per-site field
// eps_l (field kind). Identical (kind, N, w, seed) regenerate identical
// values bit for bit. Pair values are drawn in the fixed order
// (0,1), (0,2), ..., (0,N-1), (1,2), ...
struct DisorderRealization {
  DisorderKind kind = DisorderKind::interaction;
  int N = 0;
  double w = 0.0;
  std::uint64_t seed = 0;
  std::vector<double> eps_pair;  // size N(N-1)/2, l < l'
  std::vector<double> eps_field; // size N for field kind, else empty

  bool clean() const { return w == 0.0; }

  double pair(int l, int lp) const {
    if (l > lp) std::swap(l, lp);
    // index of (l, lp) in row-major upper triangle
    return eps_pair[static_cast<std::size_t>(l) * (2 * N - l - 1) / 2 + (lp - l - 1)];
  }

  static DisorderRealization generate(DisorderKind kind, int N, double w, std::uint64_t seed) {
    if (N < 1) throw std::domain_error("DisorderRealization: N must be >= 1");
    if (!(w >= 0.0)) throw std::domain_error("DisorderRealization: w must be >= 0");
    DisorderRealization r;
    r.kind = kind;
    r.N = N;
    r.w = w;
    r.seed = seed;
    GaussianStream g(seed);
    if (kind == DisorderKind::interaction) {
      r.eps_pair.resize(static_cast<std::size_t>(N) * (N - 1) / 2);
      for (auto& e : r.eps_pair) e = w == 0.0 ? 0.0 : w * g.gauss();
    } else {
      r.eps_field.resize(N);
      for (auto& e : r.eps_field) e = w == 0.0 ? 0.0 : w * g.gauss();
    }
    return r;
  }

  static DisorderRealization none(int N) {
    return generate(DisorderKind::interaction, N, 0.0, 0);
  }
};

} // namespace kicktop
