#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "eig.hpp"
#include "full_engine.hpp"
#include "rng.hpp"

namespace kicktop {

// Reduced density matrix of the first q qubits (the low q bits); the
// remaining N-q qubits are traced out.
struct ReducedDensity {
  Eigen::MatrixXcd matrix;
  int q = 0;
};

inline ReducedDensity reduced_density(const FullState& s, int q) {
  if (q < 1 || q >= s.N)
    throw std::invalid_argument("reduced_density: need 1 <= q <= N-1");
  const std::size_t keep = std::size_t(1) << q;
  const std::size_t rest = std::size_t(1) << (s.N - q);
  ReducedDensity rho;
  rho.q = q;
  rho.matrix = Eigen::MatrixXcd::Zero(keep, keep);
  for (std::size_t t = 0; t < rest; ++t) {
    const std::size_t base = t << q;
    for (std::size_t c = 0; c < keep; ++c) {
      const Complex vc = std::conj(s.amplitudes[base | c]);
      for (std::size_t r = 0; r < keep; ++r)
        rho.matrix(r, c) += s.amplitudes[base | r] * vc;
    }
  }
  return rho;
}

// S_Q = 1 - Tr rho^2, with the purity taken as the squared Frobenius norm.
inline double linear_entropy(const ReducedDensity& rho) {
  return 1.0 - rho.matrix.squaredNorm();
}

// Fast path for Q = 1 along full-space trajectories.
inline double single_qubit_linear_entropy(const FullState& s) {
  return linear_entropy(reduced_density(s, 1));
}

// Total squared overlap of a full-space state with the N+1 Dicke states;
// 1 iff the state lies in the permutation symmetric subspace.
inline double chi_overlap(const FullState& s) {
  const int N = s.N;
  std::vector<Complex> acc(N + 1, Complex(0, 0));
  const std::size_t dim = s.dim();
  for (std::size_t b = 0; b < dim; ++b) acc[std::popcount(b)] += s.amplitudes[b];
  double chi = 0.0;
  for (int i = 0; i <= N; ++i)
    chi += std::norm(acc[i]) * std::exp(-detail::log_binomial(N, i));
  return chi;
}

// Minimum number of Floquet eigenstates carrying weight 1 - alpha of the
// state, with |<phi_i|psi>|^2 sorted in decreasing order (ties broken by
// eigenvector index for determinism).
inline int effective_dimension(const Eigen::VectorXcd& state, const UnitaryEigensystem& eig,
                               double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::domain_error("effective_dimension: alpha must be in (0, 1)");
  if (eig.vectors.rows() != state.size())
    throw std::invalid_argument("effective_dimension: eigenbasis/state dimension mismatch");
  if (std::abs(state.norm() - 1.0) > 1e-8)
    throw std::invalid_argument("effective_dimension: state must be normalized");
  const Eigen::VectorXcd coeff = eig.vectors.adjoint() * state;
  std::vector<double> weight(coeff.size());
  for (Eigen::Index i = 0; i < coeff.size(); ++i) weight[i] = std::norm(coeff[i]);
  std::vector<int> order(weight.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return weight[a] > weight[b]; });
  double cum = 0.0;
  int k = 0;
  for (int idx : order) {
    cum += weight[idx];
    ++k;
    if (cum >= 1.0 - alpha) break;
  }
  return k;
}

inline int effective_dimension(const FullState& s, const UnitaryEigensystem& eig, double alpha) {
  return effective_dimension(s.amplitudes, eig, alpha);
}

// Linear entropy of a Q:N-Q cut for a Dicke-sector state without touching
// the 2^N space. The Schmidt split of a Dicke level across the cut is
// hypergeometric: |N; i> = sum_a sqrt(C(Q,a) C(N-Q,i-a) / C(N,i)) |Q;a>|N-Q;i-a>,
// so rho_Q = A A^dag with A(a, r) = c_{a+r} sqrt(C(Q,a) C(N-Q,r) / C(N,a+r)).
inline double symmetric_bipartite_entropy(const SymmetricState& s, int q) {
  const int N = s.N;
  if (q < 1 || q >= N)
    throw std::invalid_argument("symmetric_bipartite_entropy: need 1 <= q <= N-1");
  const int rest = N - q;
  Eigen::MatrixXcd a(q + 1, rest + 1);
  for (int l = 0; l <= q; ++l)
    for (int r = 0; r <= rest; ++r)
      a(l, r) = s.amplitudes[l + r] *
                std::exp(0.5 * (detail::log_binomial(q, l) + detail::log_binomial(rest, r) -
                                detail::log_binomial(N, l + r)));
  return 1.0 - (a * a.adjoint()).squaredNorm();
}

// Mean linear entropy of a Q:N-Q cut for random states over the full 2^N
// space (fixed-trace Wishart marginal).
inline double rmt_wishart_entropy(int q, int N) {
  if (q < 1 || q >= N) throw std::domain_error("rmt_wishart_entropy: need 1 <= q <= N-1");
  const double dq = std::exp2(q), dr = std::exp2(N - q), dn = std::exp2(N);
  return (dq - 1.0) * (dr - 1.0) / (dn + 1.0);
}

// Same mean for random states confined to the N+1 dimensional symmetric
// subspace.
inline double rmt_pss_entropy(int q, int N) {
  if (q < 1 || q >= N) throw std::domain_error("rmt_pss_entropy: need 1 <= q <= N-1");
  return double(q) * double(N - q) / (double(q + 1) * double(N - q + 1));
}

// Haar-random unit vector of the given dimension.
inline Eigen::VectorXcd haar_random_vector(Eigen::Index dim, std::uint64_t seed) {
  GaussianStream g(seed);
  Eigen::VectorXcd v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) v[i] = Complex(g.gauss(), g.gauss());
  v /= v.norm();
  return v;
}

inline FullState haar_random_state(int N, std::uint64_t seed) {
  return {haar_random_vector(std::int64_t(1) << N, seed), N};
}

inline SymmetricState random_symmetric_state(int N, std::uint64_t seed) {
  return {haar_random_vector(N + 1, seed), N};
}

} // namespace kicktop
