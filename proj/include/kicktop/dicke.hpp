#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "eig.hpp"
#include "top_params.hpp"

namespace kicktop {

using Complex = std::complex<double>;

// State in the maximal-spin (Dicke) sector of N qubits: N+1 amplitudes,
// index i <-> |j, m> with j = N/2 and m = j - i. Index 0 is all spins up.
struct SymmetricState {
  Eigen::VectorXcd amplitudes;
  int N = 0;

  int dim() const { return N + 1; }
  double norm() const { return amplitudes.norm(); }
};

struct CollectiveOps {
  Eigen::MatrixXcd Jx, Jy, Jz;
};

namespace detail {

// Off-diagonal ladder coefficients of Jx in the Dicke basis:
// (Jx)_{i,i+1} = sqrt((i+1)(N-i))/2, real and symmetric.
inline Eigen::VectorXd jx_offdiagonal(int N) {
  Eigen::VectorXd off(N);
  for (int i = 0; i < N; ++i)
    off[i] = 0.5 * std::sqrt(double(i + 1) * double(N - i));
  return off;
}

inline double log_binomial(int n, int k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

} // namespace detail

inline CollectiveOps collective_ops(int N) {
  if (N < 1) throw std::domain_error("collective_ops: N must be >= 1");
  const int d = N + 1;
  const double j = 0.5 * N;
  CollectiveOps ops;
  ops.Jx = Eigen::MatrixXcd::Zero(d, d);
  ops.Jy = Eigen::MatrixXcd::Zero(d, d);
  ops.Jz = Eigen::MatrixXcd::Zero(d, d);
  const Eigen::VectorXd off = detail::jx_offdiagonal(N);
  for (int i = 0; i < d; ++i) ops.Jz(i, i) = j - i;
  for (int i = 0; i < N; ++i) {
    ops.Jx(i, i + 1) = off[i];
    ops.Jx(i + 1, i) = off[i];
    ops.Jy(i, i + 1) = Complex(0, -off[i]);
    ops.Jy(i + 1, i) = Complex(0, off[i]);
  }
  return ops;
}

// Spin coherent state |theta, phi>: the N-fold tensor power of
// cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>, expressed in the Dicke basis.
// Amplitudes are computed in log space so large N does not underflow.
inline SymmetricState coherent_state(double theta, double phi, int N) {
  if (N < 1) throw std::domain_error("coherent_state: N must be >= 1");
  if (!(theta >= -1e-12 && theta <= std::numbers::pi + 1e-12))
    throw std::domain_error("coherent_state: theta must lie in [0, pi]");
  if (!(phi > -std::numbers::pi - 1e-12 && phi <= std::numbers::pi + 1e-12))
    throw std::domain_error("coherent_state: phi must lie in (-pi, pi]");

  SymmetricState s;
  s.N = N;
  s.amplitudes = Eigen::VectorXcd::Zero(N + 1);
  const double c = std::cos(0.5 * theta);
  const double sn = std::sin(0.5 * theta);
  if (sn <= 0.0) {
    s.amplitudes[0] = 1.0;
    return s;
  }
  if (c <= 0.0) {
    s.amplitudes[N] = std::polar(1.0, phi * N);
    return s;
  }
  const double lc = std::log(c), ls = std::log(sn);
  Eigen::VectorXd logw(N + 1);
  for (int i = 0; i <= N; ++i)
    logw[i] = 0.5 * detail::log_binomial(N, i) + (N - i) * lc + i * ls;
  const double lmax = logw.maxCoeff();
  for (int i = 0; i <= N; ++i)
    s.amplitudes[i] = std::polar(std::exp(logw[i] - lmax), phi * i);
  s.amplitudes /= s.amplitudes.norm();
  return s;
}

// One-period propagator U0 = exp(-i (k/2j) Jx^2) exp(-i p Jy).
//
// Both factors come from the eigensystem of the same real symmetric
// tridiagonal matrix: Jx directly, and Jy through the similarity
// Jy = P Jx P^dag with P = diag(i^l). No series truncation is involved, so
// the result stays unitary to roundoff over very long kick counts.
inline Eigen::MatrixXcd symmetric_floquet(const TopParams& params) {
  params.validate();
  const int N = params.N;
  const int d = N + 1;
  const TridiagEigen je = tridiag_eigen(Eigen::VectorXd::Zero(d), detail::jx_offdiagonal(N));
  const Eigen::MatrixXcd w = je.vectors.cast<Complex>();

  Eigen::VectorXcd twist(d), turn(d);
  const double kick_scale = params.k / (2.0 * params.j());
  for (int i = 0; i < d; ++i) {
    twist[i] = std::polar(1.0, -kick_scale * je.values[i] * je.values[i]);
    turn[i] = std::polar(1.0, -params.p * je.values[i]);
  }

  Eigen::VectorXcd phase(d);
  for (int l = 0; l < d; ++l) phase[l] = std::polar(1.0, 0.5 * std::numbers::pi * l); // i^l

  Eigen::MatrixXcd rot = w * turn.asDiagonal() * w.transpose();
  for (int c = 0; c < d; ++c)
    for (int r = 0; r < d; ++r) rot(r, c) *= phase[r] * std::conj(phase[c]);
  Eigen::MatrixXcd u = (w * twist.asDiagonal() * w.transpose()) * rot;

  // One Newton-Schulz sweep toward the polar factor knocks the unitarity
  // defect down to ~eps^2; needed so 1e5-kick trajectories hold their norm.
  u = 0.5 * u * (3.0 * Eigen::MatrixXcd::Identity(d, d) - u.adjoint() * u);
  return u;
}

inline SymmetricState apply_operator(const Eigen::MatrixXcd& u, const SymmetricState& s) {
  if (u.cols() != s.amplitudes.size())
    throw std::invalid_argument("apply_operator: operator/state dimension mismatch");
  return {u * s.amplitudes, s.N};
}

// Runs n kicks, invoking observe(step, state) at step = 0 (initial state)
// through step = n. States are not stored.
template <class F>
void evolve_symmetric_observe(const SymmetricState& initial, const Eigen::MatrixXcd& u, long n,
                              F&& observe) {
  if (n < 0) throw std::invalid_argument("evolve_symmetric_observe: n must be >= 0");
  if (u.cols() != initial.amplitudes.size())
    throw std::invalid_argument("evolve_symmetric_observe: dimension mismatch");
  SymmetricState s = initial;
  Eigen::VectorXcd next(s.amplitudes.size());
  observe(0L, s);
  for (long step = 1; step <= n; ++step) {
    next.noalias() = u * s.amplitudes;
    s.amplitudes.swap(next);
    observe(step, s);
  }
}

// Full state history; index matches kick count, so the result has n+1 states.
inline std::vector<SymmetricState> evolve_symmetric(const SymmetricState& initial,
                                                    const Eigen::MatrixXcd& u, long n) {
  std::vector<SymmetricState> traj;
  traj.reserve(n + 1);
  evolve_symmetric_observe(initial, u, n,
                           [&](long, const SymmetricState& s) { traj.push_back(s); });
  return traj;
}

struct JExpectations {
  double jx = 0, jy = 0, jz = 0;
  double norm_sq() const { return jx * jx + jy * jy + jz * jz; }
};

// <Jx/Jy/Jz> through the tridiagonal structure, O(N).
inline JExpectations expectation_J(const SymmetricState& s) {
  const int N = s.N;
  const double j = 0.5 * N;
  JExpectations e;
  for (int i = 0; i <= N; ++i) e.jz += (j - i) * std::norm(s.amplitudes[i]);
  for (int i = 0; i < N; ++i) {
    const double off = 0.5 * std::sqrt(double(i + 1) * double(N - i));
    const Complex t = std::conj(s.amplitudes[i]) * s.amplitudes[i + 1];
    e.jx += 2.0 * off * t.real();
    e.jy += 2.0 * off * t.imag();
  }
  return e;
}

// Same expectations as a dense quadratic form <psi|J|psi>.
inline JExpectations expectation_J(const SymmetricState& s, const CollectiveOps& ops) {
  if (ops.Jx.cols() != s.amplitudes.size())
    throw std::invalid_argument("expectation_J: operator/state dimension mismatch");
  const auto& v = s.amplitudes;
  return {(v.adjoint() * ops.Jx * v)(0).real(), (v.adjoint() * ops.Jy * v)(0).real(),
          (v.adjoint() * ops.Jz * v)(0).real()};
}

// Single-qubit linear entropy of a symmetric state from the collective
// expectations: S1 = (1 - |<J>|^2/j^2) / 2. Valid only inside the Dicke
// sector, where it coincides with the partial-trace linear entropy.
inline double single_qubit_entropy_from_J(const JExpectations& e, double j) {
  const double r2 = e.norm_sq() / (j * j);
  if (r2 > 1.0 + 1e-9)
    throw std::domain_error("single_qubit_entropy_from_J: expectations outside the Bloch ball");
  return 0.5 * (1.0 - std::min(r2, 1.0));
}

} // namespace kicktop
