#pragma once

#include <bit>
#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "dicke.hpp"
#include "disorder.hpp"
#include "errors.hpp"
#include "fwht.hpp"
#include "top_params.hpp"

namespace kicktop {

// State over the full 2^N computational basis. Bit l of a basis index is the
// z value of qubit l (bit 0 is the least significant; bit value 0 means |0>).
struct FullState {
  Eigen::VectorXcd amplitudes;
  int N = 0;

  std::size_t dim() const { return std::size_t(1) << N; }
  double norm() const { return amplitudes.norm(); }

  static FullState basis_vector(int N, std::size_t index) {
    FullState s;
    s.N = N;
    s.amplitudes = Eigen::VectorXcd::Zero(std::int64_t(1) << N);
    s.amplitudes[index] = 1.0;
    return s;
  }
};

inline void fwht(FullState& s) { fwht(s.amplitudes); }

// Embeds a Dicke-sector state into the full basis: every computational basis
// state with i excitations shares the level-i amplitude, scaled by
// C(N,i)^{-1/2} so the norm is preserved.
inline FullState embed_dicke(const SymmetricState& sym) {
  const int N = sym.N;
  FullState full;
  full.N = N;
  full.amplitudes.resize(std::int64_t(1) << N);
  std::vector<Complex> level(N + 1);
  for (int i = 0; i <= N; ++i)
    level[i] = sym.amplitudes[i] * std::exp(-0.5 * detail::log_binomial(N, i));
  const std::size_t dim = full.dim();
  for (std::size_t b = 0; b < dim; ++b)
    full.amplitudes[b] = level[std::popcount(b)];
  return full;
}

// Diagonal of the kick factor in the Hadamard-rotated basis: entry b is
// exp(-i (k/2N) sum_{l<l'} (1+eps_{ll'}) x_l x_{l'}) with x_l = +/-1 from
// bit l of b ("+" for bit 0).
struct KickDiagonal {
  Eigen::VectorXcd phases;
  int N = 0;
};

inline KickDiagonal build_kick_diagonal(const TopParams& params, const DisorderRealization& real) {
  params.validate();
  const int n = params.N;
  if (real.N != n)
    throw std::invalid_argument("build_kick_diagonal: disorder realization is for a different N");
  const std::size_t dim = std::size_t(1) << n;
  const double scale = params.k / (2.0 * n);

  KickDiagonal kd;
  kd.N = n;
  kd.phases.resize(std::int64_t(dim));

  // Disorder-free part depends on the bit count only:
  // sum_{l<l'} x_l x_{l'} = (S^2 - N)/2 with S = N - 2 popcount.
  std::vector<double> clean(n + 1);
  for (int pc = 0; pc <= n; ++pc) {
    const double s = n - 2.0 * pc;
    clean[pc] = 0.5 * (s * s - n);
  }

  const bool disordered =
      real.kind == DisorderKind::interaction && !real.clean() && !real.eps_pair.empty();
  if (!disordered) {
    std::vector<Complex> phase(n + 1);
    for (int pc = 0; pc <= n; ++pc) phase[pc] = std::polar(1.0, -scale * clean[pc]);
    for (std::size_t b = 0; b < dim; ++b) kd.phases[b] = phase[std::popcount(b)];
    return kd;
  }

  Eigen::MatrixXd eps = Eigen::MatrixXd::Zero(n, n);
  for (int l = 0; l < n; ++l)
    for (int lp = l + 1; lp < n; ++lp) eps(l, lp) = eps(lp, l) = real.pair(l, lp);

  // Gray-code sweep: one sign flips per visited index, so the eps-weighted
  // pair sum updates in O(N) and the whole diagonal costs O(N 2^N).
  std::vector<double> x(n, 1.0);
  double eps_sum = 0.0;
  for (int l = 0; l < n; ++l)
    for (int lp = l + 1; lp < n; ++lp) eps_sum += eps(l, lp);
  kd.phases[0] = std::polar(1.0, -scale * (clean[0] + eps_sum));
  std::size_t gray = 0;
  for (std::size_t i = 1; i < dim; ++i) {
    const int f = std::countr_zero(i);
    gray ^= std::size_t(1) << f;
    double row = 0.0;
    for (int l = 0; l < n; ++l) row += eps(f, l) * x[l]; // eps(f,f) = 0
    eps_sum -= 2.0 * x[f] * row;
    x[f] = -x[f];
    kd.phases[gray] = std::polar(1.0, -scale * (clean[std::popcount(gray)] + eps_sum));
  }
  return kd;
}

// Qubit-wise rotation about y: applies exp(-i (p/2)(1+eps_l) sigma_y) to
// every qubit in O(N 2^N). Pass an empty span for the disorder-free case.
inline void apply_y_rotation(FullState& s, double p, std::span<const double> eps_field = {}) {
  if (!eps_field.empty() && std::ssize(eps_field) != s.N)
    throw std::invalid_argument("apply_y_rotation: eps_field size must equal N");
  const std::size_t dim = s.dim();
  Complex* x = s.amplitudes.data();
  for (int l = 0; l < s.N; ++l) {
    const double a = 0.5 * p * (1.0 + (eps_field.empty() ? 0.0 : eps_field[l]));
    const double c = std::cos(a), sn = std::sin(a);
    const std::size_t bit = std::size_t(1) << l;
    for (std::size_t base = 0; base < dim; base += bit << 1) {
      for (std::size_t i = base; i < base + bit; ++i) {
        const Complex a0 = x[i];
        const Complex a1 = x[i | bit];
        x[i] = c * a0 - sn * a1;
        x[i | bit] = sn * a0 + c * a1;
      }
    }
  }
}

// One-period propagator over the full Hilbert space, with the kick phases
// and rotation angles precomputed once per disorder realization. A step is
// rotation first, then the kick applied as FWHT -> diagonal -> FWHT.
class FullFloquet {
public:
  FullFloquet(const TopParams& params, const DisorderRealization& real)
      : params_(params), kick_(build_kick_diagonal(params, real)) {
    if (real.kind == DisorderKind::field && !real.clean()) rot_eps_ = real.eps_field;
  }

  int qubits() const { return params_.N; }

  void step(FullState& s) const {
    if (s.N != params_.N) throw std::invalid_argument("FullFloquet::step: qubit count mismatch");
    apply_y_rotation(s, params_.p, rot_eps_);
    fwht(s);
    s.amplitudes.array() *= kick_.phases.array();
    fwht(s);
  }

private:
  TopParams params_;
  KickDiagonal kick_;
  std::vector<double> rot_eps_;
};

inline FullState floquet_step(FullState s, const TopParams& params,
                              const DisorderRealization& real) {
  FullFloquet(params, real).step(s);
  return s;
}

inline constexpr int kDenseFloquetCap = 14; // 2^14 squared complex doubles = 4 GiB

// Dense one-period propagator, column by column. Memory-capped; pass a larger
// cap explicitly to override.
inline Eigen::MatrixXcd build_dense_floquet(const TopParams& params,
                                            const DisorderRealization& real,
                                            int cap = kDenseFloquetCap) {
  if (params.N > cap)
    throw CapacityError("build_dense_floquet: N = " + std::to_string(params.N) +
                        " exceeds the dense cap of " + std::to_string(cap) +
                        " qubits; raise the cap only with enough memory for 2^(2N) doubles");
  const FullFloquet op(params, real);
  const std::size_t dim = std::size_t(1) << params.N;
  Eigen::MatrixXcd u(dim, dim);
  FullState col;
  for (std::size_t c = 0; c < dim; ++c) {
    col = FullState::basis_vector(params.N, c);
    op.step(col);
    u.col(c) = col.amplitudes;
  }
  return u;
}

// Parity operator R = tensor_l exp(-i (pi/2) sigma_y,l) = exp(-i pi Jy).
// Its eigenbasis is the Hadamard basis twisted by the diagonal phase
// (-i)^{popcount(b)}; the eigenvalue of basis column c is i^N (-1)^{popcount(c)}.
namespace detail {

inline Complex parity_eigenvalue(int N, bool odd_mask) {
  const Complex in = std::pow(Complex(0, 1), N);
  return odd_mask ? -in : in;
}

} // namespace detail

struct ParityBlocks {
  Eigen::MatrixXcd plus, minus;   // U restricted to the R = +/-1 (even N) sectors
  Complex plus_eigenvalue, minus_eigenvalue;
};

// Splits a dense Floquet matrix over the two parity sectors. The similarity
// transform into the R eigenbasis is done with FWHTs (the eigenbasis is a
// phased Hadamard basis), so the cost is O(N 4^N) rather than a dense
// diagonalization of R. Throws ValidationError if U does not commute with R.
inline ParityBlocks parity_blocks(const Eigen::MatrixXcd& u, int N, double tol = 1e-8) {
  const std::size_t dim = std::size_t(1) << N;
  if (u.rows() != std::int64_t(dim) || u.cols() != std::int64_t(dim))
    throw std::invalid_argument("parity_blocks: matrix size must be 2^N");

  // M = P^dag U P with P = diag((-i)^{pc(b)}) H^{otimes N}
  Eigen::VectorXcd d(dim);
  for (std::size_t b = 0; b < dim; ++b)
    d[b] = std::polar(1.0, -0.5 * std::numbers::pi * std::popcount(b)); // (-i)^pc
  Eigen::MatrixXcd m(dim, dim);
  for (std::size_t c = 0; c < dim; ++c) {
    m.col(c) = u.col(c) * d[c];
    for (std::size_t r = 0; r < dim; ++r) m(r, c) *= std::conj(d[r]);
  }
  // m = H m H
  Eigen::VectorXcd tmp;
  for (std::size_t c = 0; c < dim; ++c) {
    tmp = m.col(c);
    fwht(tmp);
    m.col(c) = tmp;
  }
  m.transposeInPlace();
  for (std::size_t c = 0; c < dim; ++c) {
    tmp = m.col(c);
    fwht(tmp);
    m.col(c) = tmp;
  }
  m.transposeInPlace();

  std::vector<std::size_t> even, odd;
  even.reserve(dim / 2);
  odd.reserve(dim / 2);
  for (std::size_t c = 0; c < dim; ++c)
    (std::popcount(c) % 2 == 0 ? even : odd).push_back(c);

  double cross = 0.0;
  for (std::size_t ci = 0; ci < dim; ++ci) {
    const bool codd = std::popcount(ci) % 2;
    for (std::size_t r = 0; r < dim; ++r) {
      if ((std::popcount(r) % 2 != 0) != codd)
        cross = std::max(cross, std::abs(m(r, ci)));
    }
  }
  if (cross > tol)
    throw ValidationError("parity_blocks: input does not commute with the parity operator "
                          "(cross-sector amplitude " +
                          std::to_string(cross) + ")");

  auto extract = [&](const std::vector<std::size_t>& idx) {
    Eigen::MatrixXcd blk(idx.size(), idx.size());
    for (std::size_t c = 0; c < idx.size(); ++c)
      for (std::size_t r = 0; r < idx.size(); ++r) blk(r, c) = m(idx[r], idx[c]);
    return blk;
  };

  ParityBlocks out;
  const Complex ev_even = detail::parity_eigenvalue(N, false);
  const Complex ev_odd = detail::parity_eigenvalue(N, true);
  // "plus" is the sector whose eigenvalue has positive real part (even N,
  // eigenvalues +/-1) or positive imaginary part (odd N, eigenvalues +/-i).
  const bool even_is_plus = (ev_even.real() + ev_even.imag()) > 0.0;
  out.plus = extract(even_is_plus ? even : odd);
  out.minus = extract(even_is_plus ? odd : even);
  out.plus_eigenvalue = even_is_plus ? ev_even : ev_odd;
  out.minus_eigenvalue = even_is_plus ? ev_odd : ev_even;
  return out;
}

} // namespace kicktop
