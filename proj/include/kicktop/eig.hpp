#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "errors.hpp"

#if defined(KICKTOP_HAVE_LAPACKE)
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>
#endif

namespace kicktop {

struct TridiagEigen {
  Eigen::VectorXd values;  // ascending
  Eigen::MatrixXd vectors; // orthonormal columns
};

// Eigendecomposition of a real symmetric tridiagonal matrix.
inline TridiagEigen tridiag_eigen(Eigen::VectorXd diag, const Eigen::VectorXd& offdiag) {
  const int n = static_cast<int>(diag.size());
  if (offdiag.size() != n - 1)
    throw std::invalid_argument("tridiag_eigen: offdiagonal must have size n-1");
  TridiagEigen out;
#if defined(KICKTOP_HAVE_LAPACKE)
  Eigen::VectorXd e = offdiag;
  out.values.resize(n);
  out.vectors.resize(n, n);
  std::vector<lapack_int> isuppz(2 * n);
  lapack_int found = 0;
  const lapack_int info =
      LAPACKE_dstevr(LAPACK_COL_MAJOR, 'V', 'A', n, diag.data(), e.data(), 0.0, 0.0, 0, 0, 0.0,
                     &found, out.values.data(), out.vectors.data(), n, isuppz.data());
  if (info != 0 || found != n)
    throw ValidationError("dstevr failed with info=" + std::to_string(info));
#else
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  m.diagonal() = diag;
  m.diagonal(1) = offdiag;
  m.diagonal(-1) = offdiag;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  out.values = es.eigenvalues();
  out.vectors = es.eigenvectors();
#endif
  return out;
}

// Eigenvalues and (optionally) an orthonormal eigenbasis of a unitary matrix,
// via the Schur form. For a normal matrix the Schur factor is diagonal, so
// the Schur basis is an eigenbasis; callers should feed genuinely unitary
// input and may verify the reconstruction residual.
struct UnitaryEigensystem {
  Eigen::VectorXd angles;      // eigenvalue phases in (-pi, pi], ascending
  Eigen::VectorXcd values;     // e^{i angle}, same order
  Eigen::MatrixXcd vectors;    // columns match angles; empty if not requested
  std::string block = "full";
};

namespace detail {

inline void sort_by_angle(Eigen::VectorXcd& vals, Eigen::MatrixXcd* vecs,
                          Eigen::VectorXd& angles) {
  const int n = static_cast<int>(vals.size());
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  Eigen::VectorXd raw(n);
  for (int i = 0; i < n; ++i) raw[i] = std::arg(vals[i]);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return raw[a] < raw[b]; });
  Eigen::VectorXcd sv(n);
  Eigen::VectorXd sa(n);
  Eigen::MatrixXcd svec;
  if (vecs) svec.resize(vecs->rows(), n);
  for (int i = 0; i < n; ++i) {
    sv[i] = vals[order[i]];
    sa[i] = raw[order[i]];
    if (vecs) svec.col(i) = vecs->col(order[i]);
  }
  vals = std::move(sv);
  angles = std::move(sa);
  if (vecs) *vecs = std::move(svec);
}

} // namespace detail

inline UnitaryEigensystem unitary_eigensystem(Eigen::MatrixXcd u, bool want_vectors = true,
                                              std::string block = "full") {
  const int n = static_cast<int>(u.rows());
  if (u.cols() != n) throw std::invalid_argument("unitary_eigensystem: matrix must be square");
  UnitaryEigensystem out;
  out.block = std::move(block);
#if defined(KICKTOP_HAVE_LAPACKE)
  Eigen::VectorXcd w(n);
  Eigen::MatrixXcd vs;
  if (want_vectors) vs.resize(n, n);
  lapack_int sdim = 0;
  const lapack_int info =
      LAPACKE_zgees(LAPACK_COL_MAJOR, want_vectors ? 'V' : 'N', 'N', nullptr, n, u.data(), n,
                    &sdim, w.data(), want_vectors ? vs.data() : nullptr, n);
  if (info != 0)
    throw ValidationError("zgees failed with info=" + std::to_string(info));
  out.values = std::move(w);
  if (want_vectors) out.vectors = std::move(vs);
#else
  Eigen::ComplexSchur<Eigen::MatrixXcd> schur(u, want_vectors);
  out.values = schur.matrixT().diagonal();
  if (want_vectors) out.vectors = schur.matrixU();
#endif
  detail::sort_by_angle(out.values, want_vectors ? &out.vectors : nullptr, out.angles);
  return out;
}

// Max-norm departure from unitarity, ||U^dag U - I||_max.
inline double unitarity_defect(const Eigen::MatrixXcd& u) {
  Eigen::MatrixXcd g = u.adjoint() * u;
  g.diagonal().array() -= 1.0;
  return g.cwiseAbs().maxCoeff();
}

} // namespace kicktop
