#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "eig.hpp"
#include "errors.hpp"
#include "rng.hpp"

namespace kicktop {

// Sorted eigenvalue phases of a unitary matrix, in (-pi, pi]. Rejects input
// that is not unitary to `tol`.
inline std::vector<double> eigenangles(const Eigen::MatrixXcd& u, double tol = 1e-8) {
  if (unitarity_defect(u) > tol)
    throw ValidationError("eigenangles: input matrix is not unitary");
  const UnitaryEigensystem es = unitary_eigensystem(u, /*want_vectors=*/false);
  for (Eigen::Index i = 0; i < es.values.size(); ++i)
    if (std::abs(std::abs(es.values[i]) - 1.0) > tol)
      throw ValidationError("eigenangles: eigenvalue off the unit circle");
  return {es.angles.data(), es.angles.data() + es.angles.size()};
}

struct UnfoldOptions {
  int window = 10;                  // Gaussian kernel width, in units of levels
  bool collapse_degenerate = false; // merge levels closer than degeneracy_tol
  double degeneracy_tol = 1e-10;
};

// Unfolds a sorted spectrum by local-mean (kernel) smoothing of the level
// density: each raw spacing is divided by a Gaussian-weighted average of the
// spacings around it, and the result is rescaled to unit mean. Robust to the
// strongly banded densities that show up at intermediate disorder.
inline std::vector<double> unfold(std::vector<double> angles, UnfoldOptions opt = {}) {
  std::sort(angles.begin(), angles.end());
  if (opt.collapse_degenerate) {
    std::vector<double> kept;
    for (double a : angles)
      if (kept.empty() || a - kept.back() > opt.degeneracy_tol) kept.push_back(a);
    angles = std::move(kept);
  }
  const std::size_t m = angles.size();
  if (m < 50) throw std::invalid_argument("unfold: need at least 50 levels");

  std::vector<double> spacing(m - 1);
  for (std::size_t i = 0; i + 1 < m; ++i) spacing[i] = angles[i + 1] - angles[i];

  const int w = std::max(1, opt.window);
  const int reach = 3 * w;
  std::vector<double> kernel(2 * reach + 1);
  for (int d = -reach; d <= reach; ++d)
    kernel[d + reach] = std::exp(-0.5 * double(d) * d / (double(w) * w));

  std::vector<double> unfolded(m - 1);
  for (std::size_t i = 0; i + 1 < m; ++i) {
    double num = 0.0, den = 0.0;
    const int lo = std::max<int>(0, int(i) - reach);
    const int hi = std::min<int>(int(m) - 2, int(i) + reach);
    for (int j = lo; j <= hi; ++j) {
      const double kw = kernel[j - int(i) + reach];
      num += kw * spacing[j];
      den += kw;
    }
    const double local_mean = num / den;
    unfolded[i] = local_mean > 0.0 ? spacing[i] / local_mean : 0.0;
  }
  double mean = 0.0;
  for (double s : unfolded) mean += s;
  mean /= double(unfolded.size());
  if (!(mean > 0.0)) throw ValidationError("unfold: degenerate spectrum, zero mean spacing");
  for (double& s : unfolded) s /= mean;
  return unfolded;
}

enum class SpacingRef { poisson, coe };

// Reference spacing densities with unit mean: e^{-s} for uncorrelated levels
// and the Wigner surmise (pi/2) s e^{-pi s^2/4} for the COE.
inline double reference_pdf(SpacingRef kind, double s) {
  if (s < 0.0) throw std::domain_error("reference_pdf: s must be >= 0");
  if (kind == SpacingRef::poisson) return std::exp(-s);
  return 0.5 * std::numbers::pi * s * std::exp(-0.25 * std::numbers::pi * s * s);
}

inline double reference_cdf(SpacingRef kind, double s) {
  if (s < 0.0) return 0.0;
  if (kind == SpacingRef::poisson) return 1.0 - std::exp(-s);
  return 1.0 - std::exp(-0.25 * std::numbers::pi * s * s);
}

// Kolmogorov-Smirnov statistic between an empirical sample and a reference.
inline double ks_distance(std::vector<double> samples, SpacingRef kind) {
  if (samples.empty()) throw std::invalid_argument("ks_distance: empty sample");
  std::sort(samples.begin(), samples.end());
  const double n = double(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = reference_cdf(kind, samples[i]);
    d = std::max(d, std::abs(double(i + 1) / n - f));
    d = std::max(d, std::abs(f - double(i) / n));
  }
  return d;
}

struct SpacingHistogram {
  std::vector<double> edges;   // bins+1 edges
  std::vector<double> density; // normalized to unit integral
  std::size_t count = 0;
  double mean = 0.0;
};

inline SpacingHistogram spacing_histogram(const std::vector<double>& spacings, int bins = 50,
                                          double s_max = 4.0) {
  if (bins < 1) throw std::invalid_argument("spacing_histogram: bins must be >= 1");
  SpacingHistogram h;
  h.count = spacings.size();
  h.edges.resize(bins + 1);
  for (int i = 0; i <= bins; ++i) h.edges[i] = s_max * double(i) / bins;
  h.density.assign(bins, 0.0);
  double mean = 0.0;
  for (double s : spacings) {
    mean += s;
    const int b = int(s / s_max * bins);
    if (b >= 0 && b < bins) h.density[b] += 1.0;
  }
  h.mean = spacings.empty() ? 0.0 : mean / double(spacings.size());
  const double width = s_max / bins;
  const double total = double(spacings.size());
  if (total > 0)
    for (double& d : h.density) d /= total * width;
  return h;
}

// Normalized eigenangle density over (-pi, pi].
inline std::vector<double> eigenangle_density(const std::vector<double>& angles, int bins) {
  if (bins < 10) throw std::invalid_argument("eigenangle_density: need at least 10 bins");
  std::vector<double> density(bins, 0.0);
  constexpr double pi = std::numbers::pi;
  for (double a : angles) {
    int b = int((a + pi) / (2.0 * pi) * bins);
    b = std::clamp(b, 0, bins - 1);
    density[b] += 1.0;
  }
  const double width = 2.0 * pi / bins;
  const double total = double(angles.size());
  if (total > 0)
    for (double& d : density) d /= total * width;
  return density;
}

// Haar-distributed unitary via QR of a complex Ginibre matrix with the
// standard phase fix.
inline Eigen::MatrixXcd haar_unitary(int dim, std::uint64_t seed) {
  GaussianStream g(seed);
  Eigen::MatrixXcd z(dim, dim);
  for (int c = 0; c < dim; ++c)
    for (int r = 0; r < dim; ++r) z(r, c) = Complex(g.gauss(), g.gauss());
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(z);
  Eigen::MatrixXcd q = qr.householderQ();
  const Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int c = 0; c < dim; ++c) {
    const Complex d = r(c, c);
    q.col(c) *= d / std::abs(d);
  }
  return q;
}

// COE sample: W^T W with W Haar. Symmetric unitary with Wigner-Dyson
// (beta = 1) spacing statistics.
inline Eigen::MatrixXcd coe_unitary(int dim, std::uint64_t seed) {
  const Eigen::MatrixXcd w = haar_unitary(dim, seed);
  return w.transpose() * w;
}

} // namespace kicktop
