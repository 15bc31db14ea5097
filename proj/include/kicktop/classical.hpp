#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <vector>

#include "rng.hpp"

namespace kicktop {

// Point on the unit sphere of rescaled angular momenta (X, Y, Z) = J/j.
struct ClassicalPoint {
  double x = 0, y = 0, z = 1;

  double radius_sq() const { return x * x + y * y + z * z; }
};

inline ClassicalPoint sphere_point(double theta, double phi) {
  return {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta)};
}

// One kick of the classical top map.
inline ClassicalPoint classical_map_step(const ClassicalPoint& pt, double k) {
  const double c = std::cos(k * pt.z), s = std::sin(k * pt.z);
  return {pt.z, pt.y * c + pt.x * s, -pt.x * c + pt.y * s};
}

// Inverse kick; composing with the forward map is the identity.
inline ClassicalPoint classical_map_inverse(const ClassicalPoint& pt, double k) {
  const double c = std::cos(k * pt.x), s = std::sin(k * pt.x);
  return {s * pt.y - c * pt.z, c * pt.y + s * pt.z, pt.x};
}

struct ClassicalEnsemble {
  std::vector<ClassicalPoint> points;
  double theta0 = 0, phi0 = 0, sigma = 0;
};

// Gaussian cloud of initial conditions around (theta0, phi0): theta offsets
// of width sigma, phi offsets scaled by 1/sin(theta0) so the cloud is
// isotropic on the sphere itself. That makes its transverse second moments
// match a spin coherent state of the same center when sigma = 1/sqrt(2j),
// which is what the quantum-classical comparisons rely on. Theta is clamped
// into (0, pi), phi wrapped. Same seed, same ensemble.
inline ClassicalEnsemble sample_gaussian_ensemble(double theta0, double phi0, double sigma,
                                                  std::size_t count, std::uint64_t seed) {
  if (!(sigma > 0.0)) throw std::domain_error("sample_gaussian_ensemble: sigma must be > 0");
  if (count < 1) throw std::domain_error("sample_gaussian_ensemble: count must be >= 1");
  constexpr double pi = std::numbers::pi;
  ClassicalEnsemble e;
  e.theta0 = theta0;
  e.phi0 = phi0;
  e.sigma = sigma;
  e.points.reserve(count);
  const double phi_scale = 1.0 / std::max(std::abs(std::sin(theta0)), 1e-6);
  GaussianStream g(seed);
  for (std::size_t i = 0; i < count; ++i) {
    double th = theta0 + sigma * g.gauss();
    double ph = phi0 + sigma * phi_scale * g.gauss();
    th = std::clamp(th, 1e-12, pi - 1e-12);
    ph = std::remainder(ph, 2.0 * pi);
    e.points.push_back(sphere_point(th, ph));
  }
  return e;
}

inline void step_ensemble(ClassicalEnsemble& e, double k) {
  for (auto& p : e.points) p = classical_map_step(p, k);
}

// Classical counterpart of the single-qubit linear entropy: half the summed
// coordinate variances. Because every point sits on the unit sphere this
// equals (1 - |mean|^2)/2.
inline double classical_linear_entropy(const ClassicalEnsemble& e) {
  if (e.points.empty())
    throw std::invalid_argument("classical_linear_entropy: empty ensemble");
  double mx = 0, my = 0, mz = 0;
  for (const auto& p : e.points) {
    mx += p.x;
    my += p.y;
    mz += p.z;
  }
  const double n = static_cast<double>(e.points.size());
  mx /= n;
  my /= n;
  mz /= n;
  return 0.5 * (1.0 - (mx * mx + my * my + mz * mz));
}

namespace detail {

inline ClassicalPoint iterate_map(ClassicalPoint p, double k, int n) {
  for (int i = 0; i < n; ++i) p = classical_map_step(p, k);
  return p;
}

} // namespace detail

// Refines an initial guess (theta, phi) toward a solution of F^period = id
// by damped Gauss-Newton with a finite-difference Jacobian. Returns the full
// orbit on success (residual below tol), std::nullopt otherwise.
inline std::optional<std::vector<ClassicalPoint>>
find_periodic_orbit(double k, double theta, double phi, int period, double tol = 1e-10,
                    int max_iter = 100) {
  if (period < 1) throw std::domain_error("find_periodic_orbit: period must be >= 1");

  auto residual = [&](double th, double ph, double out[3]) {
    const ClassicalPoint p0 = sphere_point(th, ph);
    const ClassicalPoint pn = detail::iterate_map(p0, k, period);
    out[0] = pn.x - p0.x;
    out[1] = pn.y - p0.y;
    out[2] = pn.z - p0.z;
    return std::sqrt(out[0] * out[0] + out[1] * out[1] + out[2] * out[2]);
  };

  double r[3];
  double res = residual(theta, phi, r);
  for (int iter = 0; iter < max_iter && res >= tol; ++iter) {
    const double h = 1e-7;
    double rt[3], rp[3];
    residual(theta + h, phi, rt);
    residual(theta, phi + h, rp);
    double jt[3], jp[3];
    for (int i = 0; i < 3; ++i) {
      jt[i] = (rt[i] - r[i]) / h;
      jp[i] = (rp[i] - r[i]) / h;
    }
    // solve the 2x2 normal equations J^T J d = -J^T r
    double a = 0, b = 0, c = 0, g0 = 0, g1 = 0;
    for (int i = 0; i < 3; ++i) {
      a += jt[i] * jt[i];
      b += jt[i] * jp[i];
      c += jp[i] * jp[i];
      g0 += jt[i] * r[i];
      g1 += jp[i] * r[i];
    }
    const double det = a * c - b * b;
    if (std::abs(det) < 1e-18) return std::nullopt;
    double dt = -(c * g0 - b * g1) / det;
    double dp = -(-b * g0 + a * g1) / det;
    // backtracking line search
    double scale = 1.0;
    double cand = res;
    double cr[3];
    while (scale > 1e-8) {
      cand = residual(theta + scale * dt, phi + scale * dp, cr);
      if (cand < res) break;
      scale *= 0.5;
    }
    if (cand >= res) return std::nullopt;
    theta += scale * dt;
    phi += scale * dp;
    for (int i = 0; i < 3; ++i) r[i] = cr[i];
    res = cand;
  }
  if (res >= tol) return std::nullopt;
  std::vector<ClassicalPoint> orbit;
  orbit.reserve(period);
  ClassicalPoint p = sphere_point(theta, phi);
  for (int i = 0; i < period; ++i) {
    orbit.push_back(p);
    p = classical_map_step(p, k);
  }
  return orbit;
}

} // namespace kicktop
