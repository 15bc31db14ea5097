#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "rng.hpp"

namespace kicktop {

// Near-integrable rotor in action-angle variables with per-kick angle noise:
// theta(t) = theta(0) + omega(I) t + eta(t), with theta(0) and the action
// offset Gaussian of width sigma, omega(I) linearized through omega_prime,
// and eta a sum of i.i.d. Gaussian increments of variance D per kick.
struct NoisyRotor {
  double omega = 1.0;
  double omega_prime = 1.0;
  double sigma = 0.05;
  double D = 0.0;

  void validate() const {
    if (!(sigma > 0.0)) throw std::domain_error("NoisyRotor: sigma must be > 0");
    if (!(D >= 0.0)) throw std::domain_error("NoisyRotor: D must be >= 0");
  }
};

struct VarianceEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::size_t trials = 0;
};

// Monte Carlo estimate of var f(theta(t)) over the rotor ensemble. The
// standard error uses the fourth-moment formula for a sample variance.
template <class F>
VarianceEstimate noisy_rotor_mc(const NoisyRotor& model, F&& f, long t, std::size_t trials,
                                std::uint64_t seed) {
  model.validate();
  if (trials < 1) throw std::domain_error("noisy_rotor_mc: trials must be >= 1");
  if (t < 0) throw std::domain_error("noisy_rotor_mc: t must be >= 0");

  GaussianStream g(seed);
  const double noise_step = std::sqrt(model.D);
  std::vector<double> values(trials);
  double mean = 0.0;
  for (std::size_t i = 0; i < trials; ++i) {
    const double theta0 = model.sigma * g.gauss();
    const double action_offset = model.sigma * g.gauss();
    double eta = 0.0;
    if (model.D > 0.0)
      for (long s = 0; s < t; ++s) eta += noise_step * g.gauss();
    const double theta =
        theta0 + (model.omega + model.omega_prime * action_offset) * t + eta;
    values[i] = f(theta);
    mean += values[i];
  }
  mean /= static_cast<double>(trials);

  double m2 = 0.0, m4 = 0.0;
  for (double v : values) {
    const double d = v - mean;
    m2 += d * d;
    m4 += d * d * d * d;
  }
  const double n = static_cast<double>(trials);
  m2 /= n;
  m4 /= n;
  VarianceEstimate est;
  est.trials = trials;
  est.value = m2 * n / (n - 1.0);
  est.std_error = std::sqrt(std::max(0.0, m4 - m2 * m2) / n);
  return est;
}

} // namespace kicktop
