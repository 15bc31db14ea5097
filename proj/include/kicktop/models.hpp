#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

namespace kicktop {

// S1(n) = S_inf (1 - exp(-alpha n^2 / N)): quadratic-in-time entanglement
// growth of the clean near-integrable top.
struct RegularFit {
  double s_inf = 0.35;
  double alpha = 0.25;
  int N = 1;
};

inline double regular_model(double n, const RegularFit& fit) {
  return fit.s_inf * (1.0 - std::exp(-fit.alpha * n * n / fit.N));
}

// Noise-free rotor variance of cos(theta):
// var f(t) = 1/2 (1 - E)(1 - E cos(2 omega t)), E = exp(-sigma^2 (omega'^2 t^2 + 1)).
inline double integrable_var(double t, double omega, double omega_prime, double sigma) {
  if (!(sigma > 0.0)) throw std::domain_error("integrable_var: sigma must be > 0");
  const double env = std::exp(-sigma * sigma * (omega_prime * omega_prime * t * t + 1.0));
  return 0.5 * (1.0 - env) * (1.0 - env * std::cos(2.0 * omega * t));
}

// Chaotic-regime variance form: 1/2 [1 - exp(-alpha sigma^2 e^{2 lambda t})].
struct ChaoticModel {
  double alpha = 1.0;
  double lambda = 1.0;
  double sigma_sq = 1.0; // identified with 1/N when fitting quantum data
};

inline double chaotic_var(double t, const ChaoticModel& m) {
  return 0.5 * (1.0 - std::exp(-m.alpha * m.sigma_sq * std::exp(2.0 * m.lambda * t)));
}

// Sign of the second envelope exponent in the noisy closed form. The
// `negative` variant reduces to integrable_var at D = 0 and is the one the
// Monte Carlo rotor validates; `positive` evaluates the alternative as
// written elsewhere, which grows unboundedly with t.
enum class NoisyEnvelopeSign { negative, positive };

// Rotor variance of cos(theta) with cumulative angle noise of per-kick
// variance D.
inline double noisy_var(double t, double omega, double omega_prime, double sigma, double D,
                        NoisyEnvelopeSign sign = NoisyEnvelopeSign::negative) {
  if (!(D >= 0.0)) throw std::domain_error("noisy_var: D must be >= 0");
  const double u = sigma * sigma * (1.0 + omega_prime * omega_prime * t * t);
  const double damp = std::exp(-D * t);
  const double second = sign == NoisyEnvelopeSign::negative ? std::exp(-u) : std::exp(u);
  return 0.5 * (1.0 - damp * std::exp(-u)) * (1.0 - damp * second * std::cos(2.0 * omega * t));
}

// Heuristic entanglement growth under disorder: S0 (1 - e^{-D n} e^{-alpha n^2}).
struct NoisyFit {
  double s0 = 0.5;
  double D = 0.0;
  double alpha = 0.0;
};

inline double noisy_fit_model(double n, const NoisyFit& fit) {
  return fit.s0 * (1.0 - std::exp(-fit.D * n) * std::exp(-fit.alpha * n * n));
}

struct FourierAverage {
  std::complex<double> value;
  bool converged = true;
};

// <f>(t) = sum_k f_k e^{-i k omega t} e^{-k^2 sigma^2 / 2} e^{-k^2 omega'^2 t^2 sigma^2 / 2}
// for Fourier coefficients f_k, k = -K..K packed into `coeffs` (size 2K+1,
// index K + k). The convergence flag reports whether the dropped tail,
// bounded by the largest coefficient times the Gaussian damping at K+1,
// stays below `tail_tol`.
inline FourierAverage fourier_average(double t, std::span<const std::complex<double>> coeffs,
                                      double omega, double omega_prime, double sigma,
                                      double tail_tol = 1e-12) {
  if (coeffs.empty() || coeffs.size() % 2 == 0)
    throw std::invalid_argument("fourier_average: coeffs must hold k = -K..K (odd count)");
  const int kmax = static_cast<int>(coeffs.size() / 2);
  const double damp_scale = 0.5 * sigma * sigma * (1.0 + omega_prime * omega_prime * t * t);
  std::complex<double> sum = 0.0;
  double max_coeff = 0.0;
  for (int k = -kmax; k <= kmax; ++k) {
    const std::complex<double> fk = coeffs[kmax + k];
    max_coeff = std::max(max_coeff, std::abs(fk));
    if (fk == std::complex<double>(0, 0)) continue;
    sum += fk * std::polar(std::exp(-double(k) * k * damp_scale), -k * omega * t);
  }
  FourierAverage out;
  out.value = sum;
  const double tail_k = kmax + 1.0;
  // crude geometric bound on the tail of the Gaussian-damped series
  const double head = std::exp(-tail_k * tail_k * damp_scale);
  const double ratio = std::exp(-(2.0 * tail_k + 1.0) * damp_scale);
  const double tail = ratio < 1.0 ? 2.0 * max_coeff * head / (1.0 - ratio)
                                  : std::numeric_limits<double>::infinity();
  out.converged = tail <= tail_tol;
  return out;
}

// --- least-squares fitting -------------------------------------------------

struct FitData {
  std::vector<double> n; // abscissa (kick count)
  std::vector<double> s; // observed value
};

struct FitResult {
  std::vector<double> params;
  double rss = 0.0;
  bool converged = false;
  int iterations = 0;
};

using ModelFn = std::function<double(double, std::span<const double>)>;

namespace detail {

inline double fit_rss(const ModelFn& model, const FitData& data, std::span<const double> p) {
  double rss = 0.0;
  for (std::size_t i = 0; i < data.n.size(); ++i) {
    const double r = model(data.n[i], p) - data.s[i];
    rss += r * r;
  }
  return rss;
}

} // namespace detail

// Derivative-free Nelder-Mead simplex minimization of the residual sum of
// squares. Stops when the relative parameter spread of the simplex falls
// below rel_tol or after max_iter iterations; the best point is returned
// either way, with `converged` telling which.
inline FitResult fit_curve(const ModelFn& model, const FitData& data,
                           std::span<const double> guess, double rel_tol = 1e-8,
                           int max_iter = 10000) {
  if (data.n.size() != data.s.size())
    throw std::invalid_argument("fit_curve: mismatched data columns");
  if (data.n.size() < 5) throw std::invalid_argument("fit_curve: need at least 5 data points");
  const std::size_t dim = guess.size();
  if (dim == 0) throw std::invalid_argument("fit_curve: empty initial guess");

  std::vector<std::vector<double>> simplex(dim + 1, std::vector<double>(guess.begin(), guess.end()));
  for (std::size_t i = 0; i < dim; ++i) {
    double& x = simplex[i + 1][i];
    x += x != 0.0 ? 0.1 * std::abs(x) : 0.05;
  }
  std::vector<double> value(dim + 1);
  for (std::size_t i = 0; i <= dim; ++i) value[i] = detail::fit_rss(model, data, simplex[i]);

  FitResult out;
  std::vector<double> centroid(dim), trial(dim), trial2(dim);
  int iter = 0;
  for (; iter < max_iter; ++iter) {
    std::vector<std::size_t> order(dim + 1);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return value[a] < value[b]; });
    const std::size_t best = order[0], worst = order[dim], second = order[dim - 1];

    double spread = 0.0;
    for (std::size_t j = 0; j < dim; ++j) {
      const double scale = std::max(1e-12, std::abs(simplex[best][j]));
      spread = std::max(spread, std::abs(simplex[worst][j] - simplex[best][j]) / scale);
    }
    if (spread < rel_tol) {
      out.converged = true;
      break;
    }

    for (std::size_t j = 0; j < dim; ++j) {
      double c = 0.0;
      for (std::size_t i = 0; i <= dim; ++i)
        if (i != worst) c += simplex[i][j];
      centroid[j] = c / dim;
    }

    auto blend = [&](std::vector<double>& dst, double coef) {
      for (std::size_t j = 0; j < dim; ++j)
        dst[j] = centroid[j] + coef * (simplex[worst][j] - centroid[j]);
    };

    blend(trial, -1.0); // reflection
    const double fr = detail::fit_rss(model, data, trial);
    if (fr < value[best]) {
      blend(trial2, -2.0); // expansion
      const double fe = detail::fit_rss(model, data, trial2);
      simplex[worst] = fe < fr ? trial2 : trial;
      value[worst] = std::min(fe, fr);
    } else if (fr < value[second]) {
      simplex[worst] = trial;
      value[worst] = fr;
    } else {
      blend(trial2, 0.5); // contraction
      const double fc = detail::fit_rss(model, data, trial2);
      if (fc < value[worst]) {
        simplex[worst] = trial2;
        value[worst] = fc;
      } else {
        for (std::size_t i = 0; i <= dim; ++i) { // shrink toward the best vertex
          if (i == best) continue;
          for (std::size_t j = 0; j < dim; ++j)
            simplex[i][j] = simplex[best][j] + 0.5 * (simplex[i][j] - simplex[best][j]);
          value[i] = detail::fit_rss(model, data, simplex[i]);
        }
      }
    }
  }
  out.iterations = iter;
  std::size_t best = 0;
  for (std::size_t i = 1; i <= dim; ++i)
    if (value[i] < value[best]) best = i;
  out.params = simplex[best];
  out.rss = value[best];
  return out;
}

// Convenience wrappers for the three named model shapes.

inline FitResult fit_regular(const FitData& data, int N, double guess_s_inf = 0.4,
                             double guess_alpha = 0.2) {
  const double g[] = {guess_s_inf, guess_alpha};
  return fit_curve(
      [N](double n, std::span<const double> p) {
        return regular_model(n, RegularFit{p[0], p[1], N});
      },
      data, g);
}

inline FitResult fit_noisy(const FitData& data, double guess_s0 = 0.4, double guess_D = 0.01,
                           double guess_alpha = 1e-4) {
  const double g[] = {guess_s0, guess_D, guess_alpha};
  return fit_curve(
      [](double n, std::span<const double> p) {
        return noisy_fit_model(n, NoisyFit{p[0], p[1], p[2]});
      },
      data, g);
}

inline FitResult fit_chaotic(const FitData& data, double sigma_sq, double guess_alpha = 1.0,
                             double guess_lambda = 1.0) {
  const double g[] = {guess_alpha, guess_lambda};
  return fit_curve(
      [sigma_sq](double t, std::span<const double> p) {
        return chaotic_var(t, ChaoticModel{p[0], p[1], sigma_sq});
      },
      data, g);
}

} // namespace kicktop
