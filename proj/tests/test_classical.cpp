#include <catch2/catch_amalgamated.hpp>

#include <kicktop/cat_map.hpp>
#include <kicktop/classical.hpp>
#include <kicktop/models.hpp>
#include <kicktop/rotor.hpp>

#include "oracles.hpp"

using namespace kicktop;
using Catch::Approx;

TEST_CASE("map fixes the y poles and cycles the x-z great circle") {
  const double k = GENERATE(0.0, 1.0, 6.0);
  const ClassicalPoint fixed = classical_map_step({0, 1, 0}, k);
  REQUIRE(fixed.x == Approx(0.0).margin(1e-15));
  REQUIRE(fixed.y == Approx(1.0).margin(1e-15));
  REQUIRE(fixed.z == Approx(0.0).margin(1e-15));

  ClassicalPoint p{1, 0, 0};
  const double expect[4][3] = {{0, 0, -1}, {-1, 0, 0}, {0, 0, 1}, {1, 0, 0}};
  for (int i = 0; i < 4; ++i) {
    p = classical_map_step(p, k);
    REQUIRE(p.x == Approx(expect[i][0]).margin(1e-14));
    REQUIRE(p.y == Approx(expect[i][1]).margin(1e-14));
    REQUIRE(p.z == Approx(expect[i][2]).margin(1e-14));
  }
}

TEST_CASE("k=0 map is a quarter turn") {
  ClassicalPoint p = sphere_point(1.2, -0.7);
  const ClassicalPoint start = p;
  for (int i = 0; i < 4; ++i) p = classical_map_step(p, 0.0);
  REQUIRE(p.x == Approx(start.x).margin(1e-14));
  REQUIRE(p.y == Approx(start.y).margin(1e-14));
  REQUIRE(p.z == Approx(start.z).margin(1e-14));
}

TEST_CASE("map preserves the sphere over long runs and inverts exactly") {
  ClassicalPoint p = sphere_point(2.25, 1.1);
  for (int i = 0; i < 1000000; ++i) p = classical_map_step(p, 6.0);
  REQUIRE(std::abs(p.radius_sq() - 1.0) < 1e-10);

  ClassicalPoint q = sphere_point(0.9, 2.0);
  for (int i = 0; i < 100; ++i) {
    const ClassicalPoint fwd = classical_map_step(q, 3.0);
    const ClassicalPoint back = classical_map_inverse(fwd, 3.0);
    REQUIRE(std::abs(back.x - q.x) < 1e-12);
    REQUIRE(std::abs(back.y - q.y) < 1e-12);
    REQUIRE(std::abs(back.z - q.z) < 1e-12);
    q = fwd;
  }
}

TEST_CASE("gaussian ensemble centers, shrinks and reproduces") {
  const auto tight = sample_gaussian_ensemble(2.25, 1.1, 1e-9, 100, 5);
  const ClassicalPoint center = sphere_point(2.25, 1.1);
  for (const auto& p : tight.points) {
    REQUIRE(std::abs(p.x - center.x) < 1e-7);
    REQUIRE(std::abs(p.y - center.y) < 1e-7);
    REQUIRE(std::abs(p.z - center.z) < 1e-7);
  }

  const std::size_t count = 100000;
  const double sigma = 0.05;
  const auto e = sample_gaussian_ensemble(2.25, 1.1, sigma, count, 17);
  double mx = 0, my = 0, mz = 0;
  for (const auto& p : e.points) {
    REQUIRE(std::abs(p.radius_sq() - 1.0) < 1e-12);
    mx += p.x;
    my += p.y;
    mz += p.z;
  }
  mx /= count;
  my /= count;
  mz /= count;
  // the mean contracts toward the center by ~e^{-sigma_eff^2/2}; allow for
  // that plus 3 standard errors, with the 1/sin(theta0) phi scaling folded in
  const double sigma_eff = sigma / std::sin(2.25);
  const double tol = 0.5 * sigma_eff * sigma_eff + 3.0 * sigma_eff / std::sqrt(double(count));
  REQUIRE(std::abs(mx - center.x) < tol);
  REQUIRE(std::abs(my - center.y) < tol);
  REQUIRE(std::abs(mz - center.z) < tol);

  const auto again = sample_gaussian_ensemble(2.25, 1.1, sigma, 1000, 99);
  const auto again2 = sample_gaussian_ensemble(2.25, 1.1, sigma, 1000, 99);
  for (std::size_t i = 0; i < again.points.size(); ++i) {
    REQUIRE(again.points[i].x == again2.points[i].x);
    REQUIRE(again.points[i].y == again2.points[i].y);
    REQUIRE(again.points[i].z == again2.points[i].z);
  }
}

TEST_CASE("classical linear entropy endpoints") {
  ClassicalEnsemble delta;
  delta.points.assign(50, sphere_point(1.0, 1.0));
  REQUIRE(classical_linear_entropy(delta) == Approx(0.0).margin(1e-15));

  // uniform cover of the sphere -> 1/2 up to sampling error
  GaussianStream g(4);
  ClassicalEnsemble uniform;
  for (int i = 0; i < 200000; ++i) {
    ClassicalPoint p{g.gauss(), g.gauss(), g.gauss()};
    const double r = std::sqrt(p.radius_sq());
    uniform.points.push_back({p.x / r, p.y / r, p.z / r});
  }
  REQUIRE(classical_linear_entropy(uniform) == Approx(0.5).margin(2e-3));

  ClassicalEnsemble empty;
  REQUIRE_THROWS_AS(classical_linear_entropy(empty), std::invalid_argument);
}

TEST_CASE("periodic orbit search") {
  // fixed point at the +y pole for k=1
  const auto fp = find_periodic_orbit(1.0, std::numbers::pi / 2, std::numbers::pi / 2, 1);
  REQUIRE(fp.has_value());
  REQUIRE(fp->size() == 1);
  REQUIRE((*fp)[0].x == Approx(0.0).margin(1e-9));
  REQUIRE((*fp)[0].y == Approx(1.0).margin(1e-9));
  REQUIRE((*fp)[0].z == Approx(0.0).margin(1e-9));

  // the x-z period-4 orbit exists for any k
  const auto orbit = find_periodic_orbit(4.7, std::numbers::pi / 2, 0.0, 4);
  REQUIRE(orbit.has_value());
  REQUIRE(orbit->size() == 4);
  REQUIRE((*orbit)[0].x == Approx(1.0).margin(1e-9));
  REQUIRE((*orbit)[1].z == Approx(-1.0).margin(1e-9));
  REQUIRE((*orbit)[2].x == Approx(-1.0).margin(1e-9));
  REQUIRE((*orbit)[3].z == Approx(1.0).margin(1e-9));

  // k=0: everything is period 4, so any guess converges immediately
  const auto anywhere = find_periodic_orbit(0.0, 0.83, -2.1, 4);
  REQUIRE(anywhere.has_value());

  // deep chaos, period 1, generic guess: if the search converges the result
  // must really be a fixed point
  const auto maybe = find_periodic_orbit(6.0, 1.0, 2.0, 1, 1e-10, 8);
  if (maybe) {
    const ClassicalPoint next = classical_map_step((*maybe)[0], 6.0);
    REQUIRE(std::abs(next.x - (*maybe)[0].x) < 1e-9);
  }
}

TEST_CASE("cat map powers are exact Fibonacci numbers") {
  CatMap arnold;
  std::vector<detail::BigInt> fib(140);
  fib[1] = 1;
  fib[2] = 1;
  for (int i = 3; i < 140; ++i) fib[i] = fib[i - 1] + fib[i - 2];
  for (int n : {1, 2, 5, 20, 60}) {
    const CatMapPower p = cat_map_power(arnold, n);
    REQUIRE(p.a == fib[2 * n + 1]);
    REQUIRE(p.b == fib[2 * n]);
    REQUIRE(p.c == fib[2 * n]);
    REQUIRE(p.d == fib[2 * n - 1]);
  }
}

TEST_CASE("cat map variance closed form at n=0 and n=1") {
  CatMap m;
  m.sigma = 0.02;
  m.q0 = 0.3;
  const double g0 = std::exp(-4.0 * std::numbers::pi * std::numbers::pi * m.sigma * m.sigma);
  const double expect0 =
      0.5 * (1.0 - g0) * (1.0 - std::cos(4.0 * std::numbers::pi * m.q0) * g0);
  REQUIRE(cat_map_variance(m, 0) == Approx(expect0).margin(1e-15));

  // a_1 = 2, c_1 = 1 -> exponent factor a^2 + c^2 = 5
  const double g1 = std::exp(-4.0 * std::numbers::pi * std::numbers::pi * m.sigma * m.sigma * 5.0);
  const double expect1 =
      0.5 * (1.0 - g1) * (1.0 - std::cos(4.0 * std::numbers::pi * m.q0 * 2.0) * g1);
  REQUIRE(cat_map_variance(m, 1) == Approx(expect1).margin(1e-15));
}

TEST_CASE("cat map closed form agrees with the torus Monte Carlo") {
  CatMap m;
  m.q0 = 0.3;
  for (double sigma : {0.005, 0.01, 0.02}) {
    m.sigma = sigma;
    for (int n = 0; n <= 6; ++n) {
      const auto mc = oracle::torus_cat_variance(m, n, 100000, 1000 + n);
      const double cf = cat_map_variance(m, n);
      INFO("sigma=" << sigma << " n=" << n << " mc=" << mc.value << "+-" << mc.std_error
                    << " closed=" << cf);
      REQUIRE(std::abs(cf - mc.value) < 3.0 * mc.std_error + 1e-12);
    }
  }
}

TEST_CASE("cat map saturates to 1/2 and handles huge powers") {
  CatMap m;
  m.sigma = 0.01;
  m.q0 = 0.17;
  REQUIRE(cat_map_variance(m, 12) == Approx(0.5).margin(1e-10));
  REQUIRE(cat_map_variance(m, 120) == Approx(0.5).margin(1e-14)); // far past double overflow
}

TEST_CASE("cat map validates the determinant") {
  CatMap bad;
  bad.a = 2;
  bad.b = 1;
  bad.c = 1;
  bad.d = 2;
  REQUIRE_THROWS_AS(cat_map_variance(bad, 1), std::domain_error);
}

TEST_CASE("noisy rotor reproduces the noise-free closed form") {
  NoisyRotor model;
  model.omega = 1.3;
  model.omega_prime = 0.8;
  model.sigma = 0.05;
  model.D = 0.0;
  auto cosine = [](double th) { return std::cos(th); };
  for (long t : {0L, 3L, 10L, 40L, 150L}) {
    const auto mc = noisy_rotor_mc(model, cosine, t, 200000, 42 + t);
    const double cf = integrable_var(double(t), model.omega, model.omega_prime, model.sigma);
    INFO("t=" << t << " mc=" << mc.value << "+-" << mc.std_error << " closed=" << cf);
    REQUIRE(std::abs(cf - mc.value) < 3.0 * mc.std_error + 1e-10);
  }
}

TEST_CASE("noisy rotor equilibrates to 1/2") {
  NoisyRotor model;
  model.omega = 1.0;
  model.omega_prime = 1.0;
  model.sigma = 0.05;
  model.D = 0.05;
  const auto late =
      noisy_rotor_mc(model, [](double th) { return std::cos(th); }, 2000, 50000, 7);
  REQUIRE(late.value == Approx(0.5).margin(0.01));
}

TEST_CASE("strong noise at t=1 matches the noisy closed form") {
  NoisyRotor model;
  model.omega = 1.0;
  model.omega_prime = 1.0;
  model.sigma = 0.05;
  model.D = 2.0;
  const auto mc = noisy_rotor_mc(model, [](double th) { return std::cos(th); }, 1, 200000, 11);
  const double cf = noisy_var(1.0, model.omega, model.omega_prime, model.sigma, model.D);
  REQUIRE(std::abs(cf - mc.value) < 3.0 * mc.std_error + 1e-10);
}
