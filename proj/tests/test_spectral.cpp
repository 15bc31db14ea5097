#include <catch2/catch_amalgamated.hpp>

#include <kicktop/dicke.hpp>
#include <kicktop/full_engine.hpp>
#include <kicktop/spectral.hpp>

using namespace kicktop;
using Catch::Approx;

TEST_CASE("eigenangles of diagonal unitaries") {
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(5, 5);
  for (double a : eigenangles(id)) REQUIRE(a == Approx(0.0).margin(1e-12));

  Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(4, 4);
  d(0, 0) = 1.0;
  d(1, 1) = Complex(0, 1);
  d(2, 2) = -1.0;
  d(3, 3) = Complex(0, -1);
  const auto a = eigenangles(d);
  REQUIRE(a[0] == Approx(-std::numbers::pi / 2).margin(1e-12));
  REQUIRE(a[1] == Approx(0.0).margin(1e-12));
  REQUIRE(a[2] == Approx(std::numbers::pi / 2).margin(1e-12));
  REQUIRE(a[3] == Approx(std::numbers::pi).margin(1e-12));
}

TEST_CASE("eigenangles reject non-unitary input") {
  Eigen::MatrixXcd m = 2.0 * Eigen::MatrixXcd::Identity(8, 8);
  REQUIRE_THROWS_AS(eigenangles(m), ValidationError);
}

TEST_CASE("unitary eigensystem reconstructs the matrix") {
  const Eigen::MatrixXcd u = coe_unitary(128, 21);
  const UnitaryEigensystem es = unitary_eigensystem(u);
  const Eigen::MatrixXcd rebuilt =
      es.vectors * es.values.asDiagonal() * es.vectors.adjoint();
  REQUIRE((rebuilt - u).cwiseAbs().maxCoeff() < 1e-8);
  for (Eigen::Index i = 0; i < es.values.size(); ++i)
    REQUIRE(std::abs(std::abs(es.values[i]) - 1.0) < 1e-10);
}

TEST_CASE("symmetric-sector angles appear in the clean full spectrum") {
  const int N = 8;
  const TopParams tp{3.0, std::numbers::pi / 2, N};
  const auto full = eigenangles(build_dense_floquet(tp, DisorderRealization::none(N)));
  // collective-spin convention differs by the global phase k/4 per kick
  const UnitaryEigensystem sym = unitary_eigensystem(symmetric_floquet(tp), false);
  for (Eigen::Index i = 0; i < sym.values.size(); ++i) {
    const double target = std::arg(sym.values[i] * std::polar(1.0, tp.k / 4.0));
    double best = 1e9;
    for (double a : full) best = std::min(best, std::abs(a - target));
    REQUIRE(best < 1e-8);
  }
}

TEST_CASE("unfolding uniform angles gives unit spacings") {
  std::vector<double> angles(200);
  for (int i = 0; i < 200; ++i) angles[i] = -3.0 + 6.0 * i / 200.0;
  const auto s = unfold(angles);
  REQUIRE(s.size() == angles.size() - 1);
  for (double v : s) REQUIRE(v == Approx(1.0).margin(1e-9));
}

TEST_CASE("unfolded spacings always have unit mean") {
  GaussianStream g(3);
  std::vector<double> angles;
  double x = 0.0;
  for (int i = 0; i < 2000; ++i) {
    x += std::abs(g.gauss()) + 0.01;
    angles.push_back(x);
  }
  const auto s = unfold(angles);
  double mean = 0.0;
  for (double v : s) mean += v;
  mean /= double(s.size());
  REQUIRE(mean == Approx(1.0).margin(1e-9));
}

TEST_CASE("unfold requires enough levels") {
  std::vector<double> angles(10, 0.0);
  REQUIRE_THROWS_AS(unfold(angles), std::invalid_argument);
}

TEST_CASE("poisson spectrum unfolds to exponential spacings") {
  // angles with i.i.d. exponential gaps, then nonuniform stretching; the
  // unfolding must undo the stretch
  GaussianStream g(11);
  std::vector<double> angles;
  double x = 0.0;
  const std::size_t n = 10000;
  for (std::size_t i = 0; i < n; ++i) {
    x += -std::log(1.0 - g.uniform());
    angles.push_back(x);
  }
  for (double& a : angles) a = a + 0.3 * a * a / x; // smooth density modulation
  const auto s = unfold(angles, UnfoldOptions{.window = 20});
  const double d = ks_distance(s, SpacingRef::poisson);
  // 1% KS critical value is 1.63/sqrt(n)
  REQUIRE(d < 1.63 / std::sqrt(double(n)));
}

TEST_CASE("coe ensemble unfolds onto the wigner surmise") {
  std::vector<double> pooled;
  for (int r = 0; r < 10; ++r) {
    const auto angles = eigenangles(coe_unitary(512, 600 + r));
    const auto s = unfold(angles);
    pooled.insert(pooled.end(), s.begin(), s.end());
  }
  REQUIRE(ks_distance(pooled, SpacingRef::coe) < 0.03);
  // and it is nothing like an uncorrelated spectrum
  REQUIRE(ks_distance(pooled, SpacingRef::poisson) > 0.1);
}

TEST_CASE("reference densities are normalized with unit mean") {
  REQUIRE(reference_pdf(SpacingRef::poisson, 0.0) == Approx(1.0));
  REQUIRE(reference_pdf(SpacingRef::coe, 0.0) == Approx(0.0)); // level repulsion

  for (SpacingRef kind : {SpacingRef::poisson, SpacingRef::coe}) {
    const int steps = 200000;
    const double ds = 20.0 / steps;
    double total = 0.0, mean = 0.0;
    for (int i = 0; i < steps; ++i) {
      const double s = (i + 0.5) * ds;
      const double p = reference_pdf(kind, s);
      total += p * ds;
      mean += s * p * ds;
    }
    REQUIRE(total == Approx(1.0).margin(1e-8));
    REQUIRE(mean == Approx(1.0).margin(1e-8));
    // cdf consistency at a few points
    double cum = 0.0;
    for (int i = 0; i < steps / 2; ++i) cum += reference_pdf(kind, (i + 0.5) * ds) * ds;
    REQUIRE(cum == Approx(reference_cdf(kind, 10.0)).margin(1e-8));
  }
}

TEST_CASE("ks distance basics") {
  GaussianStream g(8);
  std::vector<double> from_ref;
  for (int i = 0; i < 10000; ++i) from_ref.push_back(-std::log(1.0 - g.uniform()));
  REQUIRE(ks_distance(from_ref, SpacingRef::poisson) < 0.02);

  const std::vector<double> constant(1000, 1.0);
  REQUIRE(ks_distance(constant, SpacingRef::poisson) > 0.5);

  REQUIRE_THROWS_AS(ks_distance({}, SpacingRef::poisson), std::invalid_argument);
}

TEST_CASE("spacing histogram integrates to one") {
  GaussianStream g(9);
  std::vector<double> s;
  for (int i = 0; i < 20000; ++i) s.push_back(-std::log(1.0 - g.uniform()));
  const SpacingHistogram h = spacing_histogram(s, 50, 4.0);
  double integral = 0.0;
  const double width = h.edges[1] - h.edges[0];
  for (double d : h.density) integral += d * width;
  // mass beyond s_max = 4 is e^{-4}
  REQUIRE(integral == Approx(1.0 - std::exp(-4.0)).margin(5e-3));
  REQUIRE(h.mean == Approx(1.0).margin(0.05));
}

TEST_CASE("eigenangle density is flat for uniform input") {
  GaussianStream g(10);
  std::vector<double> angles;
  for (int i = 0; i < 200000; ++i)
    angles.push_back(-std::numbers::pi + 2.0 * std::numbers::pi * g.uniform());
  const auto density = eigenangle_density(angles, 40);
  const double uniform = 1.0 / (2.0 * std::numbers::pi);
  for (double d : density) REQUIRE(d == Approx(uniform).epsilon(0.1));
  REQUIRE_THROWS_AS(eigenangle_density(angles, 5), std::invalid_argument);
}

TEST_CASE("eigenangle density: clustered at weak disorder, uniform at strong") {
  const TopParams tp{0.5, 4.0 * std::numbers::pi / 11, 12};
  auto density_for = [&](double w) {
    const auto dr = DisorderRealization::generate(DisorderKind::interaction, tp.N, w, 321);
    const ParityBlocks blocks = parity_blocks(build_dense_floquet(tp, dr), tp.N);
    return eigenangle_density(eigenangles(blocks.plus), 50);
  };

  const auto clustered = density_for(0.5);
  const double cmax = *std::max_element(clustered.begin(), clustered.end());
  const double cmin = *std::min_element(clustered.begin(), clustered.end());
  REQUIRE(cmax > 3.0 * cmin); // distinct clusters, near-empty gaps

  const auto uniform = density_for(8.0);
  const double umax = *std::max_element(uniform.begin(), uniform.end());
  const double umin = *std::min_element(uniform.begin(), uniform.end());
  REQUIRE(umax < 2.0 * umin); // bands merged into the flat Floquet density
}

TEST_CASE("haar and coe samples are unitary, coe symmetric") {
  const Eigen::MatrixXcd u = haar_unitary(64, 12);
  REQUIRE(unitarity_defect(u) < 1e-12);
  const Eigen::MatrixXcd c = coe_unitary(64, 13);
  REQUIRE(unitarity_defect(c) < 1e-12);
  REQUIRE((c - c.transpose()).cwiseAbs().maxCoeff() < 1e-12);
}
