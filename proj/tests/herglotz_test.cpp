#include <gtest/gtest.h>

#include <Eigen/Dense>

#include <cmath>
#include <numbers>

#include "clarklab/herglotz.hpp"
#include "clarklab/random.hpp"

using namespace clarklab;

namespace {

const double kPi = std::numbers::pi;

double dist(Complex a, Complex b) { return std::abs(a - b); }

HerglotzRational minus_inverse() { return HerglotzRational(Polynomial({-1.0}), Polynomial({0.0, 1.0})); }

}  // namespace

TEST(Polynomial, RootsAndArithmetic) {
  auto p = Polynomial::from_roots({1.0, -2.0, Complex(0.0, 3.0)});
  EXPECT_EQ(p.degree(), 3);
  auto r = p.roots();
  ASSERT_EQ(r.size(), 3u);
  for (Complex want : {Complex(1.0), Complex(-2.0), Complex(0.0, 3.0)}) {
    double best = 1e300;
    for (auto z : r) best = std::min(best, dist(z, want));
    EXPECT_LT(best, 1e-12);
  }
  auto q = p.deflate(1.0);
  EXPECT_EQ(q.degree(), 2);
  EXPECT_LT(std::abs(q(-2.0)), 1e-12);
  EXPECT_LT(dist(p.derivative()(0.0), p.coefficient(1)), 1e-15);
}

TEST(Rational, Evaluation) {
  EXPECT_LT(dist(rational_eval(minus_inverse(), kI), kI), 1e-15);
  HerglotzRational f(Polynomial({1.0}), Polynomial({1.0, 0.0, -1.0}));
  EXPECT_LT(dist(f(0.0), 1.0), 1e-15);
  HerglotzRational g(Polynomial({0.0, 1.0}), Polynomial({1.0, 0.0, -1.0}));
  EXPECT_LT(dist(g(2.0), -2.0 / 3.0), 1e-15);
  EXPECT_THROW(minus_inverse()(0.0), PoleError);
}

TEST(Rational, ReducedFormIsEnforced) {
  EXPECT_THROW(HerglotzRational(Polynomial({-1.0, 1.0}), Polynomial({1.0, 0.0, -1.0})), InvalidArgument);
  EXPECT_THROW(HerglotzRational(Polynomial({1.0}), Polynomial(std::vector<Complex>{})), InvalidArgument);
}

TEST(Rational, Derivative) {
  auto d = rational_derivative(minus_inverse());
  for (Complex z : {Complex(0.5, 0.5), Complex(-2.0, 1.0)}) EXPECT_LT(dist(d(z), 1.0 / (z * z)), 1e-13);
  HerglotzRational sq(Polynomial({0.0, 0.0, 1.0}), Polynomial({1.0}));
  auto d2 = rational_derivative(sq);
  EXPECT_LT(dist(d2(Complex(1.5, -0.5)), 2.0 * Complex(1.5, -0.5)), 1e-13);
  HerglotzRational inv(Polynomial({1.0}), Polynomial({1.0, -1.0}));
  auto d3 = rational_derivative(inv);
  Complex z(0.3, 0.2);
  EXPECT_LT(dist(d3(z), 1.0 / ((1.0 - z) * (1.0 - z))), 1e-13);
}

TEST(Rational, PoleFormMatchesLineMeasure) {
  LineAtomicMeasure mu({{-1.0, 0.25}, {0.5, 0.5}, {2.0, 0.25}});
  auto k = HerglotzRational::from_line_measure(mu);
  for (Complex z : {Complex(0.0, 1.0), Complex(3.0, 0.01), Complex(-0.3, 2.0)})
    EXPECT_LT(dist(k(z), cauchy_transform_line(mu, z)), 1e-14);
  auto back = k.line_measure();
  ASSERT_EQ(back.size(), 3u);
  EXPECT_NEAR(back.atoms()[1].mass, 0.5, 1e-15);
  // Herglotz: Im K > 0 in the upper half-plane
  EXPECT_GT(k(Complex(0.2, 1e-3)).imag(), 0.0);
}

TEST(Blaschke, Evaluation) {
  EXPECT_LT(dist(BlaschkeProduct({0.0})(0.5), 0.5), 1e-15);
  EXPECT_LT(dist(BlaschkeProduct::power(2)(Complex(0.0, 0.5)), -0.25), 1e-15);
  BlaschkeProduct b({Complex(0.3, 0.4), Complex(-0.5, 0.1)}, unimodular(0.7));
  for (int k = 0; k < 32; ++k) EXPECT_NEAR(std::abs(b(unimodular(0.2 * k))), 1.0, 1e-14);
  EXPECT_LT(std::abs(b(Complex(0.3, 0.4))), 1e-15);
  EXPECT_THROW(BlaschkeProduct({1.0}), InvalidArgument);
  EXPECT_THROW(BlaschkeProduct({0.0}, 2.0), InvalidArgument);
}

TEST(Blaschke, BoundaryDerivativeModulus) {
  BlaschkeProduct b({Complex(0.3, 0.4), Complex(-0.5, 0.1), 0.0});
  for (double t : {0.1, 2.0, 4.5}) {
    double h = 1e-6;
    double fd = std::abs(b(unimodular(t + h)) - b(unimodular(t - h))) / (2 * h);
    EXPECT_NEAR(b.boundary_derivative_modulus(t), fd, 1e-7);
    EXPECT_NEAR(std::abs(b.derivative(unimodular(t))), fd, 1e-7);
  }
}

TEST(LevelSet, KnownValues) {
  auto z1 = level_set(BlaschkeProduct::power(1), 1.0);
  ASSERT_EQ(z1.size(), 1u);
  EXPECT_LT(dist(z1[0], 1.0), 1e-14);

  auto z2 = level_set(BlaschkeProduct::power(2), 1.0);
  ASSERT_EQ(z2.size(), 2u);
  EXPECT_LT(dist(z2[0], 1.0), 1e-14);
  EXPECT_LT(dist(z2[1], -1.0), 1e-14);

  auto zi = level_set_angles(BlaschkeProduct::power(2), kI);
  ASSERT_EQ(zi.size(), 2u);
  EXPECT_NEAR(zi[0], kPi / 4, 1e-14);
  EXPECT_NEAR(zi[1], 5 * kPi / 4, 1e-14);

  EXPECT_THROW(level_set(BlaschkeProduct::power(2), 0.5), DomainError);
}

TEST(LevelSet, MatchesPolynomialRootOracle) {
  // theta = alpha  <=>  c prod(z - a) - alpha prod(1 - conj(a) z) = 0
  Rng rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    auto b = random_blaschke(rng, 1 + trial % 9, trial % 2 == 0, 0.9);
    Complex alpha = rng.unimodular_point();
    auto got = level_set(b, alpha);
    auto oracle = (b.numerator() - b.denominator() * alpha).roots();
    ASSERT_EQ(got.size(), oracle.size());
    for (auto w : oracle) {
      double best = 1e300;
      for (auto z : got) best = std::min(best, dist(z, w));
      EXPECT_LT(best, 1e-9);
    }
    for (auto z : got) EXPECT_LT(dist(b(z), alpha), 1e-12);
  }
}

TEST(Secular, KnownValues) {
  auto k0 = HerglotzRational::from_line_measure(LineAtomicMeasure::dirac(0.0));
  auto r0 = secular_roots_line(k0, 3.0);
  ASSERT_EQ(r0.size(), 1u);
  EXPECT_NEAR(r0[0], 3.0, 1e-14);
  auto m0 = residue_masses_line(k0, 3.0, r0);
  EXPECT_NEAR(m0[0], 1.0, 1e-14);

  auto k2 = HerglotzRational::from_line_measure(LineAtomicMeasure({{-1.0, 0.5}, {1.0, 0.5}}));
  auto r2 = secular_roots_line(k2, 3.0);
  ASSERT_EQ(r2.size(), 2u);
  EXPECT_NEAR(r2[0], (3 - std::sqrt(13.0)) / 2, 1e-14);
  EXPECT_NEAR(r2[1], (3 + std::sqrt(13.0)) / 2, 1e-14);

  // masses against the 2x2 eigenvector oracle of diag(-1, 1) + 3 phi phi^T
  Eigen::Matrix2d a;
  a << -1 + 1.5, 1.5, 1.5, 1 + 1.5;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(a);
  Eigen::Vector2d phi(std::sqrt(0.5), std::sqrt(0.5));
  auto m2 = residue_masses_line(k2, 3.0, r2);
  for (int j = 0; j < 2; ++j) {
    EXPECT_NEAR(r2[j], es.eigenvalues()(j), 1e-13);
    EXPECT_NEAR(m2[j], std::pow(es.eigenvectors().col(j).dot(phi), 2), 1e-13);
  }
  EXPECT_NEAR(m2[0] + m2[1], 1.0, 1e-14);

  // continuity to the unperturbed spectrum
  auto small = secular_roots_line(k2, 1e-8);
  EXPECT_NEAR(small[0], -1.0, 1e-7);
  EXPECT_NEAR(small[1], 1.0, 1e-7);
  EXPECT_THROW(secular_roots_line(k2, 0.0), InvalidArgument);
}

TEST(Secular, InterlacingOnClusteredSites) {
  // nearly coincident sites stress the shifted-variable iteration
  std::vector<double> t{-1.0, -1.0 + 1e-9, 0.0, 1e-7, 5.0};
  std::vector<double> m{0.2, 0.2, 0.2, 0.2, 0.2};
  std::vector<Atom> atoms;
  for (std::size_t j = 0; j < t.size(); ++j) atoms.push_back({t[j], m[j]});
  auto k = HerglotzRational::from_line_measure(LineAtomicMeasure(atoms));
  for (double lambda : {-10.0, -0.1, 0.1, 10.0}) {
    auto r = secular_roots_line(k, lambda);
    ASSERT_EQ(r.size(), t.size());
    for (std::size_t j = 0; j + 1 < t.size(); ++j) {
      if (lambda > 0) {
        EXPECT_GE(r[j], t[j]);
        EXPECT_LE(r[j], t[j + 1]);
      } else {
        EXPECT_GE(r[j + 1], t[j]);
        EXPECT_LE(r[j + 1], t[j + 1]);
      }
    }
  }
}

TEST(Cayley, DeltaZero) {
  auto j = minus_inverse();
  auto theta = cayley_transfer(j);
  for (Complex z : {Complex(0.0, 2.0), Complex(1.0, 0.5), Complex(-3.0, 0.1)})
    EXPECT_LT(dist(theta(z), (z - kI) / (z + kI)), 1e-14);
  EXPECT_LT(std::abs(theta(kI)), 1e-15);
  EXPECT_LT(std::abs(theta(Complex(0.0, 2.0))), 1.0);
  for (double x : {-5.0, 0.0, 0.7, 40.0}) EXPECT_NEAR(std::abs(theta(x)), 1.0, 1e-14);

  auto xs = theta.level_set(relabel_lambda(3.0));
  ASSERT_EQ(xs.size(), 1u);
  EXPECT_NEAR(xs[0], 3.0, 1e-12);
}

TEST(Cayley, RoundTrip) {
  LineAtomicMeasure mu({{-2.0, 0.1}, {-0.3, 0.4}, {0.9, 0.3}, {4.0, 0.2}});
  auto j = HerglotzRational::from_line_measure(mu);
  auto theta = cayley_transfer(j);
  auto back = cayley_inverse(theta);
  for (Complex z : {Complex(0.0, 1.0), Complex(2.0, 0.3), Complex(-1.0, 5.0)})
    EXPECT_LT(dist(back(z), j(z)), 1e-11 * (1 + std::abs(j(z))));
  for (double lambda : {-10.0, -1.0, 0.5, 7.0}) {
    auto xs = theta.level_set(relabel_lambda(lambda));
    auto roots = secular_roots_line(j, lambda);
    ASSERT_EQ(xs.size(), roots.size());
    for (std::size_t i = 0; i < xs.size(); ++i) EXPECT_NEAR(xs[i], roots[i], 1e-9 * (1 + std::abs(roots[i])));
  }
}

TEST(Cayley, RejectsNonHerglotz) {
  HerglotzRational anti(Polynomial({1.0}), Polynomial({0.0, 1.0}));  // 1/z has Im < 0 above
  EXPECT_THROW(cayley_transfer(anti), InvalidArgument);
}

TEST(Cayley, DiskMaps) {
  for (Complex z : {Complex(0.0, 1.0), Complex(3.0, 0.2)}) {
    EXPECT_LT(std::abs(to_disk(z)), 1.0);
    EXPECT_LT(dist(to_half_plane(to_disk(z)), z), 1e-13);
  }
}
