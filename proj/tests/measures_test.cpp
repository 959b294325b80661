#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "clarklab/measures.hpp"
#include "clarklab/quadrature.hpp"

using namespace clarklab;

namespace {

const double kPi = std::numbers::pi;

LineAtomicMeasure two_atom() { return LineAtomicMeasure({{-1.0, 0.5}, {1.0, 0.5}}); }
CircleAtomicMeasure two_point() { return CircleAtomicMeasure({{0.0, 0.5}, {kPi, 0.5}}); }

}  // namespace

TEST(Measures, TotalMass) {
  EXPECT_EQ(total_mass(LineAtomicMeasure::dirac(0.0)), 1.0);
  EXPECT_EQ(total_mass(two_atom()), 1.0);
  EXPECT_EQ(total_mass(LineAtomicMeasure()), 0.0);
}

TEST(Measures, ConstructionValidates) {
  EXPECT_THROW(LineAtomicMeasure({{0.0, -1.0}}), InvalidArgument);
  EXPECT_THROW(LineAtomicMeasure({{std::nan(""), 1.0}}), InvalidArgument);
  EXPECT_THROW(LineAtomicMeasure({{0.0, std::numeric_limits<double>::infinity()}}), InvalidArgument);
}

TEST(Measures, AtomsAreSortedAndMerged) {
  LineAtomicMeasure mu({{2.0, 0.25}, {-1.0, 0.25}, {2.0 + 1e-14, 0.5}});
  ASSERT_EQ(mu.size(), 2u);
  EXPECT_EQ(mu.atoms()[0].position, -1.0);
  EXPECT_NEAR(mu.atoms()[1].mass, 0.75, 1e-15);

  CircleAtomicMeasure nu({{-0.5 * kPi, 1.0}, {7.0, 1.0}});
  for (const auto& a : nu.atoms()) {
    EXPECT_GE(a.position, 0.0);
    EXPECT_LT(a.position, kTwoPi);
  }
  EXPECT_LT(nu.atoms()[0].position, nu.atoms()[1].position);
}

TEST(Measures, MeasureOfSets) {
  auto d0 = LineAtomicMeasure::dirac(0.0);
  EXPECT_EQ(measure_of(d0, BorelSet::intervals({{-1.0, 1.0}})), 1.0);
  EXPECT_EQ(measure_of(d0, BorelSet::intervals({{1.0, 2.0}})), 0.0);
  EXPECT_EQ(measure_of(two_atom(), BorelSet::intervals({{0.0, 2.0}})), 0.5);
  EXPECT_EQ(measure_of(two_point(), BorelSet::full_circle()), 1.0);
  // an arc that wraps through angle 0
  EXPECT_EQ(measure_of(two_point(), BorelSet::arcs({{-0.5, 0.5}})), 0.5);
  EXPECT_THROW(measure_of(d0, BorelSet::arcs({{0.0, 1.0}})), InvalidArgument);
}

TEST(Measures, BorelSetValidation) {
  EXPECT_THROW(BorelSet::intervals({{1.0, 0.0}}), InvalidArgument);
  EXPECT_THROW(BorelSet::intervals({{0.0, 2.0}, {1.0, 3.0}}), InvalidArgument);
  EXPECT_THROW(BorelSet::arcs({{0.0, 7.0}}), InvalidArgument);
  auto b = BorelSet::arcs({{0.0, kPi / 2}});
  EXPECT_NEAR(b.normalized_length(), 0.25, 1e-15);
  EXPECT_NEAR(BorelSet::full_circle().normalized_length(), 1.0, 1e-15);
}

TEST(Measures, CauchyTransformLine) {
  auto d0 = LineAtomicMeasure::dirac(0.0);
  EXPECT_NEAR(std::abs(cauchy_transform_line(d0, Complex(0.0, 1.0)) - Complex(0.0, 1.0)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(cauchy_transform_line(d0, 2.0) - Complex(-0.5)), 0.0, 1e-15);
  for (double x : {-0.7, 0.3, 2.5}) EXPECT_NEAR(cauchy_transform_line(two_atom(), x).real(), x / (1 - x * x), 1e-14);
  EXPECT_THROW(cauchy_transform_line(d0, 0.0), PoleError);
}

TEST(Measures, CauchyTransformDisk) {
  auto d1 = CircleAtomicMeasure::dirac(0.0);
  EXPECT_NEAR(std::abs(cauchy_transform_disk(d1, 0.0) - 1.0), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(cauchy_transform_disk(d1, 0.5) - 2.0), 0.0, 1e-15);
  for (Complex z : {Complex(0.0), Complex(0.3, -0.4), Complex(-0.8, 0.1)})
    EXPECT_NEAR(std::abs(cauchy_transform_disk(two_point(), z) - 1.0 / (1.0 - z * z)), 0.0, 1e-14);
  EXPECT_THROW(cauchy_transform_disk(d1, 1.0), DomainError);
}

TEST(Measures, PoissonIntegral) {
  EXPECT_NEAR(poisson_integral_disk(CircleAtomicMeasure::dirac(1.234), 0.0), 1.0, 1e-15);
  EXPECT_NEAR(poisson_integral_disk(CircleAtomicMeasure::dirac(0.0), 0.5), 3.0, 1e-14);
  CircleAtomicMeasure nu({{0.3, 0.2}, {2.0, 0.5}, {4.0, 0.1}});
  for (Complex z : {Complex(0.1, 0.2), Complex(-0.9, 0.0), Complex(0.0, 0.95)}) {
    double diff = poisson_integral_disk(nu, z) - (2.0 * cauchy_transform_disk(nu, z).real() - total_mass(nu));
    EXPECT_NEAR(diff, 0.0, 1e-12);
  }
}

TEST(Measures, SimonWolffIntegrals) {
  auto d0 = LineAtomicMeasure::dirac(0.0);
  EXPECT_EQ(simon_wolff_integral(d0, 1.0).value, 1.0);
  EXPECT_FALSE(simon_wolff_integral(d0, 0.0).is_finite());
  EXPECT_EQ(simon_wolff_integral(two_atom(), 0.0).value, 1.0);

  auto d1 = CircleAtomicMeasure::dirac(0.0);
  EXPECT_NEAR(simon_wolff_integral_circle(d1, -1.0).value, 0.25, 1e-15);
  EXPECT_FALSE(simon_wolff_integral_circle(d1, 1.0).is_finite());
  EXPECT_NEAR(simon_wolff_integral_circle(two_point(), Complex(0.0, 1.0)).value, 0.5, 1e-15);
}

TEST(Measures, Reweighted) {
  double w[] = {2.0, 0.0};
  auto r = reweighted(two_point(), w);
  EXPECT_NEAR(total_mass(r), 1.0, 1e-15);
  double bad[] = {1.0};
  EXPECT_THROW(reweighted(two_point(), bad), InvalidArgument);
}

// quadrature ----------------------------------------------------------------

TEST(Quadrature, PolynomialExact) {
  auto r = integrate_adaptive([](double x) { return x; }, 0.0, 1.0, {1e-12, 100});
  EXPECT_NEAR(r.value, 0.5, 1e-12);
  EXPECT_LE(r.error, 1e-12);
}

TEST(Quadrature, ErrorEstimateIsHonest) {
  struct Case {
    std::function<double(double)> f;
    double a, b, exact;
  };
  std::vector<Case> cases{
      {[](double x) { return std::exp(x); }, 0.0, 1.0, std::exp(1.0) - 1.0},
      {[](double x) { return 1.0 / (1.0 + x * x); }, -50.0, 50.0, 2.0 * std::atan(50.0)},
      {[](double x) { return std::sqrt(x); }, 0.0, 1.0, 2.0 / 3.0},
      {[](double x) { return std::sin(x) * std::sin(x); }, 0.0, 20.0, 10.0 - std::sin(40.0) / 4.0},
  };
  for (const auto& c : cases) {
    auto r = integrate_adaptive(c.f, c.a, c.b, {1e-9, 10000});
    EXPECT_GE(r.error, std::abs(r.value - c.exact) * 0.999) << c.exact;
    EXPECT_LE(std::abs(r.value - c.exact), 1e-9);
  }
}

TEST(Quadrature, PiecewiseAtJumps) {
  auto step = [](double x) { return x < 0.3 ? 1.0 : 2.0; };
  auto r = integrate_piecewise(step, {0.0, 0.3, 1.0}, {1e-12, 100});
  EXPECT_NEAR(r.value, 0.3 + 1.4, 1e-14);
}

TEST(Quadrature, NonConvergenceIsReported) {
  auto wild = [](double x) { return std::sin(1.0 / (x + 1e-9)); };
  EXPECT_THROW(integrate_adaptive(wild, 0.0, 1.0, {1e-14, 20}), QuadratureError);
  EXPECT_THROW(periodic_mean([](double t) { return std::sqrt(std::abs(std::sin(t))); }, {1e-14, 16, 256}), QuadratureError);
}

TEST(Quadrature, PeriodicPoissonMean) {
  // mean of the Poisson kernel at z = 1/2 is 1
  auto r = periodic_mean([](double t) {
    Complex xi = unimodular(t);
    return (1.0 - 0.25) / std::norm(xi - 0.5);
  });
  EXPECT_NEAR(r.value, 1.0, 1e-10);
  EXPECT_LE(r.error, 1e-10);
}

TEST(Quadrature, RejectsBadTolerance) {
  EXPECT_THROW(integrate_adaptive([](double x) { return x; }, 0.0, 1.0, {0.0, 10}), InvalidArgument);
}
