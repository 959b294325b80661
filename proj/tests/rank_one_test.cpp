#include <gtest/gtest.h>

#include <Eigen/Dense>

#include <cmath>
#include <numbers>

#include "clarklab/oracle.hpp"
#include "clarklab/random.hpp"
#include "clarklab/rank_one.hpp"

using namespace clarklab;

namespace {

const double kPi = std::numbers::pi;

CyclicOperatorModel line_two() { return CyclicOperatorModel(ModelKind::line, {-1.0, 1.0}, {0.5, 0.5}); }
CyclicOperatorModel circle_two() { return CyclicOperatorModel(ModelKind::circle, {0.0, kPi}, {0.5, 0.5}); }

}  // namespace

TEST(Model, Validation) {
  EXPECT_THROW(CyclicOperatorModel(ModelKind::line, {}, {}), InvalidArgument);
  EXPECT_THROW(CyclicOperatorModel(ModelKind::line, {0.0, 0.0}, {0.5, 0.5}), InvalidArgument);
  EXPECT_THROW(CyclicOperatorModel(ModelKind::line, {0.0, 1.0}, {0.5, 0.4}), InvalidArgument);
  EXPECT_THROW(CyclicOperatorModel(ModelKind::line, {0.0, 1.0}, {1.0, 0.0}), InvalidArgument);
  EXPECT_THROW(CyclicOperatorModel(ModelKind::circle, {0.0, kTwoPi}, {0.5, 0.5}), InvalidArgument);
  EXPECT_THROW(line_two().unitary_matrix(), InvalidArgument);
}

TEST(Model, SpectralMeasure) {
  auto mu = spectral_measure_line(CyclicOperatorModel(ModelKind::line, {0.0}, {1.0}));
  ASSERT_EQ(mu.size(), 1u);
  EXPECT_EQ(mu.atoms()[0].position, 0.0);
  auto two = spectral_measure_line(line_two());
  EXPECT_EQ(two.atoms()[0].position, -1.0);
  EXPECT_EQ(two.atoms()[1].mass, 0.5);
  // dense realization reproduces the spectral measure
  auto dense = hermitian_spectral_measure(line_two().selfadjoint_matrix(), line_two().cyclic_vector());
  EXPECT_TRUE(compare_measures(dense, two).mass < 1e-15);
}

TEST(AronszajnKrein, KnownValues) {
  auto k0 = HerglotzRational::from_line_measure(LineAtomicMeasure::dirac(0.0));
  Complex z(0.3, 0.7);
  EXPECT_LT(std::abs(aronszajn_krein_eval(k0, 0.0, z) - k0(z)), 1e-15);
  for (double lam : {-2.0, 0.5, 4.0}) EXPECT_LT(std::abs(aronszajn_krein_eval(k0, lam, z) - 1.0 / (lam - z)), 1e-14);
  EXPECT_LT(std::abs(aronszajn_krein_eval(k0, 2.0, kI) - Complex(2.0, 1.0) / 5.0), 1e-15);
}

TEST(AronszajnKrein, TransformOfPerturbedMeasure) {
  auto model = random_model(7, 9, ModelKind::line);
  auto k0 = HerglotzRational::from_line_measure(spectral_measure_line(model));
  for (double lam : {-3.0, 0.25, 8.0}) {
    auto mu = perturb_selfadjoint(model, lam);
    for (Complex z : {Complex(0.1, 0.5), Complex(-2.0, 0.01)})
      EXPECT_LT(std::abs(cauchy_transform_line(mu, z) - aronszajn_krein_eval(k0, lam, z)), 1e-12);
  }
}

TEST(PerturbSelfadjoint, KnownValues) {
  auto d = perturb_selfadjoint(CyclicOperatorModel(ModelKind::line, {0.0}, {1.0}), 3.0);
  ASSERT_EQ(d.size(), 1u);
  EXPECT_NEAR(d.atoms()[0].position, 3.0, 1e-14);
  EXPECT_NEAR(d.atoms()[0].mass, 1.0, 1e-14);

  auto mu = perturb_selfadjoint(line_two(), 3.0);
  auto oracle = matrix_oracle_selfadjoint(line_two(), 3.0);
  ASSERT_EQ(mu.size(), 2u);
  EXPECT_NEAR(mu.atoms()[0].position, (3 - std::sqrt(13.0)) / 2, 1e-14);
  EXPECT_NEAR(mu.atoms()[1].position, (3 + std::sqrt(13.0)) / 2, 1e-14);
  auto dev = compare_measures(mu, oracle);
  EXPECT_TRUE(dev.same_count);
  EXPECT_LT(dev.position, 1e-10);
  EXPECT_LT(dev.mass, 1e-10);
  EXPECT_NEAR(total_mass(mu), 1.0, 1e-14);

  auto zero = perturb_selfadjoint(line_two(), 0.0);
  EXPECT_LT(compare_measures(zero, spectral_measure_line(line_two())).position, 1e-15);
  EXPECT_LT(compare_measures(matrix_oracle_selfadjoint(line_two(), 0.0), zero).position, 1e-15);
}

TEST(PerturbSelfadjoint, DenseOracleSweep) {
  Rng rng(2024);
  for (int n : {2, 8, 32, 64}) {
    for (int s = 0; s < 5; ++s) {
      auto model = random_model(rng, n, ModelKind::line);
      for (double lam : {-10.0, -1.0, -0.1, 0.1, 1.0, 10.0}) {
        auto d = compare_measures(perturb_selfadjoint(model, lam), matrix_oracle_selfadjoint(model, lam));
        ASSERT_TRUE(d.same_count);
        EXPECT_LE(d.position, 1e-9 * (1 + std::abs(lam)));
        EXPECT_LE(d.mass, 1e-8);
      }
    }
  }
  auto big = random_model(rng, 64, ModelKind::line);
  for (double lam : {-1.0, 1.0}) EXPECT_NEAR(total_mass(matrix_oracle_selfadjoint(big, lam)), 1.0, 1e-10);
}

TEST(PerturbUnitary, KnownValues) {
  Complex alpha = unimodular(1.1);
  auto one = perturb_unitary(CyclicOperatorModel(ModelKind::circle, {0.0}, {1.0}), alpha);
  ASSERT_EQ(one.size(), 1u);
  EXPECT_NEAR(angle_distance(one.atoms()[0].position, 1.1), 0.0, 1e-14);

  auto two = perturb_unitary(circle_two(), alpha);
  ASSERT_EQ(two.size(), 2u);
  EXPECT_NEAR(angle_distance(two.atoms()[0].position, 0.55), 0.0, 1e-13);
  EXPECT_NEAR(angle_distance(two.atoms()[1].position, 0.55 + kPi), 0.0, 1e-13);
  EXPECT_NEAR(two.atoms()[0].mass, 0.5, 1e-13);
  EXPECT_NEAR(two.atoms()[1].mass, 0.5, 1e-13);

  auto dense = matrix_oracle_unitary(circle_two(), alpha);
  EXPECT_LT(compare_measures(two, dense).position, 1e-12);
  EXPECT_LT(unitarity_defect(perturbed_unitary_matrix(circle_two(), alpha)), 1e-14);
}

TEST(InnerFromUnitary, KnownValues) {
  auto t1 = inner_from_unitary(CyclicOperatorModel(ModelKind::circle, {0.0}, {1.0}));
  for (Complex z : {Complex(0.3, 0.1), Complex(-0.5, 0.5)}) EXPECT_LT(std::abs(t1(z) - z), 1e-13);
  auto t2 = inner_from_unitary(circle_two());
  for (Complex z : {Complex(0.3, 0.1), Complex(-0.5, 0.5)}) EXPECT_LT(std::abs(t2(z) - z * z), 1e-13);

  auto model = random_model(11, 12, ModelKind::circle);
  auto theta = inner_from_unitary(model);
  EXPECT_EQ(theta.degree(), 12);
  EXPECT_LT(std::abs(theta(0.0)), 1e-13);
  auto nu = spectral_measure_circle(model);
  for (Complex z : {Complex(0.1, 0.2), Complex(-0.7, 0.3), Complex(0.0, 0.95)})
    EXPECT_LT(std::abs(cauchy_transform_disk(nu, z) * (1.0 - theta(z)) - 1.0), 1e-10);
}

TEST(InnerFromSelfadjoint, KnownValues) {
  auto theta = inner_from_selfadjoint(CyclicOperatorModel(ModelKind::line, {0.0}, {1.0}));
  Complex z(0.0, 2.0);
  EXPECT_LT(std::abs(theta(z) - (z - kI) / (z + kI)), 1e-14);
  EXPECT_LT(std::abs(theta(z)), 1.0);
  auto xs = theta.level_set(relabel_lambda(3.0));
  ASSERT_EQ(xs.size(), 1u);
  EXPECT_NEAR(xs[0], 3.0, 1e-12);
  for (double x : {-4.0, 0.5, 9.0}) EXPECT_NEAR(std::abs(theta(x)), 1.0, 1e-14);
}

TEST(ClarkMeasure, KnownValues) {
  Complex alpha = unimodular(2.2);
  auto d = clark_measure(BlaschkeProduct::power(1), alpha);
  ASSERT_EQ(d.size(), 1u);
  EXPECT_NEAR(d.atoms()[0].position, 2.2, 1e-14);
  EXPECT_NEAR(d.atoms()[0].mass, 1.0, 1e-14);

  auto s = clark_measure(BlaschkeProduct::power(2), 1.0);
  ASSERT_EQ(s.size(), 2u);
  EXPECT_NEAR(s.atoms()[0].position, 0.0, 1e-14);
  EXPECT_NEAR(s.atoms()[1].position, kPi, 1e-14);
  EXPECT_NEAR(s.atoms()[0].mass, 0.5, 1e-14);

  auto q = clark_measure(BlaschkeProduct::power(2), kI);
  EXPECT_NEAR(q.atoms()[0].position, kPi / 4, 1e-14);
  EXPECT_NEAR(q.atoms()[1].position, 5 * kPi / 4, 1e-14);
  EXPECT_NEAR(q.atoms()[1].mass, 0.5, 1e-14);
}

TEST(ClarkMeasure, PoissonIdentityAndMass) {
  Rng rng(99);
  for (int trial = 0; trial < 6; ++trial) {
    auto theta = random_blaschke(rng, 1 + 3 * trial, trial % 2 == 0, 0.9);
    ClarkFamily fam(theta);
    for (int k = 0; k < 4; ++k) {
      Complex alpha = rng.unimodular_point();
      auto mu = fam(alpha);
      EXPECT_NEAR(total_mass(mu), fam.expected_total_mass(alpha), 1e-10);
      for (int j = 0; j < 5; ++j) {
        Complex z = rng.disk_point(0.95);
        Complex t = theta(z);
        EXPECT_NEAR(poisson_integral_disk(mu, z), ((alpha + t) / (alpha - t)).real(), 1e-9);
      }
    }
  }
}

TEST(ClarkMeasure, RejectsNonUnimodularAlpha) {
  EXPECT_THROW(clark_measure(BlaschkeProduct::power(3), 0.5), DomainError);
}

TEST(ClarkCorrespondence, SmallModels) {
  auto r1 = verify_clark_correspondence(CyclicOperatorModel(ModelKind::circle, {0.0}, {1.0}), {kI});
  EXPECT_TRUE(r1.pass());
  Rng rng(5);
  std::vector<Complex> alphas;
  for (int k = 0; k < 16; ++k) alphas.push_back(rng.unimodular_point());
  auto r2 = verify_clark_correspondence(random_model(rng, 2, ModelKind::circle), alphas);
  EXPECT_TRUE(r2.pass());
  EXPECT_LT(r2.max_position_deviation, 1e-9);
  auto r16 = verify_clark_correspondence(random_model(rng, 16, ModelKind::circle),
                                         std::vector<Complex>(alphas.begin(), alphas.begin() + 8));
  EXPECT_TRUE(r16.pass());
  EXPECT_LE(r16.max_total_mass_defect, 1e-10);
}

TEST(Disintegration, Circle) {
  auto theta1 = BlaschkeProduct::power(1);
  auto r = disintegration_check_circle(theta1, BorelSet::arcs({{0.3, 2.0}}));
  EXPECT_NEAR(r.estimate, 1.7 / kTwoPi, 1e-12);
  auto r2 = disintegration_check_circle(BlaschkeProduct::power(2), BorelSet::arcs({{1.0, 1.0 + kPi / 2}}));
  EXPECT_NEAR(r2.estimate, 0.25, 1e-6);
  Rng rng(3);
  auto full = disintegration_check_circle(random_blaschke(rng, 8), BorelSet::full_circle());
  EXPECT_NEAR(full.estimate, 1.0, 1e-10);
  EXPECT_GE(r2.error_bound() + 1e-15, r2.deviation());
}

TEST(Disintegration, Line) {
  auto delta = disintegration_check_line(CyclicOperatorModel(ModelKind::line, {0.0}, {1.0}),
                                         BorelSet::intervals({{0.0, 1.0}}), 100.0);
  EXPECT_NEAR(delta.estimate, 1.0, 1e-9);
  auto two = disintegration_check_line(line_two(), BorelSet::intervals({{-0.5, 0.5}}), 100.0);
  EXPECT_NEAR(two.estimate, 1.0, 1e-3);
  EXPECT_LE(two.deviation(), two.error_bound() + 1e-7);
  EXPECT_THROW(disintegration_check_line(line_two(), BorelSet::arcs({{0.0, 1.0}}), 100.0), InvalidArgument);
}

TEST(SimonWolff, Classification) {
  auto c = simon_wolff_classify(LineAtomicMeasure::dirac(0.0), {0.0, 1.0});
  EXPECT_FALSE(c[0].is_finite());
  EXPECT_EQ(c[1].value, 1.0);
  auto two = spectral_measure_line(line_two());
  EXPECT_EQ(simon_wolff_classify(two, {0.0})[0].value, 1.0);
  auto at = simon_wolff_classify(two, two.positions());
  for (const auto& v : at) EXPECT_FALSE(v.is_finite());
}

TEST(Oracle, UnitarySpectralMeasure) {
  Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(3, 3);
  Eigen::VectorXcd v = Eigen::VectorXcd::Ones(3) / std::sqrt(3.0);
  auto mu = unitary_spectral_measure(id, v);
  ASSERT_EQ(mu.size(), 1u);
  EXPECT_NEAR(mu.atoms()[0].position, 0.0, 1e-15);
  EXPECT_NEAR(total_mass(mu), 1.0, 1e-15);

  Eigen::MatrixXcd flip = Eigen::Vector2cd(1.0, -1.0).asDiagonal();
  auto half = unitary_spectral_measure(flip, Eigen::Vector2cd(std::sqrt(0.5), std::sqrt(0.5)));
  ASSERT_EQ(half.size(), 2u);
  EXPECT_NEAR(half.atoms()[1].position, kPi, 1e-15);
  EXPECT_NEAR(half.atoms()[1].mass, 0.5, 1e-15);

  Eigen::MatrixXcd bad = Eigen::MatrixXcd::Identity(2, 2) * 2.0;
  EXPECT_THROW(unitary_spectral_measure(bad, Eigen::Vector2cd(1.0, 0.0)), InvalidArgument);
}

TEST(Oracle, KrylovRank) {
  Eigen::MatrixXcd d = Eigen::Vector3cd(1.0, kI, -1.0).asDiagonal();
  EXPECT_EQ(krylov_rank(d, Eigen::Vector3cd(1.0, 1.0, 1.0)), 3);
  EXPECT_EQ(krylov_rank(d, Eigen::Vector3cd(1.0, 0.0, 1.0)), 2);
  EXPECT_EQ(krylov_rank(Eigen::MatrixXcd::Identity(3, 3), Eigen::Vector3cd(1.0, 2.0, 3.0)), 1);
}
