#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "hamel/systems.hpp"

using namespace hamel;

namespace {

constexpr double kPi = std::numbers::pi;

/// Reduced disk Lagrangian written out by hand as the reference.
double disk_lagrangian_by_hand(const DiskParams& p, double phi, const Vector& v) {
  const double c = std::cos(phi);
  const double s = std::sin(phi);
  const double a = p.R * c * v(0) + v(2);
  const double b = p.R * s * v(0) + v(3);
  const double w = v(0) - p.R * c * v(2) - p.R * s * v(3);
  return 0.5 * p.m * (a * a + b * b) + 0.5 * p.I * w * w + 0.5 * p.J * v(1) * v(1);
}

}  // namespace

TEST(ReducedLagrangian, SleighMatchesClosedForm) {
  const SleighParams p{2.0, 0.5, 1.0};
  const auto [sys, g] = make_sleigh(p);
  const Vector v = Eigen::Vector3d(0.3, -0.7, 1.1);
  for (double th : {0.0, 1.0, -2.0}) {
    const double expected = p.m / 2 * (v(0) * v(0) + v(2) * v(2)) + p.I / 2 * v(1) * v(1);
    EXPECT_NEAR(reduced_lagrangian(sys, Eigen::Vector3d(0.1, 0.2, th), v), expected, 1e-14);
  }
}

TEST(ReducedLagrangian, ZeroVelocityGivesMinusPotential) {
  const auto [sys, g] = make_sleigh({});
  EXPECT_EQ(reduced_lagrangian(sys, Eigen::Vector3d(0.1, 0.2, 0.3), Vector::Zero(3)), 0.0);

  MechanicalSystem with_potential = sys;
  with_potential.potential = [](const Vector& q) { return 2.0 + q(0); };
  EXPECT_DOUBLE_EQ(reduced_lagrangian(with_potential, Eigen::Vector3d(0.5, 0, 0), Vector::Zero(3)),
                   -2.5);
}

TEST(ReducedLagrangian, DiskUnitParameters) {
  const auto [sys, g] = make_disk({});
  EXPECT_NEAR(reduced_lagrangian(sys, Vector::Zero(4), Eigen::Vector4d(1, 0, 0, 0)), 1.0, 1e-15);
}

TEST(ReducedLagrangian, DiskAgreesWithHandExpansion) {
  const DiskParams p{1.5, 0.4, 0.9, 0.7, 10.0};
  const auto [sys, g] = make_disk(p);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int i = 0; i < 20; ++i) {
    const Vector q = Eigen::Vector4d(u(rng), u(rng), u(rng), u(rng));
    const Vector v = Eigen::Vector4d(u(rng), u(rng), u(rng), u(rng));
    EXPECT_NEAR(reduced_lagrangian(sys, q, v), disk_lagrangian_by_hand(p, q(3), v), 1e-12);
  }
}

TEST(QuasiMomentum, Sleigh) {
  const SleighParams p{2.0, 0.5, 1.0};
  const auto [sys, g] = make_sleigh(p);
  const Vector mom = quasi_momentum(sys, Eigen::Vector3d(0, 0, 0.8), Eigen::Vector3d(0.3, 0.4, 0));
  EXPECT_NEAR(mom(0), p.m * 0.3, 1e-15);
  EXPECT_NEAR(mom(1), p.I * 0.4, 1e-15);
  EXPECT_NEAR(mom(2), 0.0, 1e-15);
}

TEST(QuasiMomentum, DiskAnnihilatorComponents) {
  const DiskParams p{2.0, 0.5, 1.0, 0.6, 10.0};
  const auto [sys, g] = make_disk(p);
  for (double phi : {0.0, 0.5, 2.0}) {
    const double v1 = 0.8;
    const Vector mom = quasi_momentum(sys, Eigen::Vector4d(0, 0, 0, phi), Eigen::Vector4d(v1, 0.3, 0, 0));
    EXPECT_NEAR(mom(2), p.R * (p.m - p.I) * v1 * std::cos(phi), 1e-14);
    EXPECT_NEAR(mom(3), p.R * (p.m - p.I) * v1 * std::sin(phi), 1e-14);
  }
}

TEST(QuasiMomentum, ZeroVelocity) {
  const auto [sys, g] = make_disk({});
  EXPECT_TRUE(quasi_momentum(sys, Vector::Zero(4), Vector::Zero(4)).isZero());
}

TEST(QuasiMomentum, MatchesFiniteDifferenceGradientOfLagrangian) {
  const auto [sys, g] = make_disk({1.5, 0.4, 0.9, 0.7, 10.0});
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    const Vector q = Eigen::Vector4d(u(rng), u(rng), u(rng), u(rng));
    const Vector v = Eigen::Vector4d(u(rng), u(rng), u(rng), u(rng));
    const auto l = [&](const Vector& w) { return reduced_lagrangian(sys, q, w); };
    const Vector fd = hamel::detail::fd_gradient(l, v, 1e-6);
    EXPECT_LE((fd - quasi_momentum(sys, q, v)).lpNorm<Eigen::Infinity>(), 1e-6);
  }
}

TEST(Energy, SleighReferenceValue) {
  const auto [sys, g] = make_sleigh({});
  EXPECT_NEAR(energy(sys, Eigen::Vector3d(0, 0, kPi / 2), Eigen::Vector3d(0.1, 0.05, 0)), 0.00625,
              1e-17);
  EXPECT_EQ(energy(sys, Eigen::Vector3d(0, 0, 0), Vector::Zero(3)), 0.0);
}

TEST(Energy, EqualsLagrangianWithoutPotentialAndIsLegendreTransform) {
  const auto [sys, g] = make_disk({1.5, 0.4, 0.9, 0.7, 10.0});
  MechanicalSystem with_potential = sys;
  with_potential.potential = [](const Vector& q) { return std::cos(q(0)) + q(1) * q(1); };
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const Vector q = Eigen::Vector4d(u(rng), u(rng), u(rng), u(rng));
    const Vector v = Eigen::Vector4d(u(rng), u(rng), u(rng), u(rng));
    EXPECT_NEAR(energy(sys, q, v), reduced_lagrangian(sys, q, v), 1e-14);
    const double legendre = quasi_momentum(with_potential, q, v).dot(v) -
                            reduced_lagrangian(with_potential, q, v);
    EXPECT_EQ(energy(with_potential, q, v), legendre);
  }
}

TEST(ReducedMassMatrix, SymmetricPositiveDefiniteOnBuiltins) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  const auto [sleigh, gs] = make_sleigh({2.0, 0.5, 1.0});
  const auto [disk, gd] = make_disk({1.5, 0.4, 0.9, 0.7, 10.0});
  for (int trial = 0; trial < 50; ++trial) {
    for (const auto* sys : {&sleigh, &disk}) {
      Vector q(sys->dim());
      for (int i = 0; i < q.size(); ++i) q(i) = u(rng);
      const Matrix m = reduced_mass_matrix(*sys, q);
      EXPECT_LE((m - m.transpose()).lpNorm<Eigen::Infinity>(), 1e-12);
      const Eigen::SelfAdjointEigenSolver<Matrix> eig(m);
      EXPECT_GT(eig.eigenvalues().minCoeff(), 0.0);
    }
  }
}

TEST(ReducedMassMatrix, SleighIsDiagonal) {
  const auto [sys, g] = make_sleigh({2.0, 0.5, 1.0});
  const Matrix m = reduced_mass_matrix(sys, Eigen::Vector3d(0.3, 0.2, 1.234));
  EXPECT_TRUE(m.isApprox(Eigen::Vector3d(2.0, 0.5, 2.0).asDiagonal().toDenseMatrix(), 1e-14));
}

TEST(FrameForce, VanishesForSleigh) {
  const auto [sys, g] = make_sleigh({});
  for (int j = 0; j < 3; ++j) {
    EXPECT_NEAR(frame_force(sys, Eigen::Vector3d(0.1, 0.2, 0.7), Eigen::Vector3d(0.4, 0.2, 0.0), j),
                0.0, 1e-15);
  }
}

TEST(FrameForce, DiskPhiDerivativeVanishesOnDistribution) {
  const auto [sys, g] = make_disk({2.0, 0.5, 1.0, 0.6, 10.0});
  const Vector q = Eigen::Vector4d(0.1, 0.2, 0.3, 0.9);
  EXPECT_NEAR(frame_force(sys, q, Eigen::Vector4d(0.7, -0.4, 0, 0), 1), 0.0, 1e-14);
  // Off the distribution the reduced Lagrangian does depend on phi.
  const auto l = [&](const Vector& x) { return reduced_lagrangian(sys, x, Eigen::Vector4d(0.7, -0.4, 0.3, 0.2)); };
  const double fd = directional_derivative(sys.frame, l, q, 1);
  EXPECT_NEAR(frame_force(sys, q, Eigen::Vector4d(0.7, -0.4, 0.3, 0.2), 1), fd, 1e-8);
  EXPECT_GT(std::abs(fd), 1e-3);
}

TEST(FrameForce, ConstantFieldsGiveZero) {
  MechanicalSystem sys;
  sys.frame = coordinate_frame(2, 2);
  sys.mass_matrix = [](const Vector&) -> Matrix { return Eigen::Matrix2d{{2.0, 0.3}, {0.3, 1.0}}; };
  sys.potential = [](const Vector&) { return 1.0; };
  for (int j = 0; j < 2; ++j) {
    EXPECT_NEAR(frame_force(sys, Eigen::Vector2d(0.5, -0.5), Eigen::Vector2d(1.0, 2.0), j), 0.0,
                1e-9);
  }
}
