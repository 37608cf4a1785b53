#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "hamel/systems.hpp"
#include "hamel/validation.hpp"

using namespace hamel;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST(MakeSleigh, ReducedMassAndBracket) {
  const auto [sys, g] = make_sleigh({3.0, 0.25, 1.0});
  EXPECT_EQ(sys.dim(), 3);
  EXPECT_EQ(sys.rank(), 2);
  const Vector q = Eigen::Vector3d(0.2, -0.3, 2.2);
  EXPECT_TRUE(reduced_mass_matrix(sys, q).isApprox(
      Eigen::Vector3d(3.0, 0.25, 3.0).asDiagonal().toDenseMatrix(), 1e-14));
  EXPECT_NEAR(structure_constants(sys.frame, q)(2, 0, 1), -1.0, 1e-14);
  EXPECT_EQ(g(Eigen::Vector3d(0, 0, 1.0)), -1.0);
}

TEST(MakeSleigh, RejectsNonPositiveParameters) {
  EXPECT_THROW(make_sleigh({0.0, 1.0, 1.0}), ConfigError);
  EXPECT_THROW(make_sleigh({1.0, -1.0, 1.0}), ConfigError);
  EXPECT_THROW(make_sleigh({1.0, 1.0, 0.0}), ConfigError);
}

TEST(MakeDisk, ConstrainedMassAndBracket) {
  const DiskParams p{2.0, 0.5, 0.7, 0.6, 10.0};
  const auto [sys, g] = make_disk(p);
  EXPECT_EQ(sys.dim(), 4);
  EXPECT_EQ(sys.rank(), 2);
  const Vector q = Eigen::Vector4d(0.1, 0.2, 0.3, 1.1);
  const Matrix md = constrained_mass_matrix(sys, q);
  EXPECT_NEAR(md(0, 0), p.m * p.R * p.R + p.I, 1e-14);
  EXPECT_NEAR(md(1, 1), p.J, 1e-14);
  EXPECT_NEAR(md(0, 1), 0.0, 1e-14);
  const auto c = structure_constants(sys.frame, q);
  EXPECT_NEAR(c(2, 0, 1), p.R * std::sin(1.1), 1e-14);
  EXPECT_NEAR(c(3, 0, 1), -p.R * std::cos(1.1), 1e-14);
  EXPECT_NEAR(g(Eigen::Vector4d(0, 0, 0, kPi / 2)), p.R - 10.0, 1e-15);
}

TEST(MakeDisk, RejectsNonPositiveParameters) {
  EXPECT_THROW(make_disk({1.0, 1.0, 1.0, 0.0, 10.0}), ConfigError);
  EXPECT_THROW(make_disk({1.0, 1.0, 0.0, 1.0, 10.0}), ConfigError);
}

TEST(ExactFlowSleigh, CircularSolution) {
  const SleighParams p;
  const State s0{0.0, Eigen::Vector3d(0, 0, kPi / 2), Eigen::Vector2d(0.1, 0.05)};
  for (double t : {0.5, 3.0, 10.0}) {
    const State s = exact_flow_sleigh(p, s0, t);
    EXPECT_NEAR(s.q(0), 2.0 * (std::sin(kPi / 2 + 0.05 * t) - 1.0), 1e-14);
    EXPECT_NEAR(s.q(1), -2.0 * std::cos(kPi / 2 + 0.05 * t), 1e-14);
    EXPECT_DOUBLE_EQ(s.t, t);
    EXPECT_EQ(s.v, s0.v);
  }
}

TEST(ExactFlowSleigh, IdentityAndStraightLine) {
  const SleighParams p;
  const State s0{2.0, Eigen::Vector3d(0.1, 0.2, 0.0), Eigen::Vector2d(1.0, 0.0)};
  const State same = exact_flow_sleigh(p, s0, 0.0);
  EXPECT_EQ(same.q, s0.q);
  const State moved = exact_flow_sleigh(p, s0, 1.0);
  EXPECT_NEAR(moved.q(0), 1.1, 1e-15);
  EXPECT_NEAR(moved.q(1), 0.2, 1e-15);
  EXPECT_THROW(exact_flow_sleigh(p, s0, -1.0), Error);
}

TEST(ExactFlowSleigh, NearlyStraightLimitIsContinuous) {
  const SleighParams p;
  const State straight{0.0, Eigen::Vector3d(0, 0, 0.4), Eigen::Vector2d(1.0, 0.0)};
  const State curved{0.0, Eigen::Vector3d(0, 0, 0.4), Eigen::Vector2d(1.0, 1e-9)};
  const State a = exact_flow_sleigh(p, straight, 1.0);
  const State b = exact_flow_sleigh(p, curved, 1.0);
  EXPECT_LE((a.q - b.q).lpNorm<Eigen::Infinity>(), 1e-6);
}

TEST(ExactFlowDisk, StraightRollTowardWall) {
  const DiskParams p{1.0, 1.0, 1.0, 1.5, 10.0};
  const State s0{0.0, Eigen::Vector4d(0.3, 0.5, 0.0, kPi / 2), Eigen::Vector2d(0.8, 0.0)};
  const State s = exact_flow_disk(p, s0, 2.0);
  EXPECT_NEAR(s.q(0), 0.3, 1e-15);
  EXPECT_NEAR(s.q(1), 0.5 + 1.5 * 0.8 * 2.0, 1e-14);
  EXPECT_NEAR(s.q(2), 1.6, 1e-15);
  EXPECT_EQ(exact_flow_disk(p, s0, 0.0).q, s0.q);
}

TEST(ExactFlowDisk, WallReachedAtNineSeconds) {
  const auto b = make_builtin("vertical-disk");
  const State s0{0.0, b.default_q0, b.default_v0};
  EXPECT_NEAR(b.constraint(b.exact_flow(s0, 9.0).q), 0.0, 1e-14);
  EXPECT_LT(b.constraint(b.exact_flow(s0, 8.9).q), 0.0);
}

TEST(ExactFlows, AgreeWithRk4) {
  const auto r = validation::exact_flow_agreement();
  EXPECT_TRUE(r.passed) << r.detail;
}

TEST(Builtins, RegistryAndOverrides) {
  EXPECT_EQ(builtin_names().size(), 2u);
  const auto b = make_builtin("vertical-disk", {{"R", 2.0}});
  EXPECT_EQ(b.params.at("R"), 2.0);
  EXPECT_EQ(b.params.at("d"), 10.0);
  EXPECT_EQ(b.default_q0.size(), 4);
  EXPECT_EQ(b.default_t_max, 18.0);
  EXPECT_THROW(make_builtin("vertical-disk", {{"mass", 2.0}}), ConfigError);
  EXPECT_THROW(make_builtin("pendulum"), ConfigError);
}

TEST(Builtins, TrajectoryInvariants) {
  const auto r = validation::trajectory_invariants();
  EXPECT_TRUE(r.passed) << r.detail;
}

TEST(Builtins, SleighImpactsStayOnCircle) {
  const auto b = make_builtin("chaplygin-sleigh", {{"r", 2.0}});
  const auto traj = simulate(b.system, b.constraint, State{0.0, b.default_q0, Eigen::Vector2d(0.3, 0.1)},
                             0.1, 200.0);
  ASSERT_FALSE(traj.impacts.empty());
  for (const auto& ev : traj.impacts) {
    EXPECT_NEAR(ev.q_impact.head<2>().norm(), 2.0, 1e-10);
  }
}
