#include <gtest/gtest.h>

#include "tunnelswarm/kinematics.hpp"
#include "tunnelswarm/rng.hpp"

using namespace tunnelswarm;

namespace {
constexpr double kWheelBase = 0.16;
constexpr double kRadius = 0.10;
}  // namespace

TEST(StepPose, Straight) {
  const Pose p = step_pose({0, 0, 0}, {0.22, 0.22}, 1.0, kWheelBase);
  EXPECT_NEAR(p.x, 0.22, 1e-12);
  EXPECT_NEAR(p.y, 0.0, 1e-12);
  EXPECT_NEAR(p.theta, 0.0, 1e-12);
}

TEST(StepPose, PureRotation) {
  const Pose p = step_pose({0, 0, 0}, {0.11, -0.11}, 1.0, kWheelBase);
  EXPECT_NEAR(p.x, 0.0, 1e-12);
  EXPECT_NEAR(p.y, 0.0, 1e-12);
  EXPECT_NEAR(p.theta, -1.375, 1e-12);
}

TEST(StepPose, ZeroCommandIsIdentity) {
  const Pose start{1.2, -0.3, 2.0};
  EXPECT_EQ(step_pose(start, {}, 0.01, kWheelBase), start);
}

TEST(StepPose, ArcIntegrationConvergesAndBoundsDisplacement) {
  RandomStream r(8);
  for (int i = 0; i < 1000; ++i) {
    const Pose start{r.uniform(-1, 1), r.uniform(-1, 1), r.uniform(-3, 3)};
    const WheelCommand cmd{r.uniform(-0.22, 0.22), r.uniform(-0.22, 0.22)};
    const double dt = 0.01;
    const Pose one = step_pose(start, cmd, dt, kWheelBase);
    const Pose two = step_pose(step_pose(start, cmd, dt / 2, kWheelBase), cmd, dt / 2, kWheelBase);
    ASSERT_NEAR(one.x, two.x, 1e-9);
    ASSERT_NEAR(one.y, two.y, 1e-9);
    ASSERT_NEAR(normalize_angle(one.theta - two.theta), 0.0, 1e-9);
    ASSERT_LE(distance(one.position(), start.position()), 0.22 * dt + 1e-12);
  }
}

TEST(ProximityScan, EmptySurroundings) {
  const World w;
  const auto scan = proximity_scan(0, {{-1.0, 0.0, 0.0}}, w, kRadius, 1.0);
  for (const auto& r : scan) {
    EXPECT_NEAR(r.range, 1.0, 1e-12);
    EXPECT_EQ(r.kind, HitKind::None);
  }
}

TEST(ProximityScan, RobotDeadAhead) {
  const World w;
  const auto scan = proximity_scan(0, {{-1.0, 0.0, 0.0}, {-0.6, 0.0, 1.0}}, w, kRadius, 1.0);
  EXPECT_NEAR(scan[3].range, 0.30, 1e-12);
  EXPECT_EQ(scan[3].kind, HitKind::Robot);
  EXPECT_EQ(scan[3].robot, 1);
}

TEST(ProximityScan, RobotOnLeft) {
  const World w;
  const auto scan = proximity_scan(0, {{-1.0, 0.0, 0.0}, {-1.0, 0.3, 0.0}}, w, kRadius, 1.0);
  EXPECT_NEAR(kProximityAngles[6], std::numbers::pi / 2, 1e-12);
  EXPECT_NEAR(scan[6].range, 0.20, 1e-12);
  EXPECT_EQ(scan[6].kind, HitKind::Robot);
}

TEST(RayDisc, Oracle) {
  EXPECT_NEAR(ray_disc({0, 0}, {1, 0}, {0.5, 0.0}, 0.1, 1.0), 0.4, 1e-12);
  EXPECT_NEAR(ray_disc({0, 0}, {1, 0}, {0.5, 0.06}, 0.1, 1.0), 0.5 - 0.08, 1e-12);
  EXPECT_EQ(ray_disc({0, 0}, {1, 0}, {0.5, 0.2}, 0.1, 1.0), 1.0);
  EXPECT_EQ(ray_disc({0, 0}, {1, 0}, {-0.5, 0.0}, 0.1, 1.0), 1.0);
}

TEST(ResolveCollisions, StopsTangentToFace) {
  const World w;
  const auto out = resolve_collisions({{1.3, 0.0, 0.0}}, {{1.5, 0.0, 0.0}}, w, kRadius);
  EXPECT_NEAR(out[0].x, 1.4, 1e-9);
  EXPECT_TRUE(configuration_valid(out, w, kRadius));
}

TEST(ResolveCollisions, HeadOnStopsAtContact) {
  const World w;
  std::vector<Pose> poses{{-1.5, 0.0, 0.0}, {-0.5, 0.0, std::numbers::pi}};
  for (int k = 0; k < 500; ++k) {
    std::vector<Pose> proposed{step_pose(poses[0], {0.22, 0.22}, 0.01, kWheelBase),
                               step_pose(poses[1], {0.22, 0.22}, 0.01, kWheelBase)};
    poses = resolve_collisions(poses, proposed, w, kRadius);
    ASSERT_TRUE(configuration_valid(poses, w, kRadius));
    ASSERT_GE(distance(poses[0].position(), poses[1].position()), 0.2 - 1e-9);
  }
  EXPECT_NEAR(distance(poses[0].position(), poses[1].position()), 0.20, 1e-6);
}

TEST(ResolveCollisions, ParallelToWallUnchanged) {
  const World w;
  const std::vector<Pose> proposed{{0.7, 0.25, 0.0}};
  EXPECT_EQ(resolve_collisions({{0.5, 0.25, 0.0}}, proposed, w, kRadius), proposed);
}

TEST(ResolveCollisions, RandomMovesNeverPenetrate) {
  const World w;
  RandomStream r(31);
  std::vector<Pose> poses{{-1.5, -0.5, 0}, {-1.0, 0.5, 0}, {-0.5, 0.0, 0}, {0.5, 0.0, 0},
                          {1.0, -0.2, 0}};
  ASSERT_TRUE(configuration_valid(poses, w, kRadius));
  for (int k = 0; k < 20000; ++k) {
    std::vector<Pose> proposed;
    for (const auto& p : poses) {
      proposed.push_back(step_pose(p, {r.uniform(-0.22, 0.22), r.uniform(-0.22, 0.22)}, 0.05,
                                   kWheelBase));
    }
    poses = resolve_collisions(poses, proposed, w, kRadius);
    ASSERT_TRUE(configuration_valid(poses, w, kRadius)) << "step " << k;
  }
}
