#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "avatar/batch.hpp"
#include "avatar/fabrik.hpp"
#include "avatar/jacobian.hpp"
#include "avatar/metrics.hpp"
#include "avatar/report.hpp"
#include "avatar/run.hpp"
#include "oracles.hpp"

using namespace avatar;
using oracle::Rng;

namespace {

// Far camera on +y looking back at the origin with a narrow field of view,
// close to an orthographic side view of a capsule lying along x.
RigidPose far_camera() { return front_camera(Vec3(0, 20, 0)); }

RenderParams far_params(int res = 512) {
  RenderParams p;
  p.width = p.height = res;
  p.fov_y = deg(1.4);
  return p;
}

constexpr double kLen = 0.3;
constexpr double kRad = 0.045;

std::vector<Capsule> robot_bar() { return {{Vec3(-kLen / 2, 0, 0), Vec3(kLen / 2, 0, 0), kRad}}; }

std::vector<Capsule> shifted_bar(double toward_camera) {
  return {{Vec3(-kLen / 2, toward_camera, kRad), Vec3(kLen / 2, toward_camera, kRad), kRad}};
}

struct Scene {
  std::vector<Capsule> robot;
  std::vector<Capsule> human;
  RigidPose camera;
};

std::vector<Scene> onia_catalog_scenes() {
  std::vector<Scene> out;
  for (const SessionFrame& f : pose_catalog()) {
    const ArmPair arms = aligned_arms(ModelGeometry{}, f.shoulders);
    for (Side side : {Side::Left, Side::Right}) {
      const HumanArmModel& m = arms.arm(side);
      const ArmPose pose = onia_solve(m, f.arm(side)).pose;
      const Vec3 robot_shoulder = side == Side::Left ? f.shoulders.left : f.shoulders.right;
      out.push_back({robot_capsules(robot_shoulder, f.arm(side)), human_capsules(m, pose), f.camera});
    }
  }
  return out;
}

}  // namespace

TEST_SUITE("metrics") {

TEST_CASE("deviation examples") {
  const HumanArmModel m = make_arm(ModelGeometry{}, Side::Right);
  ArmRefs refs{m.default_elbow() + Vec3(0.1, 0, 0), m.default_wrist() + Vec3(0.1, 0, 0), Rotation(), 0.0};
  const Deviations d = deviations(m, ArmPose{}, refs);
  CHECK(d.elbow == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(d.wrist == doctest::Approx(0.1).epsilon(1e-12));

  Rng rng(60);
  for (int i = 0; i < 1000; ++i) {
    ArmPose p;
    p.shoulder = rng.rotation();
    p.elbow = rng.rotation();
    p.upper_stretch = rng.uniform(0.5, 2.0);
    p.forearm_stretch = rng.uniform(0.5, 2.0);
    refs.elbow = rng.vec(1.0);
    refs.wrist = rng.vec(1.0);
    const oracle::Chain c = oracle::chain(m, p);
    const Deviations dv = deviations(m, p, refs);
    CHECK(std::abs(dv.elbow - (c.elbow - refs.elbow).norm()) < 1e-12);
    CHECK(std::abs(dv.wrist - (c.wrist - refs.wrist).norm()) < 1e-12);
  }
}

TEST_CASE("stretch metric examples") {
  ArmPose p;
  CHECK(stretch_metrics(p).upper == 0.0);
  CHECK(stretch_metrics(p).forearm == 0.0);
  p.upper_stretch = 1.3;
  p.forearm_stretch = 0.8;
  CHECK(stretch_metrics(p).upper == doctest::Approx(0.3));
  CHECK(stretch_metrics(p).forearm == doctest::Approx(0.2));
}

TEST_CASE("ray capsule intersection") {
  const Capsule c{Vec3(0, 0, 0), Vec3(1, 0, 0), 0.1};
  CHECK(ray_capsule(Vec3(0.5, 5, 0), Vec3(0, -1, 0), c, 0.0) == doctest::Approx(4.9));
  CHECK(ray_capsule(Vec3(-5, 0, 0), Vec3(1, 0, 0), c, 0.0) == doctest::Approx(4.9));
  CHECK(ray_capsule(Vec3(1.05, 5, 0), Vec3(0, -1, 0), c, 0.0) == doctest::Approx(5 - std::sqrt(0.01 - 0.0025)));
  CHECK(std::isinf(ray_capsule(Vec3(0.5, 5, 0.2), Vec3(0, -1, 0), c, 0.0)));
  CHECK(std::isinf(ray_capsule(Vec3(0.5, 5, 0), Vec3(0, 1, 0), c, 0.0)));
  // From inside, the exit point.
  CHECK(ray_capsule(Vec3(0.5, 0, 0), Vec3(0, 1, 0), c, 0.0) == doctest::Approx(0.1));
  CHECK(ray_capsule(Vec3(0.5, 5, 0), Vec3(0, -1, 0), c, 4.95) == doctest::Approx(5.1));
}

TEST_CASE("pixel rays") {
  const RigidPose cam = front_camera(Vec3(0, 3, 1));
  RenderParams p;
  p.width = p.height = 2;
  const Vec3 tl = pixel_ray(cam, p, 0, 0);
  // Facing -y, the image's left edge is toward +x.
  CHECK(tl.x() > 0.0);
  CHECK(tl.z() > 0.0);
  CHECK(tl.y() < 0.0);
  const double t = std::tan(deg(30.0)) * 0.5;
  CHECK((tl - Vec3(t, -1, t).normalized()).norm() < 1e-15);
}

TEST_CASE("self cover and disjoint scenes") {
  for (const Scene& s : onia_catalog_scenes()) {
    CHECK(overlay_ratio(s.robot, s.robot, s.camera) == 1.0);
    std::vector<Capsule> gone = s.human;
    for (Capsule& c : gone) c.a.x() += 100.0, c.b.x() += 100.0;
    CHECK(overlay_ratio(s.robot, gone, s.camera) == 0.0);
    CHECK(overlay_ratio(s.robot, {}, s.camera) == 0.0);
  }
}

TEST_CASE("robot out of view gives no ratio") {
  std::vector<Capsule> robot{{Vec3(0, -5, 50), Vec3(0.1, -5, 50), 0.05}};
  CHECK_FALSE(overlay_ratio(robot, robot, front_camera(Vec3(0, 3, 1))).has_value());
}

TEST_CASE("half cover matches the closed form") {
  const auto robot = robot_bar();
  // Human 20 cm nearer: every overlapping pixel counts.
  const double front = *overlay_ratio(robot, shifted_bar(0.2), far_camera(), far_params());
  MESSAGE("in front: " << front << " vs " << oracle::half_cover_in_front(kLen, kRad));
  CHECK(std::abs(front - oracle::half_cover_in_front(kLen, kRad)) < 0.03);

  // Same depth, no slack: only the half of the overlap nearer the human axis.
  RenderParams p = far_params();
  p.depth_slack = 0.0;
  const double same = *overlay_ratio(robot, shifted_bar(0.0), far_camera(), p);
  MESSAGE("same depth: " << same << " vs " << oracle::half_cover_same_depth(kLen, kRad));
  CHECK(std::abs(same - oracle::half_cover_same_depth(kLen, kRad)) < 0.03);

  // Behind by more than the slack: nothing counts.
  CHECK(*overlay_ratio(robot, shifted_bar(-0.2), far_camera(), far_params()) == 0.0);
}

TEST_CASE("adding a human capsule never lowers the ratio") {
  Rng rng(61);
  for (const Scene& s : onia_catalog_scenes()) {
    std::vector<Capsule> human;
    double last = 0.0;
    for (int k = 0; k < 4; ++k) {
      const Capsule& base = s.robot[k % s.robot.size()];
      human.push_back({base.a + rng.vec(0.05), base.b + rng.vec(0.05), rng.uniform(0.02, 0.05)});
      const double now = *overlay_ratio(s.robot, human, s.camera);
      CHECK(now >= last);
      last = now;
    }
  }
}

TEST_CASE("resolution stability on catalog scenes") {
  RenderParams hi;
  hi.width = hi.height = 1024;
  for (const Scene& s : onia_catalog_scenes()) {
    const double a = *overlay_ratio(s.robot, s.human, s.camera);
    const double b = *overlay_ratio(s.robot, s.human, s.camera, hi);
    CHECK(std::abs(a - b) < 0.01);
  }
}

TEST_CASE("OpenMP kernel matches the serial rasterizer") {
  Rng rng(62);
  auto scenes = onia_catalog_scenes();
  for (const Scene& s : scenes) {
    CHECK(overlay_count(s.robot, s.human, s.camera, {}) == overlay_count_serial(s.robot, s.human, s.camera, {}));
  }
  // Odd sizes, wide views, robot partly behind the camera.
  for (int i = 0; i < 20; ++i) {
    RenderParams p;
    p.width = rng.integer(16, 200);
    p.height = rng.integer(16, 200);
    p.fov_y = deg(rng.uniform(20, 120));
    const Scene& s = scenes[rng.integer(0, static_cast<int>(scenes.size()) - 1)];
    RigidPose cam = s.camera;
    cam.position += rng.vec(1.5);
    CHECK(overlay_count(s.robot, s.human, cam, p) == overlay_count_serial(s.robot, s.human, cam, p));
  }
}

TEST_CASE("overlay input errors") {
  const auto robot = robot_bar();
  CHECK_THROWS_AS(overlay_ratio({}, robot, far_camera()), std::invalid_argument);
  RenderParams p;
  p.width = 0;
  CHECK_THROWS_AS(overlay_ratio(robot, robot, far_camera(), p), std::invalid_argument);
  p = {};
  p.fov_y = 0.0;
  CHECK_THROWS_AS(overlay_ratio(robot, robot, far_camera(), p), std::invalid_argument);
  p = {};
  p.depth_slack = -1.0;
  CHECK_THROWS_AS(overlay_ratio(robot, robot, far_camera(), p), std::invalid_argument);
  CHECK_THROWS_AS(Rotation::from_wxyz(0, 0, 0, 0), std::invalid_argument);
}

TEST_CASE("timing overhead") {
  std::vector<double> times;
  for (int i = 0; i < 1001; ++i) times.push_back(timed([] { return 0; }).second);
  CHECK(aggregate(times).median < 1e-6);
}

TEST_CASE("ONIA deviations vanish on the catalog and the therapy session") {
  const auto cat = pose_catalog();
  const auto tr = therapy_trajectory(20.0, 100.0);
  for (const auto* frames : {&cat, &tr}) {
    for (const SessionFrame& f : *frames) {
      const ArmPair arms = aligned_arms(ModelGeometry{}, f.shoulders);
      for (Side side : {Side::Left, Side::Right}) {
        const OniaResult r = onia_solve(arms.arm(side), f.arm(side));
        const Deviations d = deviations(arms.arm(side), r.pose, f.arm(side));
        CHECK(d.elbow < 1e-9);
        CHECK(d.wrist < 1e-9);
      }
    }
  }
}

TEST_CASE("baseline stretch stays within the clamp") {
  const auto tr = therapy_trajectory(5.0, 100.0);
  const auto cat = pose_catalog();
  for (const auto* frames : {&cat, &tr}) {
    for (Side side : {Side::Left, Side::Right}) {
      JacobianSolver js;
      FabrikSolver fs;
      for (const SessionFrame& f : *frames) {
        const HumanArmModel m = aligned_arms(ModelGeometry{}, f.shoulders).arm(side);
        for (const ArmPose& p : {js.solve(m, f.arm(side)).pose, fs.solve(m, f.arm(side)).pose}) {
          CHECK(stretch_metrics(p).upper <= 0.3 + 1e-12);
          CHECK(stretch_metrics(p).forearm <= 0.3 + 1e-12);
        }
      }
    }
  }
}

TEST_CASE("catalog timing order and repeatability") {
  Config config;
  RunSpec spec;
  spec.overlay = false;
  const auto records = run_session(load_input(spec, config), config, spec);
  const auto summaries = summarize(records);
  REQUIRE(summaries.size() == 3);
  const double onia = summaries[0].solve_time_us.median;
  const double jac = summaries[1].solve_time_us.median;
  const double fab = summaries[2].solve_time_us.median;
  MESSAGE("catalog median solve time (us): onia " << onia << ", jacobian " << jac << ", fabrik " << fab);
  CHECK(onia < jac);
  CHECK(jac < fab);

  // Spread of 100 repeated ONIA solves; reported only.
  const SessionFrame f = pose_catalog()[7];
  const HumanArmModel m = aligned_arms(ModelGeometry{}, f.shoulders).right;
  std::vector<double> t;
  for (int i = 0; i < 100; ++i) t.push_back(timed([&] { return onia_solve(m, f.right); }).second);
  double mean = 0.0, var = 0.0;
  for (double x : t) mean += x / t.size();
  for (double x : t) var += (x - mean) * (x - mean) / t.size();
  MESSAGE("ONIA repeated solve coefficient of variation: " << std::sqrt(var) / mean);
}

}  // TEST_SUITE
