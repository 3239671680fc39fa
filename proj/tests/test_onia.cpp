#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "avatar/batch.hpp"
#include "avatar/metrics.hpp"
#include "avatar/onia.hpp"
#include "avatar/session.hpp"
#include "oracles.hpp"

using namespace avatar;
using oracle::Rng;

namespace {

HumanArmModel right_arm() { return make_arm(ModelGeometry{}, Side::Right); }

using oracle::Case;
using oracle::grid_minimum;
using oracle::random_case;

}  // namespace

TEST_SUITE("onia") {

TEST_CASE("self alignment returns the identity pose") {
  const HumanArmModel m = right_arm();
  ArmRefs refs;
  refs.elbow = m.default_elbow();
  refs.wrist = m.default_wrist();
  const OniaResult r = onia_solve(m, refs);
  CHECK(r.pose.shoulder == Rotation());
  CHECK(r.pose.elbow == Rotation());
  CHECK(r.pose.wrist == Rotation());
  CHECK(std::abs(r.pose.upper_stretch - 1.0) < 1e-15);
  CHECK(std::abs(r.pose.forearm_stretch - 1.0) < 1e-15);
  CHECK(r.degenerate_elbow_axis);
}

TEST_CASE("T-pose catalog entry gives an identity swing") {
  const SessionFrame f = pose_catalog()[6];
  const ArmPair arms = aligned_arms(ModelGeometry{}, f.shoulders);
  for (Side side : {Side::Left, Side::Right}) {
    const OniaResult r = onia_solve(arms.arm(side), f.arm(side));
    CHECK(r.pose.shoulder == Rotation());
    CHECK(r.pose.upper_stretch == doctest::Approx(0.27 / 0.25));
    CHECK(r.pose.forearm_stretch == doctest::Approx(0.29 / 0.24));
  }
}

TEST_CASE("straight reference arm takes the degenerate branch and still reaches") {
  const SessionFrame f = pose_catalog()[1];
  const ArmPair arms = aligned_arms(ModelGeometry{}, f.shoulders);
  for (Side side : {Side::Left, Side::Right}) {
    const OniaResult r = onia_solve(arms.arm(side), f.arm(side));
    CHECK(r.degenerate_elbow_axis);
    const Deviations d = deviations(arms.arm(side), r.pose, f.arm(side));
    CHECK(d.elbow < 1e-9);
    CHECK(d.wrist < 1e-9);
    // No twist was applied: the shoulder is the bare swing.
    CHECK(rotation_distance(r.pose.shoulder, rot_from_to(arms.arm(side).upper, f.arm(side).elbow - arms.arm(side).shoulder)) <
          1e-15);
  }
}

TEST_CASE("exactness on random reachable references") {
  Rng rng(30);
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const Case c = random_case(rng);
    const OniaResult r = onia_solve(c.model, c.refs);
    CHECK_FALSE(r.degenerate_elbow_axis);
    const oracle::Chain ch = oracle::chain(c.model, r.pose);
    worst = std::max({worst, (ch.elbow - c.refs.elbow).norm(), (ch.wrist - c.refs.wrist).norm()});
  }
  CHECK(worst < 1e-9);
}

TEST_CASE("twist optimality against a 3600-step sweep") {
  Rng rng(31);
  for (int i = 0; i < 200; ++i) {
    const Case c = random_case(rng);
    const OniaResult r = onia_solve(c.model, c.refs);
    const Vec3 ar = (c.refs.elbow - c.model.shoulder).cross(c.refs.wrist - c.refs.elbow);
    const double onia_angle = angle_between(r.pose.shoulder * c.model.elbow_axis, ar);
    CHECK(onia_angle <= grid_minimum(c.model, c.refs, 3600) + 1e-6);
  }
}

TEST_CASE("projections of the hinge axes coincide") {
  Rng rng(32);
  for (int i = 0; i < 2000; ++i) {
    const Case c = random_case(rng);
    const OniaResult r = onia_solve(c.model, c.refs);
    const Vec3 du = c.refs.elbow - c.model.shoulder;
    const Vec3 ar = du.cross(c.refs.wrist - c.refs.elbow);
    const Vec3 ph = project_perp(r.pose.shoulder * c.model.elbow_axis, du).normalized();
    const Vec3 pr = project_perp(ar, du).normalized();
    CHECK((ph - pr).norm() < 1e-9);
  }
}

TEST_CASE("reactive elbow twist") {
  Rng rng(33);
  for (int i = 0; i < 1000; ++i) {
    const Case c = random_case(rng);
    const Vec3 df = c.refs.wrist - c.refs.elbow;

    OniaParams none;
    none.elbow_twist_ratio = 0.0;
    const OniaResult r0 = onia_solve(c.model, c.refs, none);
    // Without the reactive twist the elbow is the bare forearm swing.
    const Rotation bare = rot_from_to(r0.pose.shoulder * c.model.fore, df) * r0.pose.shoulder;
    CHECK(rotation_distance(r0.pose.elbow, bare) < 1e-14);

    const double full = signed_angle_about(bare * c.model.wrist_normal, c.refs.ee_rot * c.model.wrist_normal, df);
    OniaParams all;
    all.elbow_twist_ratio = 1.0;
    const OniaResult r1 = onia_solve(c.model, c.refs, all);
    const OniaResult rd = onia_solve(c.model, c.refs);
    const double left1 = signed_angle_about(r1.pose.elbow * c.model.wrist_normal, c.refs.ee_rot * c.model.wrist_normal, df);
    const double leftd = signed_angle_about(rd.pose.elbow * c.model.wrist_normal, c.refs.ee_rot * c.model.wrist_normal, df);
    CHECK(std::abs(left1) < 1e-9);
    CHECK(std::abs(leftd - 0.6 * full) < 1e-9);
    // The twist is about the forearm, so the wrist still lands exactly.
    CHECK(deviations(c.model, rd.pose, c.refs).wrist < 1e-9);
    CHECK(r1.pose.wrist == c.refs.ee_rot);
  }
}

TEST_CASE("deterministic and stateless") {
  Rng rng(34);
  std::vector<Case> cases;
  for (int i = 0; i < 200; ++i) cases.push_back(random_case(rng));
  std::vector<ArmPose> first;
  for (const Case& c : cases) first.push_back(onia_solve(c.model, c.refs).pose);
  for (int k = static_cast<int>(cases.size()) - 1; k >= 0; --k) {
    onia_solve(cases[(k * 7) % cases.size()].model, cases[(k * 7) % cases.size()].refs);
    CHECK(onia_solve(cases[k].model, cases[k].refs).pose == first[k]);
  }
}

TEST_CASE("errors") {
  const HumanArmModel m = right_arm();
  ArmRefs refs;
  refs.elbow = m.shoulder;
  refs.wrist = m.default_wrist();
  CHECK_THROWS_AS(onia_solve(m, refs), std::invalid_argument);
  refs.elbow = m.default_elbow();
  refs.wrist = refs.elbow;
  CHECK_THROWS_AS(onia_solve(m, refs), std::invalid_argument);
  refs.wrist = m.default_wrist();
  OniaParams bad;
  bad.elbow_twist_ratio = 1.5;
  CHECK_THROWS_AS(onia_solve(m, refs, bad), std::invalid_argument);
}

TEST_CASE("batch kernels agree with the serial reference") {
  const auto frames = therapy_trajectory(5.0, 100.0);
  const auto a = onia_batch_serial(ModelGeometry{}, frames);
  const auto b = onia_batch(ModelGeometry{}, frames);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].left.pose == b[i].left.pose);
    CHECK(a[i].right.pose == b[i].right.pose);
    CHECK(a[i].right.degenerate_elbow_axis == b[i].right.degenerate_elbow_axis);
  }
  std::vector<SessionFrame> broken = pose_catalog();
  broken[5].right.wrist = broken[5].right.elbow;
  CHECK_THROWS_AS(onia_batch(ModelGeometry{}, broken), std::invalid_argument);
}

}  // TEST_SUITE
