#pragma once

// Optimal non-iterative alignment: a closed-form chain of swings, stretches
// and twists that puts the model's elbow and wrist exactly on the robot's
// reference positions and aligns the elbow hinge axis as closely as the
// reached positions allow.

#include "avatar/armmodel.hpp"
#include "avatar/session.hpp"

namespace avatar {

struct OniaParams {
  double elbow_twist_ratio = 0.4;  // share of the wrist twist passed to the forearm
};

struct OniaResult {
  ArmPose pose;
  bool degenerate_elbow_axis = false;  // straight reference arm, shoulder twist skipped
};

/// Throws std::invalid_argument when a reference segment has zero length or
/// the ratio is outside [0, 1]. Pure; safe to call concurrently.
OniaResult onia_solve(const HumanArmModel& model, const ArmRefs& refs, const OniaParams& params = {});

/// Straight-arm test used by the solver: |d_u x d_f| < 1e-8 |d_u| |d_f|.
bool is_straight(const Vec3& upper, const Vec3& fore);

}  // namespace avatar
