#include "avatar/onia.hpp"

#include <cmath>
#include <stdexcept>

namespace avatar {

bool is_straight(const Vec3& upper, const Vec3& fore) {
  return upper.cross(fore).norm() < 1e-8 * upper.norm() * fore.norm();
}

namespace {

// Rotation about `axis` taking the projection of `from` onto the plane normal
// to `axis` onto the projection of `to`. Same as rot_from_to on the projected
// vectors, but stays about `axis` when they point in opposite directions.
Rotation twist_onto(const Vec3& from, const Vec3& to, const Vec3& axis, double ratio = 1.0) {
  const double angle = signed_angle_about(from, to, axis);
  if (angle == 0.0) return {};
  return Rotation::axis_angle(axis, ratio * angle);
}

}  // namespace

OniaResult onia_solve(const HumanArmModel& model, const ArmRefs& refs, const OniaParams& params) {
  if (!(params.elbow_twist_ratio >= 0.0 && params.elbow_twist_ratio <= 1.0)) {
    throw std::invalid_argument("onia: elbow twist ratio must be in [0, 1]");
  }
  // Reference arm axes, rooted at the model's own shoulder.
  const Vec3 upper_ref = refs.elbow - model.shoulder;
  const Vec3 fore_ref = refs.wrist - refs.elbow;
  const double upper_len = upper_ref.norm();
  const double fore_len = fore_ref.norm();
  if (!(upper_len > 0.0) || !(fore_len > 0.0)) {
    throw std::invalid_argument("onia: zero-length reference segment");
  }

  OniaResult out;
  ArmPose& pose = out.pose;

  // Swing the upper arm onto its reference axis and stretch it to length.
  const Rotation shoulder_swing = rot_from_to(model.upper, upper_ref);
  pose.upper_stretch = upper_len / model.upper.norm();

  // Twist about the reference upper arm so the hinge axis meets the robot's.
  const Vec3 elbow_axis_ref = upper_ref.cross(fore_ref);
  Rotation shoulder_twist;
  if (is_straight(upper_ref, fore_ref)) {
    out.degenerate_elbow_axis = true;
  } else {
    shoulder_twist = twist_onto(shoulder_swing * model.elbow_axis, elbow_axis_ref, upper_ref);
  }
  pose.shoulder = shoulder_twist * shoulder_swing;

  // Swing the carried forearm onto its reference axis and stretch it.
  const Rotation elbow_swing = rot_from_to(pose.shoulder * model.fore, fore_ref) * pose.shoulder;
  pose.forearm_stretch = fore_len / model.fore.norm();

  pose.wrist = refs.ee_rot;

  // Let the forearm follow a share of the wrist twist.
  const Rotation elbow_twist = twist_onto(elbow_swing * model.wrist_normal, pose.wrist * model.wrist_normal, fore_ref,
                                          params.elbow_twist_ratio);
  pose.elbow = elbow_twist * elbow_swing;
  return out;
}

}  // namespace avatar
