#include "avatar/armmodel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace avatar {

const char* side_name(Side side) { return side == Side::Left ? "left" : "right"; }

void JointConstraints::validate() const {
  if (!(swing_max > 0.0)) throw std::invalid_argument("constraints: swing_max must be positive");
  if (!(twist_min < twist_max)) throw std::invalid_argument("constraints: twist_min must be below twist_max");
  if (!(hinge_min <= hinge_max)) throw std::invalid_argument("constraints: hinge_min must not exceed hinge_max");
  if (!(stretch_min > 0.0 && stretch_min <= 1.0 && stretch_max >= 1.0)) {
    throw std::invalid_argument("constraints: need 0 < stretch_min <= 1 <= stretch_max");
  }
}

void HumanArmModel::validate() const {
  if (!(upper.norm() > 0.0) || !(fore.norm() > 0.0) || !(elbow_axis.norm() > 0.0) || !(wrist_normal.norm() > 0.0)) {
    throw std::invalid_argument("arm model: segment, hinge and wrist vectors must be nonzero");
  }
  if (upper.normalized().cross(elbow_axis.normalized()).norm() < 1e-9) {
    throw std::invalid_argument("arm model: elbow axis parallel to the upper arm");
  }
  limits.validate();
}

HumanArmModel make_arm(const ModelGeometry& g, Side side) {
  const double sx = side == Side::Right ? 1.0 : -1.0;
  HumanArmModel arm;
  arm.side = side;
  arm.shoulder = Vec3(sx * g.shoulder_half_width, 0.0, g.shoulder_height);
  arm.upper = Vec3(sx * g.upper_length, 0.0, 0.0);
  arm.fore = Vec3(sx * g.forearm_length, 0.0, 0.0);
  const Vec3& a = g.left_elbow_axis;
  // Mirror across x = 0; the hinge axis is a pseudovector.
  arm.elbow_axis = side == Side::Left ? a : Vec3(a.x(), -a.y(), -a.z());
  arm.wrist_normal = side == Side::Left ? g.wrist_normal : Vec3(-g.wrist_normal.x(), g.wrist_normal.y(), g.wrist_normal.z());
  arm.limits = g.limits;
  arm.validate();
  return arm;
}

JointPositions fk_arm(const HumanArmModel& model, const ArmPose& pose) {
  const Vec3 elbow = model.shoulder + pose.shoulder * (pose.upper_stretch * model.upper);
  return {elbow, elbow + pose.elbow * (pose.forearm_stretch * model.fore)};
}

HumanArmModel BodyAlignment::apply(const HumanArmModel& model) const {
  HumanArmModel out = model;
  out.shoulder = apply(model.shoulder);
  out.upper = rotation * model.upper;
  out.fore = rotation * model.fore;
  out.elbow_axis = rotation * model.elbow_axis;
  out.wrist_normal = rotation * model.wrist_normal;
  return out;
}

BodyAlignment align_body(const ShoulderPair& model, const ShoulderPair& robot) {
  const Vec3 dm = model.right - model.left;
  const Vec3 dr = robot.right - robot.left;
  if (!(dm.norm() > 0.0) || !(dr.norm() > 0.0)) {
    throw std::invalid_argument("align_body: degenerate shoulder segment");
  }
  BodyAlignment out;
  out.rotation = rot_from_to(dm, dr);
  const Vec3 mid_m = 0.5 * (model.left + model.right);
  const Vec3 mid_r = 0.5 * (robot.left + robot.right);
  out.translation = mid_r - out.rotation * mid_m;
  return out;
}

namespace {

// Signed inter-segment angle, positive when upper x fore points along the hinge axis.
double signed_segment_angle(const Vec3& upper, const Vec3& fore, const Vec3& axis) {
  const double a = angle_between(upper, fore);
  return upper.cross(fore).dot(axis) < 0.0 ? -a : a;
}

}  // namespace

double hinge_angle(const HumanArmModel& model, const Rotation& local_elbow) {
  const double rest = signed_segment_angle(model.upper, model.fore, model.elbow_axis);
  return signed_segment_angle(model.upper, local_elbow * model.fore, model.elbow_axis) - rest;
}

JointAngles measure_angles(const HumanArmModel& model, const ArmPose& pose) {
  const SwingTwist st = swing_twist(pose.shoulder, model.upper);
  return {st.swing.angle(), twist_angle(st.twist, model.upper),
          hinge_angle(model, pose.shoulder.inverse() * pose.elbow)};
}

ArmPose clamp_pose(const ArmPose& pose, const HumanArmModel& model) {
  const JointConstraints& c = model.limits;
  ArmPose out = pose;
  out.upper_stretch = std::clamp(pose.upper_stretch, c.stretch_min, c.stretch_max);
  out.forearm_stretch = std::clamp(pose.forearm_stretch, c.stretch_min, c.stretch_max);

  const SwingTwist st = swing_twist(pose.shoulder, model.upper);
  const double swing = st.swing.angle();
  const double twist = twist_angle(st.twist, model.upper);
  const bool clamp_swing = swing > c.swing_max;
  const bool clamp_twist = twist < c.twist_min || twist > c.twist_max;

  Rotation local = pose.shoulder.inverse() * pose.elbow;
  const double hinge = hinge_angle(model, local);
  const bool clamp_hinge = hinge < c.hinge_min || hinge > c.hinge_max;

  if (!clamp_swing && !clamp_twist && !clamp_hinge) return out;

  if (clamp_hinge) {
    const Vec3 f = local * model.fore;
    Vec3 n = model.upper.cross(f);
    if (n.norm() < 1e-12 * model.upper.norm() * f.norm()) {
      n = project_perp(model.elbow_axis, model.upper);
    }
    n.normalize();
    if (n.dot(model.elbow_axis) < 0.0) n = -n;
    const double target = std::clamp(hinge, c.hinge_min, c.hinge_max);
    local = Rotation::axis_angle(n, target - hinge) * local;
  }

  if (clamp_swing || clamp_twist) {
    const Rotation swing_r = clamp_swing ? Rotation::axis_angle(st.swing.axis(), c.swing_max) : st.swing;
    const Rotation twist_r =
        clamp_twist ? Rotation::axis_angle(model.upper, std::clamp(twist, c.twist_min, c.twist_max)) : st.twist;
    out.shoulder = swing_r * twist_r;
  }
  out.elbow = out.shoulder * local;
  return out;
}

double gripper_to_gesture(double openness, const GestureMap& map) {
  const double g = std::clamp(openness, 0.0, 1.0);
  return map.angle_closed + (map.angle_open - map.angle_closed) * g;
}

}  // namespace avatar
