#pragma once

// Human arm model: default configuration, joint limits, forward kinematics
// and the whole-body pre-alignment against the robot's shoulders.

#include <utility>

#include "avatar/geom.hpp"

namespace avatar {

enum class Side { Left, Right };

const char* side_name(Side side);

inline double deg(double degrees) { return degrees * M_PI / 180.0; }

struct JointConstraints {
  double swing_max = deg(85.0);
  double twist_min = deg(-75.0);
  double twist_max = deg(75.0);
  double hinge_min = deg(0.0);
  double hinge_max = deg(150.0);
  double stretch_min = 0.8;
  double stretch_max = 1.3;

  /// Throws std::invalid_argument when the bounds are inconsistent.
  void validate() const;
};

/// One arm of the human model in its default (unposed) configuration.
struct HumanArmModel {
  Side side = Side::Right;
  Vec3 shoulder = Vec3::Zero();   // world shoulder position after body alignment
  Vec3 upper = kUnitX;            // elbow - shoulder in the default configuration
  Vec3 fore = kUnitX;             // wrist - elbow in the default configuration
  Vec3 elbow_axis = kUnitY;       // hinge axis, oriented along upper x fore for flexion
  Vec3 wrist_normal = kUnitZ;     // roughly perpendicular to the palm
  JointConstraints limits;

  void validate() const;
  Vec3 default_elbow() const { return shoulder + upper; }
  Vec3 default_wrist() const { return shoulder + upper + fore; }
};

/// Anthropometric defaults for building both arms of the model (SI units).
struct ModelGeometry {
  double shoulder_half_width = 0.18;
  double shoulder_height = 1.10;
  double upper_length = 0.25;
  double forearm_length = 0.24;
  // Left-arm hinge axis; the right arm uses the mirror image so both arms
  // flex upward out of the T-pose.
  Vec3 left_elbow_axis = kUnitY;
  Vec3 wrist_normal = kUnitZ;
  JointConstraints limits;
};

/// T-pose arm, right arm along +x, left arm along -x, z up, facing +y.
HumanArmModel make_arm(const ModelGeometry& geometry, Side side);

/// Solver output. Rotations are world-frame joint rotations relative to the
/// default configuration.
struct ArmPose {
  Rotation shoulder;
  Rotation elbow;
  Rotation wrist;
  double upper_stretch = 1.0;
  double forearm_stretch = 1.0;

  bool operator==(const ArmPose&) const = default;
};

struct JointPositions {
  Vec3 elbow;
  Vec3 wrist;
};

JointPositions fk_arm(const HumanArmModel& model, const ArmPose& pose);

struct ShoulderPair {
  Vec3 left;
  Vec3 right;
};

struct BodyAlignment {
  Vec3 translation = Vec3::Zero();
  Rotation rotation;

  Vec3 apply(const Vec3& p) const { return rotation * p + translation; }
  HumanArmModel apply(const HumanArmModel& model) const;
};

/// Rigid transform taking the model's shoulder segment onto the robot's:
/// same direction (left to right) and same midpoint.
BodyAlignment align_body(const ShoulderPair& model, const ShoulderPair& robot);

/// Joint angles of a pose as the constraints see them.
struct JointAngles {
  double swing = 0.0;  // shoulder swing away from the default upper-arm axis
  double twist = 0.0;  // shoulder twist about the default upper-arm axis
  double hinge = 0.0;  // elbow flexion relative to the default configuration
};

JointAngles measure_angles(const HumanArmModel& model, const ArmPose& pose);

/// Elbow hinge angle of a local elbow rotation (shoulder frame).
double hinge_angle(const HumanArmModel& model, const Rotation& local_elbow);

/// Projects a pose into the joint limits. In-limit poses come back unchanged.
ArmPose clamp_pose(const ArmPose& pose, const HumanArmModel& model);

struct GestureMap {
  double angle_closed = deg(5.0);
  double angle_open = deg(60.0);
};

/// Linear map from gripper openness in [0, 1] to the thumb-index angle.
double gripper_to_gesture(double openness, const GestureMap& map = {});

}  // namespace avatar
