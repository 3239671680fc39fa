#include "avatar/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace avatar {

std::optional<double> OverlayCount::ratio() const {
  if (robot_pixels == 0) return std::nullopt;
  return static_cast<double>(covered_pixels) / static_cast<double>(robot_pixels);
}

std::vector<Capsule> human_capsules(const HumanArmModel& model, const ArmPose& pose, const CapsuleRadii& radii) {
  const JointPositions p = fk_arm(model, pose);
  return {{model.shoulder, p.elbow, radii.upper_arm}, {p.elbow, p.wrist, radii.forearm}};
}

std::vector<Capsule> robot_capsules(const Vec3& robot_shoulder, const ArmRefs& refs, const CapsuleRadii& radii) {
  return {{robot_shoulder, refs.elbow, radii.robot}, {refs.elbow, refs.wrist, radii.robot}};
}

Deviations deviations(const HumanArmModel& model, const ArmPose& pose, const ArmRefs& refs) {
  const JointPositions p = fk_arm(model, pose);
  return {(p.elbow - refs.elbow).norm(), (p.wrist - refs.wrist).norm()};
}

StretchDeviation stretch_metrics(const ArmPose& pose) {
  return {std::abs(pose.upper_stretch - 1.0), std::abs(pose.forearm_stretch - 1.0)};
}

}  // namespace avatar
