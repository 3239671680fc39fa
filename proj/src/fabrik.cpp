#include "avatar/fabrik.hpp"

#include <algorithm>
#include <cmath>

#include "avatar/onia.hpp"

namespace avatar {

namespace {

constexpr double kSuccessSlack = 1e-9;

// Rotates `v` toward `center` until it lies inside the cone of half-angle `max_angle`.
Vec3 limit_cone(const Vec3& v, const Vec3& center, double max_angle) {
  const double len = v.norm();
  if (!(len > 0.0) || angle_between(v, center) <= max_angle) return v;
  const Vec3 c = center.normalized();
  Vec3 side = project_perp(v, c);
  if (side.norm() < 1e-12 * len) {
    side = project_perp(std::abs(c.z()) < 0.9 ? kUnitZ : kUnitX, c);
  }
  side.normalize();
  return len * (std::cos(max_angle) * c + std::sin(max_angle) * side);
}

}  // namespace

ChainPositions default_chain(const HumanArmModel& model) {
  return {model.shoulder, model.default_elbow(), model.default_wrist()};
}

Vec3 closest_in_sphere(const Vec3& joint, const Vec3& ref, double eps) {
  const Vec3 d = joint - ref;
  const double dist = d.norm();
  if (dist <= eps) return joint;
  return ref + (eps / dist) * d;
}

Vec3 reposition(const Vec3& joint, const Vec3& child, const Vec3& ref, double eps, double min_len, double max_len) {
  const Vec3 target = closest_in_sphere(joint, ref, eps);
  Vec3 dir = target - child;
  double dist = dir.norm();
  if (!(dist > 0.0)) {
    dir = joint - child;
    dist = dir.norm();
    if (!(dist > 0.0)) {
      dir = ref - child;
      dist = dir.norm();
      if (!(dist > 0.0)) return child + min_len * kUnitX;
    }
  }
  return child + (std::clamp(dist, min_len, max_len) / dist) * dir;
}

ChainPositions fabrik_pass(const ChainPositions& chain, const HumanArmModel& model, const ArmRefs& refs,
                           const Tolerances& tol, int n) {
  const JointConstraints& c = model.limits;
  const double upper_len = model.upper.norm();
  const double fore_len = model.fore.norm();
  ChainPositions s = chain;
  for (int i = 0; i < n; ++i) {
    // Forward reach, from the wrist toward the root.
    s.wrist = closest_in_sphere(s.wrist, refs.wrist, tol.wrist);
    s.elbow = reposition(s.elbow, s.wrist, refs.elbow, tol.elbow, c.stretch_min * fore_len, c.stretch_max * fore_len);

    // Backward reach from the pinned shoulder, with the rotational limits.
    s.elbow = reposition(s.elbow, s.shoulder, refs.elbow, tol.elbow, c.stretch_min * upper_len,
                         c.stretch_max * upper_len);
    s.elbow = s.shoulder + limit_cone(s.elbow - s.shoulder, model.upper, c.swing_max);
    s.wrist = reposition(s.wrist, s.elbow, refs.wrist, tol.wrist, c.stretch_min * fore_len, c.stretch_max * fore_len);
    s.wrist = s.elbow + limit_cone(s.wrist - s.elbow, s.elbow - s.shoulder, c.hinge_max);
  }
  return s;
}

bool fabrik_success(const ChainPositions& chain, const ArmRefs& refs, const Tolerances& tol) {
  return (chain.elbow - refs.elbow).norm() <= tol.elbow + kSuccessSlack &&
         (chain.wrist - refs.wrist).norm() <= tol.wrist + kSuccessSlack;
}

ArmPose chain_to_pose(const HumanArmModel& model, const ChainPositions& chain, const Rotation& wrist,
                      double& previous_twist, bool& singular) {
  const JointConstraints& c = model.limits;
  const Vec3 upper = chain.elbow - chain.shoulder;
  const Vec3 fore = chain.wrist - chain.elbow;
  ArmPose pose;
  pose.upper_stretch = upper.norm() / model.upper.norm();
  pose.forearm_stretch = fore.norm() / model.fore.norm();

  const Rotation swing = rot_from_to(model.upper, upper);
  singular = is_straight(upper, fore);
  if (!singular) {
    const double twist = signed_angle_about(swing * model.elbow_axis, upper.cross(fore), upper);
    previous_twist = std::clamp(twist, c.twist_min, c.twist_max);
  }
  pose.shoulder = Rotation::axis_angle(upper, previous_twist) * swing;
  pose.elbow = rot_from_to(pose.shoulder * model.fore, fore) * pose.shoulder;
  pose.wrist = wrist;
  return clamp_pose(pose, model);
}

FabrikResult fabrik_solve(const HumanArmModel& model, const ArmRefs& refs, const ChainPositions& start,
                          const FabrikParams& params, double previous_twist) {
  FabrikResult out;
  Tolerances tol{std::numeric_limits<double>::infinity(), params.wrist_tolerance};
  ChainPositions best = fabrik_pass(start, model, refs, tol, params.initial_iterations);
  out.success = fabrik_success(best, refs, tol);

  if (out.success) {
    double lo = 0.0;
    double hi = params.max_elbow_tolerance;
    bool found = false;
    while (hi - lo >= params.tolerance_resolution) {
      tol.elbow = 0.5 * (lo + hi);
      const ChainPositions probe = fabrik_pass(best, model, refs, tol, params.refine_iterations);
      const bool ok = fabrik_success(probe, refs, tol);
      out.probes.push_back({tol.elbow, ok});
      if (ok) {
        hi = tol.elbow;
        best = probe;
        found = true;
      } else {
        lo = tol.elbow;
      }
    }
    out.achieved_elbow_tolerance = found ? hi : (best.elbow - refs.elbow).norm();
  }

  out.chain = best;
  out.pose = chain_to_pose(model, best, refs.ee_rot, previous_twist, out.singular);
  out.shoulder_twist = previous_twist;
  return out;
}

FabrikResult FabrikSolver::solve(const HumanArmModel& model, const ArmRefs& refs) {
  if (!has_state_) {
    chain_ = default_chain(model);
    has_state_ = true;
  } else {
    const Vec3 shift = model.shoulder - chain_.shoulder;
    chain_.shoulder += shift;
    chain_.elbow += shift;
    chain_.wrist += shift;
  }
  FabrikResult r = fabrik_solve(model, refs, chain_, params_, twist_);
  chain_ = r.chain;
  twist_ = r.shoulder_twist;
  return r;
}

}  // namespace avatar
