#include "avatar/jacobian.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Cholesky>

namespace avatar {

namespace {

Eigen::Matrix3d skew(const Vec3& v) {
  Eigen::Matrix3d m;
  m << 0.0, -v.z(), v.y(), v.z(), 0.0, -v.x(), -v.y(), v.x(), 0.0;
  return m;
}

}  // namespace

ShoulderBasis shoulder_basis(const HumanArmModel& model) {
  ShoulderBasis b;
  b.axis = model.upper.normalized();
  b.swing_a = project_perp(model.elbow_axis, b.axis).normalized();
  b.swing_b = b.axis.cross(b.swing_a);
  return b;
}

Vec6 initial_parameters(const JacobianParams& params) {
  Vec6 theta = Vec6::Zero();
  theta[kHinge] = params.initial_hinge;
  theta[kUpperStretch] = 1.0;
  theta[kForeStretch] = 1.0;
  return theta;
}

ArmPose parameters_to_pose(const HumanArmModel& model, const Vec6& theta, const Rotation& wrist) {
  const ShoulderBasis b = shoulder_basis(model);
  ArmPose pose;
  pose.shoulder = exp_map(theta[kSwingA] * b.swing_a + theta[kSwingB] * b.swing_b) *
                  Rotation::axis_angle(b.axis, theta[kTwist]);
  pose.elbow = pose.shoulder * Rotation::axis_angle(model.elbow_axis, theta[kHinge]);
  pose.wrist = wrist;
  pose.upper_stretch = theta[kUpperStretch];
  pose.forearm_stretch = theta[kForeStretch];
  return pose;
}

Vec6 stacked_positions(const HumanArmModel& model, const Vec6& theta, double elbow_weight) {
  const JointPositions p = fk_arm(model, parameters_to_pose(model, theta));
  Vec6 out;
  out << p.wrist, elbow_weight * p.elbow;
  return out;
}

Vec6 residual(const HumanArmModel& model, const ArmRefs& refs, const Vec6& theta, double elbow_weight) {
  const JointPositions p = fk_arm(model, parameters_to_pose(model, theta));
  Vec6 out;
  out << p.wrist - refs.wrist, elbow_weight * (p.elbow - refs.elbow);
  return out;
}

Eigen::Matrix3d exp_left_jacobian(const Vec3& v) {
  const double t = v.norm();
  double a, b;
  if (t < 1e-4) {
    const double t2 = t * t;
    a = 0.5 - t2 / 24.0;
    b = 1.0 / 6.0 - t2 / 120.0;
  } else {
    a = (1.0 - std::cos(t)) / (t * t);
    b = (t - std::sin(t)) / (t * t * t);
  }
  const Eigen::Matrix3d k = skew(v);
  return Eigen::Matrix3d::Identity() + a * k + b * k * k;
}

Mat6 jacobian(const HumanArmModel& model, const Vec6& theta, double elbow_weight) {
  const ShoulderBasis b = shoulder_basis(model);
  const Vec3 swing_vec = theta[kSwingA] * b.swing_a + theta[kSwingB] * b.swing_b;
  const Rotation swing = exp_map(swing_vec);
  const ArmPose pose = parameters_to_pose(model, theta);
  const JointPositions p = fk_arm(model, pose);
  const Vec3 to_elbow = p.elbow - model.shoulder;
  const Vec3 to_wrist = p.wrist - model.shoulder;

  Mat6 jac = Mat6::Zero();
  auto set_rotational = [&](int col, const Vec3& omega, bool moves_elbow, const Vec3& wrist_lever) {
    jac.block<3, 1>(0, col) = omega.cross(wrist_lever);
    if (moves_elbow) jac.block<3, 1>(3, col) = elbow_weight * omega.cross(to_elbow);
  };

  const Eigen::Matrix3d jl = exp_left_jacobian(swing_vec);
  set_rotational(kSwingA, jl * b.swing_a, true, to_wrist);
  set_rotational(kSwingB, jl * b.swing_b, true, to_wrist);
  set_rotational(kTwist, swing * b.axis, true, to_wrist);
  set_rotational(kHinge, pose.shoulder * model.elbow_axis, false, p.wrist - p.elbow);

  const Vec3 upper_dir = pose.shoulder * model.upper;
  jac.block<3, 1>(0, kUpperStretch) = upper_dir;
  jac.block<3, 1>(3, kUpperStretch) = elbow_weight * upper_dir;
  jac.block<3, 1>(0, kForeStretch) = pose.elbow * model.fore;
  return jac;
}

DlsSolution dls_update(const Mat6& jac, const Vec6& delta_p, double damping) {
  const Mat6 a = jac * jac.transpose() + (damping * damping) * Mat6::Identity();
  DlsSolution s;
  s.y = a.llt().solve(delta_p);
  s.delta_theta = jac.transpose() * s.y;
  return s;
}

Vec6 project_to_limits(const HumanArmModel& model, const Vec6& theta) {
  const JointConstraints& c = model.limits;
  Vec6 out = theta;
  const double swing = std::hypot(theta[kSwingA], theta[kSwingB]);
  if (swing > c.swing_max) {
    out[kSwingA] *= c.swing_max / swing;
    out[kSwingB] *= c.swing_max / swing;
  }
  out[kTwist] = std::clamp(theta[kTwist], c.twist_min, c.twist_max);
  out[kHinge] = std::clamp(theta[kHinge], c.hinge_min, c.hinge_max);
  out[kUpperStretch] = std::clamp(theta[kUpperStretch], c.stretch_min, c.stretch_max);
  out[kForeStretch] = std::clamp(theta[kForeStretch], c.stretch_min, c.stretch_max);
  return out;
}

Vec6 dls_step(const HumanArmModel& model, const ArmRefs& refs, const Vec6& theta, const JacobianParams& params) {
  const Vec6 r = residual(model, refs, theta, params.elbow_weight);
  const Mat6 jac = jacobian(model, theta, params.elbow_weight);
  Vec6 step = dls_update(jac, -r, params.damping).delta_theta;
  if (!step.allFinite()) throw SolverDiverged("damped least squares produced a non-finite step");
  const double n = step.norm();
  if (n > params.max_step) step *= params.max_step / n;
  return project_to_limits(model, theta + step);
}

JacobianResult jacobian_solve(const HumanArmModel& model, const ArmRefs& refs, const Vec6& start,
                              const JacobianParams& params) {
  if (params.max_iters < 1) throw std::invalid_argument("jacobian_solve: max_iters must be at least 1");
  JacobianResult out;
  out.theta = start;
  for (int it = 1; it <= params.max_iters; ++it) {
    out.theta = dls_step(model, refs, out.theta, params);
    out.iterations = it;
    const Vec3 wrist_err = residual(model, refs, out.theta, params.elbow_weight).head<3>();
    if (wrist_err.norm() < params.tolerance) {
      out.converged = true;
      break;
    }
  }
  out.pose = parameters_to_pose(model, out.theta, refs.ee_rot);
  return out;
}

JacobianResult JacobianSolver::solve(const HumanArmModel& model, const ArmRefs& refs) {
  JacobianResult r = jacobian_solve(model, refs, theta_, params_);
  theta_ = r.theta;
  return r;
}

}  // namespace avatar
