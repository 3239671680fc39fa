#pragma once

// Damped least squares baseline. The arm is parameterized by six numbers:
//
//   [0, 1]  shoulder swing as an exponential map in the plane normal to the
//           default upper arm (basis: hinge axis projected, then axis x that)
//   2       shoulder twist about the default upper arm
//   3       elbow hinge about the default hinge axis
//   4, 5    upper arm and forearm stretch
//
// The objective stacks the wrist error with a down-weighted elbow error so
// the elbow reference acts as a secondary goal.

#include <stdexcept>

#include <Eigen/Core>

#include "avatar/armmodel.hpp"
#include "avatar/session.hpp"

namespace avatar {

using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat6 = Eigen::Matrix<double, 6, 6>;

enum JacobianParam : int { kSwingA = 0, kSwingB = 1, kTwist = 2, kHinge = 3, kUpperStretch = 4, kForeStretch = 5 };

struct JacobianParams {
  double damping = 0.2;       // lambda
  double elbow_weight = 0.1;  // w_e
  double max_step = 0.5;      // cap on |delta theta| per step
  int max_iters = 100;
  double tolerance = 1e-3;    // wrist residual, meters
  double initial_hinge = deg(20.0);
};

class SolverDiverged : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Orthonormal frame at the shoulder: the default upper-arm direction and two
/// swing directions normal to it.
struct ShoulderBasis {
  Vec3 axis;
  Vec3 swing_a;
  Vec3 swing_b;
};

ShoulderBasis shoulder_basis(const HumanArmModel& model);

/// Default start: T-pose with the elbow pre-bent.
Vec6 initial_parameters(const JacobianParams& params);

ArmPose parameters_to_pose(const HumanArmModel& model, const Vec6& theta, const Rotation& wrist = {});

/// Stacked positions [p_w; w_e * p_e].
Vec6 stacked_positions(const HumanArmModel& model, const Vec6& theta, double elbow_weight);

/// [p_w - x_w; w_e (p_e - x_e)].
Vec6 residual(const HumanArmModel& model, const ArmRefs& refs, const Vec6& theta, double elbow_weight);

/// Analytic derivative of stacked_positions with respect to theta.
Mat6 jacobian(const HumanArmModel& model, const Vec6& theta, double elbow_weight);

/// Left Jacobian of the rotation exponential: exp(v + dv) ~ exp(J(v) dv) exp(v).
Eigen::Matrix3d exp_left_jacobian(const Vec3& v);

struct DlsSolution {
  Vec6 delta_theta;  // J^T y
  Vec6 y;            // (J J^T + lambda^2 I) y = delta_p
};

/// Damped least squares update for a desired task-space change.
DlsSolution dls_update(const Mat6& jac, const Vec6& delta_p, double damping);

/// Box/cone projection of the parameters onto the joint limits.
Vec6 project_to_limits(const HumanArmModel& model, const Vec6& theta);

/// One damped step toward the references followed by the limit projection.
/// Throws SolverDiverged if the update is not finite.
Vec6 dls_step(const HumanArmModel& model, const ArmRefs& refs, const Vec6& theta, const JacobianParams& params);

struct JacobianResult {
  ArmPose pose;
  Vec6 theta;
  int iterations = 0;
  bool converged = false;
};

/// Runs dls_step (at least once) until the wrist residual drops below the
/// tolerance or max_iters is reached.
JacobianResult jacobian_solve(const HumanArmModel& model, const ArmRefs& refs, const Vec6& start,
                              const JacobianParams& params = {});

/// Per-arm solver that warm-starts each frame from the previous solution.
class JacobianSolver {
 public:
  explicit JacobianSolver(JacobianParams params = {}) : params_(params), theta_(initial_parameters(params)) {}

  JacobianResult solve(const HumanArmModel& model, const ArmRefs& refs);
  void reset() { theta_ = initial_parameters(params_); }
  const JacobianParams& params() const { return params_; }

 private:
  JacobianParams params_;
  Vec6 theta_;
};

}  // namespace avatar
