#pragma once

// FABRIK baseline with reference spheres. Each joint with a reference is
// first dragged to the closest point of a radius-eps sphere around its
// reference, then placed on the segment toward that point with the segment
// length clamped to the stretch limits. The elbow tolerance is found by
// binary search, keeping the best feasible chain seen so far.

#include <limits>
#include <vector>

#include "avatar/armmodel.hpp"
#include "avatar/session.hpp"

namespace avatar {

struct FabrikParams {
  double wrist_tolerance = 0.005;  // eps_w, meters
  double max_elbow_tolerance = 0.30;
  double tolerance_resolution = 0.002;  // binary search stops below this width
  int initial_iterations = 8;
  int refine_iterations = 5;
};

struct ChainPositions {
  Vec3 shoulder = Vec3::Zero();
  Vec3 elbow = Vec3::Zero();
  Vec3 wrist = Vec3::Zero();
};

struct Tolerances {
  double elbow = std::numeric_limits<double>::infinity();
  double wrist = 0.005;
};

ChainPositions default_chain(const HumanArmModel& model);

/// Closest point to `joint` inside the radius-eps sphere around `ref`.
Vec3 closest_in_sphere(const Vec3& joint, const Vec3& ref, double eps);

/// New position of `joint` placed from its already-updated neighbour `child`.
Vec3 reposition(const Vec3& joint, const Vec3& child, const Vec3& ref, double eps, double min_len, double max_len);

/// `n` forward (wrist to shoulder) and backward (shoulder to wrist) sweeps.
/// The shoulder never moves.
ChainPositions fabrik_pass(const ChainPositions& chain, const HumanArmModel& model, const ArmRefs& refs,
                           const Tolerances& tol, int n);

/// All referenced joints within their tolerances.
bool fabrik_success(const ChainPositions& chain, const ArmRefs& refs, const Tolerances& tol);

struct ToleranceProbe {
  double elbow_tolerance;
  bool feasible;
};

struct FabrikResult {
  ArmPose pose;
  ChainPositions chain;
  double achieved_elbow_tolerance = std::numeric_limits<double>::infinity();
  bool success = false;
  bool singular = false;  // straight chain, previous twist reused
  double shoulder_twist = 0.0;  // carried to the next frame
  std::vector<ToleranceProbe> probes;
};

/// Binary search on the elbow tolerance starting from `start`. The returned
/// chain is feasible at `achieved_elbow_tolerance` whenever `success` is set.
FabrikResult fabrik_solve(const HumanArmModel& model, const ArmRefs& refs, const ChainPositions& start,
                          const FabrikParams& params = {}, double previous_twist = 0.0);

/// Joint rotations for a solved chain: swing onto the upper arm, twist to
/// line up the hinge axis (limited to the twist range), swing the forearm,
/// then clamp to the joint limits. A straight chain reuses `previous_twist`.
ArmPose chain_to_pose(const HumanArmModel& model, const ChainPositions& chain, const Rotation& wrist,
                      double& previous_twist, bool& singular);

/// Per-arm solver that carries the chain and the shoulder twist across frames.
class FabrikSolver {
 public:
  explicit FabrikSolver(FabrikParams params = {}) : params_(params) {}

  FabrikResult solve(const HumanArmModel& model, const ArmRefs& refs);
  void reset() { has_state_ = false; twist_ = 0.0; }
  const FabrikParams& params() const { return params_; }

 private:
  FabrikParams params_;
  bool has_state_ = false;
  ChainPositions chain_;
  double twist_ = 0.0;
};

}  // namespace avatar
