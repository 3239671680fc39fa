#pragma once

// Evaluation metrics: overlay ratio from the patient camera, elbow and wrist
// deviation, stretch away from the model's proportions and solve timing.

#include <chrono>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "avatar/armmodel.hpp"
#include "avatar/session.hpp"

namespace avatar {

struct Capsule {
  Vec3 a;
  Vec3 b;
  double radius = 0.0;
};

struct CapsuleRadii {
  double robot = 0.045;
  double upper_arm = 0.042;
  double forearm = 0.036;
};

struct RenderParams {
  int width = 512;
  int height = 512;
  double fov_y = deg(60.0);
  double near_plane = 0.05;
  double depth_slack = 0.01;  // a human hit this far behind the robot still covers it
  int samples = 4;            // rays per pixel: 1, 4 or 8

  void validate() const;
};

/// Distance along the unit ray to the first surface hit at or beyond `t_min`,
/// or +inf when the ray misses.
double ray_capsule(const Vec3& origin, const Vec3& dir, const Capsule& capsule, double t_min);

/// World-space unit ray direction through the centre of pixel (col, row).
Vec3 pixel_ray(const RigidPose& camera, const RenderParams& params, int col, int row);

// Counts are in samples; with one sample per pixel they are pixels.
struct OverlayCount {
  std::int64_t robot_pixels = 0;
  std::int64_t covered_pixels = 0;

  /// Covered fraction; empty when no robot pixel is visible.
  std::optional<double> ratio() const;
  bool operator==(const OverlayCount&) const = default;
};

/// Reference rasterizer: every pixel, one thread.
OverlayCount overlay_count_serial(std::span<const Capsule> robot, std::span<const Capsule> human,
                                  const RigidPose& camera, const RenderParams& params);

/// Same counts as the serial version; casts only the rows and columns that
/// can see a robot capsule and splits rows across OpenMP threads.
OverlayCount overlay_count(std::span<const Capsule> robot, std::span<const Capsule> human, const RigidPose& camera,
                           const RenderParams& params);

/// Throws std::invalid_argument when no robot capsule is given or the render
/// parameters are unusable.
std::optional<double> overlay_ratio(std::span<const Capsule> robot, std::span<const Capsule> human,
                                    const RigidPose& camera, const RenderParams& params = {});

std::vector<Capsule> human_capsules(const HumanArmModel& model, const ArmPose& pose, const CapsuleRadii& radii = {});
std::vector<Capsule> robot_capsules(const Vec3& robot_shoulder, const ArmRefs& refs, const CapsuleRadii& radii = {});

struct Deviations {
  double elbow = 0.0;
  double wrist = 0.0;
};

Deviations deviations(const HumanArmModel& model, const ArmPose& pose, const ArmRefs& refs);

struct StretchDeviation {
  double upper = 0.0;
  double forearm = 0.0;
};

StretchDeviation stretch_metrics(const ArmPose& pose);

/// Wall time of `fn()` on the monotonic clock, seconds.
template <class Fn>
auto timed(Fn&& fn) {
  const auto t0 = std::chrono::steady_clock::now();
  auto result = fn();
  const auto t1 = std::chrono::steady_clock::now();
  return std::pair{std::move(result), std::chrono::duration<double>(t1 - t0).count()};
}

}  // namespace avatar
