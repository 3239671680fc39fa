#pragma once

// Session frames: the unit of logging, replay and streaming. Also the static
// pose catalog, the emulated therapy trajectory, the low-pass pose filter and
// the line-oriented text codec shared by session files and the relay.

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "avatar/armmodel.hpp"
#include "avatar/geom.hpp"

namespace avatar {

struct RigidPose {
  Vec3 position = Vec3::Zero();
  Rotation rotation;

  bool operator==(const RigidPose&) const = default;
};

/// Robot-side targets for one human arm.
struct ArmRefs {
  Vec3 elbow = Vec3::Zero();
  Vec3 wrist = Vec3::Zero();
  Rotation ee_rot;       // end-effector rotation, copied to the human wrist
  double gripper = 0.0;  // openness in [0, 1]

  bool operator==(const ArmRefs&) const = default;
};

struct SessionFrame {
  double t = 0.0;
  RigidPose base;
  RigidPose camera;
  ShoulderPair shoulders;
  ArmRefs left;
  ArmRefs right;

  const ArmRefs& arm(Side side) const { return side == Side::Left ? left : right; }
  ArmRefs& arm(Side side) { return side == Side::Left ? left : right; }
  bool operator==(const SessionFrame& o) const;
};

struct Session {
  double rate_hz = 100.0;
  std::vector<SessionFrame> frames;
};

/// Robot and scene geometry used by the synthetic sessions (SI units).
struct SceneGeometry {
  double shoulder_half_width = 0.18;
  double shoulder_height = 1.10;
  double upper_length = 0.27;
  double forearm_length = 0.29;
  Vec3 catalog_camera = Vec3(0.0, 2.2, 1.1);
  Vec3 therapy_camera = Vec3(0.0, 1.8, 1.2);
};

/// Camera at `position` looking along -y with +z up (local -z is the view
/// direction, local +y is up).
RigidPose front_camera(const Vec3& position);

/// Reflection across the x = 0 plane.
Vec3 mirror_x(const Vec3& p);
Rotation mirror_x(const Rotation& r);

/// The twelve static evaluation poses: 1-3 hands down (forearm forward,
/// straight down, backward), 4-6 hands up, 7 T-pose, 8-11 arms in front,
/// 12 A-pose. Left arm mirrors the right arm.
std::vector<SessionFrame> pose_catalog(const SceneGeometry& scene = {});

/// Indices (0-based) of the catalog poses outside the human joint limits.
inline constexpr std::size_t kHandsDownPoses[] = {0, 1, 2};

/// Elbow flexion exercise: the elbow reference stays put while the wrist
/// sweeps 0 -> 90 -> 0 degrees about it. duration * rate + 1 frames.
std::vector<SessionFrame> therapy_trajectory(double duration_s, double rate_hz,
                                             const SceneGeometry& scene = {});

/// Hinge excursion of the therapy trajectory at time t.
double therapy_hinge(double t, double duration_s);

// ---------------------------------------------------------------------------
// Low-pass filter

struct FilterState {
  RigidPose smoothed;
  double beta = 0.2;
};

/// One exponential smoothing step: lerp on position, slerp on rotation.
/// Returns the new state; the filtered output is `state.smoothed`.
FilterState ema_filter(const FilterState& state, const RigidPose& raw);

// ---------------------------------------------------------------------------
// Text codec
//
// Header:  AVTR 1 <rate_hz>
// Frame:   t  base(px py pz qw qx qy qz)  cam(7)  shoulderL(3) shoulderR(3)
//          then for L and R: elbow(3) wrist(3) ee_rot(qw qx qy qz) gripper
// 43 space-separated numbers per frame, shortest round-trip formatting.

inline constexpr int kSessionVersion = 1;
inline constexpr std::size_t kFrameFields = 43;

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class UnsupportedVersion : public ParseError {
 public:
  UnsupportedVersion(std::size_t line, int version);
};

std::string format_number(double v);
std::string format_header(double rate_hz);
std::string format_frame(const SessionFrame& frame);

/// Parses a header line and returns the rate.
double parse_header(std::string_view line, std::size_t line_no = 1);
SessionFrame parse_frame(std::string_view line, std::size_t line_no);

void write_session(std::ostream& out, const Session& session);
void write_session(const std::filesystem::path& path, const Session& session);
Session read_session(std::istream& in);
/// Throws std::runtime_error naming the path when it cannot be opened.
Session read_session(const std::filesystem::path& path);

}  // namespace avatar
