#pragma once

// Rotation and projection primitives shared by every solver.
//
// Rotations are unit quaternions stored w-first. Every constructor leaves
// the quaternion normalized and sign-canonical (w >= 0, and for w == 0 the
// first nonzero vector component is positive), so two equal rotations always
// compare equal bit for bit.

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace avatar {

using Vec3 = Eigen::Vector3d;

inline const Vec3 kUnitX{1.0, 0.0, 0.0};
inline const Vec3 kUnitY{0.0, 1.0, 0.0};
inline const Vec3 kUnitZ{0.0, 0.0, 1.0};

class Rotation {
 public:
  Rotation() = default;

  static Rotation from_wxyz(double w, double x, double y, double z);
  static Rotation from_quaternion(const Eigen::Quaterniond& q);
  static Rotation from_matrix(const Eigen::Matrix3d& m);
  /// Rotation by `angle` radians about `axis` (need not be unit; must be nonzero).
  static Rotation axis_angle(const Vec3& axis, double angle);

  double w() const { return w_; }
  double x() const { return x_; }
  double y() const { return y_; }
  double z() const { return z_; }
  Vec3 vec() const { return {x_, y_, z_}; }

  Vec3 operator*(const Vec3& v) const;
  /// Composition; `a * b` applies `b` first.
  Rotation operator*(const Rotation& other) const;
  Rotation inverse() const;

  /// Rotation angle in [0, pi].
  double angle() const;
  /// Unit rotation axis; e_x for the identity.
  Vec3 axis() const;

  Eigen::Quaterniond quaternion() const { return {w_, x_, y_, z_}; }
  Eigen::Matrix3d matrix() const { return quaternion().toRotationMatrix(); }

  bool operator==(const Rotation&) const = default;

 private:
  Rotation(double w, double x, double y, double z) : w_(w), x_(x), y_(y), z_(z) {}
  static Rotation make(double w, double x, double y, double z);

  double w_ = 1.0;
  double x_ = 0.0;
  double y_ = 0.0;
  double z_ = 0.0;
};

/// Geodesic distance between two rotations, radians in [0, pi].
double rotation_distance(const Rotation& a, const Rotation& b);

/// The rotation taking direction `from` onto direction `to` about from x to.
/// Antiparallel inputs rotate by pi about normalize(from x e_z), falling back
/// to normalize(from x e_x) when `from` is (nearly) parallel to e_z.
/// Throws std::invalid_argument on zero-length input.
Rotation rot_from_to(const Vec3& from, const Vec3& to);

/// Component of `x` in the plane normal to `normal`.
/// Throws std::invalid_argument when `normal` is zero.
Vec3 project_perp(const Vec3& x, const Vec3& normal);

struct SwingTwist {
  Rotation swing;
  Rotation twist;
};

/// Splits `r` into swing * twist with the twist about `axis` and the swing
/// axis perpendicular to it.
SwingTwist swing_twist(const Rotation& r, const Vec3& axis);

/// Signed angle of a pure twist about `axis`, in (-pi, pi].
double twist_angle(const Rotation& twist, const Vec3& axis);

/// Fractional power of a rotation: same axis, angle scaled by alpha.
Rotation rotation_pow(const Rotation& r, double alpha);

/// Unsigned angle between two nonzero vectors, in [0, pi].
double angle_between(const Vec3& a, const Vec3& b);

/// Angle from `from` to `to` measured about `axis` after projecting both onto
/// the plane normal to `axis`; zero when either projection vanishes.
double signed_angle_about(const Vec3& from, const Vec3& to, const Vec3& axis);

Rotation exp_map(const Vec3& v);
Vec3 log_map(const Rotation& r);

/// Shortest-arc spherical interpolation from `a` (t = 0) to `b` (t = 1).
Rotation slerp(const Rotation& a, const Rotation& b, double t);

}  // namespace avatar
