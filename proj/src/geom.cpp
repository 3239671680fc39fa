#include "avatar/geom.hpp"

#include <cmath>
#include <stdexcept>

namespace avatar {

namespace {

constexpr double kParallelSin = 1e-9;

bool is_zero(const Vec3& v) { return !(v.squaredNorm() > 0.0); }

}  // namespace

Rotation Rotation::make(double w, double x, double y, double z) {
  const double n2 = w * w + x * x + y * y + z * z;
  if (!(n2 > 0.0) || !std::isfinite(n2)) {
    throw std::invalid_argument("rotation: quaternion must be finite and nonzero");
  }
  // Already-unit quaternions are kept as is so text round-trips stay exact.
  if (std::abs(n2 - 1.0) > 1e-15) {
    const double inv = 1.0 / std::sqrt(n2);
    w *= inv;
    x *= inv;
    y *= inv;
    z *= inv;
  }
  bool flip = w < 0.0;
  if (w == 0.0) {
    flip = x < 0.0 || (x == 0.0 && (y < 0.0 || (y == 0.0 && z < 0.0)));
  }
  if (flip) {
    w = -w;
    x = -x;
    y = -y;
    z = -z;
  }
  // Normalize -0.0 so equal rotations are bitwise equal.
  return Rotation(w + 0.0, x + 0.0, y + 0.0, z + 0.0);
}

Rotation Rotation::from_wxyz(double w, double x, double y, double z) { return make(w, x, y, z); }

Rotation Rotation::from_quaternion(const Eigen::Quaterniond& q) {
  return make(q.w(), q.x(), q.y(), q.z());
}

Rotation Rotation::from_matrix(const Eigen::Matrix3d& m) {
  return from_quaternion(Eigen::Quaterniond(m));
}

Rotation Rotation::axis_angle(const Vec3& axis, double angle) {
  const double n = axis.norm();
  if (!(n > 0.0)) throw std::invalid_argument("axis_angle: zero axis");
  const double s = std::sin(0.5 * angle) / n;
  return make(std::cos(0.5 * angle), s * axis.x(), s * axis.y(), s * axis.z());
}

Vec3 Rotation::operator*(const Vec3& v) const {
  const Vec3 q = vec();
  const Vec3 t = 2.0 * q.cross(v);
  return v + w_ * t + q.cross(t);
}

Rotation Rotation::operator*(const Rotation& o) const {
  return make(w_ * o.w_ - x_ * o.x_ - y_ * o.y_ - z_ * o.z_,
              w_ * o.x_ + x_ * o.w_ + y_ * o.z_ - z_ * o.y_,
              w_ * o.y_ - x_ * o.z_ + y_ * o.w_ + z_ * o.x_,
              w_ * o.z_ + x_ * o.y_ - y_ * o.x_ + z_ * o.w_);
}

Rotation Rotation::inverse() const { return make(w_, -x_, -y_, -z_); }

double Rotation::angle() const { return 2.0 * std::atan2(vec().norm(), w_); }

Vec3 Rotation::axis() const {
  const Vec3 v = vec();
  const double s = v.norm();
  return s > 0.0 ? Vec3(v / s) : kUnitX;
}

double rotation_distance(const Rotation& a, const Rotation& b) {
  return (a.inverse() * b).angle();
}

Rotation rot_from_to(const Vec3& from, const Vec3& to) {
  if (is_zero(from) || is_zero(to)) throw std::invalid_argument("rot_from_to: zero-length direction");
  const Vec3 a = from.normalized();
  const Vec3 b = to.normalized();
  const Vec3 c = a.cross(b);
  const double s = c.norm();
  const double d = a.dot(b);
  if (s < kParallelSin) {
    if (d > 0.0) return {};
    Vec3 axis = a.cross(kUnitZ);
    if (axis.norm() < 1e-8) axis = a.cross(kUnitX);
    return Rotation::axis_angle(axis, M_PI);
  }
  const double half = 0.5 * std::atan2(s, d);
  const Vec3 v = (std::sin(half) / s) * c;
  return Rotation::from_wxyz(std::cos(half), v.x(), v.y(), v.z());
}

Vec3 project_perp(const Vec3& x, const Vec3& normal) {
  const double n2 = normal.squaredNorm();
  if (!(n2 > 0.0)) throw std::invalid_argument("project_perp: zero normal");
  return x - (x.dot(normal) / n2) * normal;
}

SwingTwist swing_twist(const Rotation& r, const Vec3& axis) {
  if (is_zero(axis)) throw std::invalid_argument("swing_twist: zero axis");
  const Vec3 n = axis.normalized();
  const Vec3 p = r.vec().dot(n) * n;
  const double tn2 = r.w() * r.w() + p.squaredNorm();
  if (tn2 < 1e-24) {
    // Half-turn swing: the twist is undefined, take it as identity.
    return {r, Rotation{}};
  }
  const Rotation twist = Rotation::from_wxyz(r.w(), p.x(), p.y(), p.z());
  return {r * twist.inverse(), twist};
}

double twist_angle(const Rotation& twist, const Vec3& axis) {
  const double s = twist.vec().dot(axis.normalized());
  double a = 2.0 * std::atan2(s, twist.w());
  if (a > M_PI) a -= 2.0 * M_PI;
  if (a <= -M_PI) a += 2.0 * M_PI;
  return a;
}

Rotation rotation_pow(const Rotation& r, double alpha) {
  const Vec3 v = r.vec();
  const double s = v.norm();
  if (s == 0.0) return {};
  const double half = alpha * std::atan2(s, r.w());
  const Vec3 u = (std::sin(half) / s) * v;
  return Rotation::from_wxyz(std::cos(half), u.x(), u.y(), u.z());
}

double angle_between(const Vec3& a, const Vec3& b) {
  if (is_zero(a) || is_zero(b)) throw std::invalid_argument("angle_between: zero vector");
  return std::atan2(a.cross(b).norm(), a.dot(b));
}

double signed_angle_about(const Vec3& from, const Vec3& to, const Vec3& axis) {
  const Vec3 n = axis.normalized();
  const Vec3 a = project_perp(from, n);
  const Vec3 b = project_perp(to, n);
  if (is_zero(a) || is_zero(b)) return 0.0;
  return std::atan2(a.cross(b).dot(n), a.dot(b));
}

Rotation exp_map(const Vec3& v) {
  const double theta = v.norm();
  double c, k;
  if (theta < 1e-6) {
    const double t2 = theta * theta;
    c = 1.0 - t2 / 8.0;
    k = 0.5 - t2 / 48.0;
  } else {
    c = std::cos(0.5 * theta);
    k = std::sin(0.5 * theta) / theta;
  }
  return Rotation::from_wxyz(c, k * v.x(), k * v.y(), k * v.z());
}

Vec3 log_map(const Rotation& r) {
  const Vec3 v = r.vec();
  const double s = v.norm();
  if (s < 1e-12) return (2.0 / r.w()) * v;
  return (2.0 * std::atan2(s, r.w()) / s) * v;
}

Rotation slerp(const Rotation& a, const Rotation& b, double t) {
  return a * rotation_pow(a.inverse() * b, t);
}

}  // namespace avatar
