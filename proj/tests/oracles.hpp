#pragma once

// Independent reference computations and random generators for the tests.
// Nothing here calls into the library's rotation code: rotations are built
// from Rodrigues matrices so the checks do not share failure modes with the
// quaternion implementation.

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "avatar/armmodel.hpp"
#include "avatar/geom.hpp"
#include "avatar/jacobian.hpp"
#include "avatar/session.hpp"

namespace oracle {

using avatar::Vec3;
using Mat3 = Eigen::Matrix3d;

inline Mat3 skew(const Vec3& v) {
  Mat3 m;
  m << 0, -v.z(), v.y(), v.z(), 0, -v.x(), -v.y(), v.x(), 0;
  return m;
}

/// Rodrigues formula, axis need not be unit.
inline Mat3 rodrigues(const Vec3& axis, double angle) {
  const Vec3 k = axis.normalized();
  const Mat3 K = skew(k);
  return Mat3::Identity() + std::sin(angle) * K + (1.0 - std::cos(angle)) * K * K;
}

inline Mat3 rodrigues(const Vec3& rotvec) {
  const double a = rotvec.norm();
  if (a == 0.0) return Mat3::Identity();
  return rodrigues(rotvec, a);
}

/// Chained forward kinematics written out step by step.
struct Chain {
  Vec3 elbow;
  Vec3 wrist;
};

inline Chain chain(const avatar::HumanArmModel& m, const avatar::ArmPose& p) {
  const Mat3 rs = p.shoulder.matrix();
  const Mat3 re = p.elbow.matrix();
  Vec3 upper = m.upper;
  upper *= p.upper_stretch;
  Vec3 fore = m.fore;
  fore *= p.forearm_stretch;
  Chain c;
  c.elbow = m.shoulder + rs * upper;
  c.wrist = c.elbow + re * fore;
  return c;
}

/// Side-on orthographic view of a robot capsule (length L, radius R) and an
/// identical human capsule shifted sideways by R in the image plane. The two
/// silhouettes are stadiums overlapping in a band of width R along the
/// straight part plus two half lenses at the caps.
inline double lens_area(double R, double d) {
  return 2.0 * R * R * std::acos(d / (2.0 * R)) - 0.5 * d * std::sqrt(4.0 * R * R - d * d);
}

inline double stadium_area(double L, double R) { return 2.0 * R * L + M_PI * R * R; }

/// Human capsule pulled toward the camera: every overlapping pixel counts.
inline double half_cover_in_front(double L, double R) { return (R * L + lens_area(R, R)) / stadium_area(L, R); }

/// Both capsules at the same depth and no slack: a pixel counts only where the
/// human surface is nearer, i.e. on the human side of the bisector between
/// the two axes. That keeps half the band and half of each lens.
inline double half_cover_same_depth(double L, double R) {
  return (0.5 * R * L + 0.5 * lens_area(R, R)) / stadium_area(L, R);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(gen_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(gen_); }

  Vec3 unit() {
    std::normal_distribution<double> n;
    Vec3 v;
    do {
      v = Vec3(n(gen_), n(gen_), n(gen_));
    } while (v.norm() < 1e-6);
    return v.normalized();
  }

  Vec3 vec(double scale) { return Vec3(uniform(-scale, scale), uniform(-scale, scale), uniform(-scale, scale)); }

  avatar::Rotation rotation() {
    std::normal_distribution<double> n;
    double w, x, y, z;
    do {
      w = n(gen_), x = n(gen_), y = n(gen_), z = n(gen_);
    } while (w * w + x * x + y * y + z * z < 1e-6);
    return avatar::Rotation::from_wxyz(w, x, y, z);
  }

  std::mt19937_64& engine() { return gen_; }

 private:
  std::mt19937_64 gen_;
};

// Random model placement and references with clearly bent reference arms.
struct Case {
  avatar::HumanArmModel model;
  avatar::ArmRefs refs;
};

inline Case random_case(Rng& rng) {
  Case c;
  const avatar::BodyAlignment body{rng.vec(1.0), rng.rotation()};
  c.model = body.apply(avatar::make_arm({}, rng.integer(0, 1) ? avatar::Side::Left : avatar::Side::Right));
  Vec3 u, f;
  do {
    u = rng.unit() * rng.uniform(0.15, 0.4);
    f = rng.unit() * rng.uniform(0.15, 0.4);
  } while (u.normalized().cross(f.normalized()).norm() < 1e-3);
  c.refs.elbow = c.model.shoulder + u;
  c.refs.wrist = c.refs.elbow + f;
  c.refs.ee_rot = rng.rotation();
  return c;
}

// Smallest angle between the rotated hinge axis and the reference hinge axis
// over a uniform sweep of twists about the reference upper arm. Every
// rotation that puts the elbow on its reference is the oracle swing followed
// by one of these twists.
inline double grid_minimum(const avatar::HumanArmModel& m, const avatar::ArmRefs& refs, int steps) {
  const Vec3 du = refs.elbow - m.shoulder;
  const Vec3 df = refs.wrist - refs.elbow;
  const Vec3 ar = du.cross(df);
  const Vec3 n = m.upper.cross(du);
  const Eigen::Matrix3d swing = oracle::rodrigues(n, std::atan2(n.norm(), m.upper.dot(du)));
  const Vec3 a0 = swing * m.elbow_axis;
  double best = M_PI;
  for (int k = 0; k < steps; ++k) {
    const double phi = 2.0 * M_PI * k / steps;
    const Vec3 a = oracle::rodrigues(du, phi) * a0;
    best = std::min(best, std::acos(std::clamp(a.normalized().dot(ar.normalized()), -1.0, 1.0)));
  }
  return best;
}

// Jacobian parameter vectors strictly inside the joint limits.
inline avatar::Vec6 random_theta(Rng& rng, const avatar::JointConstraints& c, double margin = 0.05) {
  avatar::Vec6 t;
  const double swing = rng.uniform(0.0, c.swing_max - margin);
  const double dir = rng.uniform(-M_PI, M_PI);
  t[avatar::kSwingA] = swing * std::cos(dir);
  t[avatar::kSwingB] = swing * std::sin(dir);
  t[avatar::kTwist] = rng.uniform(c.twist_min + margin, c.twist_max - margin);
  t[avatar::kHinge] = rng.uniform(c.hinge_min + margin, c.hinge_max - margin);
  t[avatar::kUpperStretch] = rng.uniform(c.stretch_min + margin, c.stretch_max - margin);
  t[avatar::kForeStretch] = rng.uniform(c.stretch_min + margin, c.stretch_max - margin);
  return t;
}

// Positions straight from the parameter definition, no library rotations.
inline avatar::Vec6 stacked_oracle(const avatar::HumanArmModel& m, const avatar::Vec6& t, double we) {
  const Vec3 axis = m.upper.normalized();
  const Vec3 sa = (m.elbow_axis - m.elbow_axis.dot(axis) * axis).normalized();
  const Vec3 sb = axis.cross(sa);
  const Eigen::Matrix3d rs =
      rodrigues(t[avatar::kSwingA] * sa + t[avatar::kSwingB] * sb) * rodrigues(axis, t[avatar::kTwist]);
  const Eigen::Matrix3d re = rs * rodrigues(m.elbow_axis, t[avatar::kHinge]);
  const Vec3 elbow = m.shoulder + rs * (t[avatar::kUpperStretch] * m.upper);
  const Vec3 wrist = elbow + re * (t[avatar::kForeStretch] * m.fore);
  avatar::Vec6 out;
  out << wrist, we * elbow;
  return out;
}

}  // namespace oracle
