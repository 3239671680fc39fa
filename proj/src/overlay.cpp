#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "avatar/metrics.hpp"

namespace avatar {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct CameraRays {
  Vec3 origin;
  Vec3 right;
  Vec3 up;
  Vec3 back;
  double half_h;
  double half_w;
  int width;
  int height;

  // (u, v) in pixel units from the top-left image corner.
  Vec3 ray(double u, double v) const {
    const double x = (2.0 * u / width - 1.0) * half_w;
    const double y = (1.0 - 2.0 * v / height) * half_h;
    return (x * right + y * up - back).normalized();
  }
};

struct SubSample {
  double du, dv;
};

// N-rooks patterns: every sample sits in its own column and row stratum, so
// edges parallel to the pixel grid are resolved n times finer.
constexpr SubSample kCentre[] = {{0.5, 0.5}};
constexpr SubSample kRotatedGrid[] = {{0.125, 0.625}, {0.375, 0.125}, {0.625, 0.875}, {0.875, 0.375}};
constexpr SubSample kQueens8[] = {{0.0625, 0.0625}, {0.1875, 0.5625}, {0.3125, 0.9375}, {0.4375, 0.6875},
                                  {0.5625, 0.3125}, {0.6875, 0.8125}, {0.8125, 0.1875}, {0.9375, 0.4375}};

std::span<const SubSample> sample_pattern(int samples) {
  switch (samples) {
    case 1: return kCentre;
    case 4: return kRotatedGrid;
    case 8: return kQueens8;
  }
  throw std::invalid_argument("render: samples per pixel must be 1, 4 or 8");
}

CameraRays make_rays(const RigidPose& camera, const RenderParams& p) {
  CameraRays c;
  c.origin = camera.position;
  c.right = camera.rotation * kUnitX;
  c.up = camera.rotation * kUnitY;
  c.back = camera.rotation * kUnitZ;
  c.half_h = std::tan(0.5 * p.fov_y);
  c.half_w = c.half_h * static_cast<double>(p.width) / static_cast<double>(p.height);
  c.width = p.width;
  c.height = p.height;
  return c;
}

double nearest_hit(const Vec3& o, const Vec3& d, std::span<const Capsule> caps, double t_min) {
  double best = kInf;
  for (const Capsule& c : caps) best = std::min(best, ray_capsule(o, d, c, t_min));
  return best;
}

// Robot and covered sample counts for one pixel.
OverlayCount classify(const CameraRays& cam, int col, int row, std::span<const SubSample> pattern,
                      std::span<const Capsule> robot, std::span<const Capsule> human, const RenderParams& p) {
  OverlayCount out;
  for (const SubSample& s : pattern) {
    const Vec3 d = cam.ray(col + s.du, row + s.dv);
    const double tr = nearest_hit(cam.origin, d, robot, p.near_plane);
    if (tr == kInf) continue;
    ++out.robot_pixels;
    if (nearest_hit(cam.origin, d, human, p.near_plane) <= tr + p.depth_slack) ++out.covered_pixels;
  }
  return out;
}

void check_inputs(std::span<const Capsule> robot, const RenderParams& p) {
  if (robot.empty()) throw std::invalid_argument("overlay: no robot capsules");
  p.validate();
}

struct PixelRect {
  int col0, col1, row0, row1;  // half-open
};

// Screen rectangle that contains every robot capsule's projection.
PixelRect robot_bounds(const CameraRays& cam, std::span<const Capsule> robot, const RenderParams& p) {
  const PixelRect full{0, p.width, 0, p.height};
  double xmin = kInf, xmax = -kInf, ymin = kInf, ymax = -kInf;
  for (const Capsule& c : robot) {
    const Vec3 lo = c.a.cwiseMin(c.b).array() - c.radius;
    const Vec3 hi = c.a.cwiseMax(c.b).array() + c.radius;
    for (int k = 0; k < 8; ++k) {
      const Vec3 corner((k & 1) ? hi.x() : lo.x(), (k & 2) ? hi.y() : lo.y(), (k & 4) ? hi.z() : lo.z());
      const Vec3 rel = corner - cam.origin;
      const double depth = -rel.dot(cam.back);
      if (depth < p.near_plane) return full;
      const double sx = rel.dot(cam.right) / depth / cam.half_w;
      const double sy = rel.dot(cam.up) / depth / cam.half_h;
      xmin = std::min(xmin, sx);
      xmax = std::max(xmax, sx);
      ymin = std::min(ymin, sy);
      ymax = std::max(ymax, sy);
    }
  }
  auto to_col = [&](double s) { return (s + 1.0) * 0.5 * p.width; };
  auto to_row = [&](double s) { return (1.0 - s) * 0.5 * p.height; };
  PixelRect r;
  r.col0 = static_cast<int>(std::clamp(std::floor(to_col(xmin)) - 1.0, 0.0, double(p.width)));
  r.col1 = static_cast<int>(std::clamp(std::ceil(to_col(xmax)) + 1.0, 0.0, double(p.width)));
  r.row0 = static_cast<int>(std::clamp(std::floor(to_row(ymax)) - 1.0, 0.0, double(p.height)));
  r.row1 = static_cast<int>(std::clamp(std::ceil(to_row(ymin)) + 1.0, 0.0, double(p.height)));
  return r;
}

}  // namespace

void RenderParams::validate() const {
  if (width <= 0 || height <= 0) throw std::invalid_argument("render: resolution must be positive");
  if (!(fov_y > 0.0 && fov_y < M_PI)) throw std::invalid_argument("render: field of view must be in (0, pi)");
  if (!(near_plane >= 0.0)) throw std::invalid_argument("render: near plane must be non-negative");
  if (!(depth_slack >= 0.0)) throw std::invalid_argument("render: depth slack must be non-negative");
  sample_pattern(samples);
}

double ray_capsule(const Vec3& ro, const Vec3& rd, const Capsule& cap, double t_min) {
  const double r2 = cap.radius * cap.radius;
  const Vec3 ba = cap.b - cap.a;
  const Vec3 oa = ro - cap.a;
  const double baba = ba.dot(ba);
  const double bard = ba.dot(rd);
  const double baoa = ba.dot(oa);
  const double rdoa = rd.dot(oa);
  const double oaoa = oa.dot(oa);

  double best = kInf;
  // Cylinder body.
  const double a = baba - bard * bard;
  if (a > 1e-14 * baba) {
    const double b = baba * rdoa - baoa * bard;
    const double c = baba * oaoa - baoa * baoa - r2 * baba;
    const double h = b * b - a * c;
    if (h >= 0.0) {
      const double sq = std::sqrt(h);
      for (double t : {(-b - sq) / a, (-b + sq) / a}) {
        const double y = baoa + t * bard;
        if (t >= t_min && y > 0.0 && y < baba) {
          best = std::min(best, t);
          break;
        }
      }
    }
  }
  // End spheres.
  for (const Vec3* centre : {&cap.a, &cap.b}) {
    const Vec3 oc = ro - *centre;
    const double b = oc.dot(rd);
    const double c = oc.dot(oc) - r2;
    const double h = b * b - c;
    if (h < 0.0) continue;
    const double sq = std::sqrt(h);
    for (double t : {-b - sq, -b + sq}) {
      if (t >= t_min) {
        best = std::min(best, t);
        break;
      }
    }
  }
  return best;
}

Vec3 pixel_ray(const RigidPose& camera, const RenderParams& params, int col, int row) {
  return make_rays(camera, params).ray(col + 0.5, row + 0.5);
}

OverlayCount overlay_count_serial(std::span<const Capsule> robot, std::span<const Capsule> human,
                                  const RigidPose& camera, const RenderParams& params) {
  check_inputs(robot, params);
  const CameraRays cam = make_rays(camera, params);
  const auto pattern = sample_pattern(params.samples);
  OverlayCount out;
  for (int row = 0; row < params.height; ++row) {
    for (int col = 0; col < params.width; ++col) {
      const OverlayCount k = classify(cam, col, row, pattern, robot, human, params);
      out.robot_pixels += k.robot_pixels;
      out.covered_pixels += k.covered_pixels;
    }
  }
  return out;
}

OverlayCount overlay_count(std::span<const Capsule> robot, std::span<const Capsule> human, const RigidPose& camera,
                           const RenderParams& params) {
  check_inputs(robot, params);
  const CameraRays cam = make_rays(camera, params);
  const PixelRect rect = robot_bounds(cam, robot, params);
  const auto pattern = sample_pattern(params.samples);
  std::int64_t robot_px = 0;
  std::int64_t covered_px = 0;
#pragma omp parallel for reduction(+ : robot_px, covered_px) schedule(static)
  for (int row = rect.row0; row < rect.row1; ++row) {
    for (int col = rect.col0; col < rect.col1; ++col) {
      const OverlayCount k = classify(cam, col, row, pattern, robot, human, params);
      robot_px += k.robot_pixels;
      covered_px += k.covered_pixels;
    }
  }
  return {robot_px, covered_px};
}

std::optional<double> overlay_ratio(std::span<const Capsule> robot, std::span<const Capsule> human,
                                    const RigidPose& camera, const RenderParams& params) {
  return overlay_count(robot, human, camera, params).ratio();
}

}  // namespace avatar
