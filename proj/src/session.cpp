#include "avatar/session.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace avatar {

bool SessionFrame::operator==(const SessionFrame& o) const {
  return t == o.t && base == o.base && camera == o.camera && shoulders.left == o.shoulders.left &&
         shoulders.right == o.shoulders.right && left == o.left && right == o.right;
}

RigidPose front_camera(const Vec3& position) {
  Eigen::Matrix3d m;
  // Columns: camera x (image right), y (image up), z (backwards) in world.
  m.col(0) = -kUnitX;
  m.col(1) = kUnitZ;
  m.col(2) = kUnitY;
  return {position, Rotation::from_matrix(m)};
}

Vec3 mirror_x(const Vec3& p) { return {-p.x(), p.y(), p.z()}; }

Rotation mirror_x(const Rotation& r) { return Rotation::from_wxyz(r.w(), r.x(), -r.y(), -r.z()); }

namespace {

struct CatalogEntry {
  Vec3 upper_dir;
  Vec3 fore_dir;
  double wrist_twist_deg;
  double gripper;
};

// Right-arm directions; the left arm is the mirror image.
const std::array<CatalogEntry, 12> kCatalog = {{
    {{0, 0, -1}, {0, 1, 0}, 0.0, 0.0},               // 1 hands down, forearm forward
    {{0, 0, -1}, {0, 0, -1}, 0.0, 0.1},              // 2 hands down, straight
    {{0, 0, -1}, {0, -1, 0}, 0.0, 0.2},              // 3 hands down, forearm backward
    {{1, 0, 0.25}, {0, 0.45, 1}, 20.0, 0.3},         // 4 hands up, tilted forward
    {{1, 0, 0.25}, {0, 0, 1}, 0.0, 0.4},             // 5 hands up, vertical
    {{1, 0, 0.25}, {0, -0.35, 1}, -20.0, 0.5},       // 6 hands up, tilted backward
    {{1, 0, 0}, {1, 0, 0}, 0.0, 0.6},                // 7 T-pose
    {{0.5, 1, 0}, {-0.4, 1, 0.6}, 30.0, 0.7},        // 8 arms in front
    {{0.55, 1, -0.35}, {0.1, 1, 0.5}, 10.0, 0.8},    // 9
    {{0.6, 1, 0.25}, {-0.25, 0.55, 1}, -15.0, 0.9},  // 10
    {{0.45, 0.85, -0.55}, {-0.4, 0.55, 0.8}, 25.0, 1.0},  // 11
    {{1, 0, -1}, {1, 0, -1}, 0.0, 0.5},              // 12 A-pose
}};

ShoulderPair robot_shoulders(const SceneGeometry& s) {
  return {Vec3(-s.shoulder_half_width, 0.0, s.shoulder_height), Vec3(s.shoulder_half_width, 0.0, s.shoulder_height)};
}

// Robot hand follows the forearm, then twists about it.
Rotation hand_rotation(const Vec3& fore_dir, double twist_deg) {
  return Rotation::axis_angle(fore_dir, deg(twist_deg)) * rot_from_to(kUnitX, fore_dir);
}

ArmRefs right_refs(const SceneGeometry& s, const Vec3& shoulder, const Vec3& upper_dir, const Vec3& fore_dir,
                   double twist_deg, double gripper) {
  ArmRefs r;
  r.elbow = shoulder + s.upper_length * upper_dir.normalized();
  r.wrist = r.elbow + s.forearm_length * fore_dir.normalized();
  r.ee_rot = hand_rotation(fore_dir.normalized(), twist_deg);
  r.gripper = gripper;
  return r;
}

ArmRefs mirrored(const ArmRefs& r) {
  return {mirror_x(r.elbow), mirror_x(r.wrist), mirror_x(r.ee_rot), r.gripper};
}

}  // namespace

std::vector<SessionFrame> pose_catalog(const SceneGeometry& scene) {
  std::vector<SessionFrame> out;
  out.reserve(kCatalog.size());
  const ShoulderPair shoulders = robot_shoulders(scene);
  for (std::size_t i = 0; i < kCatalog.size(); ++i) {
    const CatalogEntry& e = kCatalog[i];
    SessionFrame f;
    f.t = static_cast<double>(i);
    f.camera = front_camera(scene.catalog_camera);
    f.shoulders = shoulders;
    f.right = right_refs(scene, shoulders.right, e.upper_dir, e.fore_dir, e.wrist_twist_deg, e.gripper);
    f.left = mirrored(f.right);
    out.push_back(f);
  }
  return out;
}

double therapy_hinge(double t, double duration_s) {
  const double s = std::sin(M_PI * t / duration_s);
  return deg(90.0) * s * s;
}

std::vector<SessionFrame> therapy_trajectory(double duration_s, double rate_hz, const SceneGeometry& scene) {
  if (!(duration_s > 0.0) || !(rate_hz > 0.0) || !std::isfinite(duration_s * rate_hz)) {
    throw std::invalid_argument("therapy_trajectory: duration and rate must be positive");
  }
  const auto n = static_cast<std::size_t>(std::llround(duration_s * rate_hz));
  const ShoulderPair shoulders = robot_shoulders(scene);
  const Vec3 upper_dir = Vec3(0.35, 1.0, -0.45).normalized();
  const Vec3 up = project_perp(kUnitZ, upper_dir).normalized();
  const Vec3 elbow = shoulders.right + scene.upper_length * upper_dir;

  std::vector<SessionFrame> out;
  out.reserve(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    SessionFrame f;
    f.t = i == n ? duration_s : static_cast<double>(i) / rate_hz;
    const double hinge = therapy_hinge(f.t, duration_s);
    const Vec3 fore_dir = std::cos(hinge) * upper_dir + std::sin(hinge) * up;
    f.camera = front_camera(scene.therapy_camera);
    f.shoulders = shoulders;
    f.right.elbow = elbow;
    f.right.wrist = elbow + scene.forearm_length * fore_dir;
    f.right.ee_rot = hand_rotation(fore_dir, 0.0);
    f.right.gripper = 0.5;
    f.left = mirrored(f.right);
    out.push_back(f);
  }
  return out;
}

FilterState ema_filter(const FilterState& state, const RigidPose& raw) {
  if (!(state.beta > 0.0 && state.beta <= 1.0)) throw std::invalid_argument("ema_filter: beta must be in (0, 1]");
  FilterState next = state;
  if (state.beta == 1.0) {
    next.smoothed = raw;
    return next;
  }
  next.smoothed.position = state.smoothed.position + state.beta * (raw.position - state.smoothed.position);
  next.smoothed.rotation = slerp(state.smoothed.rotation, raw.rotation, state.beta);
  return next;
}

// ---------------------------------------------------------------------------

ParseError::ParseError(std::size_t line, const std::string& what)
    : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

UnsupportedVersion::UnsupportedVersion(std::size_t line, int version)
    : ParseError(line, "unsupported session version " + std::to_string(version)) {}

std::string format_number(double v) {
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

std::string format_header(double rate_hz) {
  return "AVTR " + std::to_string(kSessionVersion) + " " + format_number(rate_hz);
}

namespace {

void put(std::string& s, double v) {
  if (!s.empty()) s.push_back(' ');
  s += format_number(v);
}

void put(std::string& s, const Vec3& v) {
  put(s, v.x());
  put(s, v.y());
  put(s, v.z());
}

void put(std::string& s, const Rotation& r) {
  put(s, r.w());
  put(s, r.x());
  put(s, r.y());
  put(s, r.z());
}

void put(std::string& s, const ArmRefs& a) {
  put(s, a.elbow);
  put(s, a.wrist);
  put(s, a.ee_rot);
  put(s, a.gripper);
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

double to_double(std::string_view tok, std::size_t line_no) {
  double v = 0.0;
  const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size() || !std::isfinite(v)) {
    throw ParseError(line_no, "bad number '" + std::string(tok) + "'");
  }
  return v;
}

class FieldReader {
 public:
  FieldReader(const std::vector<std::string_view>& toks, std::size_t line_no) : toks_(toks), line_(line_no) {}
  double num() { return to_double(toks_[pos_++], line_); }
  Vec3 vec() {
    const double x = num();
    const double y = num();
    const double z = num();
    return {x, y, z};
  }
  Rotation rot() {
    const double w = num();
    const double x = num();
    const double y = num();
    const double z = num();
    try {
      return Rotation::from_wxyz(w, x, y, z);
    } catch (const std::invalid_argument&) {
      throw ParseError(line_, "zero quaternion");
    }
  }
  ArmRefs arm() {
    ArmRefs a;
    a.elbow = vec();
    a.wrist = vec();
    a.ee_rot = rot();
    a.gripper = num();
    return a;
  }

 private:
  const std::vector<std::string_view>& toks_;
  std::size_t line_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string format_frame(const SessionFrame& f) {
  std::string s;
  s.reserve(900);
  put(s, f.t);
  put(s, f.base.position);
  put(s, f.base.rotation);
  put(s, f.camera.position);
  put(s, f.camera.rotation);
  put(s, f.shoulders.left);
  put(s, f.shoulders.right);
  put(s, f.left);
  put(s, f.right);
  return s;
}

double parse_header(std::string_view line, std::size_t line_no) {
  const auto toks = split_ws(line);
  if (toks.empty() || toks[0] != "AVTR") throw ParseError(line_no, "missing AVTR header");
  if (toks.size() != 3) throw ParseError(line_no, "header needs version and rate");
  int version = 0;
  const auto res = std::from_chars(toks[1].data(), toks[1].data() + toks[1].size(), version);
  if (res.ec != std::errc{} || res.ptr != toks[1].data() + toks[1].size()) {
    throw ParseError(line_no, "bad version '" + std::string(toks[1]) + "'");
  }
  if (version != kSessionVersion) throw UnsupportedVersion(line_no, version);
  const double rate = to_double(toks[2], line_no);
  if (!(rate > 0.0)) throw ParseError(line_no, "rate must be positive");
  return rate;
}

SessionFrame parse_frame(std::string_view line, std::size_t line_no) {
  const auto toks = split_ws(line);
  if (toks.size() != kFrameFields) {
    throw ParseError(line_no, "expected " + std::to_string(kFrameFields) + " fields, got " + std::to_string(toks.size()));
  }
  FieldReader r(toks, line_no);
  SessionFrame f;
  f.t = r.num();
  f.base.position = r.vec();
  f.base.rotation = r.rot();
  f.camera.position = r.vec();
  f.camera.rotation = r.rot();
  f.shoulders.left = r.vec();
  f.shoulders.right = r.vec();
  f.left = r.arm();
  f.right = r.arm();
  return f;
}

void write_session(std::ostream& out, const Session& session) {
  out << format_header(session.rate_hz) << '\n';
  for (const auto& f : session.frames) out << format_frame(f) << '\n';
}

void write_session(const std::filesystem::path& path, const Session& session) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  write_session(out, session);
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

Session read_session(std::istream& in) {
  Session s;
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw ParseError(1, "empty session");
  ++line_no;
  s.rate_hz = parse_header(line, line_no);
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    SessionFrame f = parse_frame(line, line_no);
    if (!s.frames.empty() && f.t < s.frames.back().t) throw ParseError(line_no, "timestamp decreases");
    s.frames.push_back(std::move(f));
  }
  return s;
}

Session read_session(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open session file " + path.string());
  return read_session(in);
}

}  // namespace avatar
