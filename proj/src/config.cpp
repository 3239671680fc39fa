#include "avatar/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <istream>
#include <sstream>

namespace avatar {

namespace {

double to_double(const std::string& key, const std::string& text) {
  std::istringstream in(text);
  std::string word;
  if (!(in >> word)) throw ConfigError(key + ": missing value");
  std::string extra;
  if (in >> extra) throw ConfigError(key + ": expected one number, got '" + text + "'");
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(word.data(), word.data() + word.size(), v);
  if (ec != std::errc() || ptr != word.data() + word.size()) throw ConfigError(key + ": not a number: '" + word + "'");
  return v;
}

int to_int(const std::string& key, const std::string& text) {
  const double v = to_double(key, text);
  if (v != static_cast<int>(v)) throw ConfigError(key + ": expected an integer, got '" + text + "'");
  return static_cast<int>(v);
}

Vec3 to_vec(const std::string& key, const std::string& text) {
  std::istringstream in(text);
  std::string w[3];
  Vec3 out;
  for (int i = 0; i < 3; ++i) {
    if (!(in >> w[i])) throw ConfigError(key + ": expected three numbers, got '" + text + "'");
    out[i] = to_double(key, w[i]);
  }
  std::string extra;
  if (in >> extra) throw ConfigError(key + ": expected three numbers, got '" + text + "'");
  return out;
}

using Setter = std::function<void(Config&, const std::string& key, const std::string& value)>;


template <class F>
Setter number(F field) {
  return [field](Config& c, const std::string& k, const std::string& v) { field(c) = to_double(k, v); };
}

template <class F>
Setter degrees(F field) {
  return [field](Config& c, const std::string& k, const std::string& v) { field(c) = deg(to_double(k, v)); };
}

template <class F>
Setter integer(F field) {
  return [field](Config& c, const std::string& k, const std::string& v) { field(c) = to_int(k, v); };
}

template <class F>
Setter vector(F field) {
  return [field](Config& c, const std::string& k, const std::string& v) { field(c) = to_vec(k, v); };
}

#define FIELD(expr) [](Config& c) -> auto& { return c.expr; }

const std::vector<std::pair<std::string, Setter>>& table() {
  static const std::vector<std::pair<std::string, Setter>> t = {
      {"model.shoulder_half_width", number(FIELD(model.shoulder_half_width))},
      {"model.shoulder_height", number(FIELD(model.shoulder_height))},
      {"model.upper_length", number(FIELD(model.upper_length))},
      {"model.forearm_length", number(FIELD(model.forearm_length))},
      {"model.elbow_axis", vector(FIELD(model.left_elbow_axis))},
      {"model.wrist_normal", vector(FIELD(model.wrist_normal))},
      {"limits.swing_max_deg", degrees(FIELD(model.limits.swing_max))},
      {"limits.twist_min_deg", degrees(FIELD(model.limits.twist_min))},
      {"limits.twist_max_deg", degrees(FIELD(model.limits.twist_max))},
      {"limits.hinge_min_deg", degrees(FIELD(model.limits.hinge_min))},
      {"limits.hinge_max_deg", degrees(FIELD(model.limits.hinge_max))},
      {"limits.stretch_min", number(FIELD(model.limits.stretch_min))},
      {"limits.stretch_max", number(FIELD(model.limits.stretch_max))},
      {"scene.shoulder_half_width", number(FIELD(scene.shoulder_half_width))},
      {"scene.shoulder_height", number(FIELD(scene.shoulder_height))},
      {"scene.upper_length", number(FIELD(scene.upper_length))},
      {"scene.forearm_length", number(FIELD(scene.forearm_length))},
      {"scene.catalog_camera", vector(FIELD(scene.catalog_camera))},
      {"scene.therapy_camera", vector(FIELD(scene.therapy_camera))},
      {"gesture.closed_deg", degrees(FIELD(gesture.angle_closed))},
      {"gesture.open_deg", degrees(FIELD(gesture.angle_open))},
      {"onia.elbow_twist_ratio", number(FIELD(onia.elbow_twist_ratio))},
      {"jacobian.damping", number(FIELD(jacobian.damping))},
      {"jacobian.elbow_weight", number(FIELD(jacobian.elbow_weight))},
      {"jacobian.max_step", number(FIELD(jacobian.max_step))},
      {"jacobian.max_iters", integer(FIELD(jacobian.max_iters))},
      {"jacobian.tolerance", number(FIELD(jacobian.tolerance))},
      {"jacobian.initial_hinge_deg", degrees(FIELD(jacobian.initial_hinge))},
      {"fabrik.wrist_tolerance", number(FIELD(fabrik.wrist_tolerance))},
      {"fabrik.max_elbow_tolerance", number(FIELD(fabrik.max_elbow_tolerance))},
      {"fabrik.tolerance_resolution", number(FIELD(fabrik.tolerance_resolution))},
      {"fabrik.initial_iterations", integer(FIELD(fabrik.initial_iterations))},
      {"fabrik.refine_iterations", integer(FIELD(fabrik.refine_iterations))},
      {"render.width", integer(FIELD(render.width))},
      {"render.height", integer(FIELD(render.height))},
      {"render.fov_deg", degrees(FIELD(render.fov_y))},
      {"render.near_plane", number(FIELD(render.near_plane))},
      {"render.depth_slack", number(FIELD(render.depth_slack))},
      {"render.samples", integer(FIELD(render.samples))},
      {"capsule.robot", number(FIELD(capsules.robot))},
      {"capsule.upper_arm", number(FIELD(capsules.upper_arm))},
      {"capsule.forearm", number(FIELD(capsules.forearm))},
      {"filter.beta", number(FIELD(filter_beta))},
  };
  return t;
}

#undef FIELD

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}

}  // namespace

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const auto& [k, _] : table()) keys.push_back(k);
  return keys;
}

void set_config_value(Config& config, const std::string& key, const std::string& value) {
  for (const auto& [k, set] : table()) {
    if (k == key) {
      set(config, key, value);
      return;
    }
  }
  throw ConfigError("unknown key '" + key + "'");
}

void Config::validate() const {
  try {
    model.limits.validate();
    render.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  require(model.upper_length > 0 && model.forearm_length > 0, "model: segment lengths must be positive");
  require(model.shoulder_half_width > 0, "model.shoulder_half_width must be positive");
  require(model.left_elbow_axis.norm() > 0 && model.wrist_normal.norm() > 0, "model: axes must be nonzero");
  require(!model.left_elbow_axis.cross(kUnitX).isZero(1e-12), "model.elbow_axis must not lie along the arm");
  require(scene.upper_length > 0 && scene.forearm_length > 0 && scene.shoulder_half_width > 0,
          "scene: lengths must be positive");
  require(onia.elbow_twist_ratio >= 0 && onia.elbow_twist_ratio <= 1, "onia.elbow_twist_ratio must be in [0, 1]");
  require(jacobian.damping > 0, "jacobian.damping must be positive");
  require(jacobian.elbow_weight >= 0, "jacobian.elbow_weight must be non-negative");
  require(jacobian.max_step > 0, "jacobian.max_step must be positive");
  require(jacobian.max_iters >= 1, "jacobian.max_iters must be at least 1");
  require(jacobian.tolerance > 0, "jacobian.tolerance must be positive");
  require(fabrik.wrist_tolerance >= 0 && fabrik.max_elbow_tolerance > 0 && fabrik.tolerance_resolution > 0,
          "fabrik: tolerances must be positive");
  require(fabrik.initial_iterations >= 1 && fabrik.refine_iterations >= 1, "fabrik: iteration counts must be >= 1");
  require(capsules.robot > 0 && capsules.upper_arm > 0 && capsules.forearm > 0, "capsule radii must be positive");
  require(filter_beta > 0 && filter_beta <= 1, "filter.beta must be in (0, 1]");
}

Config parse_config(std::istream& in, Config base, const std::string& source) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = source + ":" + std::to_string(line_no) + ": ";
    if (eq == std::string::npos) throw ConfigError(where + "expected key = value");
    try {
      set_config_value(base, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    } catch (const ConfigError& e) {
      throw ConfigError(where + e.what());
    }
  }
  base.validate();
  return base;
}

Config load_config(const std::filesystem::path& path, Config base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  return parse_config(in, std::move(base), path.string());
}

}  // namespace avatar
