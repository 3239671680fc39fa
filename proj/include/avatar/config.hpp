#pragma once

// Plain-text configuration: one `key = value` per line, `#` starts a comment,
// vectors are three space-separated numbers. Lengths in meters, angles in
// degrees (keys ending in _deg). Unknown keys are rejected.

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "avatar/armmodel.hpp"
#include "avatar/fabrik.hpp"
#include "avatar/jacobian.hpp"
#include "avatar/metrics.hpp"
#include "avatar/onia.hpp"
#include "avatar/session.hpp"

namespace avatar {

struct Config {
  ModelGeometry model;
  SceneGeometry scene;
  GestureMap gesture;
  OniaParams onia;
  JacobianParams jacobian;
  FabrikParams fabrik;
  RenderParams render;
  CapsuleRadii capsules;
  double filter_beta = 0.2;

  /// Throws ConfigError naming the first bad value.
  void validate() const;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Every accepted key, in documentation order.
std::vector<std::string> config_keys();

void set_config_value(Config& config, const std::string& key, const std::string& value);

/// Applies the lines of `in` on top of `base`. `source` names the input in errors.
Config parse_config(std::istream& in, Config base = {}, const std::string& source = "config");
Config load_config(const std::filesystem::path& path, Config base = {});

}  // namespace avatar
