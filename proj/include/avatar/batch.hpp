#pragma once

// Per-frame model setup and the ONIA batch kernel. ONIA is stateless, so
// frames can be solved in any order; the OpenMP version splits frames across
// threads and must agree bit for bit with the serial reference.

#include <span>
#include <vector>

#include "avatar/armmodel.hpp"
#include "avatar/onia.hpp"
#include "avatar/session.hpp"

namespace avatar {

struct ArmPair {
  HumanArmModel left;
  HumanArmModel right;

  const HumanArmModel& arm(Side side) const { return side == Side::Left ? left : right; }
};

/// Both model arms moved onto the robot's shoulder segment.
ArmPair aligned_arms(const ModelGeometry& geometry, const ShoulderPair& robot_shoulders);

struct FrameSolution {
  OniaResult left;
  OniaResult right;
  double seconds = 0.0;  // solve time for both arms, body alignment included

  const OniaResult& arm(Side side) const { return side == Side::Left ? left : right; }
};

FrameSolution onia_frame(const ModelGeometry& geometry, const SessionFrame& frame, const OniaParams& params = {});

std::vector<FrameSolution> onia_batch_serial(const ModelGeometry& geometry, std::span<const SessionFrame> frames,
                                             const OniaParams& params = {});

std::vector<FrameSolution> onia_batch(const ModelGeometry& geometry, std::span<const SessionFrame> frames,
                                      const OniaParams& params = {});

}  // namespace avatar
