#include "avatar/batch.hpp"

#include <exception>

#include "avatar/metrics.hpp"

namespace avatar {

ArmPair aligned_arms(const ModelGeometry& geometry, const ShoulderPair& robot_shoulders) {
  ArmPair arms{make_arm(geometry, Side::Left), make_arm(geometry, Side::Right)};
  const BodyAlignment body = align_body({arms.left.shoulder, arms.right.shoulder}, robot_shoulders);
  arms.left = body.apply(arms.left);
  arms.right = body.apply(arms.right);
  return arms;
}

FrameSolution onia_frame(const ModelGeometry& geometry, const SessionFrame& frame, const OniaParams& params) {
  auto [sol, seconds] = timed([&] {
    const ArmPair arms = aligned_arms(geometry, frame.shoulders);
    return FrameSolution{onia_solve(arms.left, frame.left, params), onia_solve(arms.right, frame.right, params), 0.0};
  });
  sol.seconds = seconds;
  return sol;
}

std::vector<FrameSolution> onia_batch_serial(const ModelGeometry& geometry, std::span<const SessionFrame> frames,
                                             const OniaParams& params) {
  std::vector<FrameSolution> out;
  out.reserve(frames.size());
  for (const SessionFrame& f : frames) out.push_back(onia_frame(geometry, f, params));
  return out;
}

std::vector<FrameSolution> onia_batch(const ModelGeometry& geometry, std::span<const SessionFrame> frames,
                                      const OniaParams& params) {
  std::vector<FrameSolution> out(frames.size());
  std::vector<std::exception_ptr> errors(frames.size());
  const auto n = static_cast<std::ptrdiff_t>(frames.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      out[i] = onia_frame(geometry, frames[i], params);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  // Report the same frame the serial loop would have failed on.
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

}  // namespace avatar
