// Serial reference kernels against their OpenMP versions, plus per-solve
// cost of each solver on the therapy session.

#include <benchmark/benchmark.h>

#include "avatar/batch.hpp"
#include "avatar/fabrik.hpp"
#include "avatar/jacobian.hpp"
#include "avatar/metrics.hpp"

using namespace avatar;

namespace {

struct OverlayScene {
  std::vector<Capsule> robot;
  std::vector<Capsule> human;
  RigidPose camera;
};

OverlayScene t_pose_scene() {
  const SessionFrame f = pose_catalog()[6];
  const HumanArmModel m = aligned_arms(ModelGeometry{}, f.shoulders).right;
  return {robot_capsules(f.shoulders.right, f.right), human_capsules(m, onia_solve(m, f.right).pose), f.camera};
}

RenderParams render(int res) {
  RenderParams p;
  p.width = p.height = res;
  return p;
}

void BM_OverlaySerial(benchmark::State& state) {
  const OverlayScene s = t_pose_scene();
  const RenderParams p = render(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(overlay_count_serial(s.robot, s.human, s.camera, p));
}
BENCHMARK(BM_OverlaySerial)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);

void BM_OverlayOpenMP(benchmark::State& state) {
  const OverlayScene s = t_pose_scene();
  const RenderParams p = render(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(overlay_count(s.robot, s.human, s.camera, p));
}
BENCHMARK(BM_OverlayOpenMP)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);

const std::vector<SessionFrame>& therapy() {
  static const auto frames = therapy_trajectory(20.0, 100.0);
  return frames;
}

void BM_OniaBatchSerial(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(onia_batch_serial(ModelGeometry{}, therapy()));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(therapy().size()));
}
BENCHMARK(BM_OniaBatchSerial)->Unit(benchmark::kMillisecond);

void BM_OniaBatchOpenMP(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(onia_batch(ModelGeometry{}, therapy()));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(therapy().size()));
}
BENCHMARK(BM_OniaBatchOpenMP)->Unit(benchmark::kMillisecond);

// One arm, every frame of the session in order, stateful solvers warm.
template <class Solve>
void solve_session(benchmark::State& state, Solve&& solve) {
  const auto& frames = therapy();
  const HumanArmModel m = aligned_arms(ModelGeometry{}, frames[0].shoulders).right;
  for (auto _ : state) {
    for (const SessionFrame& f : frames) benchmark::DoNotOptimize(solve(m, f.right));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(frames.size()));
}

void BM_SolveOnia(benchmark::State& state) {
  solve_session(state, [](const HumanArmModel& m, const ArmRefs& r) { return onia_solve(m, r); });
}
BENCHMARK(BM_SolveOnia);

void BM_SolveJacobian(benchmark::State& state) {
  JacobianSolver solver;
  solve_session(state, [&](const HumanArmModel& m, const ArmRefs& r) { return solver.solve(m, r); });
}
BENCHMARK(BM_SolveJacobian);

void BM_SolveFabrik(benchmark::State& state) {
  FabrikSolver solver;
  solve_session(state, [&](const HumanArmModel& m, const ArmRefs& r) { return solver.solve(m, r); });
}
BENCHMARK(BM_SolveFabrik);

}  // namespace

BENCHMARK_MAIN();
