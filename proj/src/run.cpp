#include "avatar/run.hpp"

#include <algorithm>
#include <fstream>
#include <memory>
#include <ostream>

#include "avatar/batch.hpp"
#include "avatar/fabrik.hpp"
#include "avatar/jacobian.hpp"
#include "avatar/metrics.hpp"
#include "avatar/onia.hpp"

namespace avatar {

const char* solver_name(SolverKind kind) {
  switch (kind) {
    case SolverKind::Onia: return "onia";
    case SolverKind::Jacobian: return "jacobian";
    case SolverKind::Fabrik: return "fabrik";
  }
  return "?";
}

std::vector<SolverKind> parse_solvers(const std::string& name) {
  if (name == "all") return {SolverKind::Onia, SolverKind::Jacobian, SolverKind::Fabrik};
  if (name == "onia") return {SolverKind::Onia};
  if (name == "jacobian") return {SolverKind::Jacobian};
  if (name == "fabrik") return {SolverKind::Fabrik};
  throw InputError("unknown solver '" + name + "' (expected onia, jacobian, fabrik or all)");
}

namespace {

struct Outcome {
  ArmPose pose;
  bool degenerate = false;
  bool converged = true;
};

class ArmSolver {
 public:
  virtual ~ArmSolver() = default;
  virtual Outcome solve(const HumanArmModel& model, const ArmRefs& refs) = 0;
  virtual void reset() {}
  virtual bool stateful() const { return true; }
};

class OniaArm : public ArmSolver {
 public:
  explicit OniaArm(OniaParams p) : params_(p) {}
  Outcome solve(const HumanArmModel& model, const ArmRefs& refs) override {
    const OniaResult r = onia_solve(model, refs, params_);
    return {r.pose, r.degenerate_elbow_axis, true};
  }
  bool stateful() const override { return false; }

 private:
  OniaParams params_;
};

class JacobianArm : public ArmSolver {
 public:
  explicit JacobianArm(JacobianParams p) : solver_(p) {}
  Outcome solve(const HumanArmModel& model, const ArmRefs& refs) override {
    const JacobianResult r = solver_.solve(model, refs);
    return {r.pose, false, r.converged};
  }
  void reset() override { solver_.reset(); }

 private:
  JacobianSolver solver_;
};

class FabrikArm : public ArmSolver {
 public:
  explicit FabrikArm(FabrikParams p) : solver_(p) {}
  Outcome solve(const HumanArmModel& model, const ArmRefs& refs) override {
    const FabrikResult r = solver_.solve(model, refs);
    return {r.pose, r.singular, r.success};
  }
  void reset() override { solver_.reset(); }

 private:
  FabrikSolver solver_;
};

std::unique_ptr<ArmSolver> make_solver(SolverKind kind, const Config& config) {
  switch (kind) {
    case SolverKind::Onia: return std::make_unique<OniaArm>(config.onia);
    case SolverKind::Jacobian: return std::make_unique<JacobianArm>(config.jacobian);
    case SolverKind::Fabrik: return std::make_unique<FabrikArm>(config.fabrik);
  }
  return nullptr;
}

bool open_out(std::ofstream& f, const std::filesystem::path& path, std::ostream& err) {
  f.open(path, std::ios::binary);
  if (!f) {
    err << "error: cannot write " << path.string() << '\n';
    return false;
  }
  return true;
}

}  // namespace

Session load_input(const RunSpec& spec, const Config& config) {
  switch (spec.input) {
    case InputKind::Catalog: return {100.0, pose_catalog(config.scene)};
    case InputKind::Therapy:
      if (!(spec.therapy_duration > 0.0) || !(spec.therapy_rate > 0.0))
        throw InputError("therapy duration and rate must be positive");
      return {spec.therapy_rate, therapy_trajectory(spec.therapy_duration, spec.therapy_rate, config.scene)};
    case InputKind::File:
      try {
        return read_session(spec.session_path);
      } catch (const ParseError& e) {
        throw InputError(spec.session_path.string() + ": " + e.what());
      } catch (const std::runtime_error& e) {
        throw InputError(e.what());
      }
  }
  throw InputError("no input selected");
}

std::vector<MetricsRecord> run_session(const Session& session, const Config& config, const RunSpec& spec) {
  const bool reset = spec.reset_state.value_or(spec.input == InputKind::Catalog);
  const bool settle = spec.settle.value_or(spec.input == InputKind::Catalog);
  std::vector<MetricsRecord> out;
  out.reserve(session.frames.size() * 2 * spec.solvers.size());

  for (SolverKind kind : spec.solvers) {
    std::unique_ptr<ArmSolver> arm_solver[2] = {make_solver(kind, config), make_solver(kind, config)};
    for (std::size_t i = 0; i < session.frames.size(); ++i) {
      const SessionFrame& frame = session.frames[i];
      const ArmPair arms = aligned_arms(config.model, frame.shoulders);
      for (Side side : {Side::Left, Side::Right}) {
        ArmSolver& s = *arm_solver[side == Side::Left ? 0 : 1];
        if (reset) s.reset();
        const HumanArmModel& model = arms.arm(side);
        const ArmRefs& refs = frame.arm(side);
        auto [outcome, seconds] = timed([&] { return s.solve(model, refs); });
        if (settle && s.stateful()) {
          // Held pose: keep solving until the joints stop moving. The
          // reported time is the mean over all solves of the hold.
          double total = seconds;
          int solves = 1;
          JointPositions last = fk_arm(model, outcome.pose);
          while (solves < spec.settle_max) {
            const auto [next, dt] = timed([&] { return s.solve(model, refs); });
            total += dt;
            ++solves;
            outcome = next;
            const JointPositions now = fk_arm(model, outcome.pose);
            const double moved = std::max((now.elbow - last.elbow).norm(), (now.wrist - last.wrist).norm());
            last = now;
            if (moved < spec.settle_tolerance) break;
          }
          seconds = total / solves;
        }

        MetricsRecord r;
        r.frame = i;
        r.t = frame.t;
        r.solver = solver_name(kind);
        r.side = side;
        const Deviations d = deviations(model, outcome.pose, refs);
        const StretchDeviation st = stretch_metrics(outcome.pose);
        r.dx_e = d.elbow;
        r.dx_w = d.wrist;
        r.su_dev = st.upper;
        r.sf_dev = st.forearm;
        r.solve_time = seconds;
        r.degenerate = outcome.degenerate;
        r.converged = outcome.converged;
        if (spec.overlay) {
          const Vec3 robot_shoulder = side == Side::Left ? frame.shoulders.left : frame.shoulders.right;
          const auto robot = robot_capsules(robot_shoulder, refs, config.capsules);
          const auto human = human_capsules(model, outcome.pose, config.capsules);
          r.overlay = overlay_ratio(robot, human, frame.camera, config.render);
        }
        out.push_back(std::move(r));
      }
    }
  }
  return out;
}

int cmd_poses(const Config& config, const std::filesystem::path& out, std::ostream& err) {
  try {
    write_session(out, Session{100.0, pose_catalog(config.scene)});
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  }
  return kExitOk;
}

int cmd_therapy(const Config& config, double duration_s, double rate_hz, const std::filesystem::path& out,
                std::ostream& err) {
  if (!(duration_s > 0.0) || !(rate_hz > 0.0)) {
    err << "error: therapy duration and rate must be positive\n";
    return kExitInput;
  }
  try {
    write_session(out, Session{rate_hz, therapy_trajectory(duration_s, rate_hz, config.scene)});
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  }
  return kExitOk;
}

int cmd_run(const Config& config, const RunSpec& spec, std::ostream& err) {
  std::vector<MetricsRecord> records;
  try {
    const Session session = load_input(spec, config);
    records = run_session(session, config, spec);
  } catch (const SolverDiverged& e) {
    err << "error: solver diverged: " << e.what() << '\n';
    return kExitDiverged;
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::invalid_argument& e) {
    err << "error: invalid input: " << e.what() << '\n';
    return kExitInput;
  }

  std::ofstream metrics, summary;
  if (!open_out(metrics, spec.metrics_out, err) || !open_out(summary, spec.summary_out, err)) return kExitInput;
  write_metrics_csv(metrics, records);
  write_summary_csv(summary, summarize(records));
  if (!metrics || !summary) {
    err << "error: write failed\n";
    return kExitInput;
  }
  return kExitOk;
}

}  // namespace avatar
