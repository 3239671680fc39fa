#pragma once

// Replay driver behind the command-line tool: feeds one frame sequence to
// each selected solver, collects per-frame metrics and writes the CSVs.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "avatar/config.hpp"
#include "avatar/report.hpp"
#include "avatar/session.hpp"

namespace avatar {

enum class SolverKind { Onia, Jacobian, Fabrik };

const char* solver_name(SolverKind kind);

/// "onia", "jacobian", "fabrik" or "all". Throws InputError otherwise.
std::vector<SolverKind> parse_solvers(const std::string& name);

enum class InputKind { Catalog, Therapy, File };

struct RunSpec {
  std::vector<SolverKind> solvers{SolverKind::Onia, SolverKind::Jacobian, SolverKind::Fabrik};
  InputKind input = InputKind::Catalog;
  std::filesystem::path session_path;  // InputKind::File
  double therapy_duration = 20.0;
  double therapy_rate = 100.0;
  std::filesystem::path metrics_out = "metrics.csv";
  std::filesystem::path summary_out = "summary.csv";
  bool overlay = true;
  // Restart stateful solvers on every frame. Defaults to true for the
  // catalog (independent poses) and false for sequences.
  std::optional<bool> reset_state;
  // Re-solve each frame as a held pose until stateful solvers stop moving
  // (largest joint displacement per solve below settle_tolerance) or
  // settle_max solves have run. Defaults to true for the catalog.
  std::optional<bool> settle;
  double settle_tolerance = 1e-5;
  int settle_max = 3000;
};

/// Bad command-line or input data; exit code 2.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;
inline constexpr int kExitDiverged = 3;

/// Frames named by `spec.input`: the catalog, a generated therapy session or a file.
Session load_input(const RunSpec& spec, const Config& config);

/// Runs every selected solver over the same frames. Stateful solvers keep one
/// instance per arm. Throws SolverDiverged from the Jacobian baseline.
std::vector<MetricsRecord> run_session(const Session& session, const Config& config, const RunSpec& spec);

int cmd_poses(const Config& config, const std::filesystem::path& out, std::ostream& err);
int cmd_therapy(const Config& config, double duration_s, double rate_hz, const std::filesystem::path& out,
                std::ostream& err);
int cmd_run(const Config& config, const RunSpec& spec, std::ostream& err);

}  // namespace avatar
