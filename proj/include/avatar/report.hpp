#pragma once

// Metrics CSV output. Per-frame file: one row per frame, side and solver.
// Summary file: one row per solver with median, min and max of each metric.
// Both start with a version comment line. Undefined overlay ratios are
// written as NA and left out of the aggregates.

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "avatar/armmodel.hpp"

namespace avatar {

inline constexpr const char* kMetricsVersionLine = "# avatar-metrics v1";

struct MetricsRecord {
  std::size_t frame = 0;
  double t = 0.0;
  std::string solver;
  Side side = Side::Right;
  std::optional<double> overlay;
  double dx_e = 0.0;
  double dx_w = 0.0;
  double su_dev = 0.0;
  double sf_dev = 0.0;
  double solve_time = 0.0;  // seconds
  bool degenerate = false;  // straight arm: ONIA skipped the twist, FABRIK reused the previous one
  bool converged = true;    // Jacobian tolerance reached / FABRIK feasible
};

struct Aggregate {
  std::size_t count = 0;
  double median = 0.0;
  double min = 0.0;
  double max = 0.0;
};

/// Median, min and max; count 0 and zeros for an empty input.
Aggregate aggregate(std::vector<double> values);

struct SolverSummary {
  std::string solver;
  std::size_t rows = 0;
  Aggregate overlay;
  Aggregate dx_e;
  Aggregate dx_w;
  Aggregate su_dev;
  Aggregate sf_dev;
  Aggregate solve_time_us;
};

/// One summary per solver, in order of first appearance.
std::vector<SolverSummary> summarize(const std::vector<MetricsRecord>& records);

std::string metrics_header();
void write_metrics_csv(std::ostream& out, const std::vector<MetricsRecord>& records);
std::string summary_header();
void write_summary_csv(std::ostream& out, const std::vector<SolverSummary>& summaries);

/// Column names holding wall-clock measurements (excluded from determinism checks).
std::vector<std::string> timing_columns();

}  // namespace avatar
