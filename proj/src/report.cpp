#include "avatar/report.hpp"

#include <algorithm>
#include <ostream>

#include "avatar/session.hpp"

namespace avatar {

Aggregate aggregate(std::vector<double> values) {
  Aggregate a;
  a.count = values.size();
  if (values.empty()) return a;
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  a.median = n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
  a.min = values.front();
  a.max = values.back();
  return a;
}

std::vector<SolverSummary> summarize(const std::vector<MetricsRecord>& records) {
  std::vector<std::string> order;
  for (const auto& r : records)
    if (std::find(order.begin(), order.end(), r.solver) == order.end()) order.push_back(r.solver);

  std::vector<SolverSummary> out;
  for (const std::string& name : order) {
    std::vector<double> ov, de, dw, su, sf, us;
    std::size_t rows = 0;
    for (const auto& r : records) {
      if (r.solver != name) continue;
      ++rows;
      if (r.overlay) ov.push_back(*r.overlay);
      de.push_back(r.dx_e);
      dw.push_back(r.dx_w);
      su.push_back(r.su_dev);
      sf.push_back(r.sf_dev);
      us.push_back(r.solve_time * 1e6);
    }
    out.push_back({name, rows, aggregate(ov), aggregate(de), aggregate(dw), aggregate(su), aggregate(sf),
                   aggregate(us)});
  }
  return out;
}

std::string metrics_header() {
  return "frame,t,solver,side,overlay,dx_e,dx_w,su_dev,sf_dev,solve_time_us,degenerate,converged";
}

void write_metrics_csv(std::ostream& out, const std::vector<MetricsRecord>& records) {
  out << kMetricsVersionLine << '\n' << metrics_header() << '\n';
  for (const auto& r : records) {
    out << r.frame << ',' << format_number(r.t) << ',' << r.solver << ',' << side_name(r.side) << ','
        << (r.overlay ? format_number(*r.overlay) : "NA") << ',' << format_number(r.dx_e) << ','
        << format_number(r.dx_w) << ',' << format_number(r.su_dev) << ',' << format_number(r.sf_dev) << ','
        << format_number(r.solve_time * 1e6) << ',' << int(r.degenerate) << ',' << int(r.converged) << '\n';
  }
}

namespace {

const char* const kMetricNames[] = {"overlay", "dx_e", "dx_w", "su_dev", "sf_dev", "solve_time_us"};

}  // namespace

std::string summary_header() {
  std::string h = "solver,rows";
  for (const char* m : kMetricNames) {
    h += ",";
    h += m;
    h += "_count,";
    h += m;
    h += "_median,";
    h += m;
    h += "_min,";
    h += m;
    h += "_max";
  }
  return h;
}

void write_summary_csv(std::ostream& out, const std::vector<SolverSummary>& summaries) {
  out << kMetricsVersionLine << '\n' << summary_header() << '\n';
  for (const auto& s : summaries) {
    out << s.solver << ',' << s.rows;
    for (const Aggregate* a : {&s.overlay, &s.dx_e, &s.dx_w, &s.su_dev, &s.sf_dev, &s.solve_time_us}) {
      out << ',' << a->count;
      if (a->count == 0) {
        out << ",NA,NA,NA";
      } else {
        out << ',' << format_number(a->median) << ',' << format_number(a->min) << ',' << format_number(a->max);
      }
    }
    out << '\n';
  }
}

std::vector<std::string> timing_columns() {
  return {"solve_time_us", "solve_time_us_count", "solve_time_us_median", "solve_time_us_min", "solve_time_us_max"};
}

}  // namespace avatar
