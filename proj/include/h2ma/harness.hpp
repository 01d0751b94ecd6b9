// SPDX-License-Identifier: Apache-2.0

#ifndef H2MA_HARNESS_HPP
#define H2MA_HARNESS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "h2ma/h2ma.hpp"
#include "h2ma/zdt.hpp"

namespace h2ma {

struct ExperimentConfig {
  std::string problem = "zdt1";
  std::size_t n = 30;
  std::int64_t budget = 20000;
  int runs = 100;
  std::int64_t trace_interval = 2000;
  GradientMode gradient_mode = GradientMode::numeric;
  std::uint64_t base_seed = 0;
  std::string output_dir = ".";
  int workers = 1;
};

/// Percentile by linear interpolation between order statistics
/// (rank p * (k - 1) / 100).
inline double percentile(std::vector<double> values, double p) {
  if (values.empty()) throw std::invalid_argument("percentile: empty input");
  std::sort(values.begin(), values.end());
  const double rank = p * static_cast<double>(values.size() - 1) / 100.0;
  const std::size_t lo = static_cast<std::size_t>(std::floor(rank));
  const std::size_t hi = static_cast<std::size_t>(std::ceil(rank));
  const double frac = rank - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

struct PercentileRow {
  std::int64_t evals = 0;
  std::string metric;
  double p0, p25, p50, p75, p100;
};

struct ExperimentResult {
  std::vector<PercentileRow> rows;
  std::vector<RunResult> runs;
};

namespace detail {

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

/// Latest snapshot at or before the boundary (carry-forward); falls back to
/// an empty snapshot when the run has not recorded anything yet.
inline TraceSnapshot snapshot_at(const std::vector<TraceSnapshot>& trace,
                                 std::int64_t boundary) {
  TraceSnapshot out;
  out.evaluations = boundary;
  out.hypervolume = 0.0;
  out.p_dist = std::numeric_limits<double>::quiet_NaN();
  for (const auto& s : trace) {
    if (s.evaluations > boundary) break;
    out.hypervolume = s.hypervolume;
    out.p_dist = s.p_dist;
  }
  return out;
}

}  // namespace detail

inline std::vector<RunResult> run_many(const ExperimentConfig& cfg) {
  std::vector<RunResult> results(cfg.runs);
  const int workers = std::max(1, std::min<int>(cfg.workers, cfg.runs));
  std::vector<std::thread> threads;
  for (int w = 0; w < workers; ++w) {
    threads.emplace_back([&, w] {
      const Problem problem = make_problem(cfg.problem, cfg.n);
      for (int i = w; i < cfg.runs; i += workers) {
        H2maConfig rc;
        rc.budget = cfg.budget;
        rc.gradient_mode = cfg.gradient_mode;
        rc.rng_seed = cfg.base_seed + static_cast<std::uint64_t>(i);
        results[i] = run(problem, rc);
      }
    });
  }
  for (auto& t : threads) t.join();
  return results;
}

/// Repeated-runs protocol: percentiles {0,25,50,75,100} of hypervolume and
/// P-distance at every trace-interval boundary, carry-forward sampling.
inline ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  if (cfg.runs < 1) throw std::invalid_argument("runs must be >= 1");
  if (cfg.trace_interval <= 0 || cfg.budget % cfg.trace_interval != 0) {
    throw std::invalid_argument("trace_interval must divide budget");
  }

  ExperimentResult result;
  result.runs = run_many(cfg);

  const std::int64_t boundaries = cfg.budget / cfg.trace_interval;
  for (std::int64_t b = 1; b <= boundaries; ++b) {
    const std::int64_t evals = b * cfg.trace_interval;
    std::vector<double> hv, pd;
    for (const auto& r : result.runs) {
      const auto s = detail::snapshot_at(r.trace, evals);
      hv.push_back(s.hypervolume);
      pd.push_back(s.p_dist);
    }
    for (const auto& [metric, vals] :
         {std::pair{std::string("hypervolume"), hv},
          std::pair{std::string("p_distance"), pd}}) {
      PercentileRow row;
      row.evals = evals;
      row.metric = metric;
      row.p0 = percentile(vals, 0);
      row.p25 = percentile(vals, 25);
      row.p50 = percentile(vals, 50);
      row.p75 = percentile(vals, 75);
      row.p100 = percentile(vals, 100);
      result.rows.push_back(row);
    }
  }
  return result;
}

inline void write_percentile_csv(const std::vector<PercentileRow>& rows,
                                 const std::string& path,
                                 const std::string& metric_filter = "") {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << "evals,metric,p0,p25,p50,p75,p100\n";
  for (const auto& r : rows) {
    if (!metric_filter.empty() && r.metric != metric_filter) continue;
    out << r.evals << ',' << r.metric << ',' << detail::format_double(r.p0)
        << ',' << detail::format_double(r.p25) << ','
        << detail::format_double(r.p50) << ',' << detail::format_double(r.p75)
        << ',' << detail::format_double(r.p100) << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

/// Writes the combined file plus one file per metric.
inline void write_experiment_outputs(const ExperimentConfig& cfg,
                                     const ExperimentResult& result) {
  namespace fs = std::filesystem;
  fs::create_directories(cfg.output_dir);
  const fs::path dir(cfg.output_dir);
  write_percentile_csv(result.rows, (dir / "percentiles.csv").string());
  write_percentile_csv(result.rows,
                       (dir / (cfg.problem + "_hypervolume.csv")).string(),
                       "hypervolume");
  write_percentile_csv(result.rows,
                       (dir / (cfg.problem + "_p_distance.csv")).string(),
                       "p_distance");
}

inline void dump_archive_csv(const Archive& archive, std::size_t n,
                             std::ostream& out) {
  out << 't';
  for (std::size_t i = 1; i <= n; ++i) out << ",x_" << i;
  out << ",f_1,f_2,g,phase\n";
  std::size_t t = 0;
  for (const auto& e : archive.entries()) {
    out << t++;
    for (double v : e.candidate.x) out << ',' << detail::format_double(v);
    out << ',' << detail::format_double(e.candidate.y[0]) << ','
        << detail::format_double(e.candidate.y[1]) << ','
        << detail::format_double(e.candidate.g) << ','
        << to_string(e.phase) << '\n';
  }
}

struct GradientModeRow {
  double level = 0.0;
  std::int64_t evals_numeric = 0;
  std::int64_t evals_analytic = 0;
  double ratio = 0.0;
};

/// One run per gradient mode; pairs first-crossing evaluation counts at each
/// hypervolume level attained by both traces.
inline std::vector<GradientModeRow> compare_gradient_modes(
    const std::string& problem_name, std::size_t n, std::int64_t budget,
    std::uint64_t seed) {
  const Problem problem = make_problem(problem_name, n);
  H2maConfig cfg;
  cfg.budget = budget;
  cfg.rng_seed = seed;

  cfg.gradient_mode = GradientMode::numeric;
  const auto numeric = run(problem, cfg);
  cfg.gradient_mode = GradientMode::analytic;
  const auto analytic = run(problem, cfg);

  auto first_crossing = [](const std::vector<TraceSnapshot>& trace,
                           double level) -> std::int64_t {
    for (const auto& s : trace) {
      if (s.hypervolume >= level) return s.evaluations;
    }
    return -1;
  };

  std::vector<GradientModeRow> rows;
  for (const auto& s : analytic.trace) {
    GradientModeRow row;
    row.level = s.hypervolume;
    row.evals_analytic = first_crossing(analytic.trace, row.level);
    row.evals_numeric = first_crossing(numeric.trace, row.level);
    if (row.evals_numeric < 0 || row.evals_analytic <= 0) continue;
    row.ratio = static_cast<double>(row.evals_numeric) /
                static_cast<double>(row.evals_analytic);
    rows.push_back(row);
  }
  return rows;
}

/// Hypervolume of the non-dominated subset of a two-column objective CSV.
/// Lines that do not parse as two numbers (headers, blanks) are skipped.
inline double hv_of_file(const std::string& path, const NadirPoint& nadir) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::vector<ObjectiveVector> points;
  std::string line;
  while (std::getline(in, line)) {
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    double a, b;
    if (ss >> a >> b) points.push_back(ObjectiveVector{a, b});
  }
  return hypervolume(points, nadir);
}

}  // namespace h2ma

#endif  // H2MA_HARNESS_HPP
