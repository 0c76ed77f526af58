#pragma once

// Frozen-pool experiments: start from a fixed set of cuts and compare how
// fast heuristic cut rounds (on the aggregated master) and the partially
// aggregated masters approach the best available bound.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lagcut/driver.hpp"
#include "lagcut/heuristics.hpp"
#include "lagcut/master.hpp"

namespace lagcut {

struct BenchPoint {
  std::string label;      // "max-violation" or "partial:M"
  std::size_t step = 0;   // heuristic application count, or M
  double elapsed_ms = 0;  // cumulative (heuristic) or single-solve (partial)
  double bound = 0;
  double gap = 0;  // (best - bound) / |best|
};

struct BenchReport {
  double best_bound = -kInf;
  std::string best_source;  // "disaggregated" or "tightest"
  std::vector<BenchPoint> points;
};

struct HeuristicBenchOptions {
  std::size_t max_applications = 0;  // 0: 10 * j^2
  double violation_tol = 1e-9;       // relative to 1 + |mu|
  MasterOptions master{};
};

namespace detail {

inline double ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

inline double relative_gap(double best, double bound) {
  const double g = (best - bound) / std::max(std::abs(best), 1e-300);
  return std::max(0.0, g);
}

}  // namespace detail

/// Repeated max-violation cuts on the aggregated master. Stops when the cut
/// is no longer violated, repeats an existing cut, or the budget runs out.
/// Points carry the bound after each application (step 0 is the pool as given).
inline std::vector<BenchPoint> bench_heuristic(CutPool pool, double lambda_bar,
                                               const HeuristicBenchOptions& options = {}) {
  const std::size_t j0 = pool.size();
  const std::size_t budget = options.max_applications ? options.max_applications : 10 * j0 * j0;
  std::vector<BenchPoint> points;
  const auto t0 = std::chrono::steady_clock::now();
  MasterSolution ms = solve_aggregated(pool, lambda_bar, options.master);
  points.push_back({"max-violation", 0, detail::ms_since(t0), ms.mu, 0.0});
  for (std::size_t step = 1; step <= budget; ++step) {
    const HeuristicOutcome cut = max_violation_cut(pool, ms.lambda, ms.mu);
    if (cut.violation <= options.violation_tol * (1.0 + std::abs(ms.mu))) break;
    const std::size_t k = pool.add_selection(cut.offer_ids, cut.origin);
    if (pool.cut(k).duplicate) break;
    ms = solve_aggregated(pool, lambda_bar, options.master);
    points.push_back({"max-violation", step, detail::ms_since(t0), ms.mu, 0.0});
  }
  return points;
}

/// One independent solve per aggregation level M (clamped to n).
inline std::vector<BenchPoint> bench_partial(const CutPool& pool, double lambda_bar,
                                             const std::vector<std::size_t>& levels,
                                             std::uint64_t seed, const MasterOptions& options = {}) {
  std::vector<BenchPoint> points;
  for (std::size_t M : levels) {
    if (M < 1) throw InputError("aggregation levels must be >= 1");
    const std::size_t m = std::min(M, pool.num_articles());
    const auto t0 = std::chrono::steady_clock::now();
    const MasterSolution ms = solve_partially_aggregated(pool, lambda_bar, m, seed, options);
    points.push_back({"partial:" + std::to_string(m), m, detail::ms_since(t0), ms.mu, 0.0});
  }
  return points;
}

/// Disaggregated bound when it fits the row cap; otherwise nothing.
inline std::optional<double> best_bound_of(const CutPool& pool, double lambda_bar,
                                            const MasterOptions& options = {}) {
  try {
    return solve_disaggregated(pool, lambda_bar, options).mu;
  } catch (const CapExceeded&) {
    return std::nullopt;
  }
}

inline BenchReport finish_report(std::vector<BenchPoint> points, std::optional<double> best) {
  BenchReport r;
  if (best) {
    r.best_bound = *best;
    r.best_source = "disaggregated";
  } else {
    for (const auto& p : points) r.best_bound = std::max(r.best_bound, p.bound);
    r.best_source = "tightest";
  }
  for (auto& p : points) p.gap = detail::relative_gap(r.best_bound, p.bound);
  r.points = std::move(points);
  return r;
}

/// First elapsed time at which the points reach `target`; NaN if never.
inline double first_time_to(const std::vector<BenchPoint>& points, double target) {
  for (const auto& p : points)
    if (p.gap <= target) return p.elapsed_ms;
  return kNaN;
}

inline std::string bench_csv(const BenchReport& r) {
  std::string out = "label,step,elapsed_ms,bound,gap,best_bound\n";
  char buf[256];
  for (const auto& p : r.points) {
    std::snprintf(buf, sizeof buf, "%s,%zu,%.17g,%.17g,%.17g,%.17g\n", p.label.c_str(), p.step,
                  p.elapsed_ms, p.bound, p.gap, r.best_bound);
    out += buf;
  }
  return out;
}

}  // namespace lagcut
