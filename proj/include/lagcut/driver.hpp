#pragma once

// Extended cutting-plane loop with heuristic cut rounds.
//
//   lambda <- 0
//   repeat up to outer_limit times:
//     evaluate LR(lambda) exactly, add its maximiser as a cut, re-solve master
//     repeat up to inner_limit times:
//       build a heuristic cut from pooled offers, add it, re-solve master
//       stop the round if the gap closed, lambda did not move, or the cut's
//       efficacy (measured against the master solution it was built for) is
//       below tol_e
//     stop if the gap closed
//   run the selection MIP on the final pool
//
// Gaps: the stopping test divides by mu (falling back to an absolute test
// when mu <= 0); the reported d_j divides by the dual bound.

#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lagcut/heuristics.hpp"
#include "lagcut/master.hpp"
#include "lagcut/model.hpp"
#include "lagcut/primal.hpp"
#include "lagcut/subproblem.hpp"

namespace lagcut {

enum class HeuristicStrategy { none, random, max_violation, feasibility, mixed };

inline std::string_view to_string(HeuristicStrategy s) {
  switch (s) {
    case HeuristicStrategy::none: return "none";
    case HeuristicStrategy::random: return "random";
    case HeuristicStrategy::max_violation: return "max-violation";
    case HeuristicStrategy::feasibility: return "feasibility";
    case HeuristicStrategy::mixed: return "mixed";
  }
  return "?";
}
inline HeuristicStrategy strategy_from(std::string_view s) {
  if (s == "none") return HeuristicStrategy::none;
  if (s == "random") return HeuristicStrategy::random;
  if (s == "max-violation") return HeuristicStrategy::max_violation;
  if (s == "feasibility") return HeuristicStrategy::feasibility;
  if (s == "mixed") return HeuristicStrategy::mixed;
  throw InputError("unknown heuristic strategy '" + std::string(s) + "'");
}

struct MasterVariant {
  enum class Kind { aggregated, partially_aggregated, disaggregated };
  Kind kind = Kind::aggregated;
  std::size_t groups = 1;  // partially aggregated only

  std::string name() const {
    switch (kind) {
      case Kind::aggregated: return "aggregated";
      case Kind::disaggregated: return "disaggregated";
      case Kind::partially_aggregated: return "partial:" + std::to_string(groups);
    }
    return "?";
  }
  static MasterVariant parse(std::string_view s) {
    if (s == "aggregated") return {Kind::aggregated, 1};
    if (s == "disaggregated") return {Kind::disaggregated, 1};
    if (s.substr(0, 8) == "partial:") {
      const std::string num(s.substr(8));
      char* end = nullptr;
      const long m = std::strtol(num.c_str(), &end, 10);
      if (num.empty() || *end != '\0' || m < 1) throw InputError("partial:M needs M >= 1");
      return {Kind::partially_aggregated, static_cast<std::size_t>(m)};
    }
    throw InputError("unknown master variant '" + std::string(s) + "'");
  }
};

struct DriverConfig {
  std::size_t outer_limit = 10;
  std::size_t inner_limit = 100;
  double tol_mu = 1e-6;
  double tol_e = 1.0;
  HeuristicStrategy strategy = HeuristicStrategy::max_violation;
  std::optional<double> lambda_bar;  // overrides the instance value
  MasterVariant master{};
  std::uint64_t seed = 0;
  std::size_t threads = 1;
  /// 0 compares successive multipliers exactly; > 0 allows that much
  /// absolute difference per component.
  double lambda_equal_tolerance = 0.0;
  SelectionLimits primal_limits{};
  SelectionLimits feasibility_limits{500, 10.0};
  MasterOptions master_options{};
  double path_cap = kDefaultPathCap;

  void validate() const {
    if (outer_limit < 1) throw InputError("outer iteration limit must be >= 1");
    if (!(tol_mu > 0.0) || !(tol_e > 0.0)) throw InputError("tolerances must be > 0");
    if (lambda_bar && !(*lambda_bar > 0.0)) throw InputError("lambda_bar override must be > 0");
    if (lambda_equal_tolerance < 0.0) throw InputError("lambda equality tolerance must be >= 0");
  }
};

enum class EventKind { exact_lr, heuristic_cut, master_solve, primal_heuristic, stop };

inline std::string_view to_string(EventKind k) {
  switch (k) {
    case EventKind::exact_lr: return "exact-lr";
    case EventKind::heuristic_cut: return "heuristic-cut";
    case EventKind::master_solve: return "master-solve";
    case EventKind::primal_heuristic: return "primal-heuristic";
    case EventKind::stop: return "stop";
  }
  return "?";
}

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct TraceEvent {
  std::size_t j = 0;      // cuts in the pool
  std::size_t outer = 0;  // outer iteration (1-based)
  EventKind kind = EventKind::exact_lr;
  double dual_bound = kInf;  // min_k LR(lambda^k)
  double mu = kNaN;          // relaxed primal bound
  double gap_alg1 = kNaN;
  double gap_dj = kNaN;
  double lambda_norm = 0.0;
  std::size_t lambda_at_bar = 0;
  std::vector<double> lambda;
  double wall_ms = 0.0;
  std::size_t subproblem_solves = 0;
  std::optional<CutOrigin> cut_origin;
  double efficacy = kNaN;
  double lr_value = kNaN;  // LR value of the event's cut or evaluation
  std::string note;
};

using RunTrace = std::vector<TraceEvent>;

/// (dual - mu) / mu, undefined (NaN) when mu <= 0.
inline double gap_alg1(double dual, double mu) {
  if (!std::isfinite(dual) || !std::isfinite(mu) || mu <= 0.0) return kNaN;
  return (dual - mu) / mu;
}
/// (dual - mu) / |dual|.
inline double gap_dj(double dual, double mu) {
  if (!std::isfinite(dual) || !std::isfinite(mu) || dual == 0.0) return kNaN;
  return (dual - mu) / std::abs(dual);
}
inline bool gap_closed(double dual, double mu, double tol) {
  if (!std::isfinite(dual) || !std::isfinite(mu)) return false;
  if (mu > 0.0) return (dual - mu) / mu < tol;
  return dual - mu < tol * (1.0 + std::abs(dual));
}

enum class StopReason { gap_closed, outer_limit };

inline std::string_view to_string(StopReason r) {
  return r == StopReason::gap_closed ? "gap-closed" : "outer-limit";
}

struct RunResult {
  PrimalSolution primal;
  std::vector<Offer> primal_offers;
  RunTrace trace;
  CutPool pool;
  MasterSolution last_master;
  double lambda_bar = 0.0;
  double dual_bound = kInf;
  double mu = kNaN;
  StopReason stop_reason = StopReason::outer_limit;
  std::size_t outer_iterations = 0;
  std::size_t exact_evaluations = 0;
  std::size_t heuristic_cuts = 0;
  std::size_t master_solves = 0;
  std::size_t subproblem_solves = 0;
  double wall_ms = 0.0;

  double final_gap_alg1() const { return gap_alg1(dual_bound, mu); }
  double final_gap_dj() const { return gap_dj(dual_bound, mu); }
};

inline MasterSolution solve_master(const CutPool& pool, double lambda_bar, const MasterVariant& v,
                                   std::uint64_t seed, const MasterOptions& options = {}) {
  switch (v.kind) {
    case MasterVariant::Kind::aggregated: return solve_aggregated(pool, lambda_bar, options);
    case MasterVariant::Kind::disaggregated: return solve_disaggregated(pool, lambda_bar, options);
    case MasterVariant::Kind::partially_aggregated:
      return solve_partially_aggregated(pool, lambda_bar, std::min(v.groups, pool.num_articles()),
                                        seed, options);
  }
  throw InputError("unknown master variant");
}

namespace detail {

class CuttingPlaneRun {
 public:
  CuttingPlaneRun(const Instance& instance, const DriverConfig& config)
      : inst_(instance), cfg_(config),
        lambda_bar_(config.lambda_bar.value_or(instance.lambda_bar)),
        start_(std::chrono::steady_clock::now()) {
    instance.validate();
    config.validate();
    result_.lambda_bar = lambda_bar_;
    result_.pool = CutPool(instance.num_articles(), instance.rhs());
    lambda_.assign(instance.num_constraints(), 0.0);
    rng_.seed = config.seed;
  }

  RunResult run() {
    for (std::size_t outer = 1; outer <= cfg_.outer_limit; ++outer) {
      outer_ = outer;
      result_.outer_iterations = outer;
      exact_step();
      master_step();
      if (cfg_.strategy != HeuristicStrategy::none) inner_loop();
      if (gap_closed(result_.dual_bound, result_.mu, cfg_.tol_mu)) {
        result_.stop_reason = StopReason::gap_closed;
        break;
      }
    }
    primal_step();
    TraceEvent e = event(EventKind::stop);
    e.note = std::string(to_string(result_.stop_reason));
    push(std::move(e));
    result_.wall_ms = elapsed_ms();
    return std::move(result_);
  }

 private:
  double elapsed_ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
  }

  TraceEvent event(EventKind kind) const {
    TraceEvent e;
    e.kind = kind;
    e.j = result_.pool.size();
    e.outer = outer_;
    e.dual_bound = result_.dual_bound;
    e.mu = result_.mu;
    e.gap_alg1 = gap_alg1(result_.dual_bound, result_.mu);
    e.gap_dj = gap_dj(result_.dual_bound, result_.mu);
    double norm2 = 0.0;
    for (double v : lambda_) {
      norm2 += v * v;
      if (v >= lambda_bar_) ++e.lambda_at_bar;
    }
    e.lambda_norm = std::sqrt(norm2);
    e.lambda = lambda_;
    e.subproblem_solves = result_.subproblem_solves;
    e.wall_ms = elapsed_ms();
    return e;
  }

  void push(TraceEvent e) { result_.trace.push_back(std::move(e)); }

  void exact_step() {
    const double before = result_.dual_bound;
    RelaxationResult lr = evaluate_lr(inst_, lambda_, cfg_.threads, cfg_.path_cap);
    result_.subproblem_solves += inst_.num_articles();
    ++result_.exact_evaluations;
    result_.dual_bound = std::min(result_.dual_bound, lr.value);
    if (result_.dual_bound > before) throw NumericalError("dual bound increased");
    result_.pool.add_cut(lr.offers, CutOrigin::exact_lr);
    TraceEvent e = event(EventKind::exact_lr);
    e.cut_origin = CutOrigin::exact_lr;
    e.lr_value = lr.value;
    push(std::move(e));
    pool_changed_ = true;
  }

  void master_step() {
    const double prev_mu = result_.mu;
    MasterSolution ms = solve_master(result_.pool, lambda_bar_, cfg_.master, cfg_.seed,
                                     cfg_.master_options);
    ++result_.master_solves;
    if (ms.status != MasterStatus::optimal)
      throw NumericalError("master solve ended with status " + std::string(to_string(ms.status)));
    lambda_ = ms.lambda;
    result_.mu = ms.mu;
    result_.last_master = std::move(ms);
    const double scale = std::max(1.0, std::abs(result_.dual_bound));
    if (std::isfinite(result_.dual_bound) && result_.mu > result_.dual_bound + 1e-7 * scale)
      throw NumericalError("relaxed primal bound exceeds dual bound: invalid cut");
    if (std::isfinite(prev_mu) && result_.mu < prev_mu - 1e-9 * std::max(1.0, std::abs(prev_mu)))
      throw NumericalError("relaxed primal bound decreased after adding a cut");
    push(event(EventKind::master_solve));
  }

  bool lambda_unchanged(const std::vector<double>& prev) const {
    for (std::size_t l = 0; l < prev.size(); ++l) {
      if (cfg_.lambda_equal_tolerance == 0.0) {
        if (prev[l] != lambda_[l]) return false;
      } else if (std::abs(prev[l] - lambda_[l]) > cfg_.lambda_equal_tolerance) {
        return false;
      }
    }
    return true;
  }

  // Adds a heuristic cut and re-solves. Returns true if the round must stop.
  bool apply(HeuristicOutcome outcome) {
    const std::size_t k = result_.pool.add_selection(outcome.offer_ids, outcome.origin);
    if (!result_.pool.cut(k).duplicate) pool_changed_ = true;
    ++result_.heuristic_cuts;
    TraceEvent e = event(EventKind::heuristic_cut);
    e.cut_origin = outcome.origin;
    e.efficacy = outcome.efficacy;
    e.lr_value = outcome.lr_value;
    if (result_.pool.cut(k).duplicate) e.note = "duplicate";
    push(std::move(e));
    const std::vector<double> prev = lambda_;
    master_step();
    return gap_closed(result_.dual_bound, result_.mu, cfg_.tol_mu) || lambda_unchanged(prev) ||
           outcome.efficacy < cfg_.tol_e;
  }

  bool feasibility_allowed() const { return pool_changed_; }

  HeuristicOutcome feasibility() {
    pool_changed_ = false;
    return feasibility_cut(result_.pool, lambda_, result_.mu, cfg_.feasibility_limits);
  }

  void inner_loop() {
    for (std::size_t m = 1; m <= cfg_.inner_limit; ++m) {
      switch (cfg_.strategy) {
        case HeuristicStrategy::random:
          if (apply(random_cut(result_.pool, rng_, lambda_, result_.mu))) return;
          break;
        case HeuristicStrategy::max_violation:
          if (apply(max_violation_cut(result_.pool, lambda_, result_.mu))) return;
          break;
        case HeuristicStrategy::feasibility: {
          if (!feasibility_allowed()) return;
          HeuristicOutcome o = feasibility();
          if (!o.available) return;
          if (apply(std::move(o))) return;
          break;
        }
        case HeuristicStrategy::mixed: {
          if (apply(max_violation_cut(result_.pool, lambda_, result_.mu))) {
            if (!gap_closed(result_.dual_bound, result_.mu, cfg_.tol_mu) && feasibility_allowed()) {
              HeuristicOutcome o = feasibility();
              if (o.available) apply(std::move(o));
            }
            return;
          }
          break;
        }
        case HeuristicStrategy::none: return;
      }
    }
  }

  void primal_step() {
    const auto problem = build_selection(result_.pool);
    result_.primal = solve_selection(problem, cfg_.primal_limits);
    result_.primal_offers.clear();
    for (std::size_t i = 0; i < inst_.num_articles(); ++i)
      result_.primal_offers.push_back(*result_.pool.offer(i, result_.primal.offer_ids[i]).offer);
    TraceEvent e = event(EventKind::primal_heuristic);
    e.lr_value = result_.primal.profit;
    e.note = std::string(to_string(result_.primal.status));
    push(std::move(e));
  }

  const Instance& inst_;
  DriverConfig cfg_;
  double lambda_bar_;
  std::chrono::steady_clock::time_point start_;
  RunResult result_;
  std::vector<double> lambda_;
  RngState rng_;
  std::size_t outer_ = 0;
  bool pool_changed_ = false;
};

}  // namespace detail

inline RunResult run(const Instance& instance, const DriverConfig& config) {
  return detail::CuttingPlaneRun(instance, config).run();
}

/// Pool of `cuts` exact cuts collected by the plain cutting-plane procedure
/// (no heuristic rounds), for isolated master/heuristic comparisons.
inline CutPool build_frozen_pool(const Instance& instance, std::size_t cuts, std::size_t threads = 1) {
  if (cuts < 1) throw InputError("frozen pool needs at least one cut");
  CutPool pool(instance.num_articles(), instance.rhs());
  std::vector<double> lambda(instance.num_constraints(), 0.0);
  for (std::size_t k = 0; k < cuts; ++k) {
    RelaxationResult lr = evaluate_lr(instance, lambda, threads);
    pool.add_cut(lr.offers, CutOrigin::exact_lr);
    lambda = solve_aggregated(pool, instance.lambda_bar).lambda;
  }
  return pool;
}

// ---------------------------------------------------------------------------
// Strategy comparison

struct StrategyRun {
  std::string name;
  DriverConfig config;
  RunResult result;
};

struct ComparisonReport {
  std::vector<StrategyRun> runs;
  double best_bound = kInf;  // tightest dual bound over all runs
  std::vector<double> targets{1e-3, 1e-4, 1e-5};
  /// time_to_gap[s][t]: wall ms until run s first had (best - mu)/|best| <= targets[t]; NaN if never.
  std::vector<std::vector<double>> time_to_gap;
};

inline double time_to_gap(const RunTrace& trace, double best_bound, double target) {
  for (const auto& e : trace) {
    if (e.kind != EventKind::master_solve) continue;
    if ((best_bound - e.mu) / std::max(std::abs(best_bound), 1e-300) <= target) return e.wall_ms;
  }
  return kNaN;
}

inline ComparisonReport compare_strategies(const Instance& instance,
                                           const std::vector<std::pair<std::string, DriverConfig>>& configs) {
  ComparisonReport report;
  for (const auto& [name, cfg] : configs) {
    if (!configs.empty() && cfg.seed != configs.front().second.seed)
      throw InputError("compared configurations must share the seed");
    report.runs.push_back({name, cfg, run(instance, cfg)});
    report.best_bound = std::min(report.best_bound, report.runs.back().result.dual_bound);
  }
  for (const auto& r : report.runs) {
    std::vector<double> row;
    for (double t : report.targets) row.push_back(time_to_gap(r.result.trace, report.best_bound, t));
    report.time_to_gap.push_back(std::move(row));
  }
  return report;
}

}  // namespace lagcut
