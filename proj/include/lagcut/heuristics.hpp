#pragma once

// Heuristic cut generators. Each one assembles a new point of the product
// set by picking, per article, an offer already present in the pool, so the
// cut is valid without solving any article subproblem.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "lagcut/master.hpp"
#include "lagcut/primal.hpp"
#include "lagcut/rng.hpp"

namespace lagcut {

struct HeuristicOutcome {
  CutOrigin origin = CutOrigin::heuristic_maxviol;
  std::vector<std::uint32_t> offer_ids;  // per article
  double predicted_profit = 0.0;
  std::vector<double> predicted_contribution;  // A X
  double lr_value = 0.0;                       // LR(lambda, X)
  double violation = 0.0;                      // LR(lambda, X) - mu
  double efficacy = 0.0;
  bool available = true;  // false when the generator produced no cut
};

/// (LR(lambda, X) - mu) / ||lambda||_2, with +inf (violated) or 0 at lambda = 0.
inline double efficacy(std::span<const double> lambda, double mu, double lr_value) {
  const double numerator = lr_value - mu;
  double norm2 = 0.0;
  for (double v : lambda) norm2 += v * v;
  if (norm2 == 0.0) return numerator > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
  return numerator / std::sqrt(norm2);
}

namespace detail {

inline HeuristicOutcome finish_outcome(const CutPool& pool, CutOrigin origin,
                                       std::vector<std::uint32_t> ids,
                                       std::span<const double> lambda, double mu) {
  HeuristicOutcome out;
  out.origin = origin;
  const std::size_t L = pool.num_constraints();
  out.predicted_contribution.assign(L, 0.0);
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const auto& po = pool.offer(i, ids[i]);
    out.predicted_profit += po.profit;
    for (std::size_t l = 0; l < L; ++l) out.predicted_contribution[l] += po.contributions[l];
  }
  out.lr_value = out.predicted_profit;
  for (std::size_t l = 0; l < L; ++l)
    out.lr_value += lambda[l] * (out.predicted_contribution[l] - pool.rhs()[l]);
  out.violation = out.lr_value - mu;
  out.efficacy = efficacy(lambda, mu, out.lr_value);
  out.offer_ids = std::move(ids);
  return out;
}

inline void check_heuristic_inputs(const CutPool& pool, std::span<const double> lambda) {
  if (pool.empty()) throw InputError("heuristic cuts need a non-empty pool");
  if (lambda.size() != pool.num_constraints()) throw InputError("multiplier length must equal L");
}

}  // namespace detail

/// Per article, an independent uniform pick among the j pooled cuts. The
/// stream for call t and article i is SplitMix64::stream(seed, {t, i}).
inline HeuristicOutcome random_cut(const CutPool& pool, RngState& rng,
                                   std::span<const double> lambda, double mu) {
  detail::check_heuristic_inputs(pool, lambda);
  const std::size_t n = pool.num_articles();
  std::vector<std::uint32_t> ids(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto gen = SplitMix64::stream(rng.seed, {rng.calls, i});
    const std::size_t k = gen.below(pool.size());
    ids[i] = pool.cut(k).offer_ids[i];
  }
  ++rng.calls;
  return detail::finish_outcome(pool, CutOrigin::heuristic_random, std::move(ids), lambda, mu);
}

/// Per article, the pooled offer maximising f_i + lambda^T A_i x_i; ties go to
/// the offer that entered the pool first.
inline HeuristicOutcome max_violation_cut(const CutPool& pool, std::span<const double> lambda,
                                          double mu) {
  detail::check_heuristic_inputs(pool, lambda);
  const std::size_t n = pool.num_articles(), L = pool.num_constraints();
  std::vector<std::uint32_t> ids(n);
  for (std::size_t i = 0; i < n; ++i) {
    double best = -std::numeric_limits<double>::infinity();
    std::size_t best_first = 0;
    for (std::size_t o = 0; o < pool.offer_count(i); ++o) {
      const auto& po = pool.offer(i, o);
      double v = po.profit;
      for (std::size_t l = 0; l < L; ++l) v += lambda[l] * po.contributions[l];
      if (v > best || (v == best && po.first_cut < best_first)) {
        best = v;
        best_first = po.first_cut;
        ids[i] = static_cast<std::uint32_t>(o);
      }
    }
  }
  return detail::finish_outcome(pool, CutOrigin::heuristic_maxviol, std::move(ids), lambda, mu);
}

/// Runs the selection MIP on the pool and proposes its answer as a cut. A
/// time-limit stop yields no cut; a node-limit stop proposes the incumbent.
inline HeuristicOutcome feasibility_cut(const CutPool& pool, std::span<const double> lambda,
                                        double mu, const SelectionLimits& limits = {}) {
  detail::check_heuristic_inputs(pool, lambda);
  const auto problem = build_selection(pool);
  PrimalSolution sol = solve_selection(problem, limits);
  HeuristicOutcome out = detail::finish_outcome(pool, CutOrigin::heuristic_feasibility,
                                                std::move(sol.offer_ids), lambda, mu);
  out.available = sol.status != SelectionStatus::time_limit;
  return out;
}

}  // namespace lagcut
