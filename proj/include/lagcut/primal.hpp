#pragma once

// Primal selection MIP: pick one pooled offer per article to maximise
//
//     pbar * f(x) + sum_l vbar_l * delta_l,   delta_l = min(0, (A x - b)_l)
//
// where 1/pbar is the best pooled total profit and 1/vbar_l the spread of
// the pooled residuals of row l. Solved by depth-first branch-and-bound with
// LP relaxations from the shared simplex. Branching fixes the article whose
// LP selection is most fractional to each of its offers in turn, best
// profit coefficient first.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

#include "lagcut/master.hpp"
#include "lagcut/model.hpp"
#include "lagcut/simplex.hpp"

namespace lagcut {

struct SelectionProblem {
  const CutPool* pool = nullptr;
  double pbar = 1.0;
  std::vector<double> vbar;

  std::size_t num_articles() const { return pool->num_articles(); }
  std::size_t num_constraints() const { return pool->num_constraints(); }

  /// Objective of a selection given as per-article offer ids.
  double objective(std::span<const std::uint32_t> ids) const {
    return pbar * profit(ids) + weighted_delta(ids);
  }
  double profit(std::span<const std::uint32_t> ids) const {
    double f = 0.0;
    for (std::size_t i = 0; i < ids.size(); ++i) f += pool->offer(i, ids[i]).profit;
    return f;
  }
  /// (A x - b) for the selection.
  std::vector<double> residual(std::span<const std::uint32_t> ids) const {
    const std::size_t L = num_constraints();
    std::vector<double> ax(L, 0.0);
    for (std::size_t i = 0; i < ids.size(); ++i) {
      const auto& c = pool->offer(i, ids[i]).contributions;
      for (std::size_t l = 0; l < L; ++l) ax[l] += c[l];
    }
    for (std::size_t l = 0; l < L; ++l) ax[l] -= pool->rhs()[l];
    return ax;
  }
  double weighted_delta(std::span<const std::uint32_t> ids) const {
    const auto r = residual(ids);
    double v = 0.0;
    for (std::size_t l = 0; l < r.size(); ++l) v += vbar[l] * std::min(0.0, r[l]);
    return v;
  }
};

inline SelectionProblem build_selection(const CutPool& pool) {
  if (pool.empty()) throw InputError("selection problem needs a non-empty pool");
  SelectionProblem p;
  p.pool = &pool;
  p.pbar = pool.max_profit() > 0.0 ? 1.0 / pool.max_profit() : 1.0;
  p.vbar.resize(pool.num_constraints());
  for (std::size_t l = 0; l < p.vbar.size(); ++l) {
    const double hi = pool.max_residual(l), lo = pool.min_residual(l);
    const double range = hi - lo;
    const double scale = std::max({1.0, std::abs(hi), std::abs(lo)});
    p.vbar[l] = range > 1e-12 * scale ? 1.0 / range : 1.0;
  }
  return p;
}

enum class SelectionStatus { optimal, node_limit, time_limit };

inline std::string_view to_string(SelectionStatus s) {
  switch (s) {
    case SelectionStatus::optimal: return "optimal";
    case SelectionStatus::node_limit: return "node-limit";
    case SelectionStatus::time_limit: return "time-limit";
  }
  return "?";
}

struct PrimalSolution {
  std::vector<std::uint32_t> offer_ids;  // per article, into the pool's offer table
  std::vector<std::size_t> selection;    // per article, the first cut k holding that offer
  double objective = 0.0;
  double profit = 0.0;                // raw f(x)
  std::vector<double> violation;      // max(0, b - A x)
  std::vector<double> delta;          // min(0, A x - b)
  double proof_gap = 0.0;             // best open bound - incumbent
  SelectionStatus status = SelectionStatus::optimal;
  std::size_t nodes = 0;

  bool feasible(double tol = 1e-9) const {
    return std::all_of(violation.begin(), violation.end(), [&](double v) { return v <= tol; });
  }
};

struct SelectionLimits {
  std::size_t node_limit = 20000;
  double time_limit_seconds = 60.0;
};

namespace detail {

inline PrimalSolution describe_selection(const SelectionProblem& prob,
                                         std::vector<std::uint32_t> ids) {
  PrimalSolution s;
  s.objective = prob.objective(ids);
  s.profit = prob.profit(ids);
  const auto r = prob.residual(ids);
  s.violation.resize(r.size());
  s.delta.resize(r.size());
  for (std::size_t l = 0; l < r.size(); ++l) {
    s.violation[l] = std::max(0.0, -r[l]);
    s.delta[l] = std::min(0.0, r[l]);
  }
  s.selection.resize(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) s.selection[i] = prob.pool->offer(i, ids[i]).first_cut;
  s.offer_ids = std::move(ids);
  return s;
}

class SelectionBranchAndBound {
 public:
  SelectionBranchAndBound(const SelectionProblem& prob, const SelectionLimits& limits)
      : prob_(prob), pool_(*prob.pool), limits_(limits), n_(pool_.num_articles()),
        L_(pool_.num_constraints()) {
    for (std::size_t i = 0; i < n_; ++i) candidates_.push_back(undominated(i));
  }

  PrimalSolution run() {
    const auto start = std::chrono::steady_clock::now();
    // incumbent: the best pure pooled cut
    for (std::size_t k = 0; k < pool_.size(); ++k) {
      const auto& ids = pool_.cut(k).offer_ids;
      const double v = prob_.objective(ids);
      if (incumbent_ids_.empty() || v > incumbent_) {
        incumbent_ = v;
        incumbent_ids_ = ids;
      }
    }
    struct Node {
      std::vector<std::int64_t> fixed;  // -1 when free
      double parent_bound;
    };
    std::vector<Node> stack;
    stack.push_back({std::vector<std::int64_t>(n_, -1), kInf});
    SelectionStatus status = SelectionStatus::optimal;
    std::size_t nodes = 0;
    double open_bound = -kInf;
    while (!stack.empty()) {
      if (nodes >= limits_.node_limit) { status = SelectionStatus::node_limit; break; }
      const double elapsed =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      if (elapsed > limits_.time_limit_seconds) { status = SelectionStatus::time_limit; break; }
      Node node = std::move(stack.back());
      stack.pop_back();
      if (node.parent_bound <= prune_level()) continue;
      ++nodes;
      process(node.fixed, [&](std::vector<std::int64_t> child, double bound) {
        stack.push_back({std::move(child), bound});
      });
    }
    for (const auto& node : stack) open_bound = std::max(open_bound, node.parent_bound);
    PrimalSolution s = describe_selection(prob_, incumbent_ids_);
    s.status = status;
    s.nodes = nodes;
    s.proof_gap = status == SelectionStatus::optimal ? 0.0 : std::max(0.0, open_bound - s.objective);
    return s;
  }

 private:
  // Offers not dominated by another offer with at least the same profit and
  // contributions; among identical offers the lowest id survives.
  std::vector<std::uint32_t> undominated(std::size_t i) const {
    std::vector<std::uint32_t> keep;
    const std::size_t count = pool_.offer_count(i);
    for (std::size_t o = 0; o < count; ++o) {
      const auto& a = pool_.offer(i, o);
      bool dominated = false;
      for (std::size_t q = 0; q < count && !dominated; ++q) {
        if (q == o) continue;
        const auto& b = pool_.offer(i, q);
        bool geq = b.profit >= a.profit, strict = b.profit > a.profit;
        for (std::size_t l = 0; l < L_ && geq; ++l) {
          geq = b.contributions[l] >= a.contributions[l];
          strict = strict || b.contributions[l] > a.contributions[l];
        }
        dominated = geq && (strict || q < o);
      }
      if (!dominated) keep.push_back(static_cast<std::uint32_t>(o));
    }
    return keep;
  }

  double prune_level() const { return incumbent_ + 1e-10 * (1.0 + std::abs(incumbent_)); }

  void consider(std::vector<std::uint32_t> ids) {
    const double v = prob_.objective(ids);
    if (v > incumbent_) {
      incumbent_ = v;
      incumbent_ids_ = std::move(ids);
    }
  }

  template <typename Push>
  void process(const std::vector<std::int64_t>& fixed, Push&& push) {
    // variables: y for each (free article, offer), then delta_l <= 0
    std::vector<std::size_t> free_articles;
    std::vector<std::size_t> var_begin;
    std::size_t nvar = 0;
    for (std::size_t i = 0; i < n_; ++i)
      if (fixed[i] < 0) {
        free_articles.push_back(i);
        var_begin.push_back(nvar);
        nvar += candidates_[i].size();
      }
    if (free_articles.empty()) {
      std::vector<std::uint32_t> ids(n_);
      for (std::size_t i = 0; i < n_; ++i) ids[i] = static_cast<std::uint32_t>(fixed[i]);
      consider(std::move(ids));
      return;
    }
    const std::size_t ny = nvar;
    LinearProgram lp(ny + L_);
    for (std::size_t a = 0; a < free_articles.size(); ++a) {
      const auto& cand = candidates_[free_articles[a]];
      for (std::size_t o = 0; o < cand.size(); ++o) {
        lp.objective[var_begin[a] + o] = -prob_.pbar * pool_.offer(free_articles[a], cand[o]).profit;
        lp.upper[var_begin[a] + o] = 1.0;
      }
    }
    for (std::size_t l = 0; l < L_; ++l) {
      lp.objective[ny + l] = -prob_.vbar[l];
      lp.lower[ny + l] = -kInf;
      lp.upper[ny + l] = 0.0;
    }
    std::vector<double> row(ny + L_, 0.0);
    for (std::size_t a = 0; a < free_articles.size(); ++a) {
      std::fill(row.begin(), row.end(), 0.0);
      for (std::size_t o = 0; o < candidates_[free_articles[a]].size(); ++o) row[var_begin[a] + o] = 1.0;
      lp.add_row(row, RowSense::equal, 1.0);
    }
    double fixed_profit = 0.0;
    std::vector<double> fixed_ax(L_, 0.0);
    for (std::size_t i = 0; i < n_; ++i)
      if (fixed[i] >= 0) {
        const auto& po = pool_.offer(i, static_cast<std::size_t>(fixed[i]));
        fixed_profit += po.profit;
        for (std::size_t l = 0; l < L_; ++l) fixed_ax[l] += po.contributions[l];
      }
    for (std::size_t l = 0; l < L_; ++l) {
      // delta_l - sum y * a <= fixed_ax - b
      std::fill(row.begin(), row.end(), 0.0);
      for (std::size_t a = 0; a < free_articles.size(); ++a) {
        const std::size_t i = free_articles[a];
        for (std::size_t o = 0; o < candidates_[i].size(); ++o)
          row[var_begin[a] + o] = -pool_.offer(i, candidates_[i][o]).contributions[l];
      }
      row[ny + l] = 1.0;
      lp.add_row(row, RowSense::less_equal, fixed_ax[l] - pool_.rhs()[l]);
    }
    const LpSolution sol = simplex_solve(lp);
    if (sol.status != LpStatus::optimal)
      throw NumericalError(std::string("selection LP relaxation failed: ") +
                           std::string(to_string(sol.status)) + " " + sol.diagnostics);
    const double bound = -sol.objective + prob_.pbar * fixed_profit;

    // rounding: each free article takes its largest y
    std::vector<std::uint32_t> rounded(n_);
    std::size_t branch_article = n_;
    double worst = 1e-9;
    for (std::size_t i = 0; i < n_; ++i)
      if (fixed[i] >= 0) rounded[i] = static_cast<std::uint32_t>(fixed[i]);
    for (std::size_t a = 0; a < free_articles.size(); ++a) {
      const std::size_t i = free_articles[a];
      std::size_t arg = 0;
      double best = -1.0;
      for (std::size_t o = 0; o < candidates_[i].size(); ++o) {
        const double y = sol.x[var_begin[a] + o];
        if (y > best + 1e-12) { best = y; arg = candidates_[i][o]; }
      }
      rounded[i] = static_cast<std::uint32_t>(arg);
      if (1.0 - best > worst) {
        worst = 1.0 - best;
        branch_article = i;
      }
    }
    consider(rounded);
    if (branch_article == n_) return;  // integral: rounded selection is the subtree optimum
    if (bound <= prune_level()) return;

    std::vector<std::uint32_t> order = candidates_[branch_article];
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return pool_.offer(branch_article, a).profit > pool_.offer(branch_article, b).profit;
    });
    // pushed in reverse so the best coefficient is explored first
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      std::vector<std::int64_t> child = fixed;
      child[branch_article] = static_cast<std::int64_t>(*it);
      push(std::move(child), bound);
    }
  }

  const SelectionProblem& prob_;
  const CutPool& pool_;
  SelectionLimits limits_;
  std::size_t n_, L_;
  double incumbent_ = -kInf;
  std::vector<std::uint32_t> incumbent_ids_;
  std::vector<std::vector<std::uint32_t>> candidates_;
};

}  // namespace detail

inline PrimalSolution solve_selection(const SelectionProblem& problem,
                                      const SelectionLimits& limits = {}) {
  if (problem.pool == nullptr || problem.pool->empty())
    throw InputError("selection problem needs a non-empty pool");
  if (limits.node_limit == 0 || !(limits.time_limit_seconds > 0.0))
    throw InputError("selection limits must be positive");
  return detail::SelectionBranchAndBound(problem, limits).run();
}

}  // namespace lagcut
