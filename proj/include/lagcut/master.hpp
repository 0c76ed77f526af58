#pragma once

// Cut pool and cutting-plane master problems.
//
// A cut is an evaluated point X^k of the article product set. With canonical
// ">=" linking rows the Lagrangian is LR(lambda, x) = f(x) + lambda^T (Ax - b),
// so every pooled point gives the valid inequality
//
//     mu >= f(X^k) + lambda^T (A X^k - b)
//
// and the aggregated master is  min mu  over those rows and 0 <= lambda <= lambda_bar.
// Grouped variants (disaggregated: one group per article; partially
// aggregated: M random groups) bound each group's term separately,
//
//     min  sum_g nu_g - lambda^T b
//     s.t. nu_g >= sum_{i in g} [f_i(X^k_i) + lambda^T A_i X^k_i]   for all k.
//
// All variants report the same quantity: the LP value, recomputed as the
// piecewise-linear maximum at the returned multipliers.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <limits>
#include <map>
#include <memory>
#include <numeric>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "lagcut/model.hpp"
#include "lagcut/rng.hpp"
#include "lagcut/simplex.hpp"
#include "lagcut/subproblem.hpp"

namespace lagcut {

enum class CutOrigin { exact_lr, heuristic_random, heuristic_maxviol, heuristic_feasibility };

inline std::string_view to_string(CutOrigin o) {
  switch (o) {
    case CutOrigin::exact_lr: return "exact-lr";
    case CutOrigin::heuristic_random: return "heuristic-random";
    case CutOrigin::heuristic_maxviol: return "heuristic-maxviol";
    case CutOrigin::heuristic_feasibility: return "heuristic-feasibility";
  }
  return "?";
}
inline CutOrigin cut_origin_from(std::string_view s) {
  if (s == "exact-lr") return CutOrigin::exact_lr;
  if (s == "heuristic-random") return CutOrigin::heuristic_random;
  if (s == "heuristic-maxviol") return CutOrigin::heuristic_maxviol;
  if (s == "heuristic-feasibility") return CutOrigin::heuristic_feasibility;
  throw InputError("unknown cut origin '" + std::string(s) + "'");
}

/// A distinct offer of one article as stored in the pool.
struct PooledOffer {
  double profit = 0.0;
  std::vector<double> contributions;
  std::shared_ptr<const Offer> offer;  // empty for pools loaded from value dumps
  std::size_t first_cut = 0;           // smallest k whose X^k_i is this offer
};

struct Cut {
  CutOrigin origin = CutOrigin::exact_lr;
  double total_profit = 0.0;
  std::vector<double> total_contribution;  // A X^k
  std::vector<std::uint32_t> offer_ids;    // per article, index into the article's offers
  bool duplicate = false;
};

/// The evaluated points X^1..X^j with per-article values and running extrema.
///
/// Offers are deduplicated per article, so heuristic cuts (recombinations of
/// pooled offers) never grow the per-article tables.
class CutPool {
 public:
  CutPool() = default;
  CutPool(std::size_t num_articles, std::vector<double> rhs)
      : n_(num_articles), rhs_(std::move(rhs)), offers_(num_articles), offer_index_(num_articles),
        max_residual_(rhs_.size(), -kInf), min_residual_(rhs_.size(), kInf) {}

  std::size_t num_articles() const noexcept { return n_; }
  std::size_t num_constraints() const noexcept { return rhs_.size(); }
  std::size_t size() const noexcept { return cuts_.size(); }
  bool empty() const noexcept { return cuts_.empty(); }
  std::span<const double> rhs() const noexcept { return rhs_; }

  const Cut& cut(std::size_t k) const { return cuts_.at(k); }
  std::span<const Cut> cuts() const noexcept { return cuts_; }
  std::size_t offer_count(std::size_t i) const { return offers_.at(i).size(); }
  const PooledOffer& offer(std::size_t i, std::size_t id) const { return offers_.at(i).at(id); }
  const PooledOffer& offer_of(std::size_t i, std::size_t k) const {
    return offers_[i][cuts_.at(k).offer_ids[i]];
  }
  std::size_t distinct_offer_total() const {
    std::size_t s = 0;
    for (const auto& v : offers_) s += v.size();
    return s;
  }

  double max_profit() const noexcept { return max_profit_; }
  /// max_k (A X^k - b)_l and min_k (A X^k - b)_l.
  double max_residual(std::size_t l) const { return max_residual_.at(l); }
  double min_residual(std::size_t l) const { return min_residual_.at(l); }

  /// LR(lambda, X^k) = f(X^k) + lambda^T (A X^k - b).
  double cut_value(std::size_t k, std::span<const double> lambda) const {
    const Cut& c = cuts_.at(k);
    double v = c.total_profit;
    for (std::size_t l = 0; l < lambda.size(); ++l)
      v += lambda[l] * (c.total_contribution[l] - rhs_[l]);
    return v;
  }

  /// Appends X^{j+1} given as full offers (one per article, in article order).
  std::size_t add_cut(std::span<const Offer> offers, CutOrigin origin) {
    if (offers.size() != n_) throw InputError("add_cut needs one offer per article");
    std::vector<std::uint32_t> ids(n_);
    for (std::size_t i = 0; i < n_; ++i) {
      if (offers[i].article_id != i) throw InputError("offers must be ordered by article id");
      if (offers[i].contributions.size() != rhs_.size())
        throw InputError("offer contribution length does not match constraint count");
      ids[i] = intern(i, path_key(offers[i]), offers[i].profit, offers[i].contributions,
                      std::make_shared<const Offer>(offers[i]));
    }
    return append(std::move(ids), origin);
  }

  /// Appends a cut from bare values (used when replaying dumped pools).
  std::size_t add_cut_values(std::span<const double> profits,
                             std::span<const std::vector<double>> contributions, CutOrigin origin) {
    if (profits.size() != n_ || contributions.size() != n_)
      throw InputError("add_cut_values needs one entry per article");
    std::vector<std::uint32_t> ids(n_);
    for (std::size_t i = 0; i < n_; ++i) {
      if (contributions[i].size() != rhs_.size())
        throw InputError("contribution length does not match constraint count");
      ids[i] = intern(i, value_key(profits[i], contributions[i]), profits[i], contributions[i], nullptr);
    }
    return append(std::move(ids), origin);
  }

  /// Appends a recombination of pooled offers.
  std::size_t add_selection(std::span<const std::uint32_t> ids, CutOrigin origin) {
    if (ids.size() != n_) throw InputError("selection needs one offer id per article");
    for (std::size_t i = 0; i < n_; ++i)
      if (ids[i] >= offers_[i].size()) throw InputError("selection references unknown offer");
    return append(std::vector<std::uint32_t>(ids.begin(), ids.end()), origin);
  }

  /// Offer ids of the existing cut identical to `ids`, if any.
  bool contains_selection(std::span<const std::uint32_t> ids) const {
    return cut_index_.count(selection_key(ids)) > 0;
  }

  /// Materialised offers of cut k (requires pools built from full offers).
  std::vector<Offer> offers_of(std::size_t k) const {
    std::vector<Offer> out;
    out.reserve(n_);
    for (std::size_t i = 0; i < n_; ++i) {
      const auto& po = offer_of(i, k);
      if (!po.offer) throw InputError("pool holds values only; offers are unavailable");
      out.push_back(*po.offer);
    }
    return out;
  }

 private:
  static std::string path_key(const Offer& o) {
    std::string key;
    for (const auto& p : o.plans) {
      key.append(reinterpret_cast<const char*>(p.path.data()), p.path.size());
      key.push_back('|');
    }
    return key;
  }
  static std::string value_key(double profit, std::span<const double> contributions) {
    std::string key(sizeof(double) * (1 + contributions.size()), '\0');
    std::memcpy(key.data(), &profit, sizeof(double));
    if (!contributions.empty())
      std::memcpy(key.data() + sizeof(double), contributions.data(),
                  sizeof(double) * contributions.size());
    return "v" + key;
  }
  static std::string selection_key(std::span<const std::uint32_t> ids) {
    return std::string(reinterpret_cast<const char*>(ids.data()), ids.size() * sizeof(std::uint32_t));
  }

  std::uint32_t intern(std::size_t i, const std::string& key, double profit,
                       std::span<const double> contributions, std::shared_ptr<const Offer> offer) {
    auto it = offer_index_[i].find(key);
    if (it != offer_index_[i].end()) return it->second;
    const auto id = static_cast<std::uint32_t>(offers_[i].size());
    offers_[i].push_back(PooledOffer{profit, std::vector<double>(contributions.begin(), contributions.end()),
                                     std::move(offer), cuts_.size()});
    offer_index_[i].emplace(key, id);
    return id;
  }

  std::size_t append(std::vector<std::uint32_t> ids, CutOrigin origin) {
    Cut c;
    c.origin = origin;
    c.total_contribution.assign(rhs_.size(), 0.0);
    for (std::size_t i = 0; i < n_; ++i) {
      const auto& po = offers_[i][ids[i]];
      c.total_profit += po.profit;
      for (std::size_t l = 0; l < rhs_.size(); ++l) c.total_contribution[l] += po.contributions[l];
    }
    const std::string key = selection_key(ids);
    c.duplicate = cut_index_.count(key) > 0;
    if (!c.duplicate) cut_index_.emplace(key, cuts_.size());
    c.offer_ids = std::move(ids);
    max_profit_ = std::max(max_profit_, c.total_profit);
    for (std::size_t l = 0; l < rhs_.size(); ++l) {
      const double r = c.total_contribution[l] - rhs_[l];
      max_residual_[l] = std::max(max_residual_[l], r);
      min_residual_[l] = std::min(min_residual_[l], r);
    }
    cuts_.push_back(std::move(c));
    return cuts_.size() - 1;
  }

  std::size_t n_ = 0;
  std::vector<double> rhs_;
  std::vector<std::vector<PooledOffer>> offers_;
  std::vector<std::unordered_map<std::string, std::uint32_t>> offer_index_;
  std::unordered_map<std::string, std::size_t> cut_index_;
  std::vector<Cut> cuts_;
  double max_profit_ = -kInf;
  std::vector<double> max_residual_, min_residual_;
};

// ---------------------------------------------------------------------------
// Master problems

enum class MasterStatus { optimal, infeasible_detected, iteration_limit };

inline std::string_view to_string(MasterStatus s) {
  switch (s) {
    case MasterStatus::optimal: return "optimal";
    case MasterStatus::infeasible_detected: return "infeasible-detected";
    case MasterStatus::iteration_limit: return "iteration-limit";
  }
  return "?";
}

struct MasterSolution {
  double mu = 0.0;  // relaxed primal bound
  std::vector<double> lambda;
  std::vector<std::size_t> active_cut_indices;
  double objective_value = 0.0;  // raw LP objective
  MasterStatus status = MasterStatus::optimal;
  std::size_t lp_rows = 0;
  std::size_t lp_vars = 0;
  std::size_t lp_iterations = 0;
};

struct MasterOptions {
  std::size_t max_rows = 250000;
  SimplexOptions simplex{};
};

/// Partition of articles into groups; each group lists article indices.
using Partition = std::vector<std::vector<std::size_t>>;

/// Seeded shuffle into `groups` near-equal groups.
inline Partition random_partition(std::size_t n, std::size_t groups, std::uint64_t seed) {
  if (groups < 1 || groups > n) throw InputError("group count must satisfy 1 <= M <= n");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  auto rng = SplitMix64::stream(seed, {0x706172746974ULL, n, groups});
  for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
  Partition out(groups);
  for (std::size_t g = 0; g < groups; ++g) {
    const std::size_t begin = n * g / groups, end = n * (g + 1) / groups;
    out[g].assign(order.begin() + static_cast<std::ptrdiff_t>(begin),
                  order.begin() + static_cast<std::ptrdiff_t>(end));
    std::sort(out[g].begin(), out[g].end());
  }
  return out;
}

namespace detail {

inline void check_master_inputs(const CutPool& pool, double lambda_bar) {
  if (pool.empty()) throw InputError("master problem needs a non-empty pool");
  if (!(lambda_bar > 0.0) || !std::isfinite(lambda_bar))
    throw InputError("lambda_bar must be finite and > 0");
}

inline MasterStatus to_master_status(const LpSolution& sol) {
  switch (sol.status) {
    case LpStatus::optimal: return MasterStatus::optimal;
    case LpStatus::iteration_limit: return MasterStatus::iteration_limit;
    case LpStatus::infeasible: return MasterStatus::infeasible_detected;
    case LpStatus::unbounded:
      throw NumericalError("master LP reported unbounded despite the multiplier box");
    case LpStatus::numerical_failure:
      throw NumericalError("master LP numerical failure: " + sol.diagnostics);
  }
  return MasterStatus::optimal;
}

inline std::vector<double> clamp_lambda(std::span<const double> raw, double lambda_bar) {
  std::vector<double> out(raw.begin(), raw.end());
  for (auto& v : out) v = std::clamp(v, 0.0, lambda_bar);
  return out;
}

/// Bounds [lo, hi] on max_rows(F + lambda^T C) over the multiplier box.
inline std::pair<double, double> epigraph_bounds(std::span<const double> F,
                                                 std::span<const double> C, std::size_t L,
                                                 double lambda_bar) {
  double lo = -kInf, hi = -kInf;
  for (std::size_t r = 0; r < F.size(); ++r) {
    double a = F[r], b = F[r];
    for (std::size_t l = 0; l < L; ++l) {
      const double s = lambda_bar * C[r * L + l];
      (s < 0.0 ? a : b) += s;
    }
    lo = std::max(lo, a);
    hi = std::max(hi, b);
  }
  const double margin = 1e-7 * (1.0 + std::abs(hi) + std::abs(lo));
  return {lo - margin, hi + margin};
}

}  // namespace detail

/// Aggregated master: min mu s.t. mu >= f(X^k) + lambda^T (A X^k - b) for all k.
/// Variables are (mu, lambda_1..lambda_L); one row per pooled cut.
inline MasterSolution solve_aggregated(const CutPool& pool, double lambda_bar,
                                       const MasterOptions& options = {}) {
  detail::check_master_inputs(pool, lambda_bar);
  const std::size_t L = pool.num_constraints(), j = pool.size();
  if (j > options.max_rows) throw CapExceeded("aggregated master too large", static_cast<double>(j));
  std::vector<double> F(j), C(j * L);
  for (std::size_t k = 0; k < j; ++k) {
    const Cut& c = pool.cut(k);
    F[k] = c.total_profit;
    for (std::size_t l = 0; l < L; ++l) C[k * L + l] = c.total_contribution[l] - pool.rhs()[l];
  }
  LinearProgram lp(L + 1);
  lp.objective[0] = 1.0;
  const auto [lo, hi] = detail::epigraph_bounds(F, C, L, lambda_bar);
  lp.lower[0] = lo;
  lp.upper[0] = hi;
  for (std::size_t l = 0; l < L; ++l) lp.upper[l + 1] = lambda_bar;
  lp.start_at_upper.assign(L + 1, 0);
  lp.start_at_upper[0] = 1;
  std::vector<double> row(L + 1);
  for (std::size_t k = 0; k < j; ++k) {
    row[0] = 1.0;
    for (std::size_t l = 0; l < L; ++l) row[l + 1] = -C[k * L + l];
    lp.add_row(row, RowSense::greater_equal, F[k]);
  }
  const LpSolution sol = simplex_solve(lp, options.simplex);
  MasterSolution out;
  out.status = detail::to_master_status(sol);
  out.lambda = detail::clamp_lambda(std::span(sol.x).subspan(1), lambda_bar);
  out.objective_value = sol.objective;
  out.lp_rows = lp.num_rows();
  out.lp_vars = lp.num_vars;
  out.lp_iterations = sol.iterations;
  out.mu = -kInf;
  std::vector<double> values(j);
  for (std::size_t k = 0; k < j; ++k) {
    values[k] = pool.cut_value(k, out.lambda);
    out.mu = std::max(out.mu, values[k]);
  }
  const double tol = 1e-7 * std::max(1.0, std::abs(out.mu));
  for (std::size_t k = 0; k < j; ++k)
    if (values[k] >= out.mu - tol) out.active_cut_indices.push_back(k);
  return out;
}

/// Master with one epigraph variable per group of articles.
inline MasterSolution solve_grouped(const CutPool& pool, double lambda_bar, const Partition& groups,
                                    const MasterOptions& options = {}) {
  detail::check_master_inputs(pool, lambda_bar);
  const std::size_t L = pool.num_constraints(), j = pool.size(), G = groups.size();
  {
    std::vector<std::uint8_t> seen(pool.num_articles(), 0);
    for (const auto& g : groups) {
      if (g.empty()) throw InputError("partition groups must be non-empty");
      for (std::size_t i : g) {
        if (i >= pool.num_articles() || seen[i]) throw InputError("groups must partition the articles");
        seen[i] = 1;
      }
    }
    if (std::find(seen.begin(), seen.end(), 0) != seen.end())
      throw InputError("groups must partition the articles");
  }

  // distinct group rows: per group, unique combinations of its articles' offers
  struct GroupRows {
    std::vector<double> F, C;            // per row: sum f, sum contributions
    std::vector<std::size_t> first_cut;  // cut that produced the row first
  };
  std::vector<GroupRows> rows(G);
  std::size_t total_rows = 0;
  for (std::size_t g = 0; g < G; ++g) {
    std::map<std::vector<std::uint32_t>, std::size_t> seen;
    std::vector<std::uint32_t> key(groups[g].size());
    for (std::size_t k = 0; k < j; ++k) {
      for (std::size_t a = 0; a < groups[g].size(); ++a) key[a] = pool.cut(k).offer_ids[groups[g][a]];
      if (!seen.emplace(key, k).second) continue;
      double f = 0.0;
      std::vector<double> c(L, 0.0);
      for (std::size_t a = 0; a < groups[g].size(); ++a) {
        const auto& po = pool.offer(groups[g][a], key[a]);
        f += po.profit;
        for (std::size_t l = 0; l < L; ++l) c[l] += po.contributions[l];
      }
      rows[g].F.push_back(f);
      rows[g].C.insert(rows[g].C.end(), c.begin(), c.end());
      rows[g].first_cut.push_back(k);
      if (++total_rows > options.max_rows)
        throw CapExceeded("grouped master row count exceeds cap " + std::to_string(options.max_rows),
                          static_cast<double>(total_rows));
    }
  }

  LinearProgram lp(G + L);
  lp.start_at_upper.assign(G + L, 0);
  for (std::size_t g = 0; g < G; ++g) {
    lp.objective[g] = 1.0;
    const auto [lo, hi] = detail::epigraph_bounds(rows[g].F, rows[g].C, L, lambda_bar);
    lp.lower[g] = lo;
    lp.upper[g] = hi;
    lp.start_at_upper[g] = 1;
  }
  for (std::size_t l = 0; l < L; ++l) {
    lp.objective[G + l] = -pool.rhs()[l];
    lp.upper[G + l] = lambda_bar;
  }
  lp.matrix.reserve(total_rows * (G + L));
  std::vector<double> row(G + L, 0.0);
  for (std::size_t g = 0; g < G; ++g) {
    for (std::size_t r = 0; r < rows[g].F.size(); ++r) {
      std::fill(row.begin(), row.end(), 0.0);
      row[g] = 1.0;
      for (std::size_t l = 0; l < L; ++l) row[G + l] = -rows[g].C[r * L + l];
      lp.add_row(row, RowSense::greater_equal, rows[g].F[r]);
    }
  }
  const LpSolution sol = simplex_solve(lp, options.simplex);
  MasterSolution out;
  out.status = detail::to_master_status(sol);
  out.lambda = detail::clamp_lambda(std::span(sol.x).subspan(G), lambda_bar);
  out.objective_value = sol.objective;
  out.lp_rows = lp.num_rows();
  out.lp_vars = lp.num_vars;
  out.lp_iterations = sol.iterations;

  double bound = 0.0;
  for (std::size_t g = 0; g < G; ++g) {
    double best = -kInf;
    for (std::size_t r = 0; r < rows[g].F.size(); ++r) {
      double v = rows[g].F[r];
      for (std::size_t l = 0; l < L; ++l) v += out.lambda[l] * rows[g].C[r * L + l];
      best = std::max(best, v);
    }
    bound += best;
  }
  for (std::size_t l = 0; l < L; ++l) bound -= out.lambda[l] * pool.rhs()[l];
  out.mu = bound;
  const double tol = 1e-7 * std::max(1.0, std::abs(out.mu));
  for (std::size_t k = 0; k < j; ++k)
    if (pool.cut_value(k, out.lambda) >= out.mu - tol) out.active_cut_indices.push_back(k);
  return out;
}

inline MasterSolution solve_disaggregated(const CutPool& pool, double lambda_bar,
                                          const MasterOptions& options = {}) {
  Partition singletons(pool.num_articles());
  for (std::size_t i = 0; i < singletons.size(); ++i) singletons[i] = {i};
  return solve_grouped(pool, lambda_bar, singletons, options);
}

inline MasterSolution solve_partially_aggregated(const CutPool& pool, double lambda_bar,
                                                 std::size_t groups, std::uint64_t seed,
                                                 const MasterOptions& options = {}) {
  return solve_grouped(pool, lambda_bar, random_partition(pool.num_articles(), groups, seed), options);
}

/// Default multiplier box:
///   10 * max(1, max_i max_x |f_i(x)|) / max(1, min positive |b_l|), clamped to [10, 1e6].
inline double default_lambda_bar(const Instance& instance, double cap = kDefaultPathCap) {
  double max_abs_profit = 0.0;
  for (const auto& a : instance.articles) {
    ArticleEconomy econ(a, instance.grid);
    check_path_cap(econ.weeks(), econ.levels(), cap);
    double hi = 0.0, lo = 0.0;
    for (std::size_t c = 0; c < econ.countries(); ++c) {
      double chi = -kInf, clo = kInf;
      econ.for_each_plan(c, [&](const CountryPlan& p) {
        chi = std::max(chi, p.profit);
        clo = std::min(clo, p.profit);
      });
      hi += chi;
      lo += clo;
    }
    max_abs_profit = std::max({max_abs_profit, std::abs(hi), std::abs(lo)});
  }
  double min_b = kInf;
  for (const auto& c : instance.constraints)
    if (std::abs(c.rhs) > 0.0) min_b = std::min(min_b, std::abs(c.rhs));
  const double denom = std::isfinite(min_b) ? std::max(1.0, min_b) : 1.0;
  return std::clamp(10.0 * std::max(1.0, max_abs_profit) / denom, 10.0, 1e6);
}

}  // namespace lagcut
