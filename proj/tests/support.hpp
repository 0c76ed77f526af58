#pragma once

// Shared fixtures and independent brute-force oracles for the test suite.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include "lagcut.hpp"

namespace lagcut::testing {

inline Instance small_instance(std::uint64_t seed, std::size_t n = 4, std::size_t countries = 1,
                               std::size_t weeks = 3, std::size_t levels = 3,
                               Difficulty difficulty = Difficulty::hard) {
  GenSpec s;
  s.articles = n;
  s.countries = countries;
  s.weeks = weeks;
  s.levels = levels;
  s.difficulty = difficulty;
  s.seed = seed;
  return generate(s);
}

/// Path count by explicit recursion over weeks.
inline double brute_count_paths(std::size_t weeks, std::size_t levels, std::size_t min_level = 0) {
  if (weeks == 0) return 1.0;
  double total = 0.0;
  for (std::size_t d = min_level; d < levels; ++d) total += brute_count_paths(weeks - 1, levels, d);
  return total;
}

/// Brute-force simulation of one country path straight from the article data.
inline CountryPlan simulate(const Article& a, const DiscountGrid& g, std::size_t c,
                            const std::vector<std::uint8_t>& path) {
  const auto& cd = a.countries[c];
  CountryPlan p;
  p.path = path;
  p.base_price = cd.base_price;
  double stock = cd.initial_stock;
  for (std::size_t w = 0; w < path.size(); ++w) {
    const double delta = g.levels[path[w]];
    const double price = (1.0 - delta) * cd.base_price;
    const double demand = std::round(cd.base_demand * a.seasonality[w] * std::exp(cd.elasticity * delta));
    const double sold = std::min(stock, demand);
    stock -= sold;
    p.profit += (price - a.unit_cost * cd.base_price) * sold;
    p.revenue += price * sold;
    p.units += sold;
    if (w == 0) {
      p.first_week_price = price;
      p.first_week_sales = sold;
    }
  }
  p.leftover = stock;
  p.profit += cd.salvage_fraction * cd.base_price * stock;
  return p;
}

/// Every monotone path of the given shape.
inline std::vector<std::vector<std::uint8_t>> all_paths(std::size_t weeks, std::size_t levels) {
  std::vector<std::vector<std::uint8_t>> out;
  std::vector<std::uint8_t> cur;
  std::function<void(std::size_t)> rec = [&](std::size_t lo) {
    if (cur.size() == weeks) {
      out.push_back(cur);
      return;
    }
    for (std::size_t d = lo; d < levels; ++d) {
      cur.push_back(static_cast<std::uint8_t>(d));
      rec(d);
      cur.pop_back();
    }
  };
  rec(0);
  return out;
}

/// Optimum of a small LP by enumerating every basic solution: choose n
/// active constraints among rows (as equalities) and variable bounds, solve,
/// keep the feasible ones. Requires finite bounds on every variable.
inline double lp_vertex_oracle(const LinearProgram& lp, bool* feasible = nullptr) {
  const std::size_t n = lp.num_vars, m = lp.num_rows();
  struct Plane {
    std::vector<double> a;
    double beta;
  };
  std::vector<Plane> planes;
  for (std::size_t r = 0; r < m; ++r) {
    Plane p{std::vector<double>(lp.matrix.begin() + static_cast<std::ptrdiff_t>(r * n),
                                lp.matrix.begin() + static_cast<std::ptrdiff_t>((r + 1) * n)),
            lp.rhs[r]};
    planes.push_back(p);
  }
  for (std::size_t v = 0; v < n; ++v) {
    std::vector<double> e(n, 0.0);
    e[v] = 1.0;
    planes.push_back({e, lp.lower[v]});
    planes.push_back({e, lp.upper[v]});
  }
  const std::size_t P = planes.size();
  double best = std::numeric_limits<double>::infinity();
  bool any = false;
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  std::vector<double> M(n * (n + 1)), x(n);
  while (true) {
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t c = 0; c < n; ++c) M[r * (n + 1) + c] = planes[idx[r]].a[c];
      M[r * (n + 1) + n] = planes[idx[r]].beta;
    }
    bool singular = false;
    for (std::size_t c = 0; c < n; ++c) {
      std::size_t piv = c;
      for (std::size_t r = c + 1; r < n; ++r)
        if (std::abs(M[r * (n + 1) + c]) > std::abs(M[piv * (n + 1) + c])) piv = r;
      if (std::abs(M[piv * (n + 1) + c]) < 1e-12) { singular = true; break; }
      for (std::size_t k = 0; k <= n; ++k) std::swap(M[c * (n + 1) + k], M[piv * (n + 1) + k]);
      for (std::size_t r = 0; r < n; ++r) {
        if (r == c) continue;
        const double f = M[r * (n + 1) + c] / M[c * (n + 1) + c];
        for (std::size_t k = c; k <= n; ++k) M[r * (n + 1) + k] -= f * M[c * (n + 1) + k];
      }
    }
    if (!singular) {
      for (std::size_t v = 0; v < n; ++v) x[v] = M[v * (n + 1) + n] / M[v * (n + 1) + v];
      bool ok = true;
      for (std::size_t v = 0; v < n && ok; ++v) {
        const double tol = 1e-9 * (1.0 + std::abs(x[v]));
        ok = x[v] >= lp.lower[v] - tol && x[v] <= lp.upper[v] + tol;
      }
      for (std::size_t r = 0; r < m && ok; ++r) {
        double ax = 0.0, scale = std::abs(lp.rhs[r]);
        for (std::size_t v = 0; v < n; ++v) {
          ax += lp.matrix[r * n + v] * x[v];
          scale += std::abs(lp.matrix[r * n + v] * x[v]);
        }
        const double tol = 1e-9 * (1.0 + scale);
        if (lp.senses[r] == RowSense::greater_equal) ok = ax >= lp.rhs[r] - tol;
        else if (lp.senses[r] == RowSense::less_equal) ok = ax <= lp.rhs[r] + tol;
        else ok = std::abs(ax - lp.rhs[r]) <= tol;
      }
      if (ok) {
        double obj = 0.0;
        for (std::size_t v = 0; v < n; ++v) obj += lp.objective[v] * x[v];
        best = std::min(best, obj);
        any = true;
      }
    }
    std::size_t pos = n;
    bool advanced = false;
    while (pos > 0) {
      --pos;
      if (idx[pos] < P - n + pos) {
        ++idx[pos];
        for (std::size_t q = pos + 1; q < n; ++q) idx[q] = idx[q - 1] + 1;
        advanced = true;
        break;
      }
    }
    if (!advanced) break;
  }
  if (feasible) *feasible = any;
  return best;
}

/// Best selection objective by enumerating every per-article offer choice.
inline double exhaustive_selection(const SelectionProblem& prob, std::vector<std::uint32_t>* arg = nullptr) {
  const CutPool& pool = *prob.pool;
  const std::size_t n = pool.num_articles();
  std::vector<std::uint32_t> ids(n, 0);
  double best = -std::numeric_limits<double>::infinity();
  while (true) {
    const double v = prob.objective(ids);
    if (v > best) {
      best = v;
      if (arg) *arg = ids;
    }
    std::size_t i = n;
    while (i > 0) {
      --i;
      if (++ids[i] < pool.offer_count(i)) break;
      ids[i] = 0;
      if (i == 0) return best;
    }
  }
}

/// Pool of random offer values: n articles, j cuts, L constraints.
inline CutPool random_pool(std::uint64_t seed, std::size_t n, std::size_t j, std::size_t L,
                           double profit_scale = 100.0) {
  auto rng = SplitMix64::stream(seed, {0x706f6f6cULL});
  std::vector<double> rhs(L);
  for (auto& b : rhs) b = rng.uniform(-5.0, 5.0) * static_cast<double>(n);
  CutPool pool(n, rhs);
  for (std::size_t k = 0; k < j; ++k) {
    std::vector<double> profits(n);
    std::vector<std::vector<double>> contrib(n, std::vector<double>(L));
    for (std::size_t i = 0; i < n; ++i) {
      profits[i] = rng.uniform(0.0, profit_scale);
      for (auto& c : contrib[i]) c = rng.uniform(-10.0, 10.0);
    }
    pool.add_cut_values(profits, contrib, CutOrigin::exact_lr);
  }
  return pool;
}

inline double rel_diff(double a, double b) {
  return std::abs(a - b) / std::max(1.0, std::max(std::abs(a), std::abs(b)));
}

}  // namespace lagcut::testing
