#pragma once

// Exact single-article Lagrangian subproblem and the full relaxation LR(lambda).
//
// An article's feasible set is every combination of per-country markdown
// paths: a path assigns one grid level per week and never moves back to a
// shallower discount. Stock is held per country, so both the profit and the
// linking contributions split into per-country sums and the article argmax is
// the concatenation of per-country argmaxes. Paths are enumerated depth-first
// in lexicographic order; the first maximiser wins ties.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "lagcut/model.hpp"
#include "lagcut/parallel.hpp"

namespace lagcut {

inline constexpr double kDefaultPathCap = 1e6;

/// Number of non-decreasing paths of length `weeks` over `levels` grid levels,
/// binomial(weeks + levels - 1, levels - 1), saturating at +inf.
inline double count_paths(std::size_t weeks, std::size_t levels) {
  if (levels == 0) return 0.0;
  double c = 1.0;
  const std::size_t k = levels - 1;
  for (std::size_t j = 1; j <= k; ++j) {
    c = c * static_cast<double>(weeks + j) / static_cast<double>(j);
    if (!std::isfinite(c)) return std::numeric_limits<double>::infinity();
  }
  return std::round(c);
}

inline void check_path_cap(std::size_t weeks, std::size_t levels, double cap) {
  const double count = count_paths(weeks, levels);
  if (count > cap)
    throw CapExceeded("markdown path count per country " + std::to_string(count) +
                          " exceeds cap " + std::to_string(cap),
                      count);
}

/// Demand, price and margin per (country, week, grid level) for one article.
class ArticleEconomy {
 public:
  ArticleEconomy(const Article& article, const DiscountGrid& grid)
      : article_(&article),
        countries_(article.countries.size()),
        weeks_(article.horizon()),
        levels_(grid.size()),
        demand_(countries_ * weeks_ * levels_),
        price_(countries_ * levels_),
        margin_(countries_ * levels_) {
    for (std::size_t c = 0; c < countries_; ++c) {
      const auto& cd = article.countries[c];
      for (std::size_t d = 0; d < levels_; ++d) {
        const double delta = grid.levels[d];
        price_[c * levels_ + d] = (1.0 - delta) * cd.base_price;
        margin_[c * levels_ + d] = price_[c * levels_ + d] - article.unit_cost * cd.base_price;
        const double lift = std::exp(cd.elasticity * delta);
        for (std::size_t w = 0; w < weeks_; ++w)
          // whole units keep the stock balance exact in floating point
          demand_[(c * weeks_ + w) * levels_ + d] =
              std::round(cd.base_demand * article.seasonality[w] * lift);
      }
    }
  }

  std::size_t countries() const noexcept { return countries_; }
  std::size_t weeks() const noexcept { return weeks_; }
  std::size_t levels() const noexcept { return levels_; }
  const Article& article() const noexcept { return *article_; }

  double demand(std::size_t c, std::size_t w, std::size_t d) const {
    return demand_[(c * weeks_ + w) * levels_ + d];
  }
  double price(std::size_t c, std::size_t d) const { return price_[c * levels_ + d]; }
  double margin(std::size_t c, std::size_t d) const { return margin_[c * levels_ + d]; }

  /// Simulates one country under `path`.
  CountryPlan plan(std::size_t c, std::span<const std::uint8_t> path) const {
    if (path.size() != weeks_) throw InputError("path length does not match horizon");
    CountryPlan p;
    p.path.assign(path.begin(), path.end());
    p.base_price = article_->countries[c].base_price;
    double remaining = article_->countries[c].initial_stock;
    for (std::size_t w = 0; w < weeks_; ++w) {
      const std::size_t d = path[w];
      if (d >= levels_ || (w > 0 && path[w] < path[w - 1]))
        throw InputError("path must be non-decreasing grid indices");
      const double sales = std::min(remaining, demand(c, w, d));
      remaining -= sales;
      p.profit += margin(c, d) * sales;
      p.revenue += price(c, d) * sales;
      p.units += sales;
      if (w == 0) {
        p.first_week_price = price(c, d);
        p.first_week_sales = sales;
      }
    }
    p.leftover = remaining;
    p.profit += article_->countries[c].salvage_fraction * p.base_price * remaining;
    return p;
  }

  /// Calls `visit(plan)` for every monotone path of country c, in
  /// lexicographic path order.
  template <typename Visit>
  void for_each_plan(std::size_t c, Visit&& visit) const {
    std::vector<std::uint8_t> path(weeks_, 0);
    CountryPlan scratch;
    scratch.base_price = article_->countries[c].base_price;
    descend(c, 0, 0, article_->countries[c].initial_stock, 0.0, 0.0, 0.0, path, scratch, visit);
  }

 private:
  template <typename Visit>
  void descend(std::size_t c, std::size_t w, std::size_t min_level, double remaining, double profit,
               double revenue, double units, std::vector<std::uint8_t>& path, CountryPlan& scratch,
               Visit& visit) const {
    if (w == weeks_) {
      scratch.path = path;
      scratch.leftover = remaining;
      scratch.profit =
          profit + article_->countries[c].salvage_fraction * scratch.base_price * remaining;
      scratch.revenue = revenue;
      scratch.units = units;
      visit(static_cast<const CountryPlan&>(scratch));
      return;
    }
    for (std::size_t d = min_level; d < levels_; ++d) {
      path[w] = static_cast<std::uint8_t>(d);
      const double sales = std::min(remaining, demand(c, w, d));
      if (w == 0) {
        scratch.first_week_price = price(c, d);
        scratch.first_week_sales = sales;
      }
      descend(c, w + 1, d, remaining - sales, profit + margin(c, d) * sales,
              revenue + price(c, d) * sales, units + sales, path, scratch, visit);
    }
  }

  const Article* article_;
  std::size_t countries_, weeks_, levels_;
  std::vector<double> demand_, price_, margin_;
};

/// Assembles an offer from per-country plans, filling the caches.
inline Offer make_offer(std::size_t article_id, std::vector<CountryPlan> plans,
                        std::span<const LinkingConstraint> constraints) {
  Offer o;
  o.article_id = article_id;
  o.plans = std::move(plans);
  for (const auto& p : o.plans) o.profit += p.profit;
  o.contributions.resize(constraints.size());
  for (std::size_t l = 0; l < constraints.size(); ++l)
    o.contributions[l] = contribution(o, constraints[l]);
  return o;
}

/// Rebuilds an offer from its discount paths only.
inline Offer recompute_offer(const Article& article, const DiscountGrid& grid,
                             std::span<const LinkingConstraint> constraints,
                             const std::vector<std::vector<std::uint8_t>>& paths) {
  ArticleEconomy econ(article, grid);
  if (paths.size() != econ.countries()) throw InputError("one path per country required");
  std::vector<CountryPlan> plans;
  for (std::size_t c = 0; c < paths.size(); ++c) plans.push_back(econ.plan(c, paths[c]));
  return make_offer(article.id, std::move(plans), constraints);
}

inline std::vector<CountryPlan> enumerate_country_plans(const ArticleEconomy& econ, std::size_t c,
                                                        double cap = kDefaultPathCap) {
  check_path_cap(econ.weeks(), econ.levels(), cap);
  std::vector<CountryPlan> out;
  out.reserve(static_cast<std::size_t>(count_paths(econ.weeks(), econ.levels())));
  econ.for_each_plan(c, [&](const CountryPlan& p) { out.push_back(p); });
  return out;
}

/// Every offer of the article: the Cartesian product of per-country paths,
/// country 0 varying slowest.
inline std::vector<Offer> enumerate_offers(const Article& article, const DiscountGrid& grid,
                                           std::span<const LinkingConstraint> constraints,
                                           double cap = kDefaultPathCap) {
  ArticleEconomy econ(article, grid);
  std::vector<std::vector<CountryPlan>> per_country;
  double total = 1.0;
  for (std::size_t c = 0; c < econ.countries(); ++c) {
    per_country.push_back(enumerate_country_plans(econ, c, cap));
    total *= static_cast<double>(per_country.back().size());
  }
  if (total > 1e7) throw CapExceeded("joint offer count too large to materialise", total);
  std::vector<Offer> out;
  out.reserve(static_cast<std::size_t>(total));
  std::vector<std::size_t> idx(econ.countries(), 0);
  while (true) {
    std::vector<CountryPlan> plans;
    for (std::size_t c = 0; c < idx.size(); ++c) plans.push_back(per_country[c][idx[c]]);
    out.push_back(make_offer(article.id, std::move(plans), constraints));
    std::size_t c = idx.size();
    while (c > 0) {
      --c;
      if (++idx[c] < per_country[c].size()) break;
      idx[c] = 0;
      if (c == 0) return out;
    }
    if (idx.empty()) return out;
  }
}

struct SubproblemResult {
  Offer offer;
  double lagrangian_value = 0.0;  // f_i(x_i) + lambda^T A_i x_i
};

inline double lagrangian_term(const Offer& offer, std::span<const double> lambda) {
  double v = offer.profit;
  for (std::size_t l = 0; l < lambda.size(); ++l) v += lambda[l] * offer.contributions[l];
  return v;
}

inline void check_multipliers(std::span<const double> lambda, std::size_t num_constraints) {
  if (lambda.size() != num_constraints) throw InputError("multiplier length must equal L");
  for (double v : lambda)
    if (!std::isfinite(v) || v < 0.0) throw InputError("multipliers must be finite and >= 0");
}

/// argmax over the article's offers of f_i(x_i) + lambda^T A_i x_i.
inline SubproblemResult solve_article(const Article& article, const DiscountGrid& grid,
                                      std::span<const LinkingConstraint> constraints,
                                      std::span<const double> lambda,
                                      double cap = kDefaultPathCap) {
  check_multipliers(lambda, constraints.size());
  ArticleEconomy econ(article, grid);
  check_path_cap(econ.weeks(), econ.levels(), cap);
  std::vector<CountryPlan> best(econ.countries());
  for (std::size_t c = 0; c < econ.countries(); ++c) {
    std::vector<std::size_t> rows;
    for (std::size_t l = 0; l < constraints.size(); ++l)
      if (constraints[l].country == c && lambda[l] != 0.0) rows.push_back(l);
    double best_score = -std::numeric_limits<double>::infinity();
    econ.for_each_plan(c, [&](const CountryPlan& p) {
      double score = p.profit;
      for (std::size_t l : rows)
        score += lambda[l] * (constraints[l].sign * raw_functional(p, constraints[l]));
      if (score > best_score) {
        best_score = score;
        best[c] = p;
      }
    });
  }
  SubproblemResult r;
  r.offer = make_offer(article.id, std::move(best), constraints);
  r.lagrangian_value = lagrangian_term(r.offer, lambda);
  return r;
}

struct RelaxationResult {
  double value = 0.0;  // LR(lambda)
  std::vector<Offer> offers;
  std::vector<double> article_values;
};

/// LR(lambda) = sum_i max_{x_i} (f_i + lambda^T A_i x_i) - lambda^T b, solved as
/// a parallel map over articles with an index-ordered reduction.
inline RelaxationResult evaluate_lr(const Instance& instance, std::span<const double> lambda,
                                    std::size_t threads = 1, double cap = kDefaultPathCap) {
  check_multipliers(lambda, instance.num_constraints());
  const std::size_t n = instance.num_articles();
  std::vector<SubproblemResult> results(n);
  parallel_for(n, threads, [&](std::size_t i) {
    results[i] = solve_article(instance.articles[i], instance.grid, instance.constraints, lambda,
                               cap);
  });
  RelaxationResult out;
  out.offers.reserve(n);
  out.article_values.reserve(n);
  for (auto& r : results) {
    out.value += r.lagrangian_value;
    out.article_values.push_back(r.lagrangian_value);
    out.offers.push_back(std::move(r.offer));
  }
  for (std::size_t l = 0; l < lambda.size(); ++l) out.value -= lambda[l] * instance.constraints[l].rhs;
  return out;
}

/// LR(lambda, x) = f(x) + lambda^T (A x - b) for a fixed offer set.
inline double lagrangian_value(std::span<const Offer> offers, std::span<const double> lambda,
                               std::span<const LinkingConstraint> constraints) {
  double v = 0.0;
  for (const auto& o : offers) v += lagrangian_term(o, lambda);
  for (std::size_t l = 0; l < lambda.size(); ++l) v -= lambda[l] * constraints[l].rhs;
  return v;
}

}  // namespace lagcut
