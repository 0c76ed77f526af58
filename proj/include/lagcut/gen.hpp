#pragma once

// Seeded synthetic instances and brute-force oracles.
//
// Instances have one sDR lower and one sDR upper bound per country. The
// difficulty preset decides where the targets sit relative to the sDR of the
// unconstrained profit maximisers (s0):
//   easy             band [r_lo, r_hi] from the spec, clamped to the grid
//   hard             r_lo = s0 + skew * (max_discount - s0), so most countries
//                    start out violated and multipliers have to work
//   infeasible-link  as hard, but country 0 asks for more than the deepest
//                    discount can deliver

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lagcut/master.hpp"
#include "lagcut/model.hpp"
#include "lagcut/rng.hpp"
#include "lagcut/subproblem.hpp"

namespace lagcut {

enum class Difficulty { easy, hard, infeasible_link };

inline std::string_view to_string(Difficulty d) {
  switch (d) {
    case Difficulty::easy: return "easy";
    case Difficulty::hard: return "hard";
    case Difficulty::infeasible_link: return "infeasible-link";
  }
  return "?";
}
inline Difficulty difficulty_from(std::string_view s) {
  if (s == "easy") return Difficulty::easy;
  if (s == "hard") return Difficulty::hard;
  if (s == "infeasible-link") return Difficulty::infeasible_link;
  throw InputError("unknown difficulty '" + std::string(s) + "'");
}

struct Range {
  double lo = 0.0;
  double hi = 0.0;
};

struct GenSpec {
  std::size_t articles = 20;
  std::size_t countries = 2;
  std::size_t weeks = 4;
  std::size_t levels = 4;
  double max_discount = 0.6;
  Range price{20.0, 120.0};
  Range demand{2.0, 20.0};      // units per week at full price
  Range elasticity{1.0, 4.0};
  Range stock_weeks{1.5, 4.0};  // initial stock in weeks of base demand
  Range salvage{0.0, 0.3};
  Range unit_cost{0.3, 0.6};
  double seasonality_amplitude = 0.3;
  Range sdr_band{0.05, 0.35};   // easy preset targets
  Range hard_skew{0.3, 0.6};
  double hard_band_width = 0.15;
  Difficulty difficulty = Difficulty::easy;
  std::uint64_t seed = 1;
  double path_cap = kDefaultPathCap;
  std::optional<double> lambda_bar;

  void validate() const {
    auto check = [](Range r, const char* what, double min_lo) {
      if (!std::isfinite(r.lo) || !std::isfinite(r.hi) || r.lo > r.hi || r.lo < min_lo)
        throw InputError(std::string("invalid range for ") + what);
    };
    if (articles < 1 || countries < 1 || weeks < 1 || levels < 1)
      throw InputError("articles, countries, weeks and levels must be >= 1");
    if (weeks > 16 || levels > 16) throw InputError("weeks and levels are limited to 16");
    if (!(max_discount >= 0.0 && max_discount < 1.0)) throw InputError("max_discount must lie in [0, 1)");
    if (levels > 1 && max_discount == 0.0) throw InputError("max_discount must be > 0 with several levels");
    check(price, "price", 1e-9);
    check(demand, "demand", 1.0);
    check(elasticity, "elasticity", 0.0);
    check(stock_weeks, "stock_weeks", 0.0);
    check(salvage, "salvage", 0.0);
    check(unit_cost, "unit_cost", 0.0);
    check(sdr_band, "sdr_band", 0.0);
    check(hard_skew, "hard_skew", 0.0);
    if (salvage.hi >= 1.0 || unit_cost.hi >= 1.0 || sdr_band.hi >= 1.0 || hard_skew.hi > 1.0)
      throw InputError("fractions must stay below 1");
    if (!(seasonality_amplitude >= 0.0 && seasonality_amplitude < 1.0))
      throw InputError("seasonality amplitude must lie in [0, 1)");
    if (!(hard_band_width > 0.0)) throw InputError("hard band width must be > 0");
    if (lambda_bar && !(*lambda_bar > 0.0)) throw InputError("lambda_bar must be > 0");
  }
};

inline DiscountGrid make_grid(std::size_t levels, double max_discount) {
  DiscountGrid g;
  for (std::size_t d = 0; d < levels; ++d)
    g.levels.push_back(levels == 1 ? 0.0
                                   : max_discount * static_cast<double>(d) / static_cast<double>(levels - 1));
  return g;
}

/// sDR per country of the unconstrained per-article profit maximisers.
inline std::vector<double> unconstrained_sdr(const Instance& base) {
  std::vector<Offer> offers;
  for (const auto& a : base.articles)
    offers.push_back(solve_article(a, base.grid, {}, {}).offer);
  std::vector<double> out;
  for (std::size_t c = 0; c < base.num_countries(); ++c) {
    const double r = sdr_ratio(offers, c);
    out.push_back(std::isnan(r) ? 0.0 : r);
  }
  return out;
}

inline Instance generate(const GenSpec& spec) {
  spec.validate();
  check_path_cap(spec.weeks, spec.levels, spec.path_cap);
  Instance inst;
  inst.seed = spec.seed;
  inst.grid = make_grid(spec.levels, spec.max_discount);
  auto rng = SplitMix64::stream(spec.seed, {0x67656eULL});
  for (std::size_t i = 0; i < spec.articles; ++i) {
    Article a;
    a.id = i;
    a.unit_cost = rng.uniform(spec.unit_cost.lo, spec.unit_cost.hi);
    const double phase = rng.uniform(0.0, 6.283185307179586);
    for (std::size_t w = 0; w < spec.weeks; ++w)
      a.seasonality.push_back(1.0 + spec.seasonality_amplitude *
                                        std::sin(phase + 6.283185307179586 * static_cast<double>(w) /
                                                             static_cast<double>(std::max<std::size_t>(spec.weeks, 2))));
    for (std::size_t c = 0; c < spec.countries; ++c) {
      CountryData cd;
      cd.base_price = std::round(rng.uniform(spec.price.lo, spec.price.hi) * 100.0) / 100.0;
      cd.base_demand = rng.uniform(spec.demand.lo, spec.demand.hi);
      cd.elasticity = rng.uniform(spec.elasticity.lo, spec.elasticity.hi);
      cd.initial_stock =
          std::max(1.0, std::round(cd.base_demand * rng.uniform(spec.stock_weeks.lo, spec.stock_weeks.hi)));
      cd.salvage_fraction = rng.uniform(spec.salvage.lo, spec.salvage.hi);
      a.countries.push_back(cd);
    }
    inst.articles.push_back(std::move(a));
  }

  const std::vector<double> s0 = unconstrained_sdr(inst);
  const double top = inst.grid.max_level();
  for (std::size_t c = 0; c < spec.countries; ++c) {
    double lo = 0.0, hi = 0.0;
    if (spec.difficulty == Difficulty::easy) {
      lo = std::min(spec.sdr_band.lo, top);
      hi = std::max(lo, spec.sdr_band.hi);
    } else {
      const double skew = rng.uniform(spec.hard_skew.lo, spec.hard_skew.hi);
      lo = s0[c] + skew * (top - s0[c]);
      hi = std::min(0.99, lo + spec.hard_band_width);
      if (spec.difficulty == Difficulty::infeasible_link && c == 0) {
        lo = top + 0.5 * (1.0 - top);
        hi = lo + 0.5 * (0.99 - lo);
      }
    }
    RawConstraint lower{ConstraintKind::sdr_lower, c, lo, Metric::revenue, 1.0, Sense::greater_equal, 0.0};
    RawConstraint upper{ConstraintKind::sdr_upper, c, hi, Metric::revenue, 1.0, Sense::less_equal, 0.0};
    inst.constraints.push_back(canonicalize(lower, inst.constraints.size()));
    inst.constraints.push_back(canonicalize(upper, inst.constraints.size()));
  }
  inst.lambda_bar = spec.lambda_bar.value_or(default_lambda_bar(inst, spec.path_cap));
  inst.validate();
  return inst;
}

// ---------------------------------------------------------------------------
// Oracles (verification only)

struct OracleResult {
  bool feasible = false;
  double value = -std::numeric_limits<double>::infinity();  // P
  std::vector<Offer> offers;
  double combinations = 0.0;
};

/// Exhaustive search over the product of the articles' offer sets.
inline OracleResult oracle_solve(const Instance& instance, double cap = 1e7) {
  instance.validate();
  const std::size_t n = instance.num_articles(), L = instance.num_constraints();
  std::vector<std::vector<Offer>> sets;
  double product = 1.0;
  for (const auto& a : instance.articles) {
    sets.push_back(enumerate_offers(a, instance.grid, instance.constraints));
    product *= static_cast<double>(sets.back().size());
    if (product > cap) throw CapExceeded("oracle search space exceeds cap", product);
  }
  OracleResult out;
  out.combinations = product;
  if (n == 0) {
    out.feasible = true;
    out.value = 0.0;
    return out;
  }
  std::vector<std::size_t> choice(n, 0), best;
  std::vector<double> ax(L), absx(L);
  // depth-first over articles with running sums held per level
  std::vector<std::vector<double>> ax_stack(n + 1, std::vector<double>(L, 0.0));
  std::vector<std::vector<double>> abs_stack(n + 1, std::vector<double>(L, 0.0));
  std::vector<double> f_stack(n + 1, 0.0);
  std::size_t depth = 0;
  std::vector<std::size_t> next(n + 1, 0);
  while (true) {
    if (depth == n) {
      bool ok = true;
      for (std::size_t l = 0; l < L && ok; ++l) {
        const double residual = instance.constraints[l].rhs - ax_stack[n][l];
        ok = residual <= linking_tolerance(instance.constraints[l].rhs, abs_stack[n][l]);
      }
      if (ok && (!out.feasible || f_stack[n] > out.value)) {
        out.feasible = true;
        out.value = f_stack[n];
        best = choice;
      }
      --depth;
      continue;
    }
    if (next[depth] == sets[depth].size()) {
      next[depth] = 0;
      if (depth == 0) break;
      --depth;
      continue;
    }
    const Offer& o = sets[depth][next[depth]];
    choice[depth] = next[depth]++;
    f_stack[depth + 1] = f_stack[depth] + o.profit;
    for (std::size_t l = 0; l < L; ++l) {
      ax_stack[depth + 1][l] = ax_stack[depth][l] + o.contributions[l];
      abs_stack[depth + 1][l] = abs_stack[depth][l] + std::abs(o.contributions[l]);
    }
    ++depth;
  }
  if (out.feasible)
    for (std::size_t i = 0; i < n; ++i) out.offers.push_back(sets[i][best[i]]);
  return out;
}

enum class Formulation { aggregated, disaggregated, partially_aggregated };

namespace detail {

// Convex piecewise-linear function  h(lambda) = sum_g max_r (F_gr + lambda^T C_gr) - lambda^T b.
struct PiecewiseMax {
  std::size_t L = 0;
  std::vector<std::vector<double>> F;  // per group
  std::vector<std::vector<double>> C;  // per group, rows x L
  std::vector<double> b;

  double operator()(std::span<const double> lambda) const {
    double v = 0.0;
    for (std::size_t g = 0; g < F.size(); ++g) {
      double best = -std::numeric_limits<double>::infinity();
      for (std::size_t r = 0; r < F[g].size(); ++r) {
        double s = F[g][r];
        for (std::size_t l = 0; l < L; ++l) s += lambda[l] * C[g][r * L + l];
        best = std::max(best, s);
      }
      v += best;
    }
    for (std::size_t l = 0; l < L; ++l) v -= lambda[l] * b[l];
    return v;
  }
};

inline PiecewiseMax piecewise_for(const CutPool& pool, const Partition& groups) {
  PiecewiseMax h;
  h.L = pool.num_constraints();
  h.b.assign(pool.rhs().begin(), pool.rhs().end());
  for (const auto& g : groups) {
    std::vector<double> F, C;
    for (std::size_t k = 0; k < pool.size(); ++k) {
      double f = 0.0;
      std::vector<double> c(h.L, 0.0);
      for (std::size_t i : g) {
        const auto& po = pool.offer_of(i, k);
        f += po.profit;
        for (std::size_t l = 0; l < h.L; ++l) c[l] += po.contributions[l];
      }
      F.push_back(f);
      C.insert(C.end(), c.begin(), c.end());
    }
    h.F.push_back(std::move(F));
    h.C.push_back(std::move(C));
  }
  return h;
}

}  // namespace detail

/// Minimum of the master's piecewise-linear bound over the multiplier box by
/// enumerating every vertex of the hyperplane arrangement (box faces and
/// pairwise breakpoints within a group). Only for L <= 4.
inline double oracle_master(const CutPool& pool, double lambda_bar, Formulation formulation,
                            std::size_t groups = 1, std::uint64_t seed = 0) {
  const std::size_t L = pool.num_constraints();
  if (L > 4) throw CapExceeded("vertex oracle supports at most 4 multipliers", static_cast<double>(L));
  if (pool.empty()) throw InputError("oracle needs a non-empty pool");
  Partition part;
  switch (formulation) {
    case Formulation::aggregated: part = random_partition(pool.num_articles(), 1, seed); break;
    case Formulation::disaggregated:
      part.resize(pool.num_articles());
      for (std::size_t i = 0; i < part.size(); ++i) part[i] = {i};
      break;
    case Formulation::partially_aggregated: part = random_partition(pool.num_articles(), groups, seed); break;
  }
  const detail::PiecewiseMax h = detail::piecewise_for(pool, part);
  if (L == 0) return h({});

  // hyperplanes  a^T lambda = beta
  std::vector<std::vector<double>> planes_a;
  std::vector<double> planes_beta;
  for (std::size_t l = 0; l < L; ++l) {
    std::vector<double> e(L, 0.0);
    e[l] = 1.0;
    planes_a.push_back(e);
    planes_beta.push_back(0.0);
    planes_a.push_back(e);
    planes_beta.push_back(lambda_bar);
  }
  for (std::size_t g = 0; g < h.F.size(); ++g)
    for (std::size_t r = 0; r < h.F[g].size(); ++r)
      for (std::size_t s = r + 1; s < h.F[g].size(); ++s) {
        std::vector<double> a(L);
        bool nonzero = false;
        for (std::size_t l = 0; l < L; ++l) {
          a[l] = h.C[g][r * L + l] - h.C[g][s * L + l];
          nonzero = nonzero || a[l] != 0.0;
        }
        if (!nonzero) continue;
        planes_a.push_back(std::move(a));
        planes_beta.push_back(h.F[g][s] - h.F[g][r]);
      }
  const std::size_t P = planes_a.size();
  if (std::pow(static_cast<double>(P), static_cast<double>(L)) > 5e8)
    throw CapExceeded("vertex oracle arrangement too large", static_cast<double>(P));

  double best = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> idx(L);
  for (std::size_t l = 0; l < L; ++l) idx[l] = l;
  std::vector<double> m(L * (L + 1)), lambda(L);
  while (true) {
    // solve the L x L system by Gaussian elimination with partial pivoting
    for (std::size_t r = 0; r < L; ++r) {
      for (std::size_t c = 0; c < L; ++c) m[r * (L + 1) + c] = planes_a[idx[r]][c];
      m[r * (L + 1) + L] = planes_beta[idx[r]];
    }
    bool singular = false;
    for (std::size_t c = 0; c < L && !singular; ++c) {
      std::size_t piv = c;
      for (std::size_t r = c + 1; r < L; ++r)
        if (std::abs(m[r * (L + 1) + c]) > std::abs(m[piv * (L + 1) + c])) piv = r;
      if (std::abs(m[piv * (L + 1) + c]) < 1e-12) { singular = true; break; }
      for (std::size_t k = 0; k <= L; ++k) std::swap(m[c * (L + 1) + k], m[piv * (L + 1) + k]);
      for (std::size_t r = 0; r < L; ++r) {
        if (r == c) continue;
        const double f = m[r * (L + 1) + c] / m[c * (L + 1) + c];
        for (std::size_t k = c; k <= L; ++k) m[r * (L + 1) + k] -= f * m[c * (L + 1) + k];
      }
    }
    if (!singular) {
      bool inside = true;
      for (std::size_t l = 0; l < L; ++l) {
        lambda[l] = m[l * (L + 1) + L] / m[l * (L + 1) + l];
        const double slack = 1e-9 * (1.0 + lambda_bar);
        if (lambda[l] < -slack || lambda[l] > lambda_bar + slack) inside = false;
        lambda[l] = std::clamp(lambda[l], 0.0, lambda_bar);
      }
      if (inside) best = std::min(best, h(lambda));
    }
    // next combination
    std::size_t pos = L;
    while (pos > 0) {
      --pos;
      if (idx[pos] < P - L + pos) {
        ++idx[pos];
        for (std::size_t q = pos + 1; q < L; ++q) idx[q] = idx[q - 1] + 1;
        break;
      }
      if (pos == 0) return best;
    }
  }
}

}  // namespace lagcut
