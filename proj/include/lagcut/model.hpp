#pragma once

// Domain types for markdown pricing instances: the shared discount grid,
// articles with per-country economics, offers (one article's complete price
// decision) and the linking constraints that couple articles.
//
// Linking constraints are stored in the canonical form  sum_i (A_i x_i) >= b.
// A "<=" input is negated (functional and rhs) on ingestion, so every
// algorithm downstream sees a single sense.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace lagcut {

/// Malformed input: bad files, bad parameters, violated preconditions.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An enumeration or LP size limit was exceeded.
class CapExceeded : public InputError {
 public:
  CapExceeded(const std::string& what, double count) : InputError(what), count_(count) {}
  double count() const noexcept { return count_; }

 private:
  double count_;
};

/// The numerical core failed (singular basis, invalid cut detected, ...).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Grid and articles

struct DiscountGrid {
  std::vector<double> levels;  // discount fractions, levels[0] == 0

  std::size_t size() const noexcept { return levels.size(); }
  double max_level() const noexcept { return levels.empty() ? 0.0 : levels.back(); }

  void validate() const {
    if (levels.empty()) throw InputError("discount grid is empty");
    if (levels.size() > 16) throw InputError("discount grid supports at most 16 levels");
    if (levels.front() != 0.0) throw InputError("discount grid must start at 0.0");
    for (std::size_t d = 0; d < levels.size(); ++d) {
      if (!std::isfinite(levels[d]) || levels[d] < 0.0 || levels[d] >= 1.0)
        throw InputError("discount levels must lie in [0, 1)");
      if (d > 0 && !(levels[d] > levels[d - 1]))
        throw InputError("discount levels must be strictly increasing");
    }
  }
};

struct CountryData {
  double base_price = 1.0;        // undiscounted price p
  double initial_stock = 0.0;     // units, integral
  double base_demand = 0.0;       // units per week at full price
  double elasticity = 0.0;        // demand multiplier exp(elasticity * discount)
  double salvage_fraction = 0.0;  // value of leftover stock as fraction of p
};

struct Article {
  std::size_t id = 0;
  std::vector<CountryData> countries;
  std::vector<double> seasonality;  // one multiplier per week; size == horizon
  double unit_cost = 0.0;           // fraction of base price

  std::size_t horizon() const noexcept { return seasonality.size(); }

  void validate() const {
    auto finite_nonneg = [](double v) { return std::isfinite(v) && v >= 0.0; };
    if (countries.empty()) throw InputError("article needs at least one country");
    if (seasonality.empty()) throw InputError("article horizon must be at least one week");
    if (seasonality.size() > 16) throw InputError("article horizon supports at most 16 weeks");
    for (double s : seasonality)
      if (!finite_nonneg(s)) throw InputError("seasonality multipliers must be finite and >= 0");
    if (!finite_nonneg(unit_cost) || unit_cost >= 1.0)
      throw InputError("unit cost fraction must lie in [0, 1)");
    for (const auto& c : countries) {
      if (!std::isfinite(c.base_price) || c.base_price <= 0.0)
        throw InputError("base price must be finite and > 0");
      if (!finite_nonneg(c.initial_stock) || std::floor(c.initial_stock) != c.initial_stock)
        throw InputError("initial stock must be a non-negative integer");
      if (!finite_nonneg(c.base_demand)) throw InputError("base demand must be finite and >= 0");
      if (!finite_nonneg(c.elasticity)) throw InputError("elasticity must be finite and >= 0");
      if (!finite_nonneg(c.salvage_fraction) || c.salvage_fraction >= 1.0)
        throw InputError("salvage fraction must lie in [0, 1)");
    }
  }
};

// ---------------------------------------------------------------------------
// Offers

/// One country's markdown path and the quantities it induces.
struct CountryPlan {
  std::vector<std::uint8_t> path;  // grid index per week, non-decreasing
  double base_price = 0.0;
  double profit = 0.0;
  double first_week_price = 0.0;  // realised price in week 0
  double first_week_sales = 0.0;
  double revenue = 0.0;  // sum over weeks of price * sales
  double units = 0.0;    // sum over weeks of sales
  double leftover = 0.0;

  bool operator==(const CountryPlan&) const = default;
};

/// An article's full decision x_i with cached f_i(x_i) and A_i x_i.
struct Offer {
  std::size_t article_id = 0;
  std::vector<CountryPlan> plans;     // one per country
  double profit = 0.0;                // sum of plan profits
  std::vector<double> contributions;  // one per linking constraint

  std::uint8_t discount_index(std::size_t country, std::size_t week) const {
    return plans.at(country).path.at(week);
  }
  double first_week_sales(std::size_t country) const { return plans.at(country).first_week_sales; }
  double first_week_price(std::size_t country) const { return plans.at(country).first_week_price; }

  bool same_decision(const Offer& other) const {
    if (article_id != other.article_id || plans.size() != other.plans.size()) return false;
    for (std::size_t c = 0; c < plans.size(); ++c)
      if (plans[c].path != other.plans[c].path) return false;
    return true;
  }
};

// ---------------------------------------------------------------------------
// Linking constraints

enum class ConstraintKind { sdr_lower, sdr_upper, custom_linear };
enum class Sense { greater_equal, less_equal };
/// Per-country quantity a custom linear constraint sums over articles.
enum class Metric { revenue, units };

inline std::string_view to_string(ConstraintKind k) {
  switch (k) {
    case ConstraintKind::sdr_lower: return "sdr-lower";
    case ConstraintKind::sdr_upper: return "sdr-upper";
    case ConstraintKind::custom_linear: return "custom-linear";
  }
  return "?";
}
inline ConstraintKind constraint_kind_from(std::string_view s) {
  if (s == "sdr-lower") return ConstraintKind::sdr_lower;
  if (s == "sdr-upper") return ConstraintKind::sdr_upper;
  if (s == "custom-linear") return ConstraintKind::custom_linear;
  throw InputError("unknown constraint kind '" + std::string(s) + "'");
}
inline std::string_view to_string(Sense s) { return s == Sense::greater_equal ? ">=" : "<="; }
inline Sense sense_from(std::string_view s) {
  if (s == ">=") return Sense::greater_equal;
  if (s == "<=") return Sense::less_equal;
  throw InputError("unknown constraint sense '" + std::string(s) + "'");
}
inline std::string_view to_string(Metric m) { return m == Metric::revenue ? "revenue" : "units"; }
inline Metric metric_from(std::string_view s) {
  if (s == "revenue") return Metric::revenue;
  if (s == "units") return Metric::units;
  throw InputError("unknown metric '" + std::string(s) + "'");
}

/// A linking constraint as written by the user, before canonicalisation.
///
/// sDR bounds are linearised by clearing the denominator:
///   lower:  sum_i [(p_i - xbar_i) - r p_i] s_i >= 0
///   upper:  sum_i [(p_i - xbar_i) - r p_i] s_i <= 0
/// A custom linear constraint is  sum_i coefficient * metric_i  (sense) rhs.
struct RawConstraint {
  ConstraintKind kind = ConstraintKind::sdr_lower;
  std::size_t country = 0;
  double target = 0.0;  // sDR ratio r
  Metric metric = Metric::revenue;
  double coefficient = 1.0;
  Sense sense = Sense::greater_equal;
  double rhs = 0.0;
};

/// Canonical ">=" row. `sign` is -1 when the input was "<=".
struct LinkingConstraint {
  std::size_t id = 0;
  ConstraintKind kind = ConstraintKind::sdr_lower;
  std::size_t country = 0;
  double target = 0.0;
  Metric metric = Metric::revenue;
  double coefficient = 1.0;
  double sign = 1.0;
  double rhs = 0.0;  // canonical b
  Sense original_sense = Sense::greater_equal;

  bool is_sdr() const noexcept { return kind != ConstraintKind::custom_linear; }

  RawConstraint raw() const {
    return {kind, country, target, metric, coefficient, original_sense, sign * rhs};
  }
};

inline LinkingConstraint canonicalize(const RawConstraint& raw, std::size_t id = 0) {
  if (!std::isfinite(raw.rhs)) throw InputError("constraint rhs must be finite");
  if (raw.kind == ConstraintKind::sdr_lower && raw.sense != Sense::greater_equal)
    throw InputError("sdr-lower constraints have sense >=");
  if (raw.kind == ConstraintKind::sdr_upper && raw.sense != Sense::less_equal)
    throw InputError("sdr-upper constraints have sense <=");
  if (raw.kind != ConstraintKind::custom_linear) {
    if (!std::isfinite(raw.target) || raw.target < 0.0 || raw.target >= 1.0)
      throw InputError("sDR target must lie in [0, 1)");
    if (raw.rhs != 0.0) throw InputError("linearised sDR constraints have rhs 0");
  }
  if (!std::isfinite(raw.coefficient)) throw InputError("constraint coefficient must be finite");
  LinkingConstraint c;
  c.id = id;
  c.kind = raw.kind;
  c.country = raw.country;
  c.target = raw.target;
  c.metric = raw.metric;
  c.coefficient = raw.coefficient;
  c.original_sense = raw.sense;
  c.sign = raw.sense == Sense::greater_equal ? 1.0 : -1.0;
  c.rhs = c.sign * raw.rhs;
  return c;
}

/// Uncanonicalised functional value of one country plan for a constraint.
inline double raw_functional(const CountryPlan& plan, const LinkingConstraint& c) {
  if (c.is_sdr()) {
    const double p = plan.base_price;
    return ((p - plan.first_week_price) - c.target * p) * plan.first_week_sales;
  }
  return c.coefficient * (c.metric == Metric::revenue ? plan.revenue : plan.units);
}

/// The article's additive term (A_i x_i)_l under the canonical ">=" sense.
inline double contribution(const Offer& offer, const LinkingConstraint& c) {
  if (c.country >= offer.plans.size()) throw InputError("constraint country out of range");
  return c.sign * raw_functional(offer.plans[c.country], c);
}

inline double sdr_contribution(const Offer& offer, const LinkingConstraint& c) {
  if (!c.is_sdr()) throw InputError("sdr_contribution needs an sDR constraint");
  return contribution(offer, c);
}

/// Sales-weighted discount rate of a full offer set in one country; NaN when
/// no sales are recorded.
inline double sdr_ratio(std::span<const Offer> offers, std::size_t country) {
  double num = 0.0, den = 0.0;
  for (const auto& o : offers) {
    const auto& plan = o.plans.at(country);
    num += (plan.base_price - plan.first_week_price) * plan.first_week_sales;
    den += plan.base_price * plan.first_week_sales;
  }
  return den > 0.0 ? num / den : std::nan("");
}

// ---------------------------------------------------------------------------
// Instance

struct Instance {
  std::vector<Article> articles;
  DiscountGrid grid;
  std::vector<LinkingConstraint> constraints;
  double lambda_bar = 1.0;
  std::uint64_t seed = 0;

  std::size_t num_articles() const noexcept { return articles.size(); }
  std::size_t num_constraints() const noexcept { return constraints.size(); }
  std::size_t num_countries() const noexcept {
    return articles.empty() ? 0 : articles.front().countries.size();
  }

  std::vector<double> rhs() const {
    std::vector<double> b;
    b.reserve(constraints.size());
    for (const auto& c : constraints) b.push_back(c.rhs);
    return b;
  }

  void validate() const {
    grid.validate();
    if (!(lambda_bar > 0.0) || !std::isfinite(lambda_bar))
      throw InputError("lambda_bar must be finite and > 0");
    for (std::size_t i = 0; i < articles.size(); ++i) {
      articles[i].validate();
      if (articles[i].id != i) throw InputError("article ids must be 0..n-1 in order");
      if (articles[i].countries.size() != num_countries())
        throw InputError("all articles must cover the same countries");
    }
    for (std::size_t l = 0; l < constraints.size(); ++l) {
      const auto& c = constraints[l];
      if (c.id != l) throw InputError("constraint ids must be 0..L-1 in order");
      if (c.country >= num_countries()) throw InputError("constraint references unknown country");
    }
  }
};

// ---------------------------------------------------------------------------
// Evaluation

/// Residuals b_l - sum_i (A_i x_i)_l. Positive entries are violations.
inline std::vector<double> evaluate_linking(std::span<const Offer> offers,
                                            std::span<const LinkingConstraint> constraints) {
  std::vector<double> residual(constraints.size());
  for (std::size_t l = 0; l < constraints.size(); ++l) residual[l] = constraints[l].rhs;
  for (std::size_t i = 0; i < offers.size(); ++i) {
    if (offers[i].article_id != i) throw InputError("offers must be ordered by article id");
    if (offers[i].contributions.size() != constraints.size())
      throw InputError("offer contribution length does not match constraint count");
    for (std::size_t l = 0; l < constraints.size(); ++l)
      residual[l] -= offers[i].contributions[l];
  }
  return residual;
}

/// Absolute slack tolerated when deciding feasibility of row l.
inline double linking_tolerance(double rhs, double abs_contribution_sum) {
  return 1e-9 * (1.0 + std::abs(rhs) + abs_contribution_sum);
}

inline bool is_feasible(std::span<const Offer> offers,
                        std::span<const LinkingConstraint> constraints) {
  const auto residual = evaluate_linking(offers, constraints);
  for (std::size_t l = 0; l < constraints.size(); ++l) {
    double scale = 0.0;
    for (const auto& o : offers) scale += std::abs(o.contributions[l]);
    if (residual[l] > linking_tolerance(constraints[l].rhs, scale)) return false;
  }
  return true;
}

inline double total_profit(std::span<const Offer> offers) {
  double f = 0.0;
  for (const auto& o : offers) f += o.profit;
  return f;
}

}  // namespace lagcut
