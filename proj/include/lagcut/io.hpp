#pragma once

// JSON / ND-JSON / CSV serialisation for instances, generator specs, pool
// dumps, run traces and manifests. Non-finite numbers are written as null.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "lagcut/driver.hpp"
#include "lagcut/gen.hpp"
#include "lagcut/master.hpp"
#include "lagcut/model.hpp"

namespace lagcut::io {

using json = nlohmann::ordered_json;

inline constexpr int kFormatVersion = 1;
inline constexpr const char* kToolVersion = "1.0.0";

inline json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

inline json numbers(std::span<const double> v) {
  json a = json::array();
  for (double x : v) a.push_back(number(x));
  return a;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write '" + path + "'");
  out << text;
  if (!out) throw InputError("failed writing '" + path + "'");
}

inline json parse_json(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw InputError(what + ": " + e.what());
  }
}

namespace detail {

template <typename T>
T get(const json& j, const char* key) {
  if (!j.contains(key)) throw InputError(std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw InputError(std::string("field '") + key + "': " + e.what());
  }
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  return j.contains(key) ? get<T>(j, key) : fallback;
}

inline void check_format(const json& j) {
  if (!j.is_object()) throw InputError("expected a JSON object");
  if (get<int>(j, "format") != kFormatVersion)
    throw InputError("unsupported format version");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Instances

inline json to_json(const Instance& inst) {
  json j;
  j["format"] = kFormatVersion;
  j["seed"] = inst.seed;
  j["lambda_bar"] = inst.lambda_bar;
  j["grid"] = inst.grid.levels;
  json arts = json::array();
  for (const auto& a : inst.articles) {
    json ja;
    ja["id"] = a.id;
    ja["unit_cost"] = a.unit_cost;
    ja["seasonality"] = a.seasonality;
    json cs = json::array();
    for (const auto& c : a.countries)
      cs.push_back({{"base_price", c.base_price},
                    {"initial_stock", c.initial_stock},
                    {"base_demand", c.base_demand},
                    {"elasticity", c.elasticity},
                    {"salvage_fraction", c.salvage_fraction}});
    ja["countries"] = std::move(cs);
    arts.push_back(std::move(ja));
  }
  j["articles"] = std::move(arts);
  json cons = json::array();
  for (const auto& c : inst.constraints) {
    const RawConstraint r = c.raw();
    json jc;
    jc["kind"] = to_string(r.kind);
    jc["country"] = r.country;
    if (r.kind == ConstraintKind::custom_linear) {
      jc["metric"] = to_string(r.metric);
      jc["coefficient"] = r.coefficient;
    } else {
      jc["target"] = r.target;
    }
    jc["sense"] = to_string(r.sense);
    jc["rhs"] = r.rhs;
    cons.push_back(std::move(jc));
  }
  j["constraints"] = std::move(cons);
  return j;
}

inline Instance instance_from_json(const json& j) {
  using detail::get;
  detail::check_format(j);
  Instance inst;
  inst.seed = get<std::uint64_t>(j, "seed");
  inst.lambda_bar = get<double>(j, "lambda_bar");
  inst.grid.levels = get<std::vector<double>>(j, "grid");
  for (const auto& ja : get<json>(j, "articles")) {
    Article a;
    a.id = get<std::size_t>(ja, "id");
    a.unit_cost = get<double>(ja, "unit_cost");
    a.seasonality = get<std::vector<double>>(ja, "seasonality");
    for (const auto& jc : get<json>(ja, "countries")) {
      CountryData c;
      c.base_price = get<double>(jc, "base_price");
      c.initial_stock = get<double>(jc, "initial_stock");
      c.base_demand = get<double>(jc, "base_demand");
      c.elasticity = get<double>(jc, "elasticity");
      c.salvage_fraction = get<double>(jc, "salvage_fraction");
      a.countries.push_back(c);
    }
    inst.articles.push_back(std::move(a));
  }
  for (const auto& jc : get<json>(j, "constraints")) {
    RawConstraint r;
    r.kind = constraint_kind_from(get<std::string>(jc, "kind"));
    r.country = get<std::size_t>(jc, "country");
    r.sense = sense_from(get<std::string>(jc, "sense"));
    r.rhs = detail::get_or<double>(jc, "rhs", 0.0);
    if (r.kind == ConstraintKind::custom_linear) {
      r.metric = metric_from(get<std::string>(jc, "metric"));
      r.coefficient = get<double>(jc, "coefficient");
    } else {
      r.target = get<double>(jc, "target");
    }
    inst.constraints.push_back(canonicalize(r, inst.constraints.size()));
  }
  inst.validate();
  return inst;
}

inline std::string dump_instance(const Instance& inst) { return to_json(inst).dump(2) + "\n"; }

inline Instance load_instance(const std::string& path) {
  return instance_from_json(parse_json(read_file(path), path));
}

/// 64-bit FNV-1a of a byte string, as 16 hex digits.
inline std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

inline std::string instance_hash(const Instance& inst) { return fnv1a_hex(to_json(inst).dump()); }

// ---------------------------------------------------------------------------
// Generator specs

inline json to_json(const GenSpec& s) {
  auto range = [](Range r) { return json::array({r.lo, r.hi}); };
  json j;
  j["format"] = kFormatVersion;
  j["articles"] = s.articles;
  j["countries"] = s.countries;
  j["weeks"] = s.weeks;
  j["levels"] = s.levels;
  j["max_discount"] = s.max_discount;
  j["price"] = range(s.price);
  j["demand"] = range(s.demand);
  j["elasticity"] = range(s.elasticity);
  j["stock_weeks"] = range(s.stock_weeks);
  j["salvage"] = range(s.salvage);
  j["unit_cost"] = range(s.unit_cost);
  j["seasonality_amplitude"] = s.seasonality_amplitude;
  j["sdr_band"] = range(s.sdr_band);
  j["hard_skew"] = range(s.hard_skew);
  j["hard_band_width"] = s.hard_band_width;
  j["difficulty"] = to_string(s.difficulty);
  j["seed"] = s.seed;
  j["path_cap"] = s.path_cap;
  if (s.lambda_bar) j["lambda_bar"] = *s.lambda_bar;
  return j;
}

inline GenSpec genspec_from_json(const json& j) {
  using detail::get_or;
  detail::check_format(j);
  auto range = [&](const char* key, Range fallback) {
    if (!j.contains(key)) return fallback;
    const auto v = detail::get<std::vector<double>>(j, key);
    if (v.size() != 2) throw InputError(std::string("range '") + key + "' needs two numbers");
    return Range{v[0], v[1]};
  };
  GenSpec s;
  s.articles = get_or<std::size_t>(j, "articles", s.articles);
  s.countries = get_or<std::size_t>(j, "countries", s.countries);
  s.weeks = get_or<std::size_t>(j, "weeks", s.weeks);
  s.levels = get_or<std::size_t>(j, "levels", s.levels);
  s.max_discount = get_or<double>(j, "max_discount", s.max_discount);
  s.price = range("price", s.price);
  s.demand = range("demand", s.demand);
  s.elasticity = range("elasticity", s.elasticity);
  s.stock_weeks = range("stock_weeks", s.stock_weeks);
  s.salvage = range("salvage", s.salvage);
  s.unit_cost = range("unit_cost", s.unit_cost);
  s.seasonality_amplitude = get_or<double>(j, "seasonality_amplitude", s.seasonality_amplitude);
  s.sdr_band = range("sdr_band", s.sdr_band);
  s.hard_skew = range("hard_skew", s.hard_skew);
  s.hard_band_width = get_or<double>(j, "hard_band_width", s.hard_band_width);
  s.difficulty = difficulty_from(get_or<std::string>(j, "difficulty", "easy"));
  s.seed = get_or<std::uint64_t>(j, "seed", s.seed);
  s.path_cap = get_or<double>(j, "path_cap", s.path_cap);
  if (j.contains("lambda_bar")) s.lambda_bar = detail::get<double>(j, "lambda_bar");
  s.validate();
  return s;
}

inline GenSpec load_genspec(const std::string& path) {
  return genspec_from_json(parse_json(read_file(path), path));
}

// ---------------------------------------------------------------------------
// Pool dumps

inline json to_json(const CutPool& pool, double lambda_bar) {
  json j;
  j["format"] = kFormatVersion;
  j["num_articles"] = pool.num_articles();
  j["lambda_bar"] = lambda_bar;
  j["rhs"] = numbers(pool.rhs());
  json table = json::array();
  for (std::size_t i = 0; i < pool.num_articles(); ++i) {
    json row = json::array();
    for (std::size_t o = 0; o < pool.offer_count(i); ++o) {
      const auto& po = pool.offer(i, o);
      row.push_back({{"profit", po.profit}, {"contributions", po.contributions}});
    }
    table.push_back(std::move(row));
  }
  j["offers"] = std::move(table);
  json cuts = json::array();
  for (const auto& c : pool.cuts())
    cuts.push_back({{"origin", to_string(c.origin)},
                    {"total_profit", c.total_profit},
                    {"total_contribution", c.total_contribution},
                    {"offer_ids", c.offer_ids}});
  j["cuts"] = std::move(cuts);
  return j;
}

struct LoadedPool {
  CutPool pool;
  double lambda_bar = 1.0;
};

inline LoadedPool pool_from_json(const json& j) {
  using detail::get;
  detail::check_format(j);
  LoadedPool out;
  const auto n = get<std::size_t>(j, "num_articles");
  const auto rhs = get<std::vector<double>>(j, "rhs");
  out.lambda_bar = get<double>(j, "lambda_bar");
  out.pool = CutPool(n, rhs);
  const json& table = get<json>(j, "offers");
  if (!table.is_array() || table.size() != n) throw InputError("offer table needs one row per article");
  std::vector<std::vector<std::pair<double, std::vector<double>>>> offers(n);
  for (std::size_t i = 0; i < n; ++i)
    for (const auto& jo : table[i]) {
      auto contrib = get<std::vector<double>>(jo, "contributions");
      if (contrib.size() != rhs.size()) throw InputError("contribution length does not match rhs");
      offers[i].emplace_back(get<double>(jo, "profit"), std::move(contrib));
    }
  std::vector<double> profits(n);
  std::vector<std::vector<double>> contributions(n);
  for (const auto& jc : get<json>(j, "cuts")) {
    const auto ids = get<std::vector<std::uint32_t>>(jc, "offer_ids");
    if (ids.size() != n) throw InputError("cut needs one offer id per article");
    for (std::size_t i = 0; i < n; ++i) {
      if (ids[i] >= offers[i].size()) throw InputError("cut references unknown offer");
      profits[i] = offers[i][ids[i]].first;
      contributions[i] = offers[i][ids[i]].second;
    }
    out.pool.add_cut_values(profits, contributions, cut_origin_from(get<std::string>(jc, "origin")));
  }
  if (out.pool.empty()) throw InputError("pool dump holds no cuts");
  return out;
}

inline LoadedPool load_pool(const std::string& path) {
  return pool_from_json(parse_json(read_file(path), path));
}

// ---------------------------------------------------------------------------
// Traces and run reports

inline json to_json(const TraceEvent& e) {
  json j;
  j["kind"] = to_string(e.kind);
  j["j"] = e.j;
  j["outer"] = e.outer;
  j["dual_bound"] = number(e.dual_bound);
  j["mu"] = number(e.mu);
  j["gap_alg1"] = number(e.gap_alg1);
  j["gap_d_j"] = number(e.gap_dj);
  j["lambda_norm"] = number(e.lambda_norm);
  j["lambda_at_bar"] = e.lambda_at_bar;
  j["lambda"] = numbers(e.lambda);
  j["subproblem_solves"] = e.subproblem_solves;
  j["cut_origin"] = e.cut_origin ? json(to_string(*e.cut_origin)) : json(nullptr);
  j["efficacy"] = number(e.efficacy);
  j["lr_value"] = number(e.lr_value);
  if (!e.note.empty()) j["note"] = e.note;
  j["wall_ms"] = e.wall_ms;
  return j;
}

/// One JSON object per line.
inline std::string trace_ndjson(const RunTrace& trace) {
  std::string out;
  for (const auto& e : trace) out += to_json(e).dump() + "\n";
  return out;
}

inline json summary_json(const RunResult& r, const DriverConfig& cfg) {
  json j;
  j["status"] = to_string(r.stop_reason);
  j["dual_bound"] = number(r.dual_bound);
  j["mu"] = number(r.mu);
  j["gap_alg1"] = number(r.final_gap_alg1());
  j["gap_d_j"] = number(r.final_gap_dj());
  j["lambda_bar"] = r.lambda_bar;
  j["lambda"] = numbers(r.last_master.lambda);
  j["outer_iterations"] = r.outer_iterations;
  j["exact_evaluations"] = r.exact_evaluations;
  j["heuristic_cuts"] = r.heuristic_cuts;
  j["master_solves"] = r.master_solves;
  j["subproblem_solves"] = r.subproblem_solves;
  j["cuts"] = r.pool.size();
  j["strategy"] = to_string(cfg.strategy);
  j["master"] = cfg.master.name();
  json p;
  p["status"] = to_string(r.primal.status);
  p["objective"] = number(r.primal.objective);
  p["profit"] = number(r.primal.profit);
  p["feasible"] = r.primal.feasible(1e-6 * (1.0 + std::abs(r.primal.profit)));
  p["violation"] = numbers(r.primal.violation);
  p["proof_gap"] = number(r.primal.proof_gap);
  p["nodes"] = r.primal.nodes;
  j["primal"] = std::move(p);
  j["wall_ms"] = r.wall_ms;
  return j;
}

inline json solution_json(const RunResult& r) {
  json j;
  j["format"] = kFormatVersion;
  j["profit"] = r.primal.profit;
  json arts = json::array();
  for (std::size_t i = 0; i < r.primal_offers.size(); ++i) {
    const Offer& o = r.primal_offers[i];
    json ja;
    ja["article"] = o.article_id;
    ja["cut"] = r.primal.selection[i];
    ja["profit"] = o.profit;
    json paths = json::array();
    for (const auto& p : o.plans) {
      std::vector<int> path(p.path.begin(), p.path.end());
      paths.push_back(path);
    }
    ja["paths"] = std::move(paths);
    ja["contributions"] = o.contributions;
    arts.push_back(std::move(ja));
  }
  j["articles"] = std::move(arts);
  return j;
}

inline json config_json(const DriverConfig& c) {
  json j;
  j["outer"] = c.outer_limit;
  j["inner"] = c.inner_limit;
  j["tol_mu"] = c.tol_mu;
  j["tol_e"] = c.tol_e;
  j["strategy"] = to_string(c.strategy);
  j["master"] = c.master.name();
  j["lambda_bar"] = c.lambda_bar ? json(*c.lambda_bar) : json(nullptr);
  j["seed"] = c.seed;
  j["threads"] = c.threads;
  return j;
}

// ---------------------------------------------------------------------------
// CSV

inline std::string csv_number(double v) {
  if (!std::isfinite(v)) return "";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// One row per master solve of every compared run.
inline std::string comparison_csv(const ComparisonReport& report) {
  std::string out = "strategy,iteration,wall_ms,dual_bound,mu,gap_alg1,gap_d_j,lambda_norm,cut_origin\n";
  for (const auto& run : report.runs) {
    std::string origin;
    for (const auto& e : run.result.trace) {
      if (e.cut_origin) origin = std::string(to_string(*e.cut_origin));
      if (e.kind != EventKind::master_solve) continue;
      out += run.name + "," + std::to_string(e.j) + "," + csv_number(e.wall_ms) + "," +
             csv_number(e.dual_bound) + "," + csv_number(e.mu) + "," + csv_number(e.gap_alg1) + "," +
             csv_number(e.gap_dj) + "," + csv_number(e.lambda_norm) + "," + origin + "\n";
    }
  }
  return out;
}

inline std::string time_to_gap_csv(const ComparisonReport& report) {
  std::string out = "strategy,target_gap,wall_ms\n";
  for (std::size_t s = 0; s < report.runs.size(); ++s)
    for (std::size_t t = 0; t < report.targets.size(); ++t)
      out += report.runs[s].name + "," + csv_number(report.targets[t]) + "," +
             csv_number(report.time_to_gap[s][t]) + "\n";
  return out;
}

// ---------------------------------------------------------------------------
// Manifests

struct Manifest {
  std::string subcommand;
  json config = json::object();
  std::string instance_hash;
  std::uint64_t seed = 0;
  std::vector<std::string> artifacts;

  json to_json() const {
    json j;
    j["tool"] = "lagcut";
    j["version"] = kToolVersion;
    j["subcommand"] = subcommand;
    j["config"] = config;
    j["instance_hash"] = instance_hash;
    j["seed"] = seed;
    j["artifacts"] = artifacts;
    return j;
  }
};

}  // namespace lagcut::io
