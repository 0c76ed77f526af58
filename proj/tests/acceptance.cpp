// Acceptance suite: one PASS/FAIL line per criterion.
//
//   acceptance            run all criteria
//   acceptance 3 5        run only criteria 3 and 5

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "cli_support.hpp"
#include "support.hpp"

using namespace lagcut;
using namespace lagcut::testing;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double rel_slack(double rel, double v) { return rel * std::max(1.0, std::abs(v)); }

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

double geo_mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += std::log(x);
  return std::exp(s / static_cast<double>(v.size()));
}

double geo_std(const std::vector<double>& v) {
  const double m = std::log(geo_mean(v));
  double s = 0.0;
  for (double x : v) s += (std::log(x) - m) * (std::log(x) - m);
  return std::exp(std::sqrt(s / static_cast<double>(v.size())));
}

Instance make_instance(std::uint64_t seed, std::size_t n, std::size_t countries, std::size_t weeks,
                       std::size_t levels, Difficulty difficulty) {
  GenSpec s;
  s.articles = n;
  s.countries = countries;
  s.weeks = weeks;
  s.levels = levels;
  s.difficulty = difficulty;
  s.seed = seed;
  return generate(s);
}

constexpr HeuristicStrategy kStrategies[] = {HeuristicStrategy::none, HeuristicStrategy::random,
                                             HeuristicStrategy::max_violation, HeuristicStrategy::feasibility,
                                             HeuristicStrategy::mixed};

// 1. primal (when feasible) <= oracle P <= dual bound at every driver event.
Verdict weak_duality_sandwich() {
  Verdict v;
  std::size_t feasible = 0, events = 0, violations = 0;
  for (std::uint64_t s = 0; s < 200; ++s) {
    const bool two_countries = s % 4 == 3;
    const std::size_t n = two_countries ? 2 + s % 2 : 2 + s % 5;
    const Instance inst = make_instance(s + 1, n, two_countries ? 2 : 1, 3, 3,
                                        s % 3 == 1 ? Difficulty::easy : Difficulty::hard);
    const auto oracle = oracle_solve(inst);
    DriverConfig cfg;
    cfg.strategy = kStrategies[s % 5];
    cfg.seed = s;
    const auto r = run(inst, cfg);
    const bool primal_ok = is_feasible(r.primal_offers, inst.constraints);
    if (!oracle.feasible) {
      if (primal_ok) ++violations;
      continue;
    }
    ++feasible;
    const double tol = rel_slack(1e-9, oracle.value);
    for (const auto& e : r.trace) {
      ++events;
      if (e.dual_bound < oracle.value - tol) ++violations;
      if (e.kind == EventKind::primal_heuristic && primal_ok && r.primal.profit > oracle.value + tol) ++violations;
    }
  }
  v.pass = violations == 0 && feasible > 0;
  v.detail = fmt("200 instances (%zu oracle-feasible), %zu events checked, %zu violations", feasible, events,
                 violations);
  return v;
}

/// Partition of n articles into M groups so that each level refines the previous one.
Partition nested_partition(const std::vector<std::size_t>& order, std::size_t groups) {
  Partition p(groups);
  const std::size_t n = order.size();
  for (std::size_t pos = 0; pos < n; ++pos) p[pos * groups / n].push_back(order[pos]);
  for (auto& g : p) std::sort(g.begin(), g.end());
  return p;
}

CutPool add_max_violation_cuts(CutPool pool, double lambda_bar, std::size_t count) {
  for (std::size_t t = 0; t < count; ++t) {
    const auto ms = solve_aggregated(pool, lambda_bar);
    const auto cut = max_violation_cut(pool, ms.lambda, ms.mu);
    if (cut.violation <= 1e-9 * (1.0 + std::abs(ms.mu))) break;
    pool.add_selection(cut.offer_ids, cut.origin);
  }
  return pool;
}

// 2. aggregated <= aggregated + heuristic cuts <= partial (nested) <= disaggregated.
Verdict bound_ordering() {
  Verdict v;
  std::size_t checks = 0, violations = 0;
  for (std::uint64_t s = 0; s < 100; ++s) {
    const std::size_t n = 10 + (s * 7) % 41, j = 2 + s % 9;
    const Instance inst = make_instance(1000 + s, n, 2, 4, 4, Difficulty::hard);
    const CutPool pool = build_frozen_pool(inst, j);
    const double lbar = inst.lambda_bar;
    const CutPool with_h = add_max_violation_cuts(pool, lbar, j);
    std::vector<double> chain = {solve_aggregated(pool, lbar).mu, solve_aggregated(with_h, lbar).mu};
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    auto rng = SplitMix64::stream(s, {0x6e657374});
    for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
    for (std::size_t M = 2; M < n; M *= 2) chain.push_back(solve_grouped(with_h, lbar, nested_partition(order, M)).mu);
    const double dis = solve_disaggregated(with_h, lbar).mu;
    chain.push_back(dis);
    for (std::size_t k = 1; k < chain.size(); ++k, ++checks)
      if (chain[k - 1] > chain[k] + rel_slack(1e-8, chain[k])) ++violations;
    // recombinations add nothing to the disaggregated master
    ++checks;
    if (std::abs(solve_disaggregated(pool, lbar).mu - dis) > rel_slack(1e-8, dis)) ++violations;
  }
  v.pass = violations == 0;
  v.detail = fmt("100 frozen pools (n 10..50, j 2..10), %zu ordered pairs, %zu violations", checks, violations);
  return v;
}

// 3. repeated max-violation reaches the disaggregated bound within 10 j^2 applications.
Verdict max_violation_fixed_point() {
  Verdict v;
  std::size_t ok = 0, max_apps = 0;
  double worst = 0.0;
  for (std::uint64_t s = 0; s < 50; ++s) {
    const std::size_t n = 10 + (s * 3) % 31, j = 3 + s % 8;
    const Instance inst = make_instance(2000 + s, n, 2, 4, 4, Difficulty::hard);
    const CutPool pool = build_frozen_pool(inst, j);
    const auto points = bench_heuristic(pool, inst.lambda_bar);
    const std::size_t apps = points.back().step, budget = 10 * pool.size() * pool.size();
    const double dis = solve_disaggregated(pool, inst.lambda_bar).mu;
    const double diff = std::abs(points.back().bound - dis) / std::max(1.0, std::abs(dis));
    worst = std::max(worst, diff);
    max_apps = std::max(max_apps, apps);
    if (apps < budget && diff <= 1e-6) ++ok;
  }
  v.pass = ok == 50;
  v.detail = fmt("%zu/50 pools converged, worst relative difference %.2e, most applications %zu", ok, worst,
                 max_apps);
  return v;
}

// 4. median final d_j: max-violation < feasibility < {random ~ none}.
Verdict strategy_ordering() {
  Verdict v;
  std::map<HeuristicStrategy, std::vector<double>> gaps;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Instance inst = make_instance(seed, 30, 3, 6, 5, Difficulty::hard);
    for (auto st : {HeuristicStrategy::none, HeuristicStrategy::random, HeuristicStrategy::max_violation,
                    HeuristicStrategy::feasibility}) {
      DriverConfig cfg;
      cfg.outer_limit = 10;
      cfg.inner_limit = 100;
      cfg.tol_e = 1.0;
      cfg.tol_mu = 1e-6;
      cfg.strategy = st;
      cfg.seed = seed;
      cfg.primal_limits.node_limit = 1;
      gaps[st].push_back(std::max(0.0, run(inst, cfg).final_gap_dj()));
    }
  }
  const double none = median(gaps[HeuristicStrategy::none]);
  const double random = median(gaps[HeuristicStrategy::random]);
  const double mv = median(gaps[HeuristicStrategy::max_violation]);
  const double feas = median(gaps[HeuristicStrategy::feasibility]);
  const double spread = std::abs(random - none) / none;
  v.pass = mv < feas && feas < random && feas < none && spread < 0.10;
  v.detail = fmt("median d_j max-violation %.3e, feasibility %.3e, random %.3e, none %.3e (random vs none %.1f%%)",
                 mv, feas, random, none, 100.0 * spread);
  return v;
}

// 5. time to reach a gap: repeated max-violation on the aggregated master vs
// partially aggregated masters, where a pool's partial time is the fastest
// single solve among the aggregation levels whose bound is within the gap.
Verdict time_to_gap_direction() {
  Verdict v;
  const std::vector<double> targets = {1e-3, 1e-4, 1e-5};
  constexpr int kReps = 3;
  std::vector<std::vector<double>> mv_times(targets.size()), part_times(targets.size());
  for (std::uint64_t s = 0; s < 30; ++s) {
    const std::size_t n = 200;
    const Instance inst = make_instance(3000 + s, n, 2, 4, 4, Difficulty::hard);
    const CutPool pool = build_frozen_pool(inst, 8);
    const double best = *best_bound_of(pool, inst.lambda_bar);
    std::vector<double> mv(targets.size(), kInf), part(targets.size(), kInf);
    for (int rep = 0; rep < kReps; ++rep) {
      const auto points = finish_report(bench_heuristic(pool, inst.lambda_bar), best).points;
      for (std::size_t t = 0; t < targets.size(); ++t) {
        const double ms = first_time_to(points, targets[t]);
        mv[t] = std::min(mv[t], std::isnan(ms) ? kInf : ms);
      }
    }
    for (std::size_t M : {std::size_t{1}, std::size_t{2}, std::size_t{5}, std::size_t{10}, std::size_t{20},
                          std::size_t{50}, std::size_t{100}, n}) {
      double ms = kInf, bound = -kInf;
      for (int rep = 0; rep < kReps; ++rep) {
        const auto p = bench_partial(pool, inst.lambda_bar, {M}, s);
        ms = std::min(ms, p[0].elapsed_ms);
        bound = p[0].bound;
      }
      const double gap = std::max(0.0, (best - bound) / std::max(std::abs(best), 1e-300));
      for (std::size_t t = 0; t < targets.size(); ++t)
        if (gap <= targets[t]) part[t] = std::min(part[t], ms);
    }
    for (std::size_t t = 0; t < targets.size(); ++t) {
      mv_times[t].push_back(mv[t]);
      part_times[t].push_back(part[t]);
    }
  }
  auto all_finite = [](const std::vector<double>& x) {
    return std::all_of(x.begin(), x.end(), [](double y) { return std::isfinite(y); });
  };
  std::string detail;
  for (std::size_t t = 0; t < targets.size(); ++t) {
    const auto &mv = mv_times[t], &pa = part_times[t];
    const double mv_gm = all_finite(mv) ? geo_mean(mv) : kInf, mv_gsd = all_finite(mv) ? geo_std(mv) : kInf;
    const double pa_gm = all_finite(pa) ? geo_mean(pa) : kInf, pa_gsd = all_finite(pa) ? geo_std(pa) : kInf;
    if (!(mv_gsd < pa_gsd)) v.pass = false;
    if (t + 1 == targets.size() && !(mv_gm < pa_gm)) v.pass = false;
    detail += fmt("%sgap %.0e: max-violation %.3g ms x/ %.2f, partial %.3g ms x/ %.2f", t ? "; " : "", targets[t],
                  mv_gm, mv_gsd, pa_gm, pa_gsd);
  }
  v.detail = "30 frozen pools (n 200, j 8), " + detail;
  return v;
}

// 6. branch-and-bound selection equals exhaustive enumeration.
Verdict selection_exactness() {
  Verdict v;
  std::size_t mismatches = 0, not_optimal = 0;
  double worst = 0.0;
  for (std::uint64_t s = 0; s < 100; ++s) {
    CutPool pool;
    if (s % 2 == 0) {
      const std::size_t n = 2 + s % 7;
      std::size_t j = 2;
      while (std::pow(static_cast<double>(j + 1), static_cast<double>(n)) <= 1e6 && j < 10) ++j;
      pool = random_pool(s, n, 1 + (s / 2) % j, 1 + s % 3);
    } else {
      const std::size_t n = 3 + s % 4, j = 2 + s % 7;
      const Instance inst = make_instance(4000 + s, n, 1 + s % 2, 3, 3, Difficulty::hard);
      pool = build_frozen_pool(inst, j);
      double product = 1.0;
      for (std::size_t i = 0; i < n; ++i) product *= static_cast<double>(pool.offer_count(i));
      if (product > 1e6) throw std::logic_error("selection pool exceeds enumeration bound");
    }
    const auto prob = build_selection(pool);
    const double oracle = exhaustive_selection(prob);
    const auto sol = solve_selection(prob, SelectionLimits{1000000, 600.0});
    const double diff = std::abs(sol.objective - oracle);
    worst = std::max(worst, diff);
    if (sol.status != SelectionStatus::optimal) ++not_optimal;
    if (diff > 1e-9 * std::max(1.0, std::abs(oracle))) ++mismatches;
  }
  v.pass = mismatches == 0 && not_optimal == 0;
  v.detail = fmt("100 pools, %zu mismatches, %zu unproven, worst difference %.2e", mismatches, not_optimal, worst);
  return v;
}

// 7. multipliers of violated rows start at lambda_bar; unattainable rows stay there.
Verdict lambda_bar_mechanism() {
  Verdict v;
  std::size_t held = 0, infeasible_runs = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Instance inst = make_instance(seed, 10, 2, 4, 4, Difficulty::infeasible_link);
    ++infeasible_runs;
    const auto r = run(inst, DriverConfig{});
    bool ok = true;
    for (const auto& e : r.trace)
      if (e.kind == EventKind::master_solve && e.lambda[0] != r.lambda_bar) ok = false;
    if (ok) ++held;
  }
  std::size_t eligible = 0, released = 0, started_at_bar = 0;
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const Instance inst = make_instance(500 + seed, 5, 1, 3, 3, Difficulty::hard);
    if (!oracle_solve(inst).feasible) continue;
    const auto r = run(inst, DriverConfig{});
    std::vector<std::size_t> violated;
    for (std::size_t l = 0; l < inst.num_constraints(); ++l)
      if (r.pool.cut(0).total_contribution[l] < inst.constraints[l].rhs) violated.push_back(l);
    if (violated.empty()) continue;
    ++eligible;
    const TraceEvent* first = nullptr;
    for (const auto& e : r.trace)
      if (e.kind == EventKind::master_solve) {
        first = &e;
        break;
      }
    if (first && std::all_of(violated.begin(), violated.end(),
                             [&](std::size_t l) { return first->lambda[l] == r.lambda_bar; }))
      ++started_at_bar;
    if (std::all_of(violated.begin(), violated.end(),
                    [&](std::size_t l) { return r.last_master.lambda[l] < r.lambda_bar; }))
      ++released;
  }
  v.pass = held == infeasible_runs && eligible > 0 && started_at_bar == eligible && released * 10 >= eligible * 9;
  v.detail = fmt("infeasible-link: held at bar in %zu/%zu runs; feasible: started at bar %zu/%zu, released %zu/%zu",
                 held, infeasible_runs, started_at_bar, eligible, released, eligible);
  return v;
}

// 8. identical traces (timing removed) at 1 thread and at all hardware threads.
Verdict determinism() {
  Verdict v;
  const auto dir = scratch_dir("acceptance_determinism");
  const std::size_t many = std::max(2u, std::thread::hardware_concurrency());
  const std::string inst = generate_sample("hard_small", dir);
  bool same = true;
  std::size_t lines = 0;
  for (const char* strategy : {"max-violation", "random", "mixed"}) {
    const std::string base = "solve " + inst + " -q --seed 11 --strategy " + strategy + " ";
    const auto one = dir / (std::string(strategy) + "_1"), all = dir / (std::string(strategy) + "_n");
    if (run_cli(base + "--threads 1 -o " + one.string()) != 0 ||
        run_cli(base + "--threads " + std::to_string(many) + " -o " + all.string()) != 0) {
      v.pass = false;
      v.detail = "solve failed";
      return v;
    }
    const std::string a = trace_without_timing((one / "trace.ndjson").string());
    same = same && a == trace_without_timing((all / "trace.ndjson").string());
    same = same && io::read_file((one / "manifest.json").string()) == io::read_file((all / "manifest.json").string());
    lines += static_cast<std::size_t>(std::count(a.begin(), a.end(), '\n'));
  }
  v.pass = same;
  v.detail = fmt("3 strategies at 1 vs %zu threads, %zu trace events, %s", many, lines,
                 same ? "byte-identical" : "traces differ");
  return v;
}

// 9. simplex vs vertex enumeration on master LPs; LR convexity.
Verdict numerical_validity() {
  Verdict v;
  std::size_t lp_bad = 0;
  double worst = 0.0;
  for (std::uint64_t s = 0; s < 500; ++s) {
    const std::size_t n = 2 + s % 4, j = 2 + s % 5, L = 1 + s % 3;
    const CutPool pool = random_pool(10000 + s, n, j, L);
    const double lbar = 2.0 + static_cast<double>(s % 11);
    double got = 0.0, want = 0.0;
    switch (s % 3) {
      case 0:
        got = solve_aggregated(pool, lbar).mu;
        want = oracle_master(pool, lbar, Formulation::aggregated);
        break;
      case 1:
        got = solve_disaggregated(pool, lbar).mu;
        want = oracle_master(pool, lbar, Formulation::disaggregated);
        break;
      default:
        got = solve_partially_aggregated(pool, lbar, 2, s).mu;
        want = oracle_master(pool, lbar, Formulation::partially_aggregated, 2, s);
    }
    const double diff = std::abs(got - want) / std::max(1.0, std::abs(want));
    worst = std::max(worst, diff);
    if (diff > 1e-8) ++lp_bad;
  }
  std::size_t convex_bad = 0;
  for (std::uint64_t inst_id = 0; inst_id < 10; ++inst_id) {
    const Instance inst = make_instance(6000 + inst_id, 8, 2, 4, 4, Difficulty::hard);
    auto rng = SplitMix64::stream(inst_id, {0x636f6e76});
    for (int trial = 0; trial < 100; ++trial) {
      std::vector<double> a(inst.num_constraints()), b(a.size()), m(a.size());
      for (auto& x : a) x = rng.uniform() < 0.2 ? 0.0 : rng.uniform(0.0, inst.lambda_bar * 0.01);
      for (auto& x : b) x = rng.uniform() < 0.2 ? 0.0 : rng.uniform(0.0, inst.lambda_bar * 0.01);
      const double t = rng.uniform();
      for (std::size_t l = 0; l < m.size(); ++l) m[l] = t * a[l] + (1.0 - t) * b[l];
      const double la = evaluate_lr(inst, a).value, lb = evaluate_lr(inst, b).value;
      const double lm = evaluate_lr(inst, m).value;
      if (lm > t * la + (1.0 - t) * lb + rel_slack(1e-9, std::max(std::abs(la), std::abs(lb)))) ++convex_bad;
    }
  }
  v.pass = lp_bad == 0 && convex_bad == 0;
  v.detail = fmt("500 master LPs (worst relative difference %.2e, %zu off), 1000 convexity triples (%zu violations)",
                 worst, lp_bad, convex_bad);
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria = {
      {"weak-duality sandwich", weak_duality_sandwich},
      {"bound ordering", bound_ordering},
      {"max-violation fixed point", max_violation_fixed_point},
      {"strategy ordering", strategy_ordering},
      {"time-to-gap direction", time_to_gap_direction},
      {"selection exactness", selection_exactness},
      {"lambda-bar mechanism", lambda_bar_mechanism},
      {"determinism", determinism},
      {"numerical validity", numerical_validity},
  };
  std::set<std::size_t> selected;
  for (int i = 1; i < argc; ++i) selected.insert(static_cast<std::size_t>(std::atoi(argv[i])));
  int failures = 0;
  for (std::size_t c = 0; c < criteria.size(); ++c) {
    if (!selected.empty() && !selected.count(c + 1)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = criteria[c].second();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s criterion %zu (%s): %s [%.1f s]\n", v.pass ? "PASS" : "FAIL", c + 1, criteria[c].first,
                v.detail.c_str(), secs);
    std::fflush(stdout);
    if (!v.pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
