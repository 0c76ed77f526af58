#pragma once

#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "lagcut.hpp"

namespace lagcut::cli {

namespace fs = std::filesystem;

enum ExitCode : int { kOk = 0, kInputError = 2, kNumericalAbort = 3 };

struct GenerateArgs {
  std::string spec;
  std::string out;
  std::string manifest;
};

struct SolveArgs {
  std::string instance;
  std::string out_dir = ".";
  std::size_t outer = 10;
  std::size_t inner = 100;
  double tol_mu = 1e-6;
  double tol_e = 1.0;
  std::string strategy = "max-violation";
  std::string master = "aggregated";
  double lambda_bar = 0.0;  // 0 keeps the instance value
  std::uint64_t seed = 0;
  std::size_t threads = 0;  // 0: LAGCUT_THREADS or hardware concurrency
  bool dump_pool = false;
  bool quiet = false;
};

struct PoolArgs {
  std::string instance;
  std::string out;
  std::size_t cuts = 20;
  std::size_t threads = 0;
};

struct BenchArgs {
  std::string pool;
  std::string mode = "heuristic";
  std::string out;
  std::uint64_t seed = 0;
  std::size_t max_rows = MasterOptions{}.max_rows;
};

struct CompareArgs {
  std::string instance;
  std::string out_dir = ".";
  std::string strategies = "none,random,max-violation,feasibility";
  SolveArgs base;
};

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep))
    if (!item.empty()) out.push_back(item);
  return out;
}

inline std::size_t resolve_threads(std::size_t requested) {
  return requested ? requested : default_thread_count();
}

/// Artifacts are recorded relative to the manifest's directory, so manifests
/// of identical runs into different directories compare equal.
inline void write_manifest(const fs::path& path, io::Manifest m) {
  const fs::path base = fs::absolute(path).parent_path();
  m.artifacts.push_back(path.string());
  for (auto& a : m.artifacts) a = fs::absolute(a).lexically_relative(base).generic_string();
  io::write_file(path.string(), m.to_json().dump(2) + "\n");
}

inline int cmd_generate(const GenerateArgs& a) {
  const GenSpec spec = io::load_genspec(a.spec);
  const Instance inst = generate(spec);
  io::write_file(a.out, io::dump_instance(inst));
  io::Manifest m;
  m.subcommand = "generate";
  m.config = io::to_json(spec);
  m.instance_hash = io::instance_hash(inst);
  m.seed = spec.seed;
  m.artifacts = {a.out};
  const std::string manifest = a.manifest.empty() ? a.out + ".manifest.json" : a.manifest;
  write_manifest(manifest, m);
  std::cout << "instance " << a.out << " hash " << m.instance_hash << " articles "
            << inst.num_articles() << " constraints " << inst.num_constraints() << "\n";
  return kOk;
}

inline DriverConfig driver_config(const SolveArgs& a) {
  DriverConfig c;
  c.outer_limit = a.outer;
  c.inner_limit = a.inner;
  c.tol_mu = a.tol_mu;
  c.tol_e = a.tol_e;
  c.strategy = strategy_from(a.strategy);
  c.master = MasterVariant::parse(a.master);
  if (a.lambda_bar > 0.0) c.lambda_bar = a.lambda_bar;
  c.seed = a.seed;
  c.threads = resolve_threads(a.threads);
  c.validate();
  return c;
}

inline void log_run(const RunResult& r) {
  for (const auto& e : r.trace) {
    if (e.kind != EventKind::master_solve) continue;
    std::cerr << "j=" << e.j << " outer=" << e.outer << " dual=" << e.dual_bound << " mu=" << e.mu
              << " gap_d_j=" << e.gap_dj << "\n";
  }
}

inline int cmd_solve(const SolveArgs& a) {
  const Instance inst = io::load_instance(a.instance);
  const DriverConfig cfg = driver_config(a);
  fs::create_directories(a.out_dir);
  const RunResult r = run(inst, cfg);
  if (!a.quiet) log_run(r);
  const fs::path dir(a.out_dir);
  io::Manifest m;
  m.subcommand = "solve";
  m.config = io::config_json(cfg);
  m.config.erase("threads");
  m.instance_hash = io::instance_hash(inst);
  m.seed = cfg.seed;
  auto emit = [&](const std::string& name, const std::string& text) {
    const fs::path p = dir / name;
    io::write_file(p.string(), text);
    m.artifacts.push_back(p.string());
  };
  emit("trace.ndjson", io::trace_ndjson(r.trace));
  emit("summary.json", io::summary_json(r, cfg).dump(2) + "\n");
  emit("solution.json", io::solution_json(r).dump(2) + "\n");
  if (a.dump_pool) emit("pool.json", io::to_json(r.pool, r.lambda_bar).dump() + "\n");
  write_manifest(dir / "manifest.json", m);
  std::cout << "status " << to_string(r.stop_reason) << " dual " << r.dual_bound << " mu " << r.mu
            << " gap_d_j " << r.final_gap_dj() << " primal " << r.primal.profit << "\n";
  return kOk;
}

inline int cmd_pool(const PoolArgs& a) {
  const Instance inst = io::load_instance(a.instance);
  const CutPool pool = build_frozen_pool(inst, a.cuts, resolve_threads(a.threads));
  io::write_file(a.out, io::to_json(pool, inst.lambda_bar).dump() + "\n");
  std::cout << "pool " << a.out << " cuts " << pool.size() << "\n";
  return kOk;
}

inline int cmd_bench(const BenchArgs& a) {
  const io::LoadedPool loaded = io::load_pool(a.pool);
  MasterOptions opts;
  opts.max_rows = a.max_rows;
  std::vector<BenchPoint> points;
  if (a.mode == "heuristic") {
    HeuristicBenchOptions h;
    h.master = opts;
    points = bench_heuristic(loaded.pool, loaded.lambda_bar, h);
  } else if (a.mode.rfind("partial:", 0) == 0) {
    std::vector<std::size_t> levels;
    for (const auto& s : split(a.mode.substr(8), ',')) {
      try {
        levels.push_back(std::stoul(s));
      } catch (const std::exception&) {
        throw InputError("bad aggregation level '" + s + "'");
      }
    }
    if (levels.empty()) throw InputError("partial mode needs at least one level");
    points = bench_partial(loaded.pool, loaded.lambda_bar, levels, a.seed, opts);
  } else {
    throw InputError("unknown bench mode '" + a.mode + "'");
  }
  const BenchReport report = finish_report(std::move(points), best_bound_of(loaded.pool, loaded.lambda_bar, opts));
  const std::string csv = bench_csv(report);
  if (a.out.empty())
    std::cout << csv;
  else
    io::write_file(a.out, csv);
  return kOk;
}

inline int cmd_compare(const CompareArgs& a) {
  const Instance inst = io::load_instance(a.instance);
  std::vector<std::pair<std::string, DriverConfig>> configs;
  for (const auto& name : split(a.strategies, ',')) {
    SolveArgs s = a.base;
    s.strategy = name;
    configs.emplace_back(name, driver_config(s));
  }
  if (configs.empty()) throw InputError("no strategies given");
  const ComparisonReport report = compare_strategies(inst, configs);
  fs::create_directories(a.out_dir);
  const fs::path dir(a.out_dir);
  io::Manifest m;
  m.subcommand = "compare";
  m.config = io::config_json(configs.front().second);
  m.config.erase("threads");
  m.config["strategies"] = a.strategies;
  m.instance_hash = io::instance_hash(inst);
  m.seed = configs.front().second.seed;
  for (const auto& [name, text] : {std::pair{std::string("comparison.csv"), io::comparison_csv(report)},
                                   std::pair{std::string("time_to_gap.csv"), io::time_to_gap_csv(report)}}) {
    io::write_file((dir / name).string(), text);
    m.artifacts.push_back((dir / name).string());
  }
  write_manifest(dir / "manifest.json", m);
  for (const auto& r : report.runs)
    std::cout << r.name << " dual " << r.result.dual_bound << " mu " << r.result.mu << " gap_d_j "
              << r.result.final_gap_dj() << "\n";
  return kOk;
}

}  // namespace lagcut::cli
