#include <CLI11.hpp>

#include <iostream>

#include "commands.hpp"

namespace {

void add_solve_flags(CLI::App* app, lagcut::cli::SolveArgs& s) {
  app->add_option("--outer", s.outer, "outer iteration limit")->check(CLI::PositiveNumber);
  app->add_option("--inner", s.inner, "heuristic cuts per outer iteration");
  app->add_option("--tol-mu", s.tol_mu, "relative gap tolerance");
  app->add_option("--tol-e", s.tol_e, "minimum heuristic cut efficacy");
  app->add_option("--strategy", s.strategy, "none|random|max-violation|feasibility|mixed");
  app->add_option("--master", s.master, "aggregated|partial:M|disaggregated");
  app->add_option("--lambda-bar", s.lambda_bar, "multiplier upper bound (default: instance value)");
  app->add_option("--seed", s.seed, "seed for random cuts and partitions");
  app->add_option("--threads", s.threads, "worker threads (default: $LAGCUT_THREADS or all cores)");
}

}  // namespace

int main(int argc, char** argv) {
  using namespace lagcut::cli;
  CLI::App app{"Lagrangian cutting-plane solver for linked markdown pricing"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* g = app.add_subcommand("generate", "generate an instance from a JSON spec");
  g->add_option("spec", gen.spec, "generator spec (JSON)")->required();
  g->add_option("-o,--out", gen.out, "instance file to write")->required();
  g->add_option("--manifest", gen.manifest, "manifest path (default: <out>.manifest.json)");

  SolveArgs solve;
  auto* s = app.add_subcommand("solve", "run the cutting-plane method on an instance");
  s->add_option("instance", solve.instance, "instance file (JSON)")->required();
  s->add_option("-o,--out-dir", solve.out_dir, "output directory");
  add_solve_flags(s, solve);
  s->add_flag("--dump-pool", solve.dump_pool, "also write the final cut pool");
  s->add_flag("-q,--quiet", solve.quiet, "no per-iteration log");

  PoolArgs pool;
  auto* p = app.add_subcommand("pool", "collect a frozen pool of exact cuts");
  p->add_option("instance", pool.instance, "instance file (JSON)")->required();
  p->add_option("-o,--out", pool.out, "pool dump to write")->required();
  p->add_option("--cuts", pool.cuts, "number of cuts")->check(CLI::PositiveNumber);
  p->add_option("--threads", pool.threads, "worker threads");

  BenchArgs bench;
  auto* b = app.add_subcommand("bench", "time-to-gap experiments on a frozen pool");
  b->add_option("pool", bench.pool, "pool dump (JSON)")->required();
  b->add_option("--mode", bench.mode, "heuristic | partial:M1,M2,...");
  b->add_option("-o,--out", bench.out, "CSV output (default: stdout)");
  b->add_option("--seed", bench.seed, "partition seed");
  b->add_option("--max-rows", bench.max_rows, "row cap for grouped masters");

  CompareArgs cmp;
  auto* c = app.add_subcommand("compare", "run several heuristic strategies on one instance");
  c->add_option("instance", cmp.instance, "instance file (JSON)")->required();
  c->add_option("-o,--out-dir", cmp.out_dir, "output directory");
  c->add_option("--strategies", cmp.strategies, "comma-separated strategy list");
  add_solve_flags(c, cmp.base);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInputError;
  }

  try {
    if (*g) return cmd_generate(gen);
    if (*s) return cmd_solve(solve);
    if (*p) return cmd_pool(pool);
    if (*b) return cmd_bench(bench);
    if (*c) return cmd_compare(cmp);
  } catch (const lagcut::CapExceeded& e) {
    std::cerr << "error: " << e.what() << " (count " << e.count() << ")\n";
    return kInputError;
  } catch (const lagcut::InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const lagcut::NumericalError& e) {
    std::cerr << "numerical abort: " << e.what() << "\n";
    return kNumericalAbort;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  }
  return kOk;
}
