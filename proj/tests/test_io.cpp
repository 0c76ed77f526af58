#include <gtest/gtest.h>

#include <filesystem>

#include "support.hpp"

using namespace lagcut;
using namespace lagcut::testing;
using io::json;

namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("lagcut_test_" + name)).string();
}

}  // namespace

TEST(Fnv1a, ReferenceValues) {
  EXPECT_EQ(io::fnv1a_hex(""), "cbf29ce484222325");
  EXPECT_EQ(io::fnv1a_hex("a"), "af63dc4c8601ec8c");
  EXPECT_EQ(io::fnv1a_hex("foobar"), "85944171f73967e8");
}

TEST(InstanceJson, RoundTripPreservesEverything) {
  const Instance inst = small_instance(4, 3, 2, 3, 3);
  const json j = io::to_json(inst);
  const Instance back = io::instance_from_json(j);
  EXPECT_EQ(io::to_json(back).dump(), j.dump());
  EXPECT_EQ(io::instance_hash(back), io::instance_hash(inst));
  std::vector<double> lambda(inst.num_constraints(), 2.5);
  EXPECT_EQ(evaluate_lr(inst, lambda).value, evaluate_lr(back, lambda).value);
  for (std::size_t l = 0; l < inst.num_constraints(); ++l) {
    EXPECT_EQ(back.constraints[l].sign, inst.constraints[l].sign);
    EXPECT_EQ(back.constraints[l].rhs, inst.constraints[l].rhs);
  }
}

TEST(InstanceJson, StoresOriginalSenses) {
  const Instance inst = small_instance(1, 2, 1, 2, 2);
  const json j = io::to_json(inst);
  EXPECT_NE(j.dump().find("\"<=\""), std::string::npos);
}

TEST(InstanceJson, FileRoundTrip) {
  const Instance inst = small_instance(6, 2, 1, 3, 3);
  const std::string path = temp_path("instance.json");
  io::write_file(path, io::dump_instance(inst));
  EXPECT_EQ(io::instance_hash(io::load_instance(path)), io::instance_hash(inst));
  std::filesystem::remove(path);
}

TEST(InstanceJson, RejectsMalformedInput) {
  EXPECT_THROW(io::parse_json("{not json", "x"), InputError);
  EXPECT_THROW(io::load_instance("/nonexistent/dir/file.json"), InputError);
  json j = io::to_json(small_instance(1, 2, 1, 2, 2));
  json wrong = j;
  wrong["format"] = 99;
  EXPECT_THROW(io::instance_from_json(wrong), InputError);
  json missing = j;
  missing.erase("articles");
  EXPECT_THROW(io::instance_from_json(missing), InputError);
  json bad = j;
  bad["lambda_bar"] = "big";
  EXPECT_THROW(io::instance_from_json(bad), InputError);
}

TEST(GenSpecJson, RoundTripAndDefaults) {
  GenSpec s;
  s.articles = 9;
  s.difficulty = Difficulty::infeasible_link;
  s.lambda_bar = 55.0;
  const GenSpec back = io::genspec_from_json(io::to_json(s));
  EXPECT_EQ(io::to_json(back).dump(), io::to_json(s).dump());
  const GenSpec partial = io::genspec_from_json(json{{"format", 1}, {"articles", 3}, {"seed", 9}});
  EXPECT_EQ(partial.articles, 3u);
  EXPECT_EQ(partial.seed, 9u);
  EXPECT_EQ(partial.weeks, GenSpec{}.weeks);
  EXPECT_THROW(io::genspec_from_json(json{{"format", 1}, {"price", {1.0}}}), InputError);
  EXPECT_THROW(io::genspec_from_json(json{{"format", 1}, {"articles", 0}}), InputError);
}

TEST(PoolJson, RoundTripKeepsMasterBounds) {
  const Instance inst = small_instance(7, 5, 2, 3, 3);
  const CutPool pool = build_frozen_pool(inst, 6);
  const auto loaded = io::pool_from_json(io::to_json(pool, inst.lambda_bar));
  EXPECT_EQ(loaded.lambda_bar, inst.lambda_bar);
  ASSERT_EQ(loaded.pool.size(), pool.size());
  for (std::size_t i = 0; i < pool.num_articles(); ++i) EXPECT_EQ(loaded.pool.offer_count(i), pool.offer_count(i));
  EXPECT_EQ(solve_aggregated(loaded.pool, inst.lambda_bar).mu, solve_aggregated(pool, inst.lambda_bar).mu);
  EXPECT_EQ(solve_disaggregated(loaded.pool, inst.lambda_bar).mu, solve_disaggregated(pool, inst.lambda_bar).mu);
}

TEST(PoolJson, RejectsBrokenReferences) {
  const CutPool pool = random_pool(2, 3, 2, 1);
  json j = io::to_json(pool, 5.0);
  j["cuts"][0]["offer_ids"][0] = 17;
  EXPECT_THROW(io::pool_from_json(j), InputError);
  json empty = io::to_json(pool, 5.0);
  empty["cuts"] = json::array();
  EXPECT_THROW(io::pool_from_json(empty), InputError);
}

TEST(Trace, NdjsonLinesParseAndNullNonFinite) {
  const Instance inst = small_instance(3, 4, 1, 3, 3);
  const auto r = run(inst, DriverConfig{});
  const std::string text = io::trace_ndjson(r.trace);
  std::size_t lines = 0, start = 0;
  while (start < text.size()) {
    const std::size_t end = text.find('\n', start);
    ASSERT_NE(end, std::string::npos);
    const json e = json::parse(text.substr(start, end - start));
    EXPECT_TRUE(e.contains("kind"));
    EXPECT_TRUE(e.contains("wall_ms"));
    if (lines == 0) {
      EXPECT_EQ(e["kind"], "exact-lr");
      EXPECT_TRUE(e["mu"].is_null());
    }
    start = end + 1;
    ++lines;
  }
  EXPECT_EQ(lines, r.trace.size());
  EXPECT_EQ(text.find("nan"), std::string::npos);
  EXPECT_EQ(text.find("inf"), std::string::npos);
}

TEST(Trace, SummaryAndSolutionAgreeWithRun) {
  const Instance inst = small_instance(5, 4, 1, 3, 3);
  DriverConfig cfg;
  const auto r = run(inst, cfg);
  const json s = io::summary_json(r, cfg);
  const json sol = io::solution_json(r);
  EXPECT_EQ(s.dump().find("NaN"), std::string::npos);
  EXPECT_FALSE(sol.empty());
  EXPECT_FALSE(s.empty());
}

TEST(Csv, NumberFormatting) {
  EXPECT_EQ(io::csv_number(0.5), "0.5");
  EXPECT_EQ(io::csv_number(0.1), "0.10000000000000001");
  EXPECT_EQ(io::csv_number(std::nan("")), "");
  EXPECT_EQ(io::csv_number(kInf), "");
  EXPECT_EQ(io::number(std::nan("")), json(nullptr));
}

TEST(Csv, ComparisonHasOneRowPerMasterSolve) {
  const Instance inst = small_instance(2, 5, 1, 3, 3);
  std::vector<std::pair<std::string, DriverConfig>> configs = {{"none", {}}, {"mv", {}}};
  configs[0].second.strategy = HeuristicStrategy::none;
  const auto rep = compare_strategies(inst, configs);
  const std::string csv = io::comparison_csv(rep);
  std::size_t rows = 0;
  for (char c : csv) rows += c == '\n';
  std::size_t solves = 0;
  for (const auto& run : rep.runs) solves += run.result.master_solves;
  EXPECT_EQ(rows, solves + 1);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "strategy,iteration,wall_ms,dual_bound,mu,gap_alg1,gap_d_j,lambda_norm,cut_origin");
  const std::string ttg = io::time_to_gap_csv(rep);
  rows = 0;
  for (char c : ttg) rows += c == '\n';
  EXPECT_EQ(rows, 1 + 2 * 3u);
}

TEST(Manifest, CarriesToolAndHash) {
  io::Manifest m;
  m.subcommand = "solve";
  m.instance_hash = "abc";
  m.seed = 4;
  m.artifacts = {"trace.ndjson"};
  const json j = m.to_json();
  EXPECT_EQ(j["tool"], "lagcut");
  EXPECT_EQ(j["version"], io::kToolVersion);
  EXPECT_EQ(j["instance_hash"], "abc");
  EXPECT_EQ(j["artifacts"][0], "trace.ndjson");
}
