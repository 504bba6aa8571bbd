#include <algorithm>
#include <string>
#include <vector>

#include "cfkit/oracle.hpp"
#include "cfkit/parser.hpp"
#include "doctest.h"
#include "fixtures.hpp"

using namespace cfkit;

namespace {

ProblemCandidate make_candidate(const std::string& source, std::vector<LatentDomain> domains) {
  return {parse_function(source), source, std::move(domains), LogicFamily::IfElse, "handmade", 0};
}

}  // namespace

TEST_CASE("abduce recovers every assignment consistent with the fixture observation") {
  // Published multi-latent program, observed (x0=16) -> 3640. Over [0,20]^3
  // exactly four assignments reproduce the observation; hand-derived from
  // (16 + r1) * (r1 + r2*r3) = 3640 with divisors 26 and 35 in range.
  FunctionAst f = parse_function(fixtures::kMultiLatentCounterfactual);
  std::vector<LatentDomain> domains{{"r1", 0, 20}, {"r2", 0, 20}, {"r3", 0, 20}};
  ConsistentLatentSet consistent = abduce(f, 16, 3640, domains);
  std::vector<std::vector<Value>> expected{
      {10, 10, 13}, {10, 13, 10}, {19, 5, 17}, {19, 17, 5}};
  CHECK(consistent.assignments == expected);  // odometer order is ascending

  // Counterfactual x=18 funnels those into two distinct outputs.
  AnswerSet answers = counterfactual_answer_set(f, consistent, 18);
  CHECK(answers.values == std::vector<Value>{3848, 3920});
  CHECK(answers.contains(3848));
  CHECK_FALSE(answers.contains(3849));

  // On the narrower generation domain nothing explains the observation.
  std::vector<LatentDomain> narrow{{"r1", 0, 10}, {"r2", 0, 10}, {"r3", 0, 10}};
  CHECK_THROWS_AS(abduce(f, 16, 3640, narrow), AbductionEmpty);
}

TEST_CASE("modulo observation keeps multiple latents that can collapse") {
  FunctionAst f = parse_function("def f(x, r):\n    return (x + r) % 4\n");
  std::vector<LatentDomain> domains{{"r", 0, 7}};
  ConsistentLatentSet consistent = abduce(f, 5, 2, domains);
  CHECK(consistent.assignments == std::vector<std::vector<Value>>{{1}, {5}});
  // Both survivors give the same counterfactual value: multiplicity in the
  // latent space, a singleton answer set.
  AnswerSet answers = counterfactual_answer_set(f, consistent, 6);
  CHECK(answers.values == std::vector<Value>{3});
}

TEST_CASE("assignments that fail at x_cf are dropped and counted") {
  FunctionAst f = parse_function("def f(x, r):\n    return x // (x - r)\n");
  std::vector<LatentDomain> domains{{"r", 0, 10}};
  // 5 // (5 - r) == 1 for r in {0, 1, 2}.
  ConsistentLatentSet consistent = abduce(f, 5, 1, domains);
  CHECK(consistent.assignments == std::vector<std::vector<Value>>{{0}, {1}, {2}});

  int dropped = -1;
  AnswerSet at2 = counterfactual_answer_set(f, consistent, 2, &dropped);
  CHECK(at2.values == std::vector<Value>{1, 2});  // r=2 divides by zero at x=2
  CHECK(dropped == 1);

  // 5 // (5 - r) == 2 only for r=3, and x_cf=3 kills that one assignment.
  ConsistentLatentSet only3 = abduce(f, 5, 2, domains);
  CHECK(only3.assignments == std::vector<std::vector<Value>>{{3}});
  CHECK_THROWS_AS(counterfactual_answer_set(f, only3, 3), AllBranchesFailed);
}

TEST_CASE("enumeration cap rejects oversized latent spaces before running") {
  FunctionAst f = parse_function("def f(x, r1, r2, r3):\n    return x + r1 + r2 + r3\n");
  std::vector<LatentDomain> domains{{"r1", 0, 99}, {"r2", 0, 99}, {"r3", 0, 99}};
  CHECK_THROWS_AS(abduce(f, 1, 1, domains), EnumerationCapExceeded);
  OracleConfig roomy;
  roomy.enumeration_cap = 2000000;
  CHECK_NOTHROW(abduce(f, 1, 10, domains, roomy));
}

TEST_CASE("observe draws latents inside their domains and reports the true output") {
  FunctionAst f = parse_function("def f(x, r1, r2):\n    return x * r1 + r2\n");
  std::vector<LatentDomain> domains{{"r1", 2, 4}, {"r2", 10, 20}};
  SplitMix64 rng(3);
  for (int i = 0; i < 50; ++i) {
    FactualRun run = observe(f, 5, domains, rng);
    REQUIRE(run.latents.size() == 2);
    CHECK(run.latents[0].first == "r1");
    CHECK(run.latents[0].second >= 2);
    CHECK(run.latents[0].second <= 4);
    CHECK(run.latents[1].second >= 10);
    CHECK(run.latents[1].second <= 20);
    CHECK(run.y0 == 5 * run.latents[0].second + run.latents[1].second);
  }
}

TEST_CASE("assemble_problem output satisfies the oracle invariants") {
  auto c = make_candidate(
      "def f(x, r):\n"
      "    if x > r:\n"
      "        y = x + r\n"
      "    else:\n"
      "        y = x - r\n"
      "    return y % 6\n",
      {{"r", 1, 12}});
  OracleConfig config;
  ProblemInstance inst = assemble_problem(c, 424242, config);

  CHECK(inst.run.x0 != inst.x_cf);
  CHECK(inst.run.x0 >= config.x_min);
  CHECK(inst.run.x0 <= config.x_max);
  CHECK(inst.x_cf >= config.x_min);
  CHECK(inst.x_cf <= config.x_max);
  REQUIRE(!inst.answers.values.empty());
  CHECK(inst.answers.values.size() <= config.answer_cap);
  for (std::size_t i = 1; i < inst.answers.values.size(); ++i) {
    CHECK(inst.answers.values[i - 1] < inst.answers.values[i]);
  }

  // Soundness and completeness against an independent sweep of the domain.
  std::vector<Value> cf_values;
  int consistent = 0;
  bool observed_is_consistent = false;
  for (Value r = 1; r <= 12; ++r) {
    Value y_factual = evaluate_params(c.ast, {inst.run.x0, r});
    if (y_factual != inst.run.y0) continue;
    ++consistent;
    if (r == inst.run.latents[0].second) observed_is_consistent = true;
    cf_values.push_back(evaluate_params(c.ast, {inst.x_cf, r}));
  }
  CHECK(consistent == inst.consistent_count);
  CHECK(observed_is_consistent);
  std::sort(cf_values.begin(), cf_values.end());
  cf_values.erase(std::unique(cf_values.begin(), cf_values.end()), cf_values.end());
  CHECK(inst.answers.values == cf_values);

  // The interventional answer comes from the observed latents and must be a
  // member of the counterfactual answer set.
  CHECK(inst.answer_interv ==
        evaluate_params(c.ast, {inst.x_cf, inst.run.latents[0].second}));
  CHECK(inst.answers.contains(inst.answer_interv));

  // Same seed, same instance.
  ProblemInstance again = assemble_problem(c, 424242, config);
  CHECK(again.run.x0 == inst.run.x0);
  CHECK(again.x_cf == inst.x_cf);
  CHECK(again.answers.values == inst.answers.values);
}

TEST_CASE("x-insensitive functions are rejected wholesale") {
  // The visible input is ignored entirely; observing y pins r and every probe
  // reproduces y0, which assembly must refuse.
  auto c = make_candidate("def f(x, r):\n    return r * 3\n", {{"r", 1, 12}});
  CHECK_THROWS_AS(assemble_problem(c, 9, OracleConfig{}), AssemblyExhausted);
}

TEST_CASE("answer cap rejection leads to exhaustion for high-multiplicity functions") {
  // Constant function: every r is consistent, answers = {0} (size 1) but
  // x-insensitive, so rejected. With x in the return the answer set is fine.
  // Here: f spreads answers as wide as the domain, always exceeding cap=2.
  auto c = make_candidate("def f(x, r):\n    return x % 2 + r * 10\n", {{"r", 1, 12}});
  OracleConfig tight;
  tight.answer_cap = 0;  // nothing fits
  CHECK_THROWS_AS(assemble_problem(c, 5, tight), AssemblyExhausted);
}

TEST_CASE("x range narrower than two values is a config error") {
  auto c = make_candidate("def f(x, r):\n    return x + r\n", {{"r", 1, 3}});
  OracleConfig config;
  config.x_min = 5;
  config.x_max = 5;
  CHECK_THROWS_AS(assemble_problem(c, 1, config), ConfigError);
}

TEST_CASE("generated problems pass an independent oracle sweep") {
  GenConfig gen;
  auto batch = generate_batch(LogicFamily::IfElse, 8, 2026, gen);
  OracleConfig config;
  int assembled = 0;
  for (const auto& c : batch) {
    ProblemInstance inst;
    try {
      inst = assemble_problem(c, c.seed, config);
    } catch (const AssemblyExhausted&) {
      continue;
    }
    ++assembled;
    REQUIRE(inst.run.latents.size() == 1);
    std::vector<Value> cf_values;
    int consistent = 0;
    for (Value r = c.domains[0].min_r; r <= c.domains[0].max_r; ++r) {
      Value y;
      try {
        y = evaluate_params(c.ast, {inst.run.x0, r});
      } catch (const EvalError&) {
        continue;
      }
      if (y != inst.run.y0) continue;
      ++consistent;
      try {
        cf_values.push_back(evaluate_params(c.ast, {inst.x_cf, r}));
      } catch (const EvalError&) {
      }
    }
    std::sort(cf_values.begin(), cf_values.end());
    cf_values.erase(std::unique(cf_values.begin(), cf_values.end()), cf_values.end());
    CHECK(consistent == inst.consistent_count);
    CHECK(inst.answers.values == cf_values);
  }
  CHECK(assembled >= 4);  // most verified candidates should assemble
}
