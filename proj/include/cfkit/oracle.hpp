#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "cfkit/generator.hpp"
#include "cfkit/interp.hpp"

namespace cfkit {

// One factual execution: the latents actually drawn and the visible result.
struct FactualRun {
  Value x0;
  std::vector<std::pair<std::string, Value>> latents;  // parameter order
  Value y0;
};

// Every latent assignment (parameter order, one row per assignment) that
// reproduces y0 at x0. Domains are carried along for reporting.
struct ConsistentLatentSet {
  std::vector<std::vector<Value>> assignments;
  std::vector<LatentDomain> domains;
};

// Sorted ascending, no duplicates.
struct AnswerSet {
  std::vector<Value> values;

  bool contains(Value v) const;
};

struct OracleConfig {
  Value x_min = 1;
  Value x_max = 25;
  std::size_t enumeration_cap = 200000;  // full-domain product above this throws
  std::size_t answer_cap = 8;            // instances with larger answer sets are rejected
  bool require_nontrivial = false;       // reject when answers == {y0}
  int assembly_retries = 40;             // (x0, x_cf) redraws per candidate
  EvalLimits limits{};
};

// Draws latents uniformly from their domains and runs the function.
// Propagates EvalError if the drawn point fails.
FactualRun observe(const FunctionAst& f, Value x0, const std::vector<LatentDomain>& domains,
                   SplitMix64& rng, const EvalLimits& limits = {});

// Brute-force abduction over the full domain product. Assignments that fail
// to evaluate are skipped. Throws EnumerationCapExceeded when the product
// exceeds config.enumeration_cap and AbductionEmpty when nothing matches.
ConsistentLatentSet abduce(const FunctionAst& f, Value x0, Value y0,
                           const std::vector<LatentDomain>& domains,
                           const OracleConfig& config = {});

// f(x_cf, ·) over every consistent assignment, deduplicated. Assignments that
// fail at x_cf are dropped (count reported via `dropped`); if all fail,
// throws AllBranchesFailed.
AnswerSet counterfactual_answer_set(const FunctionAst& f, const ConsistentLatentSet& consistent,
                                    Value x_cf, int* dropped = nullptr,
                                    const EvalLimits& limits = {});

// A fully assembled code problem: everything needed to render either question
// mode and to grade against the exact answer set.
struct ProblemInstance {
  std::string id;  // assigned by the dataset pipeline
  LogicFamily family;
  std::string template_id;
  std::uint64_t seed;
  std::string source;
  FunctionAst ast;
  FactualRun run;
  Value x_cf;
  AnswerSet answers;      // counterfactual answer set
  Value answer_interv;    // f(x_cf) under the observed latents
  int consistent_count;   // |abduction set|
  int cf_eval_dropped;    // consistent assignments that failed at x_cf
};

// Assembles a problem from a verified candidate: draws (x0, x_cf), observes,
// abduces, computes the answer set, and enforces the instance filters
// (answer cap, interventional evaluability, rejection of x-insensitive
// functions where every probe input reproduces y0). Retries with fresh draws
// up to config.assembly_retries times, then throws AssemblyExhausted.
// EnumerationCapExceeded is not retried; redraws cannot shrink the domain.
ProblemInstance assemble_problem(const ProblemCandidate& c, std::uint64_t seed,
                                 const OracleConfig& config = {});

}  // namespace cfkit
