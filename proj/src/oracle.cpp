#include "cfkit/oracle.hpp"

#include <algorithm>
#include <sstream>

namespace cfkit {

namespace {

// Advances a mixed-radix odometer over the domain ranges. Returns false once
// every position has wrapped.
bool advance(std::vector<Value>& vals, const std::vector<LatentDomain>& domains) {
  for (std::size_t i = vals.size(); i-- > 0;) {
    if (vals[i] < domains[i].max_r) {
      ++vals[i];
      return true;
    }
    vals[i] = domains[i].min_r;
  }
  return false;
}

}  // namespace

bool AnswerSet::contains(Value v) const {
  return std::binary_search(values.begin(), values.end(), v);
}

FactualRun observe(const FunctionAst& f, Value x0, const std::vector<LatentDomain>& domains,
                   SplitMix64& rng, const EvalLimits& limits) {
  FactualRun run;
  run.x0 = x0;
  std::vector<Value> args(1 + domains.size());
  args[0] = x0;
  for (std::size_t i = 0; i < domains.size(); ++i) {
    args[1 + i] = rng.range(domains[i].min_r, domains[i].max_r);
    run.latents.emplace_back(domains[i].name, args[1 + i]);
  }
  run.y0 = evaluate_params(f, args, limits);
  return run;
}

ConsistentLatentSet abduce(const FunctionAst& f, Value x0, Value y0,
                           const std::vector<LatentDomain>& domains,
                           const OracleConfig& config) {
  std::size_t product = 1;
  for (const auto& d : domains) {
    std::size_t size = static_cast<std::size_t>(d.size());
    if (size == 0 || product > config.enumeration_cap / size) {
      std::ostringstream msg;
      msg << "latent search space exceeds " << config.enumeration_cap << " points";
      throw EnumerationCapExceeded(msg.str());
    }
    product *= size;
  }

  ConsistentLatentSet out;
  out.domains = domains;
  std::vector<Value> vals(domains.size());
  for (std::size_t i = 0; i < domains.size(); ++i) vals[i] = domains[i].min_r;
  std::vector<Value> args(1 + domains.size());
  args[0] = x0;
  do {
    std::copy(vals.begin(), vals.end(), args.begin() + 1);
    try {
      if (evaluate_params(f, args, config.limits) == y0) out.assignments.push_back(vals);
    } catch (const EvalError&) {
      // Assignments outside f's domain at x0 cannot explain the observation.
    }
  } while (advance(vals, domains));

  if (out.assignments.empty()) {
    std::ostringstream msg;
    msg << "no latent assignment yields " << f.name << "(" << x0 << ", ...) == " << y0;
    throw AbductionEmpty(msg.str());
  }
  return out;
}

AnswerSet counterfactual_answer_set(const FunctionAst& f, const ConsistentLatentSet& consistent,
                                    Value x_cf, int* dropped, const EvalLimits& limits) {
  AnswerSet out;
  int failed = 0;
  std::vector<Value> args(1 + consistent.domains.size());
  args[0] = x_cf;
  for (const auto& assignment : consistent.assignments) {
    std::copy(assignment.begin(), assignment.end(), args.begin() + 1);
    try {
      out.values.push_back(evaluate_params(f, args, limits));
    } catch (const EvalError&) {
      ++failed;
    }
  }
  if (dropped) *dropped = failed;
  if (out.values.empty()) {
    throw AllBranchesFailed("every consistent latent assignment failed at x_cf=" +
                            std::to_string(x_cf));
  }
  std::sort(out.values.begin(), out.values.end());
  out.values.erase(std::unique(out.values.begin(), out.values.end()), out.values.end());
  return out;
}

namespace {

// True when f, under the observed latents, returns y0 on every probe input.
// Such instances admit a degenerate copy-the-observation strategy, so
// assembly rejects them. Probes: x_cf, the neighbors of x0, and the midpoint.
bool x_insensitive(const FunctionAst& f, const FactualRun& run, Value x_cf, Value yi,
                   const OracleConfig& config) {
  if (yi != run.y0) return false;
  std::vector<Value> probes;
  if (run.x0 > config.x_min) probes.push_back(run.x0 - 1);
  if (run.x0 < config.x_max) probes.push_back(run.x0 + 1);
  Value mid = run.x0 + (x_cf - run.x0) / 2;
  if (mid != run.x0 && mid != x_cf) probes.push_back(mid);

  std::vector<Value> args(1 + run.latents.size());
  for (std::size_t i = 0; i < run.latents.size(); ++i) args[1 + i] = run.latents[i].second;
  for (Value probe : probes) {
    args[0] = probe;
    try {
      if (evaluate_params(f, args, config.limits) != run.y0) return false;
    } catch (const EvalError&) {
      return false;  // distinguishable by failure, so not insensitive
    }
  }
  return true;
}

}  // namespace

ProblemInstance assemble_problem(const ProblemCandidate& c, std::uint64_t seed,
                                 const OracleConfig& config) {
  if (config.x_max - config.x_min < 1) {
    throw ConfigError("assemble_problem: x range must contain at least two values");
  }
  SplitMix64 rng(salted_seed(seed, "assemble"));
  for (int attempt = 0; attempt < config.assembly_retries; ++attempt) {
    Value x0 = rng.range(config.x_min, config.x_max);
    Value x_cf = rng.range(config.x_min, config.x_max);
    if (x_cf == x0) continue;

    FactualRun run;
    try {
      run = observe(c.ast, x0, c.domains, rng, config.limits);
    } catch (const EvalError&) {
      continue;
    }

    ConsistentLatentSet consistent;
    try {
      consistent = abduce(c.ast, x0, run.y0, c.domains, config);
    } catch (const AbductionEmpty&) {
      continue;  // unreachable given the successful observation, but harmless
    }

    int dropped = 0;
    AnswerSet answers;
    try {
      answers = counterfactual_answer_set(c.ast, consistent, x_cf, &dropped, config.limits);
    } catch (const AllBranchesFailed&) {
      continue;
    }
    if (answers.values.size() > config.answer_cap) continue;

    // The interventional variant of this instance must itself be answerable.
    std::vector<Value> args(1 + run.latents.size());
    args[0] = x_cf;
    for (std::size_t i = 0; i < run.latents.size(); ++i) args[1 + i] = run.latents[i].second;
    Value yi;
    try {
      yi = evaluate_params(c.ast, args, config.limits);
    } catch (const EvalError&) {
      continue;
    }

    if (config.require_nontrivial && answers.values.size() == 1 && answers.values[0] == run.y0) {
      continue;
    }
    if (x_insensitive(c.ast, run, x_cf, yi, config)) continue;

    ProblemInstance inst;
    inst.family = c.family;
    inst.template_id = c.template_id;
    inst.seed = seed;
    inst.source = c.source;
    inst.ast = c.ast;
    inst.run = std::move(run);
    inst.x_cf = x_cf;
    inst.answers = std::move(answers);
    inst.answer_interv = yi;
    inst.consistent_count = static_cast<int>(consistent.assignments.size());
    inst.cf_eval_dropped = dropped;
    return inst;
  }
  std::ostringstream msg;
  msg << "no admissible (x0, x_cf) for template " << c.template_id << " after "
      << config.assembly_retries << " draws";
  throw AssemblyExhausted(msg.str());
}

}  // namespace cfkit
