#include "cfkit/pipeline.hpp"

#include <sstream>

#include "cfkit/gsm.hpp"
#include "cfkit/harness.hpp"
#include "cfkit/oracle.hpp"
#include "cfkit/version.hpp"

namespace cfkit {

namespace {

std::string make_id(const std::string& family, const std::string& split, std::size_t index) {
  std::ostringstream out;
  out << family << "-" << split << "-";
  std::string n = std::to_string(index);
  for (std::size_t i = n.size(); i < 5; ++i) out << '0';
  out << n;
  return out.str();
}

void attach_prompts(DatasetRecord& r) {
  r.prompt_cf = render_prompt(r, Mode::Counterfactual).text;
  r.prompt_interv = render_prompt(r, Mode::Interventional).text;
}

std::vector<DatasetRecord> generate_gsm(const RunConfig& config, const std::string& hash,
                                        PipelineStats& stats) {
  GsmConfig gsm;
  gsm.retries = config.assembly_retries;
  std::vector<DatasetRecord> records;
  std::uint64_t budget =
      static_cast<std::uint64_t>(config.retry_factor) * static_cast<std::uint64_t>(config.count);
  for (std::uint64_t attempt = 0;
       attempt < budget && records.size() < static_cast<std::size_t>(config.count); ++attempt) {
    ++stats.attempts;
    std::uint64_t seed = record_seed(config.seed, attempt);
    SplitMix64 rng(seed);
    GsmProblem p;
    try {
      p = gsm_problem(gsm, rng);
    } catch (const AssemblyExhausted&) {
      ++stats.assembly_failures;
      continue;
    }
    DatasetRecord r;
    r.schema_version = kSchemaVersion;
    r.generator_version = kGeneratorVersion;
    r.config_hash = hash;
    r.id = make_id("gsm", "eval", records.size());
    r.family = "gsm";
    r.split = "eval";
    r.template_id = p.graph.scenario;
    r.seed = seed;
    r.is_gsm = true;
    r.x0 = p.graph.qty;
    r.latents.emplace_back("hidden", p.graph.hidden_value);
    r.y0 = p.factual_total;
    r.x_cf = p.graph.qty_cf;
    r.answers = {p.answer};
    r.answer_interv = p.answer;
    r.consistent_count = gsm_consistent_count(p.graph);
    r.cf_eval_dropped = 0;
    r.scenario = p.graph.scenario;
    r.hidden_kind = hidden_kind_name(p.graph.hidden_kind);
    r.attachment = attachment_name(p.graph.attachment);
    r.text_cf = p.text_cf;
    r.text_interv = p.text_interv;
    attach_prompts(r);
    records.push_back(std::move(r));
  }
  if (records.size() < static_cast<std::size_t>(config.count)) {
    throw AssemblyExhausted("gsm: " + std::to_string(records.size()) + "/" +
                            std::to_string(config.count) + " records in " +
                            std::to_string(budget) + " attempts");
  }
  return records;
}

std::vector<DatasetRecord> generate_code(const RunConfig& config, const std::string& hash,
                                         PipelineStats& stats) {
  LogicFamily family = family_from_name(config.family);
  const char* split = config.train ? "train" : "eval";

  GenConfig gen;
  gen.split = config.train ? Split::Train : Split::Eval;
  gen.x_min = config.x_min;
  gen.x_max = config.x_max;
  gen.verification_points = config.verification_points;
  gen.dedup_threshold = config.dedup_threshold;
  gen.dedup_enabled = !config.train;  // the training split trades diversity for volume
  gen.retry_factor = config.retry_factor;

  OracleConfig oracle;
  oracle.x_min = config.x_min;
  oracle.x_max = config.x_max;
  oracle.enumeration_cap = config.enumeration_cap;
  oracle.answer_cap = config.answer_cap;
  oracle.assembly_retries = config.assembly_retries;

  std::uint64_t budget =
      static_cast<std::uint64_t>(config.retry_factor) * static_cast<std::uint64_t>(config.count);
  CandidateSource source(family, config.seed, budget, gen);
  std::vector<DatasetRecord> records;
  while (records.size() < static_cast<std::size_t>(config.count)) {
    auto candidate = source.next();
    if (!candidate) {
      std::ostringstream msg;
      msg << config.family << ": " << records.size() << "/" << config.count << " records in "
          << source.stats().attempts << " attempts ("
          << source.stats().instantiation_rejections << " bad instantiations, "
          << source.stats().verify_failures << " verify failures, "
          << source.stats().dedup_rejections << " dedup rejections, " << stats.assembly_failures
          << " assembly failures)";
      throw GenerationExhausted(msg.str());
    }
    if (source.is_duplicate(*candidate)) {
      ++source.stats().dedup_rejections;
      continue;
    }
    ProblemInstance inst;
    try {
      inst = assemble_problem(*candidate, candidate->seed, oracle);
    } catch (const AssemblyExhausted&) {
      ++stats.assembly_failures;
      continue;
    }
    source.accept(*candidate);

    DatasetRecord r;
    r.schema_version = kSchemaVersion;
    r.generator_version = kGeneratorVersion;
    r.config_hash = hash;
    r.id = make_id(config.family, split, records.size());
    r.family = config.family;
    r.split = split;
    r.template_id = inst.template_id;
    r.seed = inst.seed;
    r.is_gsm = false;
    r.source = inst.source;
    r.x0 = inst.run.x0;
    r.latents = inst.run.latents;
    r.y0 = inst.run.y0;
    r.x_cf = inst.x_cf;
    r.answers = inst.answers.values;
    r.answer_interv = inst.answer_interv;
    r.consistent_count = inst.consistent_count;
    r.cf_eval_dropped = inst.cf_eval_dropped;
    attach_prompts(r);
    records.push_back(std::move(r));
  }
  stats.attempts = source.stats().attempts;
  stats.instantiation_rejections = source.stats().instantiation_rejections;
  stats.verify_failures = source.stats().verify_failures;
  stats.dedup_rejections = source.stats().dedup_rejections;
  return records;
}

}  // namespace

std::vector<DatasetRecord> run_generate(const RunConfig& config, PipelineStats* stats_out) {
  validate(config);
  std::string hash = config_hash(config);
  PipelineStats stats;
  std::vector<DatasetRecord> records = config.family == "gsm"
                                           ? generate_gsm(config, hash, stats)
                                           : generate_code(config, hash, stats);
  stats.records = records.size();
  if (stats_out) *stats_out = stats;
  return records;
}

}  // namespace cfkit
