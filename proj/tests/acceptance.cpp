// Acceptance gate: one line per criterion, PASS or FAIL, nonzero exit on any
// failure. Every tolerance is pinned here as a named constant. CLI-level
// criteria exercise the real binary (CFKIT_CLI_PATH) through temp files under
// ./acceptance_artifacts.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "cfkit/generator.hpp"
#include "cfkit/gsm.hpp"
#include "cfkit/harness.hpp"
#include "cfkit/oracle.hpp"
#include "cfkit/parser.hpp"
#include "cfkit/pipeline.hpp"
#include "cfkit/store.hpp"
#include "fixtures.hpp"

using namespace cfkit;

namespace {

// ---- pinned tolerances and targets ------------------------------------------

constexpr Cents kGsmFactual = 35388;     // $353.88
constexpr Cents kGsmAnswer = 64878;      // $648.78
constexpr Value kInterpFactual = 358;    // generated_func_1273 at x=18
constexpr Value kInterpIntervened = 35;  // same latents, x=20
const std::map<std::string, int> kEvalSizes{
    {"if_else", 500}, {"if_else_long", 480}, {"multi_r", 575}, {"while", 480}};
constexpr double kDedupThreshold = 0.8;  // all kept pairs strictly below
constexpr int kOracleInstancesPerFamily = 1000;
constexpr double kHalfSetF1 = 66.7;  // percent
constexpr double kHalfSetTolerance = 0.1;
constexpr int kTrainCount = 400;
constexpr int kGsmCount = 200;

const char* kCli = CFKIT_CLI_PATH;
const std::filesystem::path kDir = "acceptance_artifacts";

// ---- helpers -----------------------------------------------------------------

struct CliResult {
  int code;
  std::string output;  // stdout + stderr
};

CliResult run_cli(const std::string& args) {
  static int counter = 0;
  std::filesystem::path log = kDir / ("cli_" + std::to_string(counter++) + ".log");
  std::string cmd = std::string("\"") + kCli + "\" " + args + " > " + log.string() + " 2>&1";
  int status = std::system(cmd.c_str());
  CliResult r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream in(log);
  std::stringstream buf;
  buf << in.rdbuf();
  r.output = buf.str();
  return r;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

template <typename Fn>
void criterion(int index, const std::string& name, Fn&& fn) {
  auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = fn();
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail = std::string("exception: ") + e.what();
  }
  auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                std::chrono::steady_clock::now() - start)
                .count();
  if (!o.pass) ++failures;
  std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << index << " (" << name
            << "): " << o.detail << " [" << ms << " ms]" << std::endl;
}

// Independent odometer sweep of the full latent grid: the recomputed
// consistent set, counterfactual answer set, and dropped count.
struct Sweep {
  int consistent = 0;
  std::vector<Value> answers;
  int dropped = 0;
  bool observed_found = false;
};

Sweep sweep_domain(const FunctionAst& ast, const std::vector<LatentDomain>& domains, Value x0,
                   Value y0, Value x_cf, const std::vector<std::pair<std::string, Value>>& observed) {
  Sweep s;
  std::vector<Value> row(domains.size());
  for (std::size_t i = 0; i < domains.size(); ++i) row[i] = domains[i].min_r;
  std::vector<Value> args(domains.size() + 1);
  while (true) {
    args[0] = x0;
    for (std::size_t i = 0; i < row.size(); ++i) args[i + 1] = row[i];
    bool consistent = false;
    try {
      consistent = evaluate_params(ast, args) == y0;
    } catch (const EvalError&) {
    }
    if (consistent) {
      ++s.consistent;
      bool is_observed = true;
      for (std::size_t i = 0; i < row.size(); ++i) {
        if (observed[i].second != row[i]) is_observed = false;
      }
      if (is_observed) s.observed_found = true;
      args[0] = x_cf;
      try {
        s.answers.push_back(evaluate_params(ast, args));
      } catch (const EvalError&) {
        ++s.dropped;
      }
    }
    std::size_t k = 0;
    while (k < row.size() && row[k] == domains[k].max_r) {
      row[k] = domains[k].min_r;
      ++k;
    }
    if (k == row.size()) break;
    ++row[k];
  }
  std::sort(s.answers.begin(), s.answers.end());
  s.answers.erase(std::unique(s.answers.begin(), s.answers.end()), s.answers.end());
  return s;
}

std::filesystem::path dataset_path(const std::string& tag) { return kDir / (tag + ".jsonl"); }

std::string boxed(const std::vector<Value>& values) {
  std::string out = "\\boxed{";
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ", ";
    out += std::to_string(values[i]);
  }
  return out + "}";
}

// ---- criteria ----------------------------------------------------------------

Outcome c1_gsm_fixture() {
  GsmConfig config;
  config.paper_fixture = true;
  SplitMix64 rng(0);
  GsmGraph g = build_scenario(config, rng);
  Cents factual = execute(g);
  Cents answer = execute(g, {g.qty_cf, std::nullopt});
  bool pass = factual == kGsmFactual && answer == kGsmAnswer;
  std::ostringstream d;
  d << "office-lunch totals " << format_money(factual) << " factual, " << format_money(answer)
    << " at " << g.qty_cf << " trays (expected " << format_money(kGsmFactual) << " / "
    << format_money(kGsmAnswer) << ", exact cents)";
  return {pass, d.str()};
}

Outcome c2_interpreter_fixture() {
  FunctionAst f = parse_function(fixtures::kMultiLatentInterventional);
  Value y0 = evaluate(f, {{"x", 18}, {"r1", 20}, {"r2", 5}, {"r3", 17}});
  Value yi = evaluate(f, {{"x", 20}, {"r1", 20}, {"r2", 5}, {"r3", 17}});
  bool pass = y0 == kInterpFactual && yi == kInterpIntervened;
  std::ostringstream d;
  d << f.name << "(18, 20, 5, 17) = " << y0 << ", intervened x=20 gives " << yi << " (expected "
    << kInterpFactual << " / " << kInterpIntervened << ", exact)";
  return {pass, d.str()};
}

Outcome c3_dataset_shapes() {
  std::ostringstream d;
  bool pass = true;
  double max_similarity = 0.0;
  for (const auto& [family, count] : kEvalSizes) {
    auto path = dataset_path(family);
    CliResult r = run_cli("generate --family " + family + " --count " + std::to_string(count) +
                          " --seed 7 --out " + path.string());
    if (r.code != 0) {
      return {false, family + ": generate exited " + std::to_string(r.code) + ": " + r.output};
    }
    auto records = read_dataset(path.string());
    if (records.size() != static_cast<std::size_t>(count)) {
      pass = false;
      d << family << ": " << records.size() << "/" << count << " records; ";
      continue;
    }
    LogicFamily fam = family_from_name(family);
    std::vector<StructuralFingerprint> prints;
    prints.reserve(records.size());
    for (const auto& rec : records) {
      FunctionAst ast = parse_function(rec.source);
      if (!family_constraints(fam, ast)) {
        pass = false;
        d << rec.id << ": family predicate violated; ";
      }
      prints.push_back(fingerprint(ast));
    }
    bool family_clean = true;
    for (std::size_t i = 0; family_clean && i < prints.size(); ++i) {
      for (std::size_t j = i + 1; j < prints.size(); ++j) {
        double s = similarity(prints[i], prints[j]);
        max_similarity = std::max(max_similarity, s);
        if (s >= kDedupThreshold) {
          pass = false;
          family_clean = false;
          d << family << ": pair (" << i << ", " << j << ") similarity " << s << "; ";
          break;
        }
      }
    }
  }
  d << "sizes 500/480/575/480 generated, 100% family-predicate compliance, max kept-pair "
       "similarity "
    << max_similarity << " < " << kDedupThreshold;
  return {pass, d.str()};
}

Outcome c4_oracle_properties() {
  std::ostringstream d;
  for (LogicFamily family :
       {LogicFamily::IfElse, LogicFamily::IfElseLong, LogicFamily::While, LogicFamily::MultiR}) {
    GenConfig gen;
    gen.dedup_enabled = false;  // property check wants volume, not diversity
    OracleConfig oracle;
    CandidateSource source(family, 1000 + static_cast<int>(family), 2000000, gen);
    int checked = 0;
    while (checked < kOracleInstancesPerFamily) {
      auto c = source.next();
      if (!c) return {false, std::string(family_name(family)) + ": candidate budget exhausted"};
      ProblemInstance inst;
      try {
        inst = assemble_problem(*c, c->seed, oracle);
      } catch (const AssemblyExhausted&) {
        continue;
      }
      Sweep s =
          sweep_domain(inst.ast, c->domains, inst.run.x0, inst.run.y0, inst.x_cf, inst.run.latents);
      if (s.consistent != inst.consistent_count || s.answers != inst.answers.values ||
          s.dropped != inst.cf_eval_dropped || !s.observed_found) {
        return {false, std::string(family_name(family)) + "/" + inst.template_id + " seed " +
                           std::to_string(inst.seed) + ": sweep mismatch (soundness/completeness)"};
      }
      // Identity: re-predicting at the factual input collapses to {y0}.
      ConsistentLatentSet consistent = abduce(inst.ast, inst.run.x0, inst.run.y0, c->domains);
      AnswerSet at_x0 = counterfactual_answer_set(inst.ast, consistent, inst.run.x0);
      if (at_x0.values != std::vector<Value>{inst.run.y0}) {
        return {false, std::string(family_name(family)) + " seed " + std::to_string(inst.seed) +
                           ": identity violated"};
      }
      if (!inst.answers.contains(inst.answer_interv)) {
        return {false, std::string(family_name(family)) + " seed " + std::to_string(inst.seed) +
                           ": interventional answer outside the answer set"};
      }
      ++checked;
    }
    d << family_name(family) << " " << checked << " ok; ";
  }
  d << "soundness, completeness, identity, interventional membership: zero violations";
  return {true, d.str()};
}

Outcome c5_train_multiplicity() {
  auto path = dataset_path("train_if_else");
  CliResult gen = run_cli("generate --family if_else --count " + std::to_string(kTrainCount) +
                          " --seed 11 --train --out " + path.string());
  if (gen.code != 0) return {false, "train generate exited " + std::to_string(gen.code)};

  auto records = read_dataset(path.string());
  int multi = 0;
  for (const auto& r : records) {
    if (r.split != "train") return {false, r.id + ": split is not train"};
    FunctionAst ast = parse_function(r.source);
    const auto* ret = std::get_if<Return>(&ast.body.back()->node);
    const auto* bin = ret ? std::get_if<Binary>(&ret->value->node) : nullptr;
    if (!bin || bin->op != BinOp::Mod) {
      return {false, r.id + ": training return is not a top-level modulus"};
    }
    if (r.consistent_count > 1) ++multi;
  }
  double fraction = static_cast<double>(multi) / static_cast<double>(records.size());

  CliResult stats = run_cli("stats --dataset " + path.string());
  if (stats.code != 0) return {false, "stats exited " + std::to_string(stats.code)};
  std::size_t pos = stats.output.find("multiplicity_fraction ");
  if (pos == std::string::npos) return {false, "stats output lacks multiplicity_fraction"};
  double reported = std::stod(stats.output.substr(pos + 22));

  bool pass = multi > 0 && std::fabs(reported - fraction) < 0.0001;
  std::ostringstream d;
  d << multi << "/" << records.size() << " return-modulus instances with consistent_count > 1 "
    << "(fraction " << reported << " > 0, from cli stats)";
  return {pass, d.str()};
}

Outcome c6_grading_self_consistency() {
  auto records = read_dataset(dataset_path("if_else").string());

  // Truth-echo responses, three per instance, graded through the CLI.
  auto responses_path = kDir / "echo_responses.jsonl";
  {
    std::ofstream out(responses_path, std::ios::binary);
    for (const auto& r : records) {
      nlohmann::ordered_json j;
      j["id"] = r.id;
      std::string echo = "Working through the branches... " + boxed(r.answers);
      j["responses"] = std::vector<std::string>{echo, echo, echo};
      out << j.dump() << '\n';
    }
  }
  CliResult graded = run_cli("grade --dataset " + dataset_path("if_else").string() +
                             " --responses " + responses_path.string() + " --k 3");
  std::string expected = "instances " + std::to_string(records.size()) +
                         ", k=3, avg@3: EM 100.0 / F1 100.0\n";
  if (graded.code != 0 || graded.output != expected) {
    return {false, "truth echo at k=3 printed '" + graded.output + "', expected '" + expected + "'"};
  }

  // Half-set responder on the size-2 truth sets.
  std::vector<DatasetRecord> pairs;
  std::map<std::string, std::vector<std::string>> half;
  for (const auto& r : records) {
    if (r.answers.size() == 2) {
      pairs.push_back(r);
      half[r.id] = {boxed({r.answers[0]})};
    }
  }
  if (pairs.empty()) return {false, "no size-2 answer sets among 500 if_else records"};
  GradeReport hr = grade_run(pairs, half, 1);
  double f1_pct = 100.0 * hr.f1;
  if (std::fabs(f1_pct - kHalfSetF1) > kHalfSetTolerance) {
    return {false, "half-set F1 " + std::to_string(f1_pct) + ", expected " +
                       std::to_string(kHalfSetF1) + " +/- " + std::to_string(kHalfSetTolerance)};
  }

  // Reward equals EM componentwise across echo, half, and garbage responses.
  int compared = 0;
  for (const auto& r : records) {
    for (const std::string& text :
         {boxed(r.answers), boxed({r.answers[0]}), std::string("no boxed answer")}) {
      Extraction ex = extract_boxed(text, r.is_gsm);
      int em = ex.ok ? score(ex.values, r.answers).em : 0;
      if (reward(r, text) != em) {
        return {false, r.id + ": reward != EM on '" + text + "'"};
      }
      ++compared;
    }
  }
  std::ostringstream d;
  d << "truth echo EM 100.0 / F1 100.0 at k=3; half-set F1 " << f1_pct << " on " << pairs.size()
    << " size-2 sets (tolerance " << kHalfSetTolerance << "); reward == EM on " << compared
    << " samples";
  return {true, d.str()};
}

Outcome c7_determinism() {
  auto a = dataset_path("if_else");  // from criterion 3
  auto b = dataset_path("if_else_rerun");
  CliResult r1 = run_cli("generate --family if_else --count 500 --seed 7 --out " + b.string());
  if (r1.code != 0) return {false, "rerun exited " + std::to_string(r1.code)};
  if (slurp(a) != slurp(b)) return {false, "if_else reruns differ"};

  auto g1 = dataset_path("gsm");
  auto g2 = dataset_path("gsm_rerun");
  for (const auto& path : {g1, g2}) {
    CliResult r = run_cli("generate --family gsm --count " + std::to_string(kGsmCount) +
                          " --seed 3 --out " + path.string());
    if (r.code != 0) return {false, "gsm generate exited " + std::to_string(r.code)};
  }
  if (slurp(g1).empty() || slurp(g1) != slurp(g2)) return {false, "gsm reruns differ"};
  return {true, "identical invocations produce byte-identical JSONL (if_else 500, gsm " +
                    std::to_string(kGsmCount) + ")"};
}

Outcome c8_gsm_audits() {
  auto records = read_dataset(dataset_path("gsm").string());
  if (records.size() != static_cast<std::size_t>(kGsmCount)) {
    return {false, "expected " + std::to_string(kGsmCount) + " gsm records"};
  }
  GsmConfig config;  // the pipeline generates with these defaults
  int audited = 0;
  for (const auto& r : records) {
    SplitMix64 rng(r.seed);
    GsmProblem p = gsm_problem(config, rng);
    if (p.factual_total != r.y0 || r.answers.size() != 1 || p.answer != r.answers[0] ||
        p.text_cf != r.text_cf) {
      return {false, r.id + ": record does not replay from its seed"};
    }
    if (!check_sensitivity(p.graph)) return {false, r.id + ": sensitivity check failed"};
    if (!abduction_audit(p.graph)) return {false, r.id + ": abduction audit failed"};
    ++audited;
  }
  return {true, std::to_string(audited) + "/" + std::to_string(records.size()) +
                    " problems pass sensitivity and hidden-value abduction audits (100%)"};
}

Outcome c9_reporting_shape() {
  // Model-accuracy reproduction needs LLM inference and is out of scope by
  // design; what must work is ingesting an externally produced responses file
  // and emitting the avg@k EM/F1 report. Verified here on the echo file.
  auto report_path = kDir / "echo_report.jsonl";
  CliResult graded = run_cli("grade --dataset " + dataset_path("if_else").string() +
                             " --responses " + (kDir / "echo_responses.jsonl").string() +
                             " --k 3 --report " + report_path.string());
  if (graded.code != 0) return {false, "grade exited " + std::to_string(graded.code)};

  // Summary shape: instances N, k=K, avg@K: EM <pct> / F1 <pct>
  std::istringstream summary(graded.output);
  std::string word;
  long n = -1, k = -1;
  double em = -1.0, f1 = -1.0;
  char c;
  summary >> word;  // "instances"
  bool shape_ok = word == "instances" && (summary >> n >> c) && c == ',';
  summary >> word;  // "k=K,"
  shape_ok = shape_ok && word.rfind("k=", 0) == 0;
  summary >> word;  // "avg@K:"
  shape_ok = shape_ok && word.rfind("avg@", 0) == 0;
  k = shape_ok ? std::stol(word.substr(4)) : -1;
  summary >> word;  // "EM"
  shape_ok = shape_ok && word == "EM" && (summary >> em);
  summary >> word;  // "/"
  summary >> word;  // "F1"
  shape_ok = shape_ok && word == "F1" && (summary >> f1);
  if (!shape_ok || n <= 0 || k != 3 || em < 0 || f1 < 0) {
    return {false, "summary shape unexpected: '" + graded.output + "'"};
  }

  // Per-instance report: one JSON object per line with em/f1/samples.
  std::ifstream in(report_path);
  std::string line;
  long lines = 0;
  while (std::getline(in, line)) {
    auto j = nlohmann::json::parse(line);
    if (!j.contains("id") || !j.contains("em") || !j.contains("f1") ||
        !j.at("samples").is_array() || j.at("samples").size() != 3) {
      return {false, "report line " + std::to_string(lines + 1) + " malformed"};
    }
    ++lines;
  }
  if (lines != n) return {false, "report has " + std::to_string(lines) + " lines, summary says " +
                                     std::to_string(n)};
  std::ostringstream d;
  d << "externally produced responses ingested; avg@3 EM/F1 report emitted (" << lines
    << " instances); model-accuracy tables themselves require LLM inference and are out of scope";
  return {true, d.str()};
}

}  // namespace

int main() {
  std::filesystem::create_directories(kDir);
  std::cout << "acceptance: cli at " << kCli << ", artifacts in " << kDir.string() << "\n";

  criterion(1, "word-problem fixture totals", c1_gsm_fixture);
  criterion(2, "interpreter fixture values", c2_interpreter_fixture);
  criterion(3, "dataset shapes and dedup", c3_dataset_shapes);
  criterion(4, "oracle property suite", c4_oracle_properties);
  criterion(5, "training multiplicity", c5_train_multiplicity);
  criterion(6, "grading self-consistency", c6_grading_self_consistency);
  criterion(7, "byte-identical determinism", c7_determinism);
  criterion(8, "gsm sensitivity and audits", c8_gsm_audits);
  criterion(9, "external responses ingestion", c9_reporting_shape);

  if (failures) {
    std::cout << failures << " criterion(s) failed" << std::endl;
    return 1;
  }
  std::cout << "all acceptance criteria passed" << std::endl;
  return 0;
}
