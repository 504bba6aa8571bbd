#include <fstream>
#include <iostream>
#include <map>

#include "CLI11.hpp"
#include "cfkit/harness.hpp"
#include "cfkit/parser.hpp"
#include "cfkit/pipeline.hpp"
#include "cfkit/version.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitExhausted = 3;
constexpr int kExitSchema = 4;

cfkit::Mode parse_mode(const std::string& mode) {
  if (mode == "cf" || mode == "counterfactual") return cfkit::Mode::Counterfactual;
  if (mode == "interv" || mode == "interventional") return cfkit::Mode::Interventional;
  throw cfkit::ConfigError("mode must be cf or interv, got '" + mode + "'");
}

int cmd_generate(const cfkit::RunConfig& config, const std::string& out_path) {
  cfkit::PipelineStats stats;
  std::vector<cfkit::DatasetRecord> records = cfkit::run_generate(config, &stats);
  cfkit::write_dataset(records, out_path);
  std::cout << "wrote " << records.size() << " " << config.family << " records to " << out_path
            << " (config " << cfkit::config_hash(config) << ")\n";
  std::cout << "attempts " << stats.attempts << ", instantiation rejections "
            << stats.instantiation_rejections << ", verify failures " << stats.verify_failures
            << ", dedup rejections " << stats.dedup_rejections << ", assembly failures "
            << stats.assembly_failures << "\n";
  return kExitOk;
}

int cmd_render(const std::string& dataset_path, const std::string& mode_name,
               const std::string& out_path) {
  cfkit::Mode mode = parse_mode(mode_name);
  auto records = cfkit::read_dataset(dataset_path);
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw cfkit::Error("cannot open " + out_path + " for writing");
  for (const auto& r : records) {
    cfkit::PromptRendering p = cfkit::render_prompt(r, mode);
    nlohmann::ordered_json j;
    j["id"] = p.id;
    j["mode"] = cfkit::mode_name(p.mode);
    j["prompt"] = p.text;
    out << j.dump() << '\n';
  }
  std::cout << "rendered " << records.size() << " " << cfkit::mode_name(mode) << " prompts to "
            << out_path << "\n";
  return kExitOk;
}

std::map<std::string, std::vector<std::string>> read_responses(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw cfkit::Error("cannot open " + path);
  std::map<std::string, std::vector<std::string>> responses;
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
      std::string id = j.at("id").get<std::string>();
      auto& bucket = responses[id];
      for (const auto& text : j.at("responses")) bucket.push_back(text.get<std::string>());
    } catch (const nlohmann::json::exception& e) {
      throw cfkit::MalformedRecord(line_number, std::string("responses file: ") + e.what());
    }
  }
  return responses;
}

int cmd_grade(const std::string& dataset_path, const std::string& responses_path, int k,
              const std::string& mode_name, bool allow_mixed, const std::string& report_path) {
  auto records = cfkit::read_dataset(dataset_path);
  if (!allow_mixed) {
    for (const auto& r : records) {
      if (r.generator_version != records.front().generator_version) {
        throw cfkit::SchemaVersionMismatch(
            "dataset mixes generator versions (" + records.front().generator_version + " vs " +
            r.generator_version + "); pass --allow-mixed to grade anyway");
      }
    }
  }
  auto responses = read_responses(responses_path);
  cfkit::GradeReport report = cfkit::grade_run(records, responses, k, parse_mode(mode_name));
  if (!report_path.empty()) {
    std::ofstream out(report_path, std::ios::binary);
    if (!out) throw cfkit::Error("cannot open " + report_path + " for writing");
    out << cfkit::report_jsonl(report);
  }
  std::cout << cfkit::report_summary(report);
  return kExitOk;
}

int cmd_stats(const std::string& dataset_path) {
  auto records = cfkit::read_dataset(dataset_path);
  std::map<std::string, int> families;
  std::map<std::size_t, int> answer_sizes;
  std::map<int, int> consistent_counts;
  std::map<int, int> depths;
  std::map<std::string, int> hidden_kinds;
  int multi_latent = 0;
  for (const auto& r : records) {
    ++families[r.family + "/" + r.split];
    ++answer_sizes[r.answers.size()];
    ++consistent_counts[r.consistent_count];
    if (r.consistent_count > 1) ++multi_latent;
    if (r.is_gsm) {
      ++hidden_kinds[r.hidden_kind];
    } else {
      ++depths[cfkit::parse_function(r.source).nesting_depth];
    }
  }
  std::cout << "records " << records.size() << "\n";
  for (const auto& [name, n] : families) std::cout << "family " << name << ": " << n << "\n";
  for (const auto& [size, n] : answer_sizes) {
    std::cout << "answer_set_size " << size << ": " << n << "\n";
  }
  for (const auto& [count, n] : consistent_counts) {
    std::cout << "consistent_latents " << count << ": " << n << "\n";
  }
  for (const auto& [depth, n] : depths) std::cout << "nesting_depth " << depth << ": " << n << "\n";
  for (const auto& [kind, n] : hidden_kinds) std::cout << "hidden_kind " << kind << ": " << n << "\n";
  std::cout.setf(std::ios::fixed);
  std::cout.precision(4);
  double fraction =
      records.empty() ? 0.0 : static_cast<double>(multi_latent) / static_cast<double>(records.size());
  std::cout << "multiplicity_fraction " << fraction << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Counterfactual code/math problem generator and grader"};
  app.set_version_flag("--version", std::string(cfkit::kGeneratorVersion));
  app.require_subcommand(1);

  cfkit::RunConfig config;
  std::string out_path;
  auto* generate = app.add_subcommand("generate", "Generate a problem dataset (JSONL)");
  generate->add_option("--family", config.family,
                       "if_else | if_else_long | while | multi_r | gsm")
      ->required();
  generate->add_option("--count", config.count, "number of records");
  generate->add_option("--seed", config.seed, "master seed");
  generate->add_flag("--train", config.train, "training split: modulo returns, dedup off");
  generate->add_option("--out", out_path, "output JSONL path")->required();
  generate->add_option("--dedup-threshold", config.dedup_threshold, "similarity cutoff (0,1]");
  generate->add_option("--retry-factor", config.retry_factor, "attempt budget per record");
  generate->add_option("--verification-points", config.verification_points,
                       "samples per candidate check");
  generate->add_option("--x-min", config.x_min, "smallest visible input");
  generate->add_option("--x-max", config.x_max, "largest visible input");
  generate->add_option("--enumeration-cap", config.enumeration_cap,
                       "max latent grid size for abduction");
  generate->add_option("--answer-cap", config.answer_cap, "max counterfactual answers");
  generate->add_option("--assembly-retries", config.assembly_retries,
                       "observation redraws per candidate");

  std::string dataset_path, mode = "cf", responses_path, report_path;
  int k = 1;
  bool allow_mixed = false;
  auto* render = app.add_subcommand("render", "Render prompts from a dataset");
  render->add_option("--dataset", dataset_path, "dataset JSONL")->required();
  render->add_option("--mode", mode, "cf | interv");
  render->add_option("--out", out_path, "output prompts JSONL")->required();

  auto* grade = app.add_subcommand("grade", "Grade a responses file against a dataset");
  grade->add_option("--dataset", dataset_path, "dataset JSONL")->required();
  grade->add_option("--responses", responses_path,
                    "JSONL of {\"id\":..., \"responses\":[...]}")
      ->required();
  grade->add_option("--k", k, "responses per instance to grade");
  grade->add_option("--mode", mode, "cf | interv");
  grade->add_flag("--allow-mixed", allow_mixed, "permit mixed generator versions");
  grade->add_option("--report", report_path, "optional per-instance report JSONL");

  auto* stats = app.add_subcommand("stats", "Summarize a dataset");
  stats->add_option("--dataset", dataset_path, "dataset JSONL")->required();

  try {
    app.parse(argc, argv);
    if (generate->parsed()) return cmd_generate(config, out_path);
    if (render->parsed()) return cmd_render(dataset_path, mode, out_path);
    if (grade->parsed()) {
      return cmd_grade(dataset_path, responses_path, k, mode, allow_mixed, report_path);
    }
    if (stats->parsed()) return cmd_stats(dataset_path);
    return kExitConfig;
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  } catch (const cfkit::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const cfkit::GenerationExhausted& e) {
    std::cerr << "generation exhausted: " << e.what() << "\n";
    return kExitExhausted;
  } catch (const cfkit::AssemblyExhausted& e) {
    std::cerr << "assembly exhausted: " << e.what() << "\n";
    return kExitExhausted;
  } catch (const cfkit::EnumerationCapExceeded& e) {
    std::cerr << "enumeration cap exceeded: " << e.what() << "\n";
    return kExitExhausted;
  } catch (const cfkit::TemplateGap& e) {
    std::cerr << "no templates: " << e.what() << "\n";
    return kExitExhausted;
  } catch (const cfkit::SchemaVersionMismatch& e) {
    std::cerr << "schema error: " << e.what() << "\n";
    return kExitSchema;
  } catch (const cfkit::MalformedRecord& e) {
    std::cerr << "malformed input: " << e.what() << "\n";
    return kExitSchema;
  } catch (const cfkit::MissingResponses& e) {
    std::cerr << "incomplete responses: " << e.what() << "\n";
    return kExitSchema;
  } catch (const cfkit::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
