#include "cfkit/store.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "cfkit/version.hpp"

namespace cfkit {

nlohmann::ordered_json to_json(const DatasetRecord& r) {
  nlohmann::ordered_json j;
  j["schema_version"] = r.schema_version;
  j["generator_version"] = r.generator_version;
  j["config_hash"] = r.config_hash;
  j["id"] = r.id;
  j["family"] = r.family;
  j["split"] = r.split;
  j["template_id"] = r.template_id;
  j["seed"] = r.seed;
  j["kind"] = r.is_gsm ? "gsm" : "code";
  if (!r.is_gsm) j["source"] = r.source;
  j["x0"] = r.x0;
  nlohmann::ordered_json lat = nlohmann::ordered_json::object();
  for (const auto& [name, value] : r.latents) lat[name] = value;
  j["latents_observed"] = std::move(lat);
  j["y0"] = r.y0;
  j["x_cf"] = r.x_cf;
  j["answers"] = r.answers;
  j["answers_interv"] = std::vector<Value>{r.answer_interv};
  j["consistent_count"] = r.consistent_count;
  j["cf_eval_dropped"] = r.cf_eval_dropped;
  if (r.is_gsm) {
    j["scenario"] = r.scenario;
    j["hidden_kind"] = r.hidden_kind;
    j["attachment"] = r.attachment;
    j["text_cf"] = r.text_cf;
    j["text_interv"] = r.text_interv;
  }
  j["prompt_cf"] = r.prompt_cf;
  j["prompt_interv"] = r.prompt_interv;
  return j;
}

namespace {

[[noreturn]] void malformed(int line, const std::string& msg) {
  throw MalformedRecord(line, msg);
}

template <typename T>
T field(const nlohmann::ordered_json& j, const char* key, int line) {
  auto it = j.find(key);
  if (it == j.end()) malformed(line, std::string("missing key '") + key + "'");
  try {
    return it->get<T>();
  } catch (const nlohmann::json::exception&) {
    malformed(line, std::string("key '") + key + "' has the wrong type");
  }
}

}  // namespace

DatasetRecord record_from_json(const nlohmann::ordered_json& j, int line) {
  if (!j.is_object()) malformed(line, "record is not a JSON object");

  DatasetRecord r;
  r.schema_version = field<int>(j, "schema_version", line);
  if (r.schema_version != kSchemaVersion) {
    throw SchemaVersionMismatch("line " + std::to_string(line) + ": schema_version " +
                                std::to_string(r.schema_version) + ", expected " +
                                std::to_string(kSchemaVersion));
  }
  std::string kind = field<std::string>(j, "kind", line);
  if (kind != "code" && kind != "gsm") malformed(line, "kind must be 'code' or 'gsm'");
  r.is_gsm = kind == "gsm";

  r.generator_version = field<std::string>(j, "generator_version", line);
  r.config_hash = field<std::string>(j, "config_hash", line);
  r.id = field<std::string>(j, "id", line);
  r.family = field<std::string>(j, "family", line);
  r.split = field<std::string>(j, "split", line);
  r.template_id = field<std::string>(j, "template_id", line);
  r.seed = field<std::uint64_t>(j, "seed", line);
  if (!r.is_gsm) r.source = field<std::string>(j, "source", line);
  r.x0 = field<Value>(j, "x0", line);
  {
    auto it = j.find("latents_observed");
    if (it == j.end() || !it->is_object()) {
      malformed(line, "missing or non-object 'latents_observed'");
    }
    for (auto kv = it->begin(); kv != it->end(); ++kv) {
      if (!kv.value().is_number_integer()) malformed(line, "latent values must be integers");
      r.latents.emplace_back(kv.key(), kv.value().get<Value>());
    }
  }
  r.y0 = field<Value>(j, "y0", line);
  r.x_cf = field<Value>(j, "x_cf", line);
  r.answers = field<std::vector<Value>>(j, "answers", line);
  if (r.answers.empty()) malformed(line, "'answers' must be non-empty");
  for (std::size_t i = 1; i < r.answers.size(); ++i) {
    if (r.answers[i - 1] >= r.answers[i]) malformed(line, "'answers' must be sorted and unique");
  }
  {
    auto singleton = field<std::vector<Value>>(j, "answers_interv", line);
    if (singleton.size() != 1) malformed(line, "'answers_interv' must hold exactly one value");
    r.answer_interv = singleton[0];
  }
  r.consistent_count = field<int>(j, "consistent_count", line);
  r.cf_eval_dropped = field<int>(j, "cf_eval_dropped", line);
  if (r.is_gsm) {
    r.scenario = field<std::string>(j, "scenario", line);
    r.hidden_kind = field<std::string>(j, "hidden_kind", line);
    r.attachment = field<std::string>(j, "attachment", line);
    r.text_cf = field<std::string>(j, "text_cf", line);
    r.text_interv = field<std::string>(j, "text_interv", line);
  }
  r.prompt_cf = field<std::string>(j, "prompt_cf", line);
  r.prompt_interv = field<std::string>(j, "prompt_interv", line);

  // Unknown keys are corruption, not extensions; extensions bump the schema.
  static const std::set<std::string> known = {
      "schema_version", "generator_version", "config_hash", "id", "family", "split",
      "template_id", "seed", "kind", "source", "x0", "latents_observed", "y0", "x_cf",
      "answers", "answers_interv", "consistent_count", "cf_eval_dropped", "scenario",
      "hidden_kind", "attachment", "text_cf", "text_interv", "prompt_cf", "prompt_interv"};
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!known.count(it.key())) malformed(line, "unknown key '" + it.key() + "'");
  }
  return r;
}

void write_dataset(const std::vector<DatasetRecord>& records, std::ostream& out) {
  for (const auto& r : records) out << to_json(r).dump() << '\n';
}

void write_dataset(const std::vector<DatasetRecord>& records, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path + " for writing");
  write_dataset(records, out);
}

std::vector<DatasetRecord> read_dataset(std::istream& in) {
  std::vector<DatasetRecord> records;
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty()) continue;
    nlohmann::ordered_json j;
    try {
      j = nlohmann::ordered_json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      malformed(line_number, std::string("invalid JSON: ") + e.what());
    }
    records.push_back(record_from_json(j, line_number));
  }
  return records;
}

std::vector<DatasetRecord> read_dataset(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  return read_dataset(in);
}

void validate(const RunConfig& config) {
  static const std::set<std::string> families = {"if_else", "if_else_long", "while", "multi_r",
                                                 "gsm"};
  if (!families.count(config.family)) throw ConfigError("unknown family '" + config.family + "'");
  if (config.count <= 0) throw ConfigError("count must be positive");
  if (config.dedup_threshold <= 0.0 || config.dedup_threshold > 1.0) {
    throw ConfigError("dedup_threshold must be in (0, 1]");
  }
  if (config.retry_factor <= 0) throw ConfigError("retry_factor must be positive");
  if (config.verification_points <= 0) throw ConfigError("verification_points must be positive");
  if (config.x_min >= config.x_max) throw ConfigError("need x_min < x_max");
  if (config.x_min < 0) throw ConfigError("x_min must be non-negative");
  if (config.enumeration_cap == 0) throw ConfigError("enumeration_cap must be positive");
  if (config.answer_cap == 0) throw ConfigError("answer_cap must be positive");
  if (config.assembly_retries <= 0) throw ConfigError("assembly_retries must be positive");
  if (config.train && config.family == "gsm") {
    throw ConfigError("train split applies to code families only");
  }
}

nlohmann::ordered_json config_json(const RunConfig& c) {
  nlohmann::ordered_json j;
  j["generator_version"] = kGeneratorVersion;
  j["family"] = c.family;
  j["count"] = c.count;
  j["seed"] = c.seed;
  j["train"] = c.train;
  j["dedup_threshold"] = c.dedup_threshold;
  j["retry_factor"] = c.retry_factor;
  j["verification_points"] = c.verification_points;
  j["x_min"] = c.x_min;
  j["x_max"] = c.x_max;
  j["enumeration_cap"] = c.enumeration_cap;
  j["answer_cap"] = c.answer_cap;
  j["assembly_retries"] = c.assembly_retries;
  return j;
}

std::string config_hash(const RunConfig& c) {
  std::string dump = config_json(c).dump();
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char byte : dump) {
    h ^= byte;
    h *= 0x100000001B3ULL;
  }
  std::ostringstream out;
  out << std::hex << std::nouppercase;
  for (int shift = 60; shift >= 0; shift -= 4) out << ((h >> shift) & 0xF);
  return out.str();
}

}  // namespace cfkit
