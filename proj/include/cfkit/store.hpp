#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "cfkit/ast.hpp"
#include "json.hpp"

namespace cfkit {

// One dataset line. Field meanings shift slightly for word problems
// (kind "gsm"): x0/x_cf are quantities, y0 and answers are cents.
// docs/formats.md is the field reference.
struct DatasetRecord {
  int schema_version;
  std::string generator_version;
  std::string config_hash;
  std::string id;
  std::string family;       // if_else | if_else_long | while | multi_r | gsm
  std::string split;        // eval | train
  std::string template_id;  // gsm: scenario tag
  std::uint64_t seed = 0;

  bool is_gsm = false;
  std::string source;  // code problems only
  Value x0 = 0;
  std::vector<std::pair<std::string, Value>> latents;  // parameter order
  Value y0 = 0;
  Value x_cf = 0;
  std::vector<Value> answers;  // sorted ascending, deduplicated
  Value answer_interv = 0;
  int consistent_count = 0;
  int cf_eval_dropped = 0;

  // gsm extras
  std::string scenario;
  std::string hidden_kind;
  std::string attachment;
  std::string text_cf;
  std::string text_interv;

  std::string prompt_cf;
  std::string prompt_interv;
};

// Fixed key order; serializing the same record twice is byte-identical.
nlohmann::ordered_json to_json(const DatasetRecord& r);

// Strict inverse of to_json: missing or unknown keys, wrong types, or a
// schema_version mismatch are rejected. `line_number` seeds the error.
DatasetRecord record_from_json(const nlohmann::ordered_json& j, int line_number = 0);

void write_dataset(const std::vector<DatasetRecord>& records, std::ostream& out);
void write_dataset(const std::vector<DatasetRecord>& records, const std::string& path);

// Throws MalformedRecord (with 1-based line number) and SchemaVersionMismatch.
std::vector<DatasetRecord> read_dataset(std::istream& in);
std::vector<DatasetRecord> read_dataset(const std::string& path);

// Everything that determines a generation run's output. Hashed into each
// record so mixed files are detectable.
struct RunConfig {
  std::string family = "if_else";  // code family name or "gsm"
  int count = 10;
  std::uint64_t seed = 0;
  bool train = false;  // train split: train templates, no dedup
  double dedup_threshold = 0.8;
  int retry_factor = 50;
  int verification_points = 16;
  Value x_min = 1;
  Value x_max = 25;
  std::uint64_t enumeration_cap = 200000;
  std::uint64_t answer_cap = 8;
  int assembly_retries = 40;
};

// Throws ConfigError with the offending field named.
void validate(const RunConfig& config);

nlohmann::ordered_json config_json(const RunConfig& config);

// 16 hex digits, FNV-1a over the canonical config serialization.
std::string config_hash(const RunConfig& config);

}  // namespace cfkit
