#pragma once

#include <map>
#include <string>
#include <vector>

#include "cfkit/mode.hpp"
#include "cfkit/store.hpp"

namespace cfkit {

struct PromptRendering {
  std::string id;
  Mode mode;
  std::string text;
};

// Full prompt for one record: role preamble, source listing (code) or story
// text (gsm), observed call, query, and the boxed-answer format line.
// Counterfactual prompts never state latent values; interventional prompts
// state all of them.
PromptRendering render_prompt(const DatasetRecord& r, Mode mode);

// Result of pulling an answer set out of free text. `ok == false` (no boxed
// group, or nothing parseable inside it) grades as em=0, f1=0.
struct Extraction {
  bool ok = false;
  std::vector<Value> values;  // sorted, deduplicated; cents for gsm
};

// Parses the LAST \boxed{...} group. Comma-separated integers for code
// problems; dollar amounts (optional $, commas, up to 2 decimals) for gsm.
Extraction extract_boxed(const std::string& response, bool gsm = false);

struct Score {
  int em;     // set equality
  double f1;  // Dice overlap 2|P∩T| / (|P|+|T|)
};

Score score(const std::vector<Value>& pred, const std::vector<Value>& truth);

// Binary outcome reward: extraction followed by exact match.
int reward(const DatasetRecord& r, const std::string& response, Mode mode = Mode::Counterfactual);

struct SampleScore {
  int em;
  double f1;
  bool extraction_failed;
};

struct InstanceScore {
  std::string id;
  double em;  // mean over the first k responses
  double f1;
  std::vector<SampleScore> samples;
};

struct GradeReport {
  int k = 1;
  std::size_t instances = 0;
  double em = 0.0;  // macro average: per-instance means, averaged over instances
  double f1 = 0.0;
  std::vector<InstanceScore> per_instance;
};

// Grades the first k responses of every record. Missing ids raise
// MissingResponses; an id with fewer than k responses raises ConfigError.
// Truth is the counterfactual answer set or the interventional singleton.
GradeReport grade_run(const std::vector<DatasetRecord>& records,
                      const std::map<std::string, std::vector<std::string>>& responses, int k,
                      Mode mode = Mode::Counterfactual);

// Structured forms of the report: one JSON object per instance (JSONL), and
// a short human-readable summary with percentages.
std::string report_jsonl(const GradeReport& report);
std::string report_summary(const GradeReport& report);

}  // namespace cfkit
