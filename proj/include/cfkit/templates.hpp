#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "cfkit/ast.hpp"
#include "cfkit/rng.hpp"
#include "json.hpp"

namespace cfkit {

enum class LogicFamily { IfElse, IfElseLong, While, MultiR };
enum class Split { Train, Eval };

// Names as they appear in CLI flags and dataset records.
const char* family_name(LogicFamily family);
LogicFamily family_from_name(std::string_view name);  // throws ConfigError

struct LatentDomain {
  std::string name;
  Value min_r;
  Value max_r;

  Value size() const { return max_r - min_r + 1; }
};

struct PlaceholderSpec {
  enum class Tier { Fixed, Structural, Value };
  std::string name;
  Tier tier;
  // Fixed tier: either a deterministic rule ("func_name" derives the function
  // name from the seed stream) or a single literal candidate.
  std::string rule;
  // Structural tier: complete code blocks (may reference value-tier holes).
  // Value tier: operator/number choices, unless an int range is given.
  std::vector<std::string> candidates;
  bool has_range = false;
  Value range_lo = 0;
  Value range_hi = 0;
};

struct MetaTemplate {
  std::string template_id;
  LogicFamily family;
  Split split;
  std::string skeleton;
  std::vector<PlaceholderSpec> holes;
  std::vector<LatentDomain> latents;
};

struct Instantiation {
  std::string source;
  std::vector<LatentDomain> domains;
  // Chosen structural candidates and drawn values, for diagnostics.
  nlohmann::ordered_json metadata;
};

// Parses and validates one template document (docs/templates.md schema).
// Throws ConfigError on any schema or hole-bookkeeping violation.
MetaTemplate load_template(std::string_view json_text);

// Templates baked into the binary, newest schema. Train split exists only
// for the IfElse family; requesting another train split throws TemplateGap.
const std::vector<MetaTemplate>& builtin_templates(LogicFamily family, Split split);

// Fills every hole by tier rules and validates the result: it must parse,
// satisfy family_constraints, and (train split) end in a top-level `%`
// return. Pure function of (template, rng state). Throws InstantiationError.
Instantiation instantiate(const MetaTemplate& tmpl, SplitMix64& rng);

// Structural acceptance predicate for generated functions of a family.
bool family_constraints(LogicFamily family, const FunctionAst& f);

}  // namespace cfkit
