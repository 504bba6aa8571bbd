#include "cfkit/templates.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "cfkit/embedded_data.hpp"
#include "cfkit/parser.hpp"

namespace cfkit {

namespace {

using ordered_json = nlohmann::ordered_json;

struct HoleRef {
  std::string name;
  std::size_t pos;  // position of '{'
  std::size_t len;  // including braces
};

// Scans for {identifier} holes. Braces never occur in the surface language,
// so anything brace-delimited is a hole.
std::vector<HoleRef> find_holes(const std::string& text) {
  std::vector<HoleRef> out;
  std::size_t i = 0;
  while (i < text.size()) {
    if (text[i] != '{') {
      ++i;
      continue;
    }
    std::size_t close = text.find('}', i);
    if (close == std::string::npos) throw ConfigError("unterminated hole in template text");
    out.push_back({text.substr(i + 1, close - i - 1), i, close - i + 1});
    i = close + 1;
  }
  return out;
}

// Leading spaces of the line containing pos.
std::string line_indent(const std::string& text, std::size_t pos) {
  std::size_t start = text.rfind('\n', pos == 0 ? 0 : pos - 1);
  start = start == std::string::npos ? 0 : start + 1;
  std::size_t i = start;
  while (i < text.size() && text[i] == ' ') ++i;
  return std::string(i - start, ' ');
}

// Replaces one hole occurrence; continuation lines of a multi-line fragment
// inherit the hole's indentation.
void splice(std::string& text, const HoleRef& hole, const std::string& fragment) {
  std::string indent = line_indent(text, hole.pos);
  std::string body;
  for (std::size_t i = 0; i < fragment.size(); ++i) {
    body += fragment[i];
    if (fragment[i] == '\n' && i + 1 < fragment.size()) body += indent;
  }
  text.replace(hole.pos, hole.len, body);
}

std::string format_value(Value v) {
  // Negative substitutions stay parenthesized so they can sit inside any
  // expression context (e.g. `x * (-3)`).
  if (v < 0) return "(" + std::to_string(v) + ")";
  return std::to_string(v);
}

const PlaceholderSpec* find_spec(const MetaTemplate& t, const std::string& name) {
  for (const auto& h : t.holes) {
    if (h.name == name) return &h;
  }
  return nullptr;
}

void validate(const MetaTemplate& t) {
  std::set<std::string> spec_names;
  bool has_structural = false;
  for (const auto& h : t.holes) {
    if (!spec_names.insert(h.name).second) {
      throw ConfigError("template " + t.template_id + ": duplicate hole spec '" + h.name + "'");
    }
    if (h.tier == PlaceholderSpec::Tier::Structural) {
      has_structural = true;
      if (h.candidates.empty()) {
        throw ConfigError("template " + t.template_id + ": structural hole '" + h.name +
                          "' has no candidates");
      }
      for (const auto& c : h.candidates) {
        for (const auto& inner : find_holes(c)) {
          const PlaceholderSpec* spec = find_spec(t, inner.name);
          if (!spec) {
            throw ConfigError("template " + t.template_id + ": candidate of '" + h.name +
                              "' references unknown hole '" + inner.name + "'");
          }
          if (spec->tier == PlaceholderSpec::Tier::Structural) {
            throw ConfigError("template " + t.template_id +
                              ": structural candidates may only reference value holes");
          }
        }
      }
    }
    if (h.tier == PlaceholderSpec::Tier::Value && !h.has_range && h.candidates.empty()) {
      throw ConfigError("template " + t.template_id + ": value hole '" + h.name +
                        "' needs candidates or a range");
    }
    if (h.has_range && h.range_lo > h.range_hi) {
      throw ConfigError("template " + t.template_id + ": empty range for '" + h.name + "'");
    }
    if (h.tier == PlaceholderSpec::Tier::Fixed && h.rule.empty() && h.candidates.size() != 1) {
      throw ConfigError("template " + t.template_id + ": fixed hole '" + h.name +
                        "' needs a rule or exactly one candidate");
    }
  }
  if (!has_structural) {
    throw ConfigError("template " + t.template_id + ": at least one structural hole required");
  }

  // Every referenced hole has a spec; every spec is reachable.
  std::set<std::string> referenced;
  for (const auto& hole : find_holes(t.skeleton)) referenced.insert(hole.name);
  for (const auto& h : t.holes) {
    for (const auto& c : h.candidates) {
      for (const auto& inner : find_holes(c)) referenced.insert(inner.name);
    }
  }
  for (const auto& name : referenced) {
    if (!find_spec(t, name)) {
      throw ConfigError("template " + t.template_id + ": hole '" + name + "' has no spec");
    }
  }
  for (const auto& h : t.holes) {
    if (!referenced.count(h.name)) {
      throw ConfigError("template " + t.template_id + ": spec '" + h.name +
                        "' is never used by skeleton or candidates");
    }
  }

  for (const auto& d : t.latents) {
    if (d.min_r > d.max_r) {
      throw ConfigError("template " + t.template_id + ": latent '" + d.name + "' has empty domain");
    }
  }
  if (t.latents.empty()) {
    throw ConfigError("template " + t.template_id + ": at least one latent domain required");
  }
}

}  // namespace

const char* family_name(LogicFamily family) {
  switch (family) {
    case LogicFamily::IfElse: return "if_else";
    case LogicFamily::IfElseLong: return "if_else_long";
    case LogicFamily::While: return "while";
    case LogicFamily::MultiR: return "multi_r";
  }
  return "?";
}

LogicFamily family_from_name(std::string_view name) {
  if (name == "if_else") return LogicFamily::IfElse;
  if (name == "if_else_long" || name == "if_else-long") return LogicFamily::IfElseLong;
  if (name == "while") return LogicFamily::While;
  if (name == "multi_r") return LogicFamily::MultiR;
  throw ConfigError("unknown family: " + std::string(name));
}

MetaTemplate load_template(std::string_view json_text) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(json_text);
  } catch (const ordered_json::parse_error& e) {
    throw ConfigError(std::string("template is not valid JSON: ") + e.what());
  }
  try {
    MetaTemplate t;
    t.template_id = doc.at("template_id").get<std::string>();
    t.family = family_from_name(doc.at("family").get<std::string>());
    std::string split = doc.at("split").get<std::string>();
    if (split != "train" && split != "eval") throw ConfigError("split must be train or eval");
    t.split = split == "train" ? Split::Train : Split::Eval;
    t.skeleton = doc.at("skeleton").get<std::string>();
    for (const auto& [name, spec] : doc.at("holes").items()) {
      PlaceholderSpec h;
      h.name = name;
      std::string tier = spec.at("tier").get<std::string>();
      if (tier == "fixed") h.tier = PlaceholderSpec::Tier::Fixed;
      else if (tier == "structural") h.tier = PlaceholderSpec::Tier::Structural;
      else if (tier == "value") h.tier = PlaceholderSpec::Tier::Value;
      else throw ConfigError("hole '" + name + "': unknown tier '" + tier + "'");
      if (spec.contains("rule")) h.rule = spec.at("rule").get<std::string>();
      if (spec.contains("candidates")) {
        for (const auto& c : spec.at("candidates")) h.candidates.push_back(c.get<std::string>());
      }
      if (spec.contains("range")) {
        h.has_range = true;
        h.range_lo = spec.at("range").at(0).get<Value>();
        h.range_hi = spec.at("range").at(1).get<Value>();
      }
      t.holes.push_back(std::move(h));
    }
    for (const auto& d : doc.at("latents")) {
      t.latents.push_back({d.at("name").get<std::string>(), d.at("min").get<Value>(),
                           d.at("max").get<Value>()});
    }
    validate(t);
    return t;
  } catch (const ordered_json::exception& e) {
    throw ConfigError(std::string("template schema violation: ") + e.what());
  }
}

const std::vector<MetaTemplate>& builtin_templates(LogicFamily family, Split split) {
  static const std::map<std::pair<LogicFamily, Split>, std::vector<MetaTemplate>> all = [] {
    std::map<std::pair<LogicFamily, Split>, std::vector<MetaTemplate>> m;
    for (const auto& [path, text] : data::embedded_files()) {
      if (path.rfind("templates/", 0) != 0) continue;
      MetaTemplate t = load_template(text);
      m[{t.family, t.split}].push_back(std::move(t));
    }
    for (auto& [key, list] : m) {
      std::sort(list.begin(), list.end(),
                [](const MetaTemplate& a, const MetaTemplate& b) {
                  return a.template_id < b.template_id;
                });
    }
    return m;
  }();
  auto it = all.find({family, split});
  if (it == all.end() || it->second.empty()) {
    throw TemplateGap(std::string("no templates for family ") + family_name(family) +
                      (split == Split::Train ? " (train)" : " (eval)"));
  }
  return it->second;
}

Instantiation instantiate(const MetaTemplate& tmpl, SplitMix64& rng) {
  std::string text = tmpl.skeleton;
  ordered_json meta;
  meta["template_id"] = tmpl.template_id;

  // Fixed holes first, in spec order, so the rule-driven function name draws
  // before any content choices.
  for (const auto& h : tmpl.holes) {
    if (h.tier != PlaceholderSpec::Tier::Fixed) continue;
    std::string value;
    if (h.rule == "func_name") {
      value = "generated_func_" + std::to_string(rng.bounded(1000000));
    } else if (!h.rule.empty()) {
      throw ConfigError("unknown fixed rule: " + h.rule);
    } else {
      value = h.candidates.front();
    }
    meta["fixed"][h.name] = value;
    bool replaced = false;
    for (bool again = true; again;) {
      again = false;
      for (const auto& hole : find_holes(text)) {
        if (hole.name == h.name) {
          splice(text, hole, value);
          replaced = true;
          again = true;
          break;
        }
      }
    }
    if (!replaced && !h.rule.empty()) {
      throw ConfigError("fixed hole '" + h.name + "' does not occur in skeleton");
    }
  }

  // Structural holes by first occurrence until none remain. Candidates may
  // introduce value holes but never structural ones (load-time invariant).
  for (bool again = true; again;) {
    again = false;
    for (const auto& hole : find_holes(text)) {
      const PlaceholderSpec* spec = find_spec(tmpl, hole.name);
      if (!spec) throw InstantiationError("hole '" + hole.name + "' has no spec");
      if (spec->tier != PlaceholderSpec::Tier::Structural) continue;
      std::size_t choice = rng.bounded(spec->candidates.size());
      meta["structural"][hole.name] = choice;
      splice(text, hole, spec->candidates[choice]);
      again = true;
      break;
    }
  }

  // Remaining holes are value-tier; each distinct name draws once, in first-
  // occurrence order, and every occurrence shares the draw.
  while (true) {
    auto holes = find_holes(text);
    if (holes.empty()) break;
    const std::string name = holes.front().name;
    const PlaceholderSpec* spec = find_spec(tmpl, name);
    if (!spec) throw InstantiationError("hole '" + name + "' has no spec");
    if (spec->tier != PlaceholderSpec::Tier::Value) {
      throw InstantiationError("hole '" + name + "' resolved out of order");
    }
    std::string value = spec->has_range ? format_value(rng.range(spec->range_lo, spec->range_hi))
                                        : spec->candidates[rng.bounded(spec->candidates.size())];
    meta["values"][name] = value;
    // Replace all occurrences, scanning fresh each time since offsets shift.
    for (bool more = true; more;) {
      more = false;
      for (const auto& h : find_holes(text)) {
        if (h.name == name) {
          splice(text, h, value);
          more = true;
          break;
        }
      }
    }
  }

  FunctionAst ast;
  try {
    ast = parse_function(text);
  } catch (const ParseError& e) {
    throw InstantiationError("template " + tmpl.template_id + " produced unparseable source (" +
                             e.what() + ")");
  }
  if (!family_constraints(tmpl.family, ast)) {
    throw InstantiationError("template " + tmpl.template_id +
                             " violated its family constraints");
  }
  if (tmpl.split == Split::Train) {
    const auto* ret = std::get_if<Return>(&ast.body.back()->node);
    const auto* bin = ret ? std::get_if<Binary>(&ret->value->node) : nullptr;
    if (!bin || bin->op != BinOp::Mod) {
      throw InstantiationError("template " + tmpl.template_id +
                               ": train instantiations must return a top-level modulo");
    }
  }
  for (const auto& d : tmpl.latents) {
    bool is_param = false;
    for (std::size_t i = 1; i < ast.params.size(); ++i) is_param |= ast.params[i] == d.name;
    if (!is_param) {
      throw InstantiationError("template " + tmpl.template_id + ": latent '" + d.name +
                               "' is not a non-first parameter");
    }
  }
  if (ast.params.size() != tmpl.latents.size() + 1) {
    throw InstantiationError("template " + tmpl.template_id +
                             ": every parameter after the input must have a latent domain");
  }

  // Domains come back in parameter order so positional evaluation can zip
  // them against params[1..] directly.
  std::vector<LatentDomain> ordered;
  ordered.reserve(tmpl.latents.size());
  for (std::size_t i = 1; i < ast.params.size(); ++i) {
    for (const auto& d : tmpl.latents) {
      if (d.name == ast.params[i]) ordered.push_back(d);
    }
  }
  return {std::move(text), std::move(ordered), std::move(meta)};
}

namespace {

struct NodeCounts {
  int ifs = 0;
  int whiles = 0;
  int fors = 0;
};

void count_nodes(const Block& b, NodeCounts& c) {
  for (const auto& s : b) {
    std::visit(
        [&](const auto& n) {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, If>) {
            ++c.ifs;
            for (const auto& arm : n.arms) count_nodes(arm.body, c);
            count_nodes(n.orelse, c);
          } else if constexpr (std::is_same_v<T, While>) {
            ++c.whiles;
            count_nodes(n.body, c);
          } else if constexpr (std::is_same_v<T, ForRange>) {
            ++c.fors;
            count_nodes(n.body, c);
          }
        },
        s->node);
  }
}

}  // namespace

bool family_constraints(LogicFamily family, const FunctionAst& f) {
  NodeCounts c;
  count_nodes(f.body, c);
  switch (family) {
    case LogicFamily::IfElse:
      return f.params.size() == 2 && c.ifs >= 1 && c.whiles == 0 && f.nesting_depth <= 1;
    case LogicFamily::IfElseLong:
      return f.params.size() == 2 && c.ifs >= 1 && c.whiles == 0 && f.nesting_depth >= 2;
    case LogicFamily::While:
      return f.params.size() == 2 && c.whiles >= 1;
    case LogicFamily::MultiR:
      return f.params.size() == 4 && c.fors >= 1;
  }
  return false;
}

}  // namespace cfkit
