#include "cfkit/harness.hpp"

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <sstream>

#include "cfkit/gsm.hpp"
#include "cfkit/parser.hpp"

namespace cfkit {

namespace {

// "a" | "a and b" | "a, b, and c"
std::string join_and(const std::vector<std::string>& items) {
  if (items.size() == 1) return items[0];
  if (items.size() == 2) return items[0] + " and " + items[1];
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i > 0) out += i + 1 == items.size() ? ", and " : ", ";
    out += items[i];
  }
  return out;
}

std::string eq(const std::string& name, Value v) {
  return name + " = " + std::to_string(v);
}

std::string render_code_prompt(const DatasetRecord& r, Mode mode) {
  // Param names come from the source itself so prompts survive a
  // write/read round trip without carrying a separate params field.
  FunctionAst ast = parse_function(r.source);
  const std::string& x = ast.params[0];

  std::string source = r.source;
  while (!source.empty() && (source.back() == '\n' || source.back() == ' ')) source.pop_back();

  std::ostringstream out;
  out << "You are a language model that reasons about code without using any external execution "
         "environment. Do not simply repeat the prompt. Instead, analyze the Python function "
         "below, provide step-by-step reasoning, and answer the "
      << mode_name(mode) << " question.\n\n";
  out << "Python function:\n" << source << "\n\n";

  out << "Observed call:\n";
  if (mode == Mode::Counterfactual) {
    out << "When this function was called with input " << eq(x, r.x0)
        << ", it produced the output y = " << r.y0 << ".\n\n";
    out << "Counterfactual query:\n";
    out << "If instead of " << eq(x, r.x0)
        << ", we had called this function with a different input value of " << eq(x, r.x_cf)
        << " while keeping everything else unchanged, what could the output y have been? "
           "Let's think step by step to get the answer.";
  } else {
    std::vector<std::string> inputs{eq(x, r.x0)};
    std::vector<std::string> kept;
    for (const auto& [name, value] : r.latents) {
      inputs.push_back(eq(name, value));
      kept.push_back(eq(name, value));
    }
    out << "When this function was called with inputs " << join_and(inputs)
        << ", it produced the output y = " << r.y0 << ".\n\n";
    out << "Interventional query:\n";
    out << "If instead of " << eq(x, r.x0) << ", we had called this function with "
        << eq(x, r.x_cf) << " while keeping " << join_and(kept)
        << " unchanged, what could the output y have been? "
           "Let's think step by step to get the answer.";
  }
  out << "\n\nRequired answer format:\n\\boxed{ans1, ans2, ans3}";
  return out.str();
}

}  // namespace

PromptRendering render_prompt(const DatasetRecord& r, Mode mode) {
  PromptRendering p;
  p.id = r.id;
  p.mode = mode;
  if (r.is_gsm) {
    const std::string& text = mode == Mode::Counterfactual ? r.text_cf : r.text_interv;
    p.text = text + "\n\nRequired answer format:\n\\boxed{amount}";
  } else {
    p.text = render_code_prompt(r, mode);
  }
  return p;
}

namespace {

// Integer token: optional sign, digits, nothing else but spaces around it.
bool parse_int_token(const std::string& token, Value* out) {
  std::size_t i = 0, end = token.size();
  while (i < end && token[i] == ' ') ++i;
  while (end > i && token[end - 1] == ' ') --end;
  if (i == end) return false;
  bool negative = false;
  if (token[i] == '+' || token[i] == '-') negative = token[i++] == '-';
  if (i == end) return false;
  Value v = 0;
  for (; i < end; ++i) {
    if (token[i] < '0' || token[i] > '9') return false;
    if (v > (INT64_MAX - (token[i] - '0')) / 10) return false;
    v = v * 10 + (token[i] - '0');
  }
  *out = negative ? -v : v;
  return true;
}

// Dollar token to cents: "$648.78", "1,234", "648.7", ".50". At most two
// decimal places; a third would be fabricated precision, so reject it.
bool parse_money_token(const std::string& token, Value* out) {
  std::string t;
  for (char c : token) {
    if (c == ' ' || c == '$' || c == ',') continue;
    t += c;
  }
  if (t.empty()) return false;
  bool negative = false;
  if (t[0] == '+' || t[0] == '-') {
    negative = t[0] == '-';
    t.erase(t.begin());
  }
  std::size_t dot = t.find('.');
  std::string whole = dot == std::string::npos ? t : t.substr(0, dot);
  std::string frac = dot == std::string::npos ? "" : t.substr(dot + 1);
  if (whole.empty() && frac.empty()) return false;
  if (frac.size() > 2) return false;
  Value cents = 0;
  for (char c : whole) {
    if (c < '0' || c > '9') return false;
    if (cents > (INT64_MAX / 10 - 9) / 10) return false;
    cents = cents * 10 + (c - '0');
  }
  cents *= 100;
  Value scale = 10;
  for (char c : frac) {
    if (c < '0' || c > '9') return false;
    cents += (c - '0') * scale;
    scale /= 10;
  }
  *out = negative ? -cents : cents;
  return true;
}

}  // namespace

Extraction extract_boxed(const std::string& response, bool gsm) {
  Extraction ex;
  std::size_t start = response.rfind("\\boxed{");
  if (start == std::string::npos) return ex;
  start += 7;
  std::size_t close = response.find('}', start);
  if (close == std::string::npos) return ex;
  std::string body = response.substr(start, close - start);

  std::vector<Value> values;
  std::size_t pos = 0;
  while (pos <= body.size()) {
    std::size_t comma = body.find(',', pos);
    // Money tokens may use thousands separators, so a comma followed by
    // exactly three digits stays inside the current token.
    if (gsm && comma != std::string::npos) {
      while (comma != std::string::npos && comma + 3 < body.size() &&
             isdigit(static_cast<unsigned char>(body[comma + 1])) &&
             isdigit(static_cast<unsigned char>(body[comma + 2])) &&
             isdigit(static_cast<unsigned char>(body[comma + 3])) &&
             (comma + 4 == body.size() || !isdigit(static_cast<unsigned char>(body[comma + 4])))) {
        comma = body.find(',', comma + 1);
      }
    }
    std::string token =
        comma == std::string::npos ? body.substr(pos) : body.substr(pos, comma - pos);
    Value v;
    if (gsm ? parse_money_token(token, &v) : parse_int_token(token, &v)) values.push_back(v);
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  if (values.empty()) return ex;
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  ex.ok = true;
  ex.values = std::move(values);
  return ex;
}

Score score(const std::vector<Value>& pred, const std::vector<Value>& truth) {
  std::size_t overlap = 0;
  std::size_t i = 0, j = 0;  // both sides sorted and unique
  while (i < pred.size() && j < truth.size()) {
    if (pred[i] == truth[j]) {
      ++overlap;
      ++i;
      ++j;
    } else if (pred[i] < truth[j]) {
      ++i;
    } else {
      ++j;
    }
  }
  Score s;
  s.em = pred == truth && !truth.empty() ? 1 : 0;
  std::size_t denom = pred.size() + truth.size();
  s.f1 = denom == 0 ? 0.0 : 2.0 * static_cast<double>(overlap) / static_cast<double>(denom);
  return s;
}

namespace {

std::vector<Value> truth_for(const DatasetRecord& r, Mode mode) {
  return mode == Mode::Counterfactual ? r.answers : std::vector<Value>{r.answer_interv};
}

}  // namespace

int reward(const DatasetRecord& r, const std::string& response, Mode mode) {
  Extraction ex = extract_boxed(response, r.is_gsm);
  if (!ex.ok) return 0;
  return score(ex.values, truth_for(r, mode)).em;
}

GradeReport grade_run(const std::vector<DatasetRecord>& records,
                      const std::map<std::string, std::vector<std::string>>& responses, int k,
                      Mode mode) {
  if (k <= 0) throw ConfigError("k must be positive");
  std::vector<std::string> missing;
  for (const auto& r : records) {
    if (!responses.count(r.id)) missing.push_back(r.id);
  }
  if (!missing.empty()) throw MissingResponses(std::move(missing));

  GradeReport report;
  report.k = k;
  report.instances = records.size();
  for (const auto& r : records) {
    const auto& texts = responses.at(r.id);
    if (texts.size() < static_cast<std::size_t>(k)) {
      throw ConfigError("id " + r.id + " has " + std::to_string(texts.size()) +
                        " responses, need k=" + std::to_string(k));
    }
    std::vector<Value> truth = truth_for(r, mode);
    InstanceScore inst;
    inst.id = r.id;
    double em_sum = 0.0, f1_sum = 0.0;
    for (int i = 0; i < k; ++i) {
      Extraction ex = extract_boxed(texts[i], r.is_gsm);
      SampleScore sample{0, 0.0, !ex.ok};
      if (ex.ok) {
        Score s = score(ex.values, truth);
        sample.em = s.em;
        sample.f1 = s.f1;
      }
      em_sum += sample.em;
      f1_sum += sample.f1;
      inst.samples.push_back(sample);
    }
    inst.em = em_sum / k;
    inst.f1 = f1_sum / k;
    report.per_instance.push_back(std::move(inst));
  }
  if (!report.per_instance.empty()) {
    double em = 0.0, f1 = 0.0;
    for (const auto& inst : report.per_instance) {
      em += inst.em;
      f1 += inst.f1;
    }
    report.em = em / static_cast<double>(report.per_instance.size());
    report.f1 = f1 / static_cast<double>(report.per_instance.size());
  }
  return report;
}

std::string report_jsonl(const GradeReport& report) {
  std::ostringstream out;
  for (const auto& inst : report.per_instance) {
    nlohmann::ordered_json j;
    j["id"] = inst.id;
    j["em"] = inst.em;
    j["f1"] = inst.f1;
    nlohmann::ordered_json samples = nlohmann::ordered_json::array();
    for (const auto& s : inst.samples) {
      samples.push_back({{"em", s.em}, {"f1", s.f1}, {"extraction_failed", s.extraction_failed}});
    }
    j["samples"] = std::move(samples);
    out << j.dump() << '\n';
  }
  return out.str();
}

std::string report_summary(const GradeReport& report) {
  std::ostringstream out;
  out.setf(std::ios::fixed);
  out.precision(1);
  out << "instances " << report.instances << ", k=" << report.k << ", avg@" << report.k
      << ": EM " << 100.0 * report.em << " / F1 " << 100.0 * report.f1 << "\n";
  return out.str();
}

}  // namespace cfkit
